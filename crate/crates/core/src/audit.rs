//! Post-hoc constraint check over a mission log.

use crate::engine::MissionResult;
use crate::types::MissionConfig;

pub const CONSERVATION_REL_TOL: f64 = 1e-6;
pub const SPEED_ABS_TOL: f64 = 1e-9;
const QUOTA_REL_TOL: f64 = 1e-12;

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Every constraint breach found in `result`, one message per breach.
pub fn audit_mission(config: &MissionConfig, result: &MissionResult) -> Vec<String> {
    let mut out = Vec::new();
    let n = config.sensors.len();
    let dt = config.slot_dt_s;
    let log = &result.slot_log;

    if log.len() > config.mission_slots {
        out.push(format!(
            "log has {} slots, mission allows {}",
            log.len(),
            config.mission_slots
        ));
    }

    let mut summed = vec![0.0; n];
    for (k, rec) in log.iter().enumerate() {
        if rec.slot != k {
            out.push(format!("slot[{k}] carries index {}", rec.slot));
        }
        if rec.snr_db.len() != n || rec.rate_bps.len() != n {
            out.push(format!("slot[{k}] vectors do not match {n} sensors"));
            continue;
        }
        if !(rec.downloaded_bits >= 0.0) {
            out.push(format!("slot[{k}] negative download"));
        }
        match rec.associated {
            // Single association: at most one sensor per slot.
            None if rec.downloaded_bits != 0.0 => {
                out.push(format!("slot[{k}] downloads without an association"));
            }
            None => {}
            Some(i) if i >= n => out.push(format!("slot[{k}] associates unknown sensor {i}")),
            Some(i) => {
                let cap = rec.rate_bps[i] * dt;
                if rec.downloaded_bits > cap {
                    out.push(format!(
                        "slot[{k}] capacity exceeded: {} > {cap}",
                        rec.downloaded_bits
                    ));
                }
                summed[i] += rec.downloaded_bits;
            }
        }
        if !config.geofence.contains(rec.uav_pos) {
            out.push(format!(
                "slot[{k}] position {:?} outside geofence",
                rec.uav_pos
            ));
        }
        if let Some(next) = log.get(k + 1) {
            let step = next.uav_pos.distance(rec.uav_pos);
            if step > config.v_max_mps * dt + SPEED_ABS_TOL {
                out.push(format!(
                    "slot[{k}] step {step} m exceeds v_max·Δt = {}",
                    config.v_max_mps * dt
                ));
            }
        }
    }
    if let Some(first) = log.first() {
        if result.mode != crate::types::MissionMode::TraceReplay
            && first.uav_pos != config.start_pos
        {
            out.push("slot[0] does not start at start_pos".into());
        }
    }

    for (i, s) in config.sensors.iter().enumerate() {
        let q = s.initial_quota_bits;
        let got = result
            .per_sensor_downloaded_bits
            .get(i)
            .copied()
            .unwrap_or(f64::NAN);
        let rem = result.remaining_bits.get(i).copied().unwrap_or(f64::NAN);
        if !rel_close(got, summed[i], 1e-12) {
            out.push(format!(
                "sensor[{i}] reported {got} bits, log sums to {}",
                summed[i]
            ));
        }
        if summed[i] > q * (1.0 + QUOTA_REL_TOL) {
            out.push(format!("sensor[{i}] quota exceeded: {} > {q}", summed[i]));
        }
        if !(rem >= 0.0) {
            out.push(format!("sensor[{i}] buffer underflow: {rem}"));
        }
        if !rel_close(summed[i] + rem, q, CONSERVATION_REL_TOL) {
            out.push(format!(
                "sensor[{i}] conservation broken: {} + {rem} != {q}",
                summed[i]
            ));
        }
    }
    let total: f64 = result.per_sensor_downloaded_bits.iter().sum();
    if total != result.total_downloaded_bits {
        out.push(format!(
            "total {} differs from per-sensor sum {total}",
            result.total_downloaded_bits
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelSource;
    use crate::engine::run_mission;
    use crate::geometry::Vec2;
    use crate::types::fixtures::four_sensor_config;

    #[test]
    fn clean_mission_passes() {
        let cfg = four_sensor_config();
        let r = run_mission(&cfg, &ChannelSource::Analytic).unwrap();
        assert_eq!(audit_mission(&cfg, &r), Vec::<String>::new());
    }

    #[test]
    fn tampered_logs_are_caught() {
        let cfg = four_sensor_config();
        let clean = run_mission(&cfg, &ChannelSource::Analytic).unwrap();

        let mut r = clean.clone();
        r.slot_log[3].uav_pos = Vec2::new(-50.0, 0.0);
        let v = audit_mission(&cfg, &r);
        assert!(v.iter().any(|m| m.contains("outside geofence")));
        assert!(v.iter().any(|m| m.contains("exceeds v_max")));

        let mut r = clean.clone();
        let k = r
            .slot_log
            .iter()
            .position(|s| s.associated.is_some())
            .unwrap();
        r.slot_log[k].downloaded_bits *= 10.0;
        let v = audit_mission(&cfg, &r);
        assert!(v.iter().any(|m| m.contains("capacity exceeded")));

        let mut r = clean;
        r.slot_log[0].associated = None;
        assert!(!audit_mission(&cfg, &r).is_empty());
    }
}
