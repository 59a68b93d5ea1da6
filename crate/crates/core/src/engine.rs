//! The slotted mission loop. Each slot evaluates the channel at the current
//! position, asks the configured policy for an association, moves data out
//! of the chosen buffer and then moves the UAV.

use serde::Serialize;

use crate::channel::{self, ChannelSource, SnrTrace};
use crate::error::{MuleError, Result};
use crate::geometry::{closest_on_segment, Vec2};
use crate::policy::{self, HgadTracker, PolicyDecision};
use crate::trajectory::{self, UavState};
use crate::types::{
    validate_config, BufferState, HgadParams, MissionConfig, MissionMode, Policy, SlotRecord,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MissionResult {
    pub scenario: String,
    pub sensor_names: Vec<String>,
    pub rng_seed: u64,
    pub mode: MissionMode,
    pub policy: Policy,
    pub slot_dt_s: f64,
    pub slot_log: Vec<SlotRecord>,
    /// Σ_t y_{i,t} per sensor.
    pub per_sensor_downloaded_bits: Vec<f64>,
    /// Q_i at the end of the run.
    pub remaining_bits: Vec<f64>,
    pub total_downloaded_bits: f64,
    pub distance_traveled_m: f64,
    pub handover_count: usize,
    pub hover_slot_count: usize,
    pub completion_slot: Vec<Option<usize>>,
    /// Navigation targets in the order they were chosen (autonomous modes).
    pub visit_order: Vec<usize>,
    pub hgad_params: Vec<HgadParams>,
    /// Set when a replayed trace ran out before the mission ended.
    pub truncated: bool,
}

impl MissionResult {
    pub fn all_complete(&self) -> bool {
        self.remaining_bits.iter().all(|&r| r == 0.0)
    }
}

/// Q_i(t+1) = max(Q_i(t) - y, 0)
pub fn update_buffer(remaining_bits: f64, downloaded_this_slot: f64) -> f64 {
    (remaining_bits - downloaded_this_slot).max(0.0)
}

/// Bits moved in one slot: capacity and remaining quota, whichever binds.
pub fn slot_download(rate_bps: f64, dt_s: f64, remaining_bits: f64) -> f64 {
    (rate_bps * dt_s).min(remaining_bits).max(0.0)
}

/// Planned route for fixed modes: waypoints, then the end position.
pub fn fixed_route(config: &MissionConfig) -> Vec<Vec2> {
    let mut route = config.waypoints.clone();
    if route.last() != Some(&config.end_pos) {
        route.push(config.end_pos);
    }
    route
}

/// Fills in unset HGAD parameters.
///
/// The trigger defaults to the best rate sensor `i` can reach: along the
/// planned route in fixed mode (closest approach, since SNR falls with
/// distance), otherwise the top table rate. The reference rate defaults to
/// the trigger.
pub fn resolve_hgad_params(config: &MissionConfig, source: &ChannelSource) -> Vec<HgadParams> {
    let top = config.rate_table.max_rate_bps();
    let lowest_positive = config
        .rate_table
        .entries()
        .iter()
        .map(|e| e.rate_bps)
        .find(|&r| r > 0.0)
        .unwrap_or(top);
    let mut path = vec![config.start_pos];
    path.extend(fixed_route(config));

    config
        .sensors
        .iter()
        .zip(&config.hgad)
        .map(|(sensor, s)| {
            let gamma = s.gamma_bps.unwrap_or_else(|| {
                let reachable = match (source, config.mode.is_fixed()) {
                    (ChannelSource::Analytic, true) => {
                        let d = path
                            .windows(2)
                            .map(|w| closest_on_segment(sensor.position, w[0], w[1]))
                            .map(|p| p.distance(sensor.position))
                            .fold(f64::INFINITY, f64::min);
                        let slant = d.hypot(config.uav_altitude_m);
                        channel::rate_from_snr(
                            channel::snr_db_at_distance(slant, &config.link_budget),
                            &config.rate_table,
                        )
                    }
                    _ => top,
                };
                // A sensor the route never reaches gets an unreachable trigger
                // rather than a zero one that would fire everywhere.
                if reachable > 0.0 {
                    reachable
                } else {
                    lowest_positive
                }
            });
            let r_max = s.r_max_bps.unwrap_or(if gamma > 0.0 { gamma } else { top });
            HgadParams {
                gamma_bps: gamma,
                t_max_hover_s: s.t_max_hover_s,
                r_max_bps: r_max,
            }
        })
        .collect()
}

struct ChannelView<'a> {
    config: &'a MissionConfig,
    trace: Option<&'a SnrTrace>,
}

impl ChannelView<'_> {
    fn snr(&self, pos: Vec2, time_s: f64) -> Result<Vec<f64>> {
        match self.trace {
            None => Ok(self
                .config
                .sensors
                .iter()
                .map(|s| {
                    channel::snr_db(pos, self.config.uav_altitude_m, s, &self.config.link_budget)
                })
                .collect()),
            Some(tr) => Ok(tr.sample_at(time_s, self.config.slot_dt_s)?.snr_db.clone()),
        }
    }
}

fn count_handovers(log: &[SlotRecord]) -> usize {
    let mut last = None;
    let mut count = 0;
    for r in log {
        if let Some(i) = r.associated {
            if matches!(last, Some(j) if j != i) {
                count += 1;
            }
            last = Some(i);
        }
    }
    count
}

/// Runs one mission to completion, expiry, or trace exhaustion.
pub fn run_mission(config: &MissionConfig, source: &ChannelSource) -> Result<MissionResult> {
    let violations = validate_config(config);
    if !violations.is_empty() {
        return Err(MuleError::Config(violations));
    }
    let trace = match source {
        ChannelSource::Analytic => None,
        ChannelSource::Trace(tr) => {
            if tr.sensor_count() != config.sensors.len() {
                return Err(MuleError::Trace {
                    row: 1,
                    message: format!(
                        "trace has {} SNR columns for {} sensors",
                        tr.sensor_count(),
                        config.sensors.len()
                    ),
                });
            }
            Some(tr)
        }
    };
    if config.mode == MissionMode::TraceReplay && trace.is_none() {
        return Err(MuleError::Config(vec![
            "trace_replay mode needs a trace".into()
        ]));
    }

    let n = config.sensors.len();
    let dt = config.slot_dt_s;
    let policy = config.policy();
    let params = resolve_hgad_params(config, source);
    let route = fixed_route(config);
    let view = ChannelView { config, trace };
    let v_max = config.v_max_mps;
    let v_cruise = config.v_cruise();

    let mut buffers: Vec<BufferState> = config
        .sensors
        .iter()
        .map(|s| BufferState::new(s.initial_quota_bits))
        .collect();
    let mut tracker = HgadTracker::new(n);
    let mut uav = UavState::at(config.start_pos);
    if let Some(tr) = trace.filter(|_| config.mode == MissionMode::TraceReplay) {
        uav.pos = tr.sample_at(0.0, dt)?.uav_pos;
    }
    let mut nav_target: Option<usize> = None;
    let mut visit_order = Vec::new();
    let mut completion_slot = vec![None; n];
    let mut per_sensor = vec![0.0; n];
    let mut log = Vec::with_capacity(config.mission_slots);
    let mut distance = 0.0;
    let mut truncated = false;

    for slot in 0..config.mission_slots {
        let time_s = slot as f64 * dt;
        let done = buffers.iter().all(|b| !b.has_data());
        if done && (config.mode == MissionMode::TraceReplay || uav.pos == config.end_pos) {
            log::info!("{}: all buffers drained, mission ends at slot {slot}", config.name);
            break;
        }

        let snr = match view.snr(uav.pos, time_s) {
            Ok(s) => s,
            Err(MuleError::TraceExhausted { time_s, last_s }) => {
                log::warn!("{}: trace ends at {last_s} s, stopping at {time_s} s", config.name);
                truncated = true;
                break;
            }
            Err(e) => return Err(e),
        };
        let rates: Vec<f64> = snr
            .iter()
            .map(|&s| channel::rate_from_snr(s, &config.rate_table))
            .collect();

        let decision = if done {
            PolicyDecision::complete()
        } else {
            match policy {
                Policy::Greedy => match policy::greedy_select(&snr, &buffers) {
                    Some(i) => PolicyDecision::associate(i),
                    None => PolicyDecision::complete(),
                },
                Policy::Hgad => tracker.step(&snr, &rates, &buffers, slot, &params, dt),
            }
        };

        let mut downloaded = 0.0;
        if let Some(i) = decision.associate {
            let b = &mut buffers[i];
            downloaded = slot_download(rates[i], dt, b.remaining_bits);
            b.remaining_bits = update_buffer(b.remaining_bits, downloaded);
            b.downloaded_bits += downloaded;
            per_sensor[i] += downloaded;
            if b.remaining_bits == 0.0 && !b.completed {
                b.completed = true;
                completion_slot[i] = Some(slot);
            }
        }
        let hovering = decision.request_hover;
        uav.hovering = hovering;

        // Where to go next and how fast.
        let all_done = buffers.iter().all(|b| !b.has_data());
        let next = if config.mode == MissionMode::TraceReplay {
            let tr = trace.expect("checked above");
            let next_pos = match tr.sample_at(time_s + dt, dt) {
                Ok(s) => s.uav_pos,
                Err(_) => uav.pos,
            };
            let mut s = uav;
            s.speed_mps = next_pos.distance(uav.pos) / dt;
            s.pos = next_pos;
            s
        } else if decision.mission_complete || all_done {
            trajectory::advance_autonomous(uav, config.end_pos, v_max, dt, &config.geofence)
        } else if config.mode.is_fixed() {
            let speed = match policy {
                Policy::Greedy => v_cruise,
                Policy::Hgad => {
                    let (rate, gamma) = decision
                        .associate
                        .map(|i| (rates[i], params[i].gamma_bps))
                        .unwrap_or((0.0, f64::INFINITY));
                    trajectory::speed_command(rate, gamma, v_max, v_cruise, hovering)
                }
            };
            trajectory::advance_fixed(uav, &route, speed, dt)?
        } else {
            let (target, speed) = match policy {
                Policy::Greedy => (decision.associate, v_cruise),
                Policy::Hgad => {
                    if nav_target.is_none_or(|t| !buffers[t].has_data()) {
                        nav_target = trajectory::autonomous_next_target(&buffers);
                    }
                    let speed = nav_target.map_or(v_max, |t| {
                        trajectory::speed_command(
                            rates[t],
                            params[t].gamma_bps,
                            v_max,
                            v_cruise,
                            hovering,
                        )
                    });
                    (nav_target, speed)
                }
            };
            if let Some(t) = target {
                if visit_order.last() != Some(&t) {
                    visit_order.push(t);
                }
            }
            let goal = target.map_or(config.end_pos, |t| config.sensors[t].position);
            trajectory::advance_autonomous(uav, goal, speed, dt, &config.geofence)
        };

        log.push(SlotRecord {
            slot,
            time_s,
            uav_pos: uav.pos,
            associated: decision.associate,
            downloaded_bits: downloaded,
            snr_db: snr,
            rate_bps: rates,
            hovering,
            speed_mps: next.speed_mps,
        });
        distance += next.pos.distance(uav.pos);
        uav = next;
    }

    let total = per_sensor.iter().sum();
    Ok(MissionResult {
        scenario: config.name.clone(),
        sensor_names: config.sensors.iter().map(|s| s.name.clone()).collect(),
        rng_seed: config.rng_seed,
        mode: config.mode,
        policy,
        slot_dt_s: dt,
        handover_count: count_handovers(&log),
        hover_slot_count: log.iter().filter(|r| r.hovering).count(),
        slot_log: log,
        per_sensor_downloaded_bits: per_sensor,
        remaining_bits: buffers.iter().map(|b| b.remaining_bits).collect(),
        total_downloaded_bits: total,
        distance_traveled_m: distance,
        completion_slot,
        visit_order,
        hgad_params: params,
        truncated,
    })
}
