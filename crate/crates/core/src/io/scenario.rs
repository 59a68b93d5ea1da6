//! JSON scenario files. Data quantities are written in the file's data unit
//! (Mbit unless stated otherwise) and converted to bits on load.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::channel::default_rate_table;
use crate::error::{MuleError, Result};
use crate::geometry::{ConvexPolygon, Vec2};
use crate::types::{
    validate_config, HgadSettings, LinkBudget, MissionConfig, MissionMode, Policy, SensorNode,
    BITS_PER_MBIT,
};

pub const DEFAULT_T_MAX_HOVER_S: f64 = 30.0;

#[derive(Debug, Clone, Copy, Default, Deserialize)]
enum DataUnit {
    #[default]
    #[serde(rename = "Mbit")]
    Mbit,
    #[serde(rename = "bit")]
    Bit,
}

impl DataUnit {
    fn bits(self) -> f64 {
        match self {
            DataUnit::Mbit => BITS_PER_MBIT,
            DataUnit::Bit => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
enum DistanceUnit {
    #[default]
    #[serde(rename = "m")]
    Meter,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Units {
    #[serde(default)]
    data: DataUnit,
    #[serde(default)]
    #[allow(dead_code)]
    distance: DistanceUnit,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SensorHgad {
    /// Trigger rate, data unit per second.
    gamma: Option<f64>,
    t_max_hover_s: Option<f64>,
    r_max: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SensorEntry {
    name: String,
    position: Vec2,
    quota: f64,
    #[serde(default)]
    hgad: SensorHgad,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct HgadDefaults {
    #[serde(default = "default_t_max")]
    t_max_hover_s: f64,
}

impl Default for HgadDefaults {
    fn default() -> Self {
        HgadDefaults {
            t_max_hover_s: DEFAULT_T_MAX_HOVER_S,
        }
    }
}

fn default_t_max() -> f64 {
    DEFAULT_T_MAX_HOVER_S
}

fn default_dt() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    name: String,
    mode: MissionMode,
    #[serde(default)]
    replay_policy: Option<Policy>,
    #[serde(default)]
    units: Units,
    mission_time_s: f64,
    #[serde(default = "default_dt")]
    slot_dt_s: f64,
    v_max_mps: f64,
    #[serde(default)]
    v_cruise_mps: Option<f64>,
    #[serde(default)]
    uav_altitude_m: f64,
    #[serde(default)]
    rng_seed: u64,
    link_budget: LinkBudget,
    #[serde(default)]
    rate_table_csv: Option<PathBuf>,
    geofence: Vec<Vec2>,
    start_pos: Vec2,
    end_pos: Vec2,
    #[serde(default)]
    waypoints: Vec<Vec2>,
    sensors: Vec<SensorEntry>,
    #[serde(default)]
    hgad_defaults: HgadDefaults,
    #[serde(default)]
    trace: Option<PathBuf>,
}

/// A loaded scenario: the validated configuration plus the trace it names,
/// resolved against the scenario's directory.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: MissionConfig,
    pub trace: Option<PathBuf>,
}

fn parse_error(path: &Path, err: serde_path_to_error::Error<serde_json::Error>) -> MuleError {
    let at = err.path().to_string();
    let inner = err.into_inner();
    let (line, column) = (inner.line(), inner.column());
    let mut message = inner.to_string();
    // serde_json appends its own location; it is reported separately.
    if let Some(cut) = message.rfind(" at line ") {
        message.truncate(cut);
    }
    if at != "." && !at.is_empty() {
        message = format!("{at}: {message}");
    }
    MuleError::Parse {
        path: path.to_path_buf(),
        line,
        column,
        message,
    }
}

/// Parses scenario JSON text. Relative paths inside the file resolve against
/// `base_dir`.
pub fn parse_scenario(text: &str, path: &Path, base_dir: &Path) -> Result<Scenario> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: ScenarioFile =
        serde_path_to_error::deserialize(de).map_err(|e| parse_error(path, e))?;
    let unit = file.units.data.bits();

    let mut violations = Vec::new();
    let geofence = match ConvexPolygon::new(file.geofence.clone()) {
        Ok(g) => Some(g),
        Err(e) => {
            violations.push(format!("geofence: {e}"));
            None
        }
    };
    let steps = file.mission_time_s / file.slot_dt_s;
    let mission_slots = steps.round();
    if !(file.mission_time_s > 0.0 && file.slot_dt_s > 0.0) {
        violations.push("mission_time_s and slot_dt_s must be positive".into());
    } else if (mission_slots - steps).abs() > 1e-9 * steps.max(1.0) {
        violations.push(format!(
            "mission_time_s {} is not a whole number of {} s slots",
            file.mission_time_s, file.slot_dt_s
        ));
    }
    let rate_table = match &file.rate_table_csv {
        None => default_rate_table(),
        Some(p) => match crate::io::rate_table::load_rate_table(&base_dir.join(p)) {
            Ok(t) => t,
            Err(e) => {
                violations.push(format!("rate_table_csv: {e}"));
                default_rate_table()
            }
        },
    };
    let Some(geofence) = geofence.filter(|_| violations.is_empty()) else {
        return Err(MuleError::Config(violations));
    };

    let sensors = file
        .sensors
        .iter()
        .enumerate()
        .map(|(id, s)| SensorNode {
            id,
            name: s.name.clone(),
            position: s.position,
            initial_quota_bits: s.quota * unit,
        })
        .collect();
    let hgad = file
        .sensors
        .iter()
        .map(|s| HgadSettings {
            gamma_bps: s.hgad.gamma.map(|g| g * unit),
            t_max_hover_s: s
                .hgad
                .t_max_hover_s
                .unwrap_or(file.hgad_defaults.t_max_hover_s),
            r_max_bps: s.hgad.r_max.map(|r| r * unit),
        })
        .collect();

    let config = MissionConfig {
        name: file.name,
        sensors,
        link_budget: file.link_budget,
        rate_table,
        geofence,
        waypoints: file.waypoints,
        start_pos: file.start_pos,
        end_pos: file.end_pos,
        v_max_mps: file.v_max_mps,
        v_cruise_mps: file.v_cruise_mps,
        slot_dt_s: file.slot_dt_s,
        mission_slots: mission_slots as usize,
        uav_altitude_m: file.uav_altitude_m,
        mode: file.mode,
        replay_policy: file.replay_policy.unwrap_or(Policy::Hgad),
        hgad,
        rng_seed: file.rng_seed,
    };
    let violations = validate_config(&config);
    if !violations.is_empty() {
        return Err(MuleError::Config(violations));
    }
    Ok(Scenario {
        config,
        trace: file.trace.map(|p| base_dir.join(p)),
    })
}

pub fn load_scenario_file(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| MuleError::io(path, e))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_scenario(&text, path, base)
}

/// Parsed, unit-converted and validated mission configuration.
pub fn load_scenario(path: &Path) -> Result<MissionConfig> {
    load_scenario_file(path).map(|s| s.config)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "name": "mini",
        "mode": "fixed_greedy",
        "mission_time_s": 20,
        "v_max_mps": 5,
        "link_budget": {"tx_power_dbm": 0, "tx_gain_dbi": 0, "rx_gain_dbi": 0,
                        "noise_power_dbm": -90, "carrier_freq_hz": 3e9},
        "geofence": [[0,0],[100,0],[100,100],[0,100]],
        "start_pos": [0,0], "end_pos": [0,0],
        "waypoints": [[50,50]],
        "sensors": [{"name": "A", "position": [50,50], "quota": 1.5}]
    }"#;

    fn parse(text: &str) -> Result<Scenario> {
        parse_scenario(text, Path::new("mini.json"), Path::new("."))
    }

    #[test]
    fn minimal_scenario_loads_with_defaults() {
        let s = parse(MINIMAL).unwrap();
        let c = &s.config;
        assert_eq!(c.mission_slots, 20);
        assert_eq!(c.slot_dt_s, 1.0);
        assert_eq!(c.sensors[0].initial_quota_bits, 1.5e6);
        assert_eq!(c.hgad[0].t_max_hover_s, DEFAULT_T_MAX_HOVER_S);
        assert_eq!(c.rate_table, default_rate_table());
        assert!(s.trace.is_none());
    }

    #[test]
    fn missing_field_names_its_path() {
        let text = MINIMAL.replace(r#""quota": 1.5"#, r#""quotaa": 1.5"#);
        let err = parse(&text).unwrap_err().to_string();
        assert!(err.contains("sensors[0]"), "{err}");
        let text = MINIMAL.replace(r#""v_max_mps": 5,"#, "");
        let err = parse(&text).unwrap_err().to_string();
        assert!(err.contains("v_max_mps"), "{err}");
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn fractional_slot_count_is_rejected() {
        let text = MINIMAL.replace(r#""mission_time_s": 20"#, r#""mission_time_s": 20.5"#);
        assert!(matches!(parse(&text), Err(MuleError::Config(_))));
    }

    #[test]
    fn bit_units_are_not_scaled() {
        let text = MINIMAL.replace(
            r#""name": "mini","#,
            r#""name": "mini", "units": {"data": "bit"},"#,
        );
        assert_eq!(
            parse(&text).unwrap().config.sensors[0].initial_quota_bits,
            1.5
        );
    }

    #[test]
    fn invalid_geometry_lists_violations() {
        let text = MINIMAL.replace(
            r#""waypoints": [[50,50]]"#,
            r#""waypoints": [[50,50],[10,10],[150,50]]"#,
        );
        match parse(&text) {
            Err(MuleError::Config(v)) => assert_eq!(v, vec!["waypoint[2] outside geofence"]),
            other => panic!("unexpected {other:?}"),
        }
    }
}
