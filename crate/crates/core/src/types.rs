//! Domain types shared by every stage of the simulator, plus configuration
//! validation. Nothing in here advances simulated time.

use serde::{Deserialize, Serialize};

use crate::geometry::{ConvexPolygon, Vec2};

pub const BITS_PER_MBIT: f64 = 1e6;

/// Link budget terms of the per-sensor SNR model. All gains and powers in
/// dB units; the path loss is computed from geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkBudget {
    /// Sensor transmit power P_tx.
    pub tx_power_dbm: f64,
    /// Sensor antenna gain G_tx.
    pub tx_gain_dbi: f64,
    /// UAV antenna gain G_rx.
    pub rx_gain_dbi: f64,
    /// Receiver noise power N_0.
    pub noise_power_dbm: f64,
    pub carrier_freq_hz: f64,
}

impl LinkBudget {
    /// P_tx + G_tx + G_rx - N_0: the SNR before path loss.
    pub fn budget_db(&self) -> f64 {
        self.tx_power_dbm + self.tx_gain_dbi + self.rx_gain_dbi - self.noise_power_dbm
    }

    fn violations(&self, out: &mut Vec<String>) {
        let fields = [
            ("tx_power_dbm", self.tx_power_dbm),
            ("tx_gain_dbi", self.tx_gain_dbi),
            ("rx_gain_dbi", self.rx_gain_dbi),
            ("noise_power_dbm", self.noise_power_dbm),
            ("carrier_freq_hz", self.carrier_freq_hz),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                out.push(format!("link_budget.{name} must be finite"));
            }
        }
        if !(self.carrier_freq_hz > 0.0) {
            out.push("link_budget.carrier_freq_hz must be positive".into());
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateEntry {
    pub snr_db: f64,
    pub rate_bps: f64,
}

/// Monotone SNR-threshold to data-rate lookup. Below the first threshold the
/// rate is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct RateTable {
    entries: Vec<RateEntry>,
}

impl RateTable {
    pub fn new(entries: Vec<RateEntry>) -> Result<Self, String> {
        if entries.is_empty() {
            return Err("rate table needs at least one entry".into());
        }
        for (k, e) in entries.iter().enumerate() {
            if !e.snr_db.is_finite() || !e.rate_bps.is_finite() {
                return Err(format!("rate table row {k} is not finite"));
            }
            if e.rate_bps < 0.0 {
                return Err(format!("rate table row {k} has a negative rate"));
            }
        }
        for (k, w) in entries.windows(2).enumerate() {
            if w[1].snr_db <= w[0].snr_db {
                return Err(format!(
                    "rate table thresholds must be strictly increasing (row {})",
                    k + 1
                ));
            }
            if w[1].rate_bps < w[0].rate_bps {
                return Err(format!(
                    "rate table rates must be non-decreasing (row {})",
                    k + 1
                ));
            }
        }
        Ok(RateTable { entries })
    }

    pub fn entries(&self) -> &[RateEntry] {
        &self.entries
    }

    pub fn max_rate_bps(&self) -> f64 {
        self.entries.last().map(|e| e.rate_bps).unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensorNode {
    pub id: usize,
    pub name: String,
    /// s_i
    pub position: Vec2,
    /// Q_i
    pub initial_quota_bits: f64,
}

/// Remaining and delivered data of one sensor buffer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BufferState {
    pub initial_bits: f64,
    /// Q_i(t)
    pub remaining_bits: f64,
    /// D_i(t)
    pub downloaded_bits: f64,
    /// Membership in the completed set C(t).
    pub completed: bool,
}

impl BufferState {
    pub fn new(quota_bits: f64) -> Self {
        BufferState {
            initial_bits: quota_bits,
            remaining_bits: quota_bits,
            downloaded_bits: 0.0,
            completed: quota_bits <= 0.0,
        }
    }

    pub fn has_data(&self) -> bool {
        self.remaining_bits > 0.0
    }
}

/// Per-sensor HGAD knobs as written in a scenario. Unset values are derived
/// when a mission starts.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HgadSettings {
    /// Hover trigger threshold gamma_i.
    pub gamma_bps: Option<f64>,
    /// Hover cap T_max_i.
    pub t_max_hover_s: f64,
    /// Reference rate R_max_i used to size a hover.
    pub r_max_bps: Option<f64>,
}

/// Fully resolved HGAD parameters for one sensor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HgadParams {
    pub gamma_bps: f64,
    pub t_max_hover_s: f64,
    pub r_max_bps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    Greedy,
    Hgad,
}

impl Policy {
    pub fn name(self) -> &'static str {
        match self {
            Policy::Greedy => "greedy",
            Policy::Hgad => "hgad",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MissionMode {
    FixedGreedy,
    FixedHgad,
    AutoGreedy,
    AutoHgad,
    /// UAV positions replayed from a recorded trace.
    TraceReplay,
}

impl MissionMode {
    pub fn is_fixed(self) -> bool {
        matches!(self, MissionMode::FixedGreedy | MissionMode::FixedHgad)
    }

    pub fn is_autonomous(self) -> bool {
        matches!(self, MissionMode::AutoGreedy | MissionMode::AutoHgad)
    }

    /// Same trajectory kind, different association policy. Trace replay keeps
    /// its mode; its policy lives in `MissionConfig::replay_policy`.
    pub fn with_policy(self, policy: Policy) -> Self {
        match (self, policy) {
            (MissionMode::FixedGreedy | MissionMode::FixedHgad, Policy::Greedy) => {
                MissionMode::FixedGreedy
            }
            (MissionMode::FixedGreedy | MissionMode::FixedHgad, Policy::Hgad) => {
                MissionMode::FixedHgad
            }
            (MissionMode::AutoGreedy | MissionMode::AutoHgad, Policy::Greedy) => {
                MissionMode::AutoGreedy
            }
            (MissionMode::AutoGreedy | MissionMode::AutoHgad, Policy::Hgad) => {
                MissionMode::AutoHgad
            }
            (MissionMode::TraceReplay, _) => MissionMode::TraceReplay,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MissionConfig {
    pub name: String,
    pub sensors: Vec<SensorNode>,
    pub link_budget: LinkBudget,
    pub rate_table: RateTable,
    pub geofence: ConvexPolygon,
    /// Planned route for fixed modes. The UAV flies start -> waypoints -> end.
    pub waypoints: Vec<Vec2>,
    pub start_pos: Vec2,
    pub end_pos: Vec2,
    pub v_max_mps: f64,
    /// Normal flight speed; defaults to half of `v_max_mps`.
    pub v_cruise_mps: Option<f64>,
    pub slot_dt_s: f64,
    pub mission_slots: usize,
    /// Fixed flight altitude, folded into the path-loss distance only.
    pub uav_altitude_m: f64,
    pub mode: MissionMode,
    pub replay_policy: Policy,
    pub hgad: Vec<HgadSettings>,
    pub rng_seed: u64,
}

impl MissionConfig {
    pub fn v_cruise(&self) -> f64 {
        self.v_cruise_mps.unwrap_or(self.v_max_mps / 2.0)
    }

    pub fn mission_duration_s(&self) -> f64 {
        self.mission_slots as f64 * self.slot_dt_s
    }

    pub fn policy(&self) -> Policy {
        match self.mode {
            MissionMode::FixedGreedy | MissionMode::AutoGreedy => Policy::Greedy,
            MissionMode::FixedHgad | MissionMode::AutoHgad => Policy::Hgad,
            MissionMode::TraceReplay => self.replay_policy,
        }
    }

    pub fn quotas_bits(&self) -> Vec<f64> {
        self.sensors.iter().map(|s| s.initial_quota_bits).collect()
    }

    /// Copy with the association policy swapped, keeping geometry and quotas.
    pub fn with_policy(&self, policy: Policy) -> Self {
        let mut cfg = self.clone();
        cfg.mode = cfg.mode.with_policy(policy);
        if cfg.mode == MissionMode::TraceReplay {
            cfg.replay_policy = policy;
        }
        cfg
    }
}

/// One row of the mission log.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlotRecord {
    pub slot: usize,
    pub time_s: f64,
    /// r_t
    pub uav_pos: Vec2,
    /// i*(t); `None` when idle.
    pub associated: Option<usize>,
    /// y_{i*,t}
    pub downloaded_bits: f64,
    pub snr_db: Vec<f64>,
    /// R_i(r_t)
    pub rate_bps: Vec<f64>,
    pub hovering: bool,
    /// Speed commanded for the move from r_t to r_{t+1}.
    pub speed_mps: f64,
}

/// Where each model quantity lives in this crate.
pub const MODEL_SYMBOLS: &[(&str, &str)] = &[
    ("P_tx", "LinkBudget::tx_power_dbm"),
    ("G_tx", "LinkBudget::tx_gain_dbi"),
    ("G_rx", "LinkBudget::rx_gain_dbi"),
    ("N_0", "LinkBudget::noise_power_dbm"),
    ("PL", "channel::free_space_path_loss"),
    ("f", "RateTable (channel::rate_from_snr)"),
    ("s_i", "SensorNode::position"),
    ("Q_i", "SensorNode::initial_quota_bits"),
    ("Q_i(t)", "BufferState::remaining_bits"),
    ("D_i(t)", "BufferState::downloaded_bits"),
    ("Δt", "MissionConfig::slot_dt_s"),
    ("T", "MissionConfig::mission_slots"),
    ("v_max", "MissionConfig::v_max_mps"),
    ("r_start", "MissionConfig::start_pos"),
    ("r_end", "MissionConfig::end_pos"),
    ("𝒢", "MissionConfig::geofence"),
    ("r_t", "SlotRecord::uav_pos"),
    ("x_{i,t}", "SlotRecord::associated"),
    ("y_{i,t}", "SlotRecord::downloaded_bits"),
    ("γ_i", "HgadParams::gamma_bps"),
    ("T_max_i", "HgadParams::t_max_hover_s"),
    ("R_max_i", "HgadParams::r_max_bps"),
    (
        "D_rem_i",
        "BufferState::remaining_bits (policy::hover_duration argument)",
    ),
    ("T_hover_i", "policy::hover_duration"),
    ("i*(t)", "SlotRecord::associated"),
    ("C(t)", "BufferState::completed"),
];

/// Every broken invariant of `config`, each with a readable path. Empty means
/// the configuration is valid.
pub fn validate_config(config: &MissionConfig) -> Vec<String> {
    let mut out = Vec::new();
    let fence = &config.geofence;

    if config.sensors.is_empty() {
        out.push("sensors must not be empty".into());
    }
    for (k, s) in config.sensors.iter().enumerate() {
        if s.id != k {
            out.push(format!("sensor[{k}].id must be {k}, got {}", s.id));
        }
        if !(s.initial_quota_bits > 0.0) || !s.initial_quota_bits.is_finite() {
            out.push(format!("sensor[{k}].initial_quota_bits must be positive"));
        }
        if !s.position.is_finite() || !fence.contains(s.position) {
            out.push(format!("sensor[{k}] outside geofence"));
        }
    }

    config.link_budget.violations(&mut out);
    if let Err(e) = RateTable::new(config.rate_table.entries().to_vec()) {
        out.push(e);
    }

    for (k, w) in config.waypoints.iter().enumerate() {
        if !w.is_finite() || !fence.contains(*w) {
            out.push(format!("waypoint[{k}] outside geofence"));
        }
    }
    if config.mode.is_fixed() && config.waypoints.is_empty() {
        out.push("waypoints must not be empty in fixed mode".into());
    }
    if !config.start_pos.is_finite() || !fence.contains(config.start_pos) {
        out.push("start_pos outside geofence".into());
    }
    if !config.end_pos.is_finite() || !fence.contains(config.end_pos) {
        out.push("end_pos outside geofence".into());
    }

    if !(config.v_max_mps > 0.0) || !config.v_max_mps.is_finite() {
        out.push("v_max must be positive".into());
    }
    if let Some(v) = config.v_cruise_mps {
        if !(v > 0.0 && v <= config.v_max_mps) {
            out.push("v_cruise must lie in (0, v_max]".into());
        }
    }
    if !(config.slot_dt_s > 0.0) || !config.slot_dt_s.is_finite() {
        out.push("slot_dt must be positive".into());
    }
    if config.mission_slots == 0 {
        out.push("mission_slots must be positive".into());
    }
    if !(config.uav_altitude_m >= 0.0) || !config.uav_altitude_m.is_finite() {
        out.push("uav_altitude_m must be finite and non-negative".into());
    }

    if config.hgad.len() != config.sensors.len() {
        out.push(format!(
            "hgad has {} entries for {} sensors",
            config.hgad.len(),
            config.sensors.len()
        ));
    }
    for (k, h) in config.hgad.iter().enumerate() {
        if let Some(g) = h.gamma_bps {
            if !(g >= 0.0) {
                out.push(format!("sensor[{k}].hgad.gamma must be non-negative"));
            }
        }
        if !(h.t_max_hover_s > 0.0) || !h.t_max_hover_s.is_finite() {
            out.push(format!("sensor[{k}].hgad.t_max_hover must be positive"));
        }
        if let Some(r) = h.r_max_bps {
            if !(r > 0.0) {
                out.push(format!("sensor[{k}].hgad.r_max must be positive"));
            }
        }
    }
    out
}
