//! Per-sensor SNR from the link budget (free-space model or a replayed
//! trace) and the SNR to rate lookup.

use crate::error::{MuleError, Result};
use crate::geometry::Vec2;
use crate::types::{LinkBudget, RateTable, SensorNode};

pub const SPEED_OF_LIGHT_MPS: f64 = 299_792_458.0;

/// Distances below this are treated as this (far-field model breaks down).
pub const MIN_DISTANCE_M: f64 = 1.0;

const DEFAULT_RATE_TABLE_CSV: &str = include_str!("../scenarios/rate_table_default.csv");

/// 16-row table after LTE CQI spectral efficiencies over a 10 MHz channel.
pub fn default_rate_table() -> RateTable {
    crate::io::rate_table::parse_rate_table(DEFAULT_RATE_TABLE_CSV.as_bytes())
        .expect("bundled rate table is valid")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLoss {
    pub db: f64,
    /// Set when the distance was clamped to `MIN_DISTANCE_M`.
    pub near_field: bool,
}

/// Free-space path loss 20·log10(4π·d·f/c).
pub fn free_space_path_loss(distance_m: f64, freq_hz: f64) -> PathLoss {
    let near_field = !(distance_m >= MIN_DISTANCE_M);
    let d = if near_field {
        MIN_DISTANCE_M
    } else {
        distance_m
    };
    PathLoss {
        db: 20.0 * (4.0 * std::f64::consts::PI * d * freq_hz / SPEED_OF_LIGHT_MPS).log10(),
        near_field,
    }
}

/// SNR for a given path loss; the PL-free part of the budget is exact.
pub fn snr_with_path_loss(budget: &LinkBudget, path_loss_db: f64) -> f64 {
    budget.tx_power_dbm + budget.tx_gain_dbi - path_loss_db + budget.rx_gain_dbi
        - budget.noise_power_dbm
}

/// Slant distance from a UAV at `altitude_m` over `uav_pos` to a ground sensor.
pub fn slant_distance(uav_pos: Vec2, altitude_m: f64, sensor_pos: Vec2) -> f64 {
    uav_pos.distance(sensor_pos).hypot(altitude_m)
}

pub fn snr_db_at_distance(distance_m: f64, budget: &LinkBudget) -> f64 {
    snr_with_path_loss(
        budget,
        free_space_path_loss(distance_m, budget.carrier_freq_hz).db,
    )
}

pub fn snr_db(uav_pos: Vec2, altitude_m: f64, sensor: &SensorNode, budget: &LinkBudget) -> f64 {
    snr_db_at_distance(slant_distance(uav_pos, altitude_m, sensor.position), budget)
}

/// Rate of the highest threshold not above `snr_db`; zero below the table.
pub fn rate_from_snr(snr_db: f64, table: &RateTable) -> f64 {
    let entries = table.entries();
    // Thresholds are inclusive lower bounds.
    let idx = entries.partition_point(|e| e.snr_db <= snr_db);
    if idx == 0 {
        0.0
    } else {
        entries[idx - 1].rate_bps
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceSample {
    pub timestamp_s: f64,
    pub uav_pos: Vec2,
    pub alt_m: f64,
    pub snr_db: Vec<f64>,
}

/// Time-stamped SNR measurements, replayed with a zero-order hold.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrTrace {
    samples: Vec<TraceSample>,
    sensor_count: usize,
}

impl SnrTrace {
    pub fn new(samples: Vec<TraceSample>) -> Result<Self> {
        let first = samples.first().ok_or_else(|| MuleError::Trace {
            row: 0,
            message: "trace has no samples".into(),
        })?;
        let sensor_count = first.snr_db.len();
        for (k, s) in samples.iter().enumerate() {
            if s.snr_db.len() != sensor_count {
                return Err(MuleError::Trace {
                    row: k + 1,
                    message: format!(
                        "expected {sensor_count} SNR columns, found {}",
                        s.snr_db.len()
                    ),
                });
            }
        }
        for (k, w) in samples.windows(2).enumerate() {
            if !(w[1].timestamp_s > w[0].timestamp_s) {
                return Err(MuleError::Trace {
                    row: k + 2,
                    message: format!("timestamps not strictly increasing at row {}", k + 2),
                });
            }
        }
        Ok(SnrTrace {
            samples,
            sensor_count,
        })
    }

    pub fn samples(&self) -> &[TraceSample] {
        &self.samples
    }

    pub fn sensor_count(&self) -> usize {
        self.sensor_count
    }

    pub fn last_timestamp(&self) -> f64 {
        self.samples[self.samples.len() - 1].timestamp_s
    }

    /// Sample held at `time_s`: the latest one at or before it, or the first
    /// sample for earlier times. Fails once `time_s` is more than one slot
    /// past the final sample.
    pub fn sample_at(&self, time_s: f64, slot_dt_s: f64) -> Result<&TraceSample> {
        let last = self.last_timestamp();
        if time_s > last + slot_dt_s {
            return Err(MuleError::TraceExhausted {
                time_s,
                last_s: last,
            });
        }
        let idx = self.samples.partition_point(|s| s.timestamp_s <= time_s);
        Ok(&self.samples[idx.saturating_sub(1)])
    }
}

pub fn trace_snr(trace: &SnrTrace, time_s: f64, sensor_id: usize, slot_dt_s: f64) -> Result<f64> {
    if sensor_id >= trace.sensor_count() {
        return Err(MuleError::Dimension(format!(
            "sensor {sensor_id} not in trace with {} sensors",
            trace.sensor_count()
        )));
    }
    Ok(trace.sample_at(time_s, slot_dt_s)?.snr_db[sensor_id])
}

/// Where per-slot SNR comes from.
#[derive(Debug, Clone, Default)]
pub enum ChannelSource {
    #[default]
    Analytic,
    Trace(SnrTrace),
}
