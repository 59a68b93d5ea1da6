//! Exact association schedule for a frozen position sequence, by exhaustive
//! enumeration of every (sensor or idle) choice per slot.
//!
//! Only desk-scale instances are accepted. The enumeration splits on the
//! first two slots, and with the `parallel` feature those subtrees are
//! solved on the rayon pool; both paths return the same schedule.

use serde::Serialize;

use crate::engine::MissionResult;
use crate::error::{MuleError, Result};

pub const MAX_SLOTS: usize = 12;
pub const MAX_SENSORS: usize = 4;

/// Bits available per slot and sensor, cap[t][i] = R_i(r_t)·Δt.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityMatrix {
    slots: usize,
    sensors: usize,
    cap_bits: Vec<f64>,
}

impl CapacityMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let sensors = rows.first().map_or(0, Vec::len);
        let mut cap_bits = Vec::with_capacity(rows.len() * sensors);
        for (t, row) in rows.iter().enumerate() {
            if row.len() != sensors {
                return Err(MuleError::Dimension(format!(
                    "capacity row {t} has {} entries, expected {sensors}",
                    row.len()
                )));
            }
            if let Some(v) = row.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
                return Err(MuleError::Dimension(format!(
                    "capacity row {t} has invalid entry {v}"
                )));
            }
            cap_bits.extend_from_slice(row);
        }
        Ok(CapacityMatrix {
            slots: rows.len(),
            sensors,
            cap_bits,
        })
    }

    /// Capacities seen by a finished mission along its own trajectory.
    pub fn from_mission(result: &MissionResult) -> Result<Self> {
        CapacityMatrix::new(
            result
                .slot_log
                .iter()
                .map(|r| {
                    r.rate_bps
                        .iter()
                        .map(|&rate| rate * result.slot_dt_s)
                        .collect()
                })
                .collect(),
        )
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn sensors(&self) -> usize {
        self.sensors
    }

    pub fn get(&self, slot: usize, sensor: usize) -> f64 {
        self.cap_bits[slot * self.sensors + sensor]
    }

    fn row(&self, slot: usize) -> &[f64] {
        &self.cap_bits[slot * self.sensors..(slot + 1) * self.sensors]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalSchedule {
    pub schedule: Vec<Option<usize>>,
    pub total_bits: f64,
}

/// Total delivered by a fixed association sequence when each served slot
/// takes min(capacity, remaining quota).
pub fn schedule_value(cap: &CapacityMatrix, quotas: &[f64], schedule: &[Option<usize>]) -> f64 {
    let mut rem = quotas.to_vec();
    let mut got = vec![0.0; quotas.len()];
    for (t, a) in schedule.iter().enumerate() {
        if let Some(i) = *a {
            let y = cap.get(t, i).min(rem[i]).max(0.0);
            rem[i] = (rem[i] - y).max(0.0);
            got[i] += y;
        }
    }
    got.iter().sum()
}

#[derive(Clone, Copy)]
struct State {
    rem: [f64; MAX_SENSORS],
    got: [f64; MAX_SENSORS],
}

#[derive(Clone, Copy)]
struct Best {
    total: f64,
    // Action per slot: 0 idle, k > 0 sensor k-1.
    seq: [u8; MAX_SLOTS],
}

impl Best {
    fn none() -> Self {
        Best {
            total: f64::NEG_INFINITY,
            seq: [0; MAX_SLOTS],
        }
    }

    /// Strictly better wins, so the lexicographically first maximizer stays.
    fn merge(self, other: Best) -> Best {
        if other.total > self.total {
            other
        } else {
            self
        }
    }
}

fn apply(state: &mut State, row: &[f64], action: u8) {
    if action > 0 {
        let i = (action - 1) as usize;
        let y = row[i].min(state.rem[i]).max(0.0);
        state.rem[i] = (state.rem[i] - y).max(0.0);
        state.got[i] += y;
    }
}

fn search(
    cap: &CapacityMatrix,
    n: usize,
    slot: usize,
    state: State,
    seq: &mut [u8; MAX_SLOTS],
    best: &mut Best,
) {
    if slot == cap.slots {
        let total: f64 = state.got[..n].iter().sum();
        if total > best.total {
            best.total = total;
            best.seq = *seq;
        }
        return;
    }
    let row = cap.row(slot);
    for action in 0..=n as u8 {
        let mut next = state;
        apply(&mut next, row, action);
        seq[slot] = action;
        search(cap, n, slot + 1, next, seq, best);
    }
}

fn check(cap: &CapacityMatrix, quotas: &[f64]) -> Result<()> {
    if cap.slots > MAX_SLOTS || cap.sensors > MAX_SENSORS {
        return Err(MuleError::OracleTooLarge {
            slots: cap.slots,
            sensors: cap.sensors,
            max_slots: MAX_SLOTS,
            max_sensors: MAX_SENSORS,
        });
    }
    if quotas.len() != cap.sensors {
        return Err(MuleError::Dimension(format!(
            "{} quotas for {} sensors",
            quotas.len(),
            cap.sensors
        )));
    }
    if quotas.iter().any(|q| !(*q >= 0.0)) {
        return Err(MuleError::Dimension("quotas must be non-negative".into()));
    }
    Ok(())
}

/// Roots of the enumeration: every action prefix over the first `depth` slots,
/// in lexicographic order, with its state applied.
fn prefixes(cap: &CapacityMatrix, quotas: &[f64], depth: usize) -> Vec<([u8; MAX_SLOTS], State)> {
    let n = cap.sensors;
    let mut init = State {
        rem: [0.0; MAX_SENSORS],
        got: [0.0; MAX_SENSORS],
    };
    init.rem[..n].copy_from_slice(quotas);
    let mut out = vec![([0u8; MAX_SLOTS], init)];
    for slot in 0..depth.min(cap.slots) {
        out = out
            .into_iter()
            .flat_map(|(seq, st)| {
                (0..=n as u8).map(move |a| {
                    let mut seq = seq;
                    let mut st = st;
                    apply(&mut st, cap.row(slot), a);
                    seq[slot] = a;
                    (seq, st)
                })
            })
            .collect();
    }
    out
}

fn solve_prefix(cap: &CapacityMatrix, depth: usize, mut seq: [u8; MAX_SLOTS], st: State) -> Best {
    let mut best = Best::none();
    search(
        cap,
        cap.sensors,
        depth.min(cap.slots),
        st,
        &mut seq,
        &mut best,
    );
    best
}

fn finish(cap: &CapacityMatrix, best: Best) -> OptimalSchedule {
    OptimalSchedule {
        schedule: best.seq[..cap.slots]
            .iter()
            .map(|&a| a.checked_sub(1).map(usize::from))
            .collect(),
        total_bits: best.total.max(0.0),
    }
}

const SPLIT_DEPTH: usize = 2;

/// Single-threaded enumeration.
pub fn optimal_schedule_sequential(
    cap: &CapacityMatrix,
    quotas: &[f64],
) -> Result<OptimalSchedule> {
    check(cap, quotas)?;
    let best = prefixes(cap, quotas, SPLIT_DEPTH)
        .into_iter()
        .map(|(seq, st)| solve_prefix(cap, SPLIT_DEPTH, seq, st))
        .fold(Best::none(), Best::merge);
    Ok(finish(cap, best))
}

#[cfg(feature = "parallel")]
pub fn optimal_schedule_parallel(cap: &CapacityMatrix, quotas: &[f64]) -> Result<OptimalSchedule> {
    use rayon::prelude::*;
    check(cap, quotas)?;
    let roots = prefixes(cap, quotas, SPLIT_DEPTH);
    // Collect in order, then fold, so ties resolve exactly as sequentially.
    let bests: Vec<Best> = roots
        .into_par_iter()
        .map(|(seq, st)| solve_prefix(cap, SPLIT_DEPTH, seq, st))
        .collect();
    let best = bests.into_iter().fold(Best::none(), Best::merge);
    Ok(finish(cap, best))
}

/// Maximum total download over all association sequences.
pub fn optimal_schedule(cap: &CapacityMatrix, quotas: &[f64]) -> Result<OptimalSchedule> {
    #[cfg(feature = "parallel")]
    {
        optimal_schedule_parallel(cap, quotas)
    }
    #[cfg(not(feature = "parallel"))]
    {
        optimal_schedule_sequential(cap, quotas)
    }
}

/// Heuristic total over the oracle total; 1 when the oracle gets nothing.
pub fn optimality_gap(result: &MissionResult, cap: &CapacityMatrix, quotas: &[f64]) -> Result<f64> {
    if result.slot_log.len() != cap.slots() {
        return Err(MuleError::Dimension(format!(
            "mission logged {} slots, capacity matrix has {}",
            result.slot_log.len(),
            cap.slots()
        )));
    }
    if result.per_sensor_downloaded_bits.len() != cap.sensors() {
        return Err(MuleError::Dimension(format!(
            "mission has {} sensors, capacity matrix has {}",
            result.per_sensor_downloaded_bits.len(),
            cap.sensors()
        )));
    }
    let best = optimal_schedule(cap, quotas)?;
    if best.total_bits == 0.0 {
        return Ok(1.0);
    }
    Ok(result.total_downloaded_bits / best.total_bits)
}
