//! Per-slot association decisions: Greedy (highest SNR) and HGAD (highest
//! rate, hover when the rate reaches the sensor's trigger).

use serde::Serialize;

use crate::types::{BufferState, HgadParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct PolicyDecision {
    pub associate: Option<usize>,
    pub request_hover: bool,
    pub hover_until_slot: Option<usize>,
    pub mission_complete: bool,
}

impl PolicyDecision {
    pub fn complete() -> Self {
        PolicyDecision {
            mission_complete: true,
            ..Default::default()
        }
    }

    pub fn associate(id: usize) -> Self {
        PolicyDecision {
            associate: Some(id),
            ..Default::default()
        }
    }
}

/// An active hover: association to `sensor` is held for slots before
/// `until_slot`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HoverState {
    pub sensor: usize,
    pub until_slot: usize,
}

/// Argmax of `scores` over sensors that still hold data. Ties go to the
/// lowest id.
fn argmax_with_data(scores: &[f64], buffers: &[BufferState]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, (&s, b)) in scores.iter().zip(buffers).enumerate() {
        if !b.has_data() {
            continue;
        }
        match best {
            Some((_, bs)) if !(s > bs) => {}
            _ => best = Some((i, s)),
        }
    }
    best.map(|(i, _)| i)
}

pub fn greedy_select(snr_db: &[f64], buffers: &[BufferState]) -> Option<usize> {
    debug_assert_eq!(snr_db.len(), buffers.len());
    argmax_with_data(snr_db, buffers)
}

pub fn hover_trigger(rate_bps: f64, gamma_bps: f64) -> bool {
    rate_bps >= gamma_bps
}

/// min(remaining / r_max, t_max). A non-positive `r_max_bps` falls back to
/// the cap.
pub fn hover_duration(remaining_bits: f64, r_max_bps: f64, t_max_s: f64) -> f64 {
    if !(r_max_bps > 0.0) {
        log::warn!("hover reference rate {r_max_bps} bps is not positive; hovering for the cap {t_max_s} s");
        return t_max_s;
    }
    (remaining_bits / r_max_bps).min(t_max_s)
}

/// Hover length in whole slots.
pub fn hover_slots(duration_s: f64, slot_dt_s: f64) -> usize {
    (duration_s / slot_dt_s).ceil() as usize
}

/// Highest rate among sensors with data. Equal rates (the table is a step
/// function) are split by SNR, then by lowest id.
fn best_rate(rate_bps: &[f64], snr_db: &[f64], buffers: &[BufferState]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for i in (0..buffers.len()).filter(|&i| buffers[i].has_data()) {
        best = match best {
            None => Some(i),
            Some(b) if rate_bps[i] > rate_bps[b] => Some(i),
            Some(b) if rate_bps[i] == rate_bps[b] && snr_db[i] > snr_db[b] => Some(i),
            keep => keep,
        };
    }
    best
}

/// One HGAD decision.
///
/// `armed[i]` gates whether sensor `i` may start a new hover; the caller
/// disarms a sensor when its hover runs out with data left and rearms it
/// once its rate drops below the trigger. `hover` is the active hover, if
/// any, from the previous slot.
pub fn hgad_step(
    snr_db: &[f64],
    rate_bps: &[f64],
    buffers: &[BufferState],
    hover: Option<HoverState>,
    slot: usize,
    params: &[HgadParams],
    armed: &[bool],
    slot_dt_s: f64,
) -> PolicyDecision {
    debug_assert_eq!(rate_bps.len(), buffers.len());
    debug_assert_eq!(params.len(), buffers.len());

    if buffers.iter().all(|b| !b.has_data()) {
        return PolicyDecision::complete();
    }

    if let Some(h) = hover {
        if buffers[h.sensor].has_data() && slot < h.until_slot {
            return PolicyDecision {
                associate: Some(h.sensor),
                request_hover: true,
                hover_until_slot: Some(h.until_slot),
                mission_complete: false,
            };
        }
    }

    let Some(best) = best_rate(rate_bps, snr_db, buffers) else {
        return PolicyDecision::complete();
    };
    let p = &params[best];
    if armed.get(best).copied().unwrap_or(true) && hover_trigger(rate_bps[best], p.gamma_bps) {
        let secs = hover_duration(buffers[best].remaining_bits, p.r_max_bps, p.t_max_hover_s);
        PolicyDecision {
            associate: Some(best),
            request_hover: true,
            hover_until_slot: Some(slot + hover_slots(secs, slot_dt_s)),
            mission_complete: false,
        }
    } else {
        PolicyDecision::associate(best)
    }
}

/// Mutable HGAD bookkeeping carried between slots by the engine.
#[derive(Debug, Clone, PartialEq)]
pub struct HgadTracker {
    hover: Option<HoverState>,
    armed: Vec<bool>,
}

impl HgadTracker {
    pub fn new(sensors: usize) -> Self {
        HgadTracker {
            hover: None,
            armed: vec![true; sensors],
        }
    }

    pub fn hover(&self) -> Option<HoverState> {
        self.hover
    }

    pub fn step(
        &mut self,
        snr_db: &[f64],
        rate_bps: &[f64],
        buffers: &[BufferState],
        slot: usize,
        params: &[HgadParams],
        slot_dt_s: f64,
    ) -> PolicyDecision {
        for (i, p) in params.iter().enumerate() {
            if !hover_trigger(rate_bps[i], p.gamma_bps) {
                self.armed[i] = true;
            }
        }
        if let Some(h) = self.hover {
            let drained = !buffers[h.sensor].has_data();
            if drained || slot >= h.until_slot {
                if !drained {
                    self.armed[h.sensor] = false;
                }
                self.hover = None;
            }
        }
        let d = hgad_step(
            snr_db,
            rate_bps,
            buffers,
            self.hover,
            slot,
            params,
            &self.armed,
            slot_dt_s,
        );
        self.hover = match (d.request_hover, d.associate, d.hover_until_slot) {
            (true, Some(sensor), Some(until_slot)) => Some(HoverState { sensor, until_slot }),
            _ => None,
        };
        d
    }
}
