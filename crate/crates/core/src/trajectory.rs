//! UAV motion: fixed waypoint following and autonomous buffer-priority
//! navigation, both under the speed limit and the geofence.

use crate::error::{MuleError, Result};
use crate::geometry::{ConvexPolygon, Vec2};
use crate::types::BufferState;

/// A waypoint within this distance counts as reached.
pub const ARRIVAL_EPS_M: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UavState {
    /// r_t
    pub pos: Vec2,
    pub current_waypoint_index: usize,
    pub speed_mps: f64,
    pub hovering: bool,
}

impl UavState {
    pub fn at(pos: Vec2) -> Self {
        UavState {
            pos,
            current_waypoint_index: 0,
            speed_mps: 0.0,
            hovering: false,
        }
    }
}

/// One slot of waypoint following. The final waypoint is held once reached.
pub fn advance_fixed(
    state: UavState,
    waypoints: &[Vec2],
    speed_mps: f64,
    dt_s: f64,
) -> Result<UavState> {
    if waypoints.is_empty() {
        return Err(MuleError::Config(vec![
            "waypoints must not be empty in fixed mode".into(),
        ]));
    }
    let mut next = state;
    if state.hovering {
        next.speed_mps = 0.0;
        return Ok(next);
    }
    next.speed_mps = speed_mps;
    let last = waypoints.len() - 1;
    let idx = state.current_waypoint_index.min(last);
    let target = waypoints[idx];
    let budget = speed_mps.max(0.0) * dt_s;
    let moved_to = state.pos.step_toward(target, budget);
    let moved = moved_to.distance(state.pos);
    next.pos = moved_to;
    let gap = moved_to.distance(target);
    if gap <= ARRIVAL_EPS_M {
        // Snap only when it stays inside this slot's displacement budget.
        if moved + gap <= budget {
            next.pos = target;
        }
        if idx < last {
            next.current_waypoint_index = idx + 1;
        }
    }
    Ok(next)
}

/// Sensor with the most data left; ties to the lowest id.
pub fn autonomous_next_target(buffers: &[BufferState]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, b) in buffers.iter().enumerate() {
        if !b.has_data() {
            continue;
        }
        match best {
            Some((_, r)) if !(b.remaining_bits > r) => {}
            _ => best = Some((i, b.remaining_bits)),
        }
    }
    best.map(|(i, _)| i)
}

/// Full speed while the link is below the sensor's best rate, cruise once it
/// is there, zero while hovering.
pub fn speed_command(
    current_rate_bps: f64,
    target_sensor_max_rate_bps: f64,
    v_max: f64,
    v_cruise: f64,
    hovering: bool,
) -> f64 {
    if hovering {
        0.0
    } else if current_rate_bps < target_sensor_max_rate_bps {
        v_max
    } else {
        v_cruise.min(v_max)
    }
}

/// Straight-line step toward `target`, clipped to the geofence.
pub fn advance_autonomous(
    state: UavState,
    target: Vec2,
    speed_mps: f64,
    dt_s: f64,
    geofence: &ConvexPolygon,
) -> UavState {
    let mut next = state;
    if state.hovering {
        next.speed_mps = 0.0;
        return next;
    }
    next.speed_mps = speed_mps;
    let stepped = state.pos.step_toward(target, speed_mps.max(0.0) * dt_s);
    next.pos = geofence.project(stepped);
    next
}
