//! Seeded random mission generator for sweeps, property checks and
//! benchmarks.

use std::ops::RangeInclusive;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::default_rate_table;
use crate::geometry::{ConvexPolygon, Vec2};
use crate::types::{
    HgadSettings, LinkBudget, MissionConfig, MissionMode, Policy, SensorNode, BITS_PER_MBIT,
};

#[derive(Debug, Clone)]
pub struct RandomMissionSpec {
    pub sensors: RangeInclusive<usize>,
    pub slots: RangeInclusive<usize>,
    pub modes: Vec<MissionMode>,
}

impl Default for RandomMissionSpec {
    fn default() -> Self {
        RandomMissionSpec {
            sensors: 1..=4,
            slots: 10..=500,
            modes: vec![
                MissionMode::FixedGreedy,
                MissionMode::FixedHgad,
                MissionMode::AutoGreedy,
                MissionMode::AutoHgad,
            ],
        }
    }
}

/// Convex polygon from sorted angles on a random ellipse.
fn random_fence(rng: &mut impl Rng) -> ConvexPolygon {
    let center = Vec2::new(
        rng.random_range(-500.0..500.0),
        rng.random_range(-500.0..500.0),
    );
    let rx = rng.random_range(100.0..1500.0);
    let ry = rng.random_range(100.0..1500.0);
    if rng.random_bool(0.4) {
        return ConvexPolygon::rectangle(
            Vec2::new(center.x - rx, center.y - ry),
            Vec2::new(center.x + rx, center.y + ry),
        );
    }
    let k = rng.random_range(3..=9);
    let mut angles: Vec<f64> = (0..k)
        .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
        .collect();
    angles.sort_by(f64::total_cmp);
    let pts: Vec<Vec2> = angles
        .iter()
        .map(|a| Vec2::new(center.x + rx * a.cos(), center.y + ry * a.sin()))
        .collect();
    ConvexPolygon::new(pts).unwrap_or_else(|_| {
        ConvexPolygon::rectangle(
            Vec2::new(center.x - rx, center.y - ry),
            Vec2::new(center.x + rx, center.y + ry),
        )
    })
}

fn point_inside(rng: &mut impl Rng, fence: &ConvexPolygon) -> Vec2 {
    let (lo, hi) = fence.bounds();
    loop {
        let p = Vec2::new(rng.random_range(lo.x..=hi.x), rng.random_range(lo.y..=hi.y));
        if fence.contains(p) {
            return p;
        }
    }
}

pub fn random_mission(rng: &mut impl Rng, spec: &RandomMissionSpec) -> MissionConfig {
    let fence = random_fence(rng);
    let n = rng.random_range(spec.sensors.clone());
    let sensors = (0..n)
        .map(|id| SensorNode {
            id,
            name: format!("S{id}"),
            position: point_inside(rng, &fence),
            initial_quota_bits: rng.random_range(1.0..2000.0) * BITS_PER_MBIT,
        })
        .collect();
    let waypoints = (0..rng.random_range(1..=6))
        .map(|_| point_inside(rng, &fence))
        .collect();
    let v_max = rng.random_range(1.0..40.0);
    let hgad = (0..n)
        .map(|_| HgadSettings {
            gamma_bps: None,
            t_max_hover_s: rng.random_range(0.5..60.0),
            r_max_bps: None,
        })
        .collect();
    MissionConfig {
        name: "random".into(),
        sensors,
        link_budget: LinkBudget {
            tx_power_dbm: rng.random_range(-10.0..30.0),
            tx_gain_dbi: rng.random_range(0.0..6.0),
            rx_gain_dbi: rng.random_range(0.0..6.0),
            noise_power_dbm: rng.random_range(-100.0..-80.0),
            carrier_freq_hz: rng.random_range(0.5e9..6.0e9),
        },
        rate_table: default_rate_table(),
        start_pos: point_inside(rng, &fence),
        end_pos: point_inside(rng, &fence),
        waypoints,
        geofence: fence,
        v_max_mps: v_max,
        v_cruise_mps: Some(v_max * rng.random_range(0.2..=1.0)),
        slot_dt_s: *[0.5, 1.0, 2.0].choose(rng).expect("non-empty"),
        mission_slots: rng.random_range(spec.slots.clone()),
        uav_altitude_m: rng.random_range(0.0..100.0),
        mode: *spec.modes.choose(rng).expect("at least one mode"),
        replay_policy: Policy::Greedy,
        hgad,
        rng_seed: 0,
    }
}

/// `count` missions from one seed; the same seed always yields the same set.
pub fn random_missions(seed: u64, count: usize, spec: &RandomMissionSpec) -> Vec<MissionConfig> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            let mut c = random_mission(&mut rng, spec);
            c.name = format!("random-{seed}-{k}");
            c.rng_seed = seed;
            c
        })
        .collect()
}
