//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use mulesim::audit::audit_mission;
use mulesim::batch::{compare_policies, map_all};
use mulesim::channel::{free_space_path_loss, snr_db_at_distance, SPEED_OF_LIGHT_MPS};
use mulesim::io::{export_comparison, load_scenario, load_scenario_file, load_trace};
use mulesim::oracle::{optimal_schedule, CapacityMatrix};
use mulesim::policy::{hover_duration, hover_slots};
use mulesim::random::{random_missions, RandomMissionSpec};
use mulesim::types::{LinkBudget, MissionMode, BITS_PER_MBIT};
use mulesim::{run_mission, ChannelSource, MissionConfig, Policy};

const MBIT: f64 = BITS_PER_MBIT;

type Check = Box<dyn FnOnce() -> Outcome>;

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(format!("{name}.json"))
}

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome {
        ok: true,
        detail: detail.into(),
    }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome {
        ok: false,
        detail: detail.into(),
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    let took = start.elapsed();
    out.detail = format!("{}; {:.2} s", out.detail, took.as_secs_f64());
    if took > limit {
        out.ok = false;
        out.detail
            .push_str(&format!(" exceeds {} s", limit.as_secs()));
    }
    out
}

fn constraint_audit() -> Outcome {
    let missions = random_missions(2024, 1000, &RandomMissionSpec::default());
    let failures: Vec<String> = map_all(&missions, |c| {
        match run_mission(c, &ChannelSource::Analytic) {
            Ok(r) => audit_mission(c, &r)
                .into_iter()
                .map(|v| format!("{}: {v}", c.name))
                .collect::<Vec<_>>(),
            Err(e) => vec![format!("{}: {e}", c.name)],
        }
    })
    .into_iter()
    .flatten()
    .collect();
    if failures.is_empty() {
        pass(format!("{} missions, no violations", missions.len()))
    } else {
        fail(format!(
            "{} violations, first: {}",
            failures.len(),
            failures[0]
        ))
    }
}

fn oracle_dominance() -> Outcome {
    let spec = RandomMissionSpec {
        sensors: 1..=3,
        slots: 2..=8,
        ..Default::default()
    };
    let missions = random_missions(77, 500, &spec);
    let ratios: Vec<Result<f64, String>> = map_all(&missions, |c| {
        let mut worst = 0.0f64;
        for policy in [Policy::Greedy, Policy::Hgad] {
            let m = c.with_policy(policy);
            let r = run_mission(&m, &ChannelSource::Analytic).map_err(|e| e.to_string())?;
            let cap = CapacityMatrix::from_mission(&r).map_err(|e| e.to_string())?;
            let best = optimal_schedule(&cap, &m.quotas_bits()).map_err(|e| e.to_string())?;
            if r.total_downloaded_bits > best.total_bits {
                return Err(format!(
                    "{} {}: {} bits exceeds optimum {}",
                    m.name,
                    policy.name(),
                    r.total_downloaded_bits,
                    best.total_bits
                ));
            }
            if best.total_bits > 0.0 {
                worst = worst.max(r.total_downloaded_bits / best.total_bits);
            }
        }
        Ok(worst)
    });
    let mut max_ratio = 0.0f64;
    for r in ratios {
        match r {
            Ok(x) => max_ratio = max_ratio.max(x),
            Err(e) => return fail(e),
        }
    }
    pass(format!(
        "{} instances x 2 policies, largest policy/optimum {max_ratio}",
        missions.len()
    ))
}

fn visit_orders() -> Outcome {
    let base = match load_scenario(&scenario("sim_auto")) {
        Ok(c) => c,
        Err(e) => return fail(e.to_string()),
    };
    let cases: [([f64; 4], [usize; 4]); 4] = [
        ([700.0, 500.0, 800.0, 1000.0], [3, 2, 0, 1]),
        ([500.0, 800.0, 1000.0, 700.0], [2, 1, 3, 0]),
        ([800.0, 500.0, 700.0, 1000.0], [3, 0, 2, 1]),
        ([500.0, 1000.0, 700.0, 800.0], [1, 3, 2, 0]),
    ];
    let mut seen = Vec::new();
    for (quotas, expected) in cases {
        let mut c = base.clone();
        c.mode = MissionMode::AutoHgad;
        for (s, q) in c.sensors.iter_mut().zip(quotas) {
            s.initial_quota_bits = q * MBIT;
        }
        let r = match run_mission(&c, &ChannelSource::Analytic) {
            Ok(r) => r,
            Err(e) => return fail(e.to_string()),
        };
        if r.visit_order != expected {
            return fail(format!(
                "quotas {quotas:?}: visited {:?}, expected {expected:?}",
                r.visit_order
            ));
        }
        seen.push(format!("{:?}", r.visit_order));
    }
    pass(seen.join(" "))
}

fn simulated_fixed_route() -> Outcome {
    let c = match load_scenario(&scenario("sim_fixed")) {
        Ok(c) => c,
        Err(e) => return fail(e.to_string()),
    };
    let cmp = match compare_policies(&c, &ChannelSource::Analytic) {
        Ok(x) => x,
        Err(e) => return fail(e.to_string()),
    };
    let ratio = cmp.total_ratio();
    let detail = format!(
        "greedy {:.1} Mbit / {} handovers, hgad {:.1} Mbit / {} handovers, ratio {ratio:.4}",
        cmp.greedy.total_downloaded_bits / MBIT,
        cmp.greedy.handover_count,
        cmp.hgad.total_downloaded_bits / MBIT,
        cmp.hgad.handover_count
    );
    if ratio >= 1.05 && cmp.hgad.handover_count <= cmp.greedy.handover_count {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn hover_bounds() -> Outcome {
    let cases = [
        (100.0 * MBIT, 50.0 * MBIT, 10.0, 2.0),
        (1000.0 * MBIT, 50.0 * MBIT, 10.0, 10.0),
        (0.0, 50.0 * MBIT, 10.0, 0.0),
    ];
    for (rem, r_max, t_max, want) in cases {
        let got = hover_duration(rem, r_max, t_max);
        if got != want {
            return fail(format!(
                "hover({rem}, {r_max}, {t_max}) = {got}, expected {want}"
            ));
        }
    }

    let spec = RandomMissionSpec {
        modes: vec![MissionMode::FixedHgad, MissionMode::AutoHgad],
        ..Default::default()
    };
    let missions = random_missions(31, 10_000, &spec);
    let checked: Vec<Result<bool, String>> = map_all(&missions, |c| {
        let r = run_mission(c, &ChannelSource::Analytic).map_err(|e| format!("{}: {e}", c.name))?;
        let mut run: Option<(usize, usize)> = None;
        for rec in &r.slot_log {
            run = match (rec.hovering, rec.associated, run) {
                (true, Some(s), Some((prev, k))) if prev == s => Some((s, k + 1)),
                (true, Some(s), _) => Some((s, 1)),
                _ => None,
            };
            if let Some((s, k)) = run {
                let p = &r.hgad_params[s];
                let cap = hover_slots(p.t_max_hover_s, c.slot_dt_s);
                if k > cap {
                    return Err(format!(
                        "{}: sensor {s} hovered {k} slots at slot {}, cap {cap}",
                        c.name, rec.slot
                    ));
                }
            }
        }
        Ok(r.hover_slot_count > 0)
    });
    let mut hovered = 0;
    for c in checked {
        match c {
            Ok(h) => hovered += usize::from(h),
            Err(e) => return fail(e),
        }
    }
    pass(format!(
        "3 formula cases, {} missions within cap ({hovered} with hovers)",
        missions.len()
    ))
}

fn path_loss_reference() -> Outcome {
    // log10 of a product as a sum of logs, with the constant folded separately.
    let reference = |d: f64, f: f64| {
        20.0 * d.log10()
            + 20.0 * f.log10()
            + 20.0 * (4.0 * std::f64::consts::PI / SPEED_OF_LIGHT_MPS).log10()
    };
    let mut worst = 0.0f64;
    for i in 0..10 {
        for j in 0..10 {
            let d = 1.0 * 10f64.powf(i as f64 * 0.4);
            let f = 1.0e8 * 10f64.powf(j as f64 * 0.2);
            let got = free_space_path_loss(d, f).db;
            worst = worst.max((got - reference(d, f)).abs());
        }
    }
    if worst > 1e-9 {
        return fail(format!("largest deviation {worst:e} dB"));
    }
    let budget = LinkBudget {
        tx_power_dbm: 20.0,
        tx_gain_dbi: 2.0,
        rx_gain_dbi: 2.0,
        noise_power_dbm: -95.0,
        carrier_freq_hz: 2.4e9,
    };
    let mut prev = f64::INFINITY;
    for k in 0..2000 {
        let d = 1.0 + k as f64 * 2.5;
        let s = snr_db_at_distance(d, &budget);
        if !(s < prev) {
            return fail(format!("SNR not decreasing at {d} m"));
        }
        prev = s;
    }
    pass(format!(
        "100 pairs, largest deviation {worst:e} dB; SNR decreasing over 1..5000 m"
    ))
}

fn bundled_determinism() -> Outcome {
    let tmp = match tempfile::tempdir() {
        Ok(t) => t,
        Err(e) => return fail(e.to_string()),
    };
    let names = [
        "sim_fixed",
        "dt_fixed",
        "sim_auto",
        "rw_flight1",
        "rw_flight2",
    ];
    for name in names {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let loaded = match load_scenario_file(&scenario(name)) {
                Ok(s) => s,
                Err(e) => return fail(format!("{name}: {e}")),
            };
            let source = match &loaded.trace {
                Some(p) => match load_trace(p, loaded.config.sensors.len()) {
                    Ok(t) => ChannelSource::Trace(t),
                    Err(e) => return fail(format!("{name}: {e}")),
                },
                None => ChannelSource::Analytic,
            };
            let dir = tmp.path().join(format!("{name}-{run}"));
            let res = compare_policies(&loaded.config, &source)
                .and_then(|cmp| export_comparison(&cmp, loaded.config.mission_duration_s(), &dir));
            if let Err(e) = res {
                return fail(format!("{name}: {e}"));
            }
            let mut files = Vec::new();
            for p in ["greedy", "hgad"] {
                for f in ["slots.csv", "summary.json"] {
                    match fs::read(dir.join(p).join(f)) {
                        Ok(b) => files.push(b),
                        Err(e) => return fail(format!("{name}: {e}")),
                    }
                }
            }
            outputs.push(files);
        }
        if outputs[0] != outputs[1] {
            return fail(format!("{name}: outputs differ between runs"));
        }
    }
    pass(format!(
        "{} scenarios byte-identical across runs",
        names.len()
    ))
}

fn trace_step_function() -> Outcome {
    let tmp = match tempfile::tempdir() {
        Ok(t) => t,
        Err(e) => return fail(e.to_string()),
    };
    let stamps = [0.0, 2.5, 7.0, 10.0, 12.0];
    let snr = [
        [-3.0, 19.0],
        [9.0, 1.0],
        [21.0, -10.0],
        [4.0, 12.0],
        [0.5, 0.5],
    ];
    let mut csv = String::from("t_s,x_m,y_m,alt_m,snr_0,snr_1\n");
    for (t, s) in stamps.iter().zip(snr) {
        csv.push_str(&format!("{t},100,100,30,{},{}\n", s[0], s[1]));
    }
    let json = r#"{
  "name": "step", "mode": "trace_replay", "replay_policy": "greedy",
  "units": {"data": "Mbit", "distance": "m"},
  "mission_time_s": 12, "slot_dt_s": 0.5, "v_max_mps": 10, "uav_altitude_m": 30,
  "rng_seed": 0,
  "link_budget": {"tx_power_dbm": 0, "tx_gain_dbi": 0, "rx_gain_dbi": 0,
                  "noise_power_dbm": -90, "carrier_freq_hz": 2.4e9},
  "geofence": [[0, 0], [200, 0], [200, 200], [0, 200]],
  "start_pos": [100, 100], "end_pos": [100, 100], "waypoints": [],
  "sensors": [{"name": "A", "position": [50, 50], "quota": 100000},
              {"name": "B", "position": [150, 150], "quota": 100000}],
  "trace": "step.csv"
}"#;
    let written = fs::write(tmp.path().join("step.csv"), csv)
        .and_then(|_| fs::write(tmp.path().join("step.json"), json));
    if let Err(e) = written {
        return fail(e.to_string());
    }
    let loaded = match load_scenario_file(&tmp.path().join("step.json")) {
        Ok(s) => s,
        Err(e) => return fail(e.to_string()),
    };
    let config: MissionConfig = loaded.config;
    let trace = match loaded.trace.as_deref().map(|p| load_trace(p, 2)) {
        Some(Ok(t)) => t,
        Some(Err(e)) => return fail(e.to_string()),
        None => return fail("scenario did not name its trace"),
    };
    let r = match run_mission(&config, &ChannelSource::Trace(trace)) {
        Ok(r) => r,
        Err(e) => return fail(e.to_string()),
    };
    let mut changes = Vec::new();
    for w in r.slot_log.windows(2) {
        if w[0].rate_bps != w[1].rate_bps || w[0].snr_db != w[1].snr_db {
            changes.push(w[1].time_s);
        }
    }
    let expected = vec![2.5, 7.0, 10.0];
    if changes == expected && r.slot_log.len() == 24 {
        pass(format!(
            "rate changes at {changes:?} s over {} slots",
            r.slot_log.len()
        ))
    } else {
        fail(format!(
            "rate changes at {changes:?} s, expected {expected:?}"
        ))
    }
}

fn main() {
    let criteria: [(&str, Check); 8] = [
        (
            "constraint audit over random missions",
            Box::new(|| timed(Duration::from_secs(60), constraint_audit)),
        ),
        (
            "exhaustive optimum dominates both policies",
            Box::new(|| timed(Duration::from_secs(30), oracle_dominance)),
        ),
        (
            "autonomous visit order follows quotas",
            Box::new(visit_orders),
        ),
        (
            "simulated fixed route: HGAD gain and handovers",
            Box::new(|| timed(Duration::from_secs(5), simulated_fixed_route)),
        ),
        ("hover duration and cap", Box::new(hover_bounds)),
        (
            "free-space path loss reference",
            Box::new(path_loss_reference),
        ),
        (
            "bundled scenarios are deterministic",
            Box::new(bundled_determinism),
        ),
        (
            "trace replay is a step function",
            Box::new(trace_step_function),
        ),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.into_iter().enumerate() {
        let out = check();
        let tag = if out.ok { "PASS" } else { "FAIL" };
        println!("{tag} [{}] {name}: {}", k + 1, out.detail);
        if !out.ok {
            failed += 1;
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
