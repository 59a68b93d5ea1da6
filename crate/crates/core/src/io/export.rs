//! Result files: `slots.csv`, `summary.json`, `cdf_snr.csv`.
//!
//! Floats are written with the shortest representation that parses back to
//! the same value, so re-reading a log reproduces it exactly.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::batch::PolicyComparison;
use crate::engine::MissionResult;
use crate::error::{MuleError, Result};
use crate::geometry::Vec2;
use crate::types::{MissionMode, Policy, SlotRecord, BITS_PER_MBIT};

#[derive(Debug, Serialize)]
struct SensorSummary<'a> {
    id: usize,
    name: &'a str,
    downloaded_bits: f64,
    remaining_bits: f64,
    completion_slot: Option<usize>,
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    scenario: &'a str,
    mode: MissionMode,
    policy: Policy,
    rng_seed: u64,
    slot_dt_s: f64,
    slots_logged: usize,
    truncated: bool,
    total_downloaded_bits: f64,
    total_downloaded_mbit: f64,
    distance_traveled_m: f64,
    handover_count: usize,
    hover_slot_count: usize,
    incomplete_sensors: Vec<usize>,
    visit_order: &'a [usize],
    sensors: Vec<SensorSummary<'a>>,
}

fn summary(result: &MissionResult) -> Summary<'_> {
    let sensors = (0..result.per_sensor_downloaded_bits.len())
        .map(|i| SensorSummary {
            id: i,
            name: result.sensor_names.get(i).map_or("", String::as_str),
            downloaded_bits: result.per_sensor_downloaded_bits[i],
            remaining_bits: result.remaining_bits[i],
            completion_slot: result.completion_slot[i],
        })
        .collect();
    Summary {
        scenario: &result.scenario,
        mode: result.mode,
        policy: result.policy,
        rng_seed: result.rng_seed,
        slot_dt_s: result.slot_dt_s,
        slots_logged: result.slot_log.len(),
        truncated: result.truncated,
        total_downloaded_bits: result.total_downloaded_bits,
        total_downloaded_mbit: result.total_downloaded_bits / BITS_PER_MBIT,
        distance_traveled_m: result.distance_traveled_m,
        handover_count: result.handover_count,
        hover_slot_count: result.hover_slot_count,
        incomplete_sensors: result
            .remaining_bits
            .iter()
            .enumerate()
            .filter(|(_, r)| **r > 0.0)
            .map(|(i, _)| i)
            .collect(),
        visit_order: &result.visit_order,
        sensors,
    }
}

fn csv_error(path: &Path, e: csv::Error) -> MuleError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => MuleError::io(path, io),
        other => MuleError::Other(format!("{}: {other:?}", path.display())),
    }
}

fn slot_header(n: usize) -> Vec<String> {
    let mut h: Vec<String> = [
        "slot",
        "time_s",
        "x_m",
        "y_m",
        "associated",
        "downloaded_bits",
        "hovering",
        "speed_mps",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    h.extend((0..n).map(|i| format!("snr_{i}")));
    h.extend((0..n).map(|i| format!("rate_{i}")));
    h.extend((0..n).map(|i| format!("cum_bits_{i}")));
    h
}

fn write_slots(path: &Path, result: &MissionResult) -> Result<()> {
    let n = result.per_sensor_downloaded_bits.len();
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(slot_header(n))
        .map_err(|e| csv_error(path, e))?;
    let mut cum = vec![0.0; n];
    for r in &result.slot_log {
        if let Some(i) = r.associated {
            cum[i] += r.downloaded_bits;
        }
        let mut row = vec![
            r.slot.to_string(),
            r.time_s.to_string(),
            r.uav_pos.x.to_string(),
            r.uav_pos.y.to_string(),
            r.associated.map_or(String::new(), |i| i.to_string()),
            r.downloaded_bits.to_string(),
            u8::from(r.hovering).to_string(),
            r.speed_mps.to_string(),
        ];
        row.extend(r.snr_db.iter().map(f64::to_string));
        row.extend(r.rate_bps.iter().map(f64::to_string));
        row.extend(cum.iter().map(f64::to_string));
        w.write_record(&row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| MuleError::io(path, e))
}

fn write_cdf(path: &Path, result: &MissionResult) -> Result<()> {
    let n = result.per_sensor_downloaded_bits.len();
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(["sensor", "snr_db", "cdf"])
        .map_err(|e| csv_error(path, e))?;
    for i in 0..n {
        let mut snr: Vec<f64> = result.slot_log.iter().map(|r| r.snr_db[i]).collect();
        snr.sort_by(f64::total_cmp);
        let count = snr.len() as f64;
        for (k, s) in snr.iter().enumerate() {
            w.write_record([
                i.to_string(),
                s.to_string(),
                ((k + 1) as f64 / count).to_string(),
            ])
            .map_err(|e| csv_error(path, e))?;
        }
    }
    w.flush().map_err(|e| MuleError::io(path, e))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| MuleError::Other(format!("{}: {e}", path.display())))?;
    text.push('\n');
    let mut f = fs::File::create(path).map_err(|e| MuleError::io(path, e))?;
    f.write_all(text.as_bytes())
        .map_err(|e| MuleError::io(path, e))
}

/// Writes the three result files into `out_dir` (created if needed) and
/// returns their paths.
pub fn export_results(result: &MissionResult, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| MuleError::io(out_dir, e))?;
    let slots = out_dir.join("slots.csv");
    let summary_path = out_dir.join("summary.json");
    let cdf = out_dir.join("cdf_snr.csv");
    write_slots(&slots, result)?;
    write_json(&summary_path, &summary(result))?;
    write_cdf(&cdf, result)?;
    Ok(vec![slots, summary_path, cdf])
}

#[derive(Debug, Serialize)]
struct ComparisonRow {
    policy: Policy,
    total_downloaded_mbit: f64,
    handover_count: usize,
    hover_slot_count: usize,
    distance_traveled_m: f64,
    per_sensor_mbit: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct ComparisonSummary<'a> {
    scenario: &'a str,
    mission_time_s: f64,
    greedy: ComparisonRow,
    hgad: ComparisonRow,
    hgad_over_greedy: f64,
}

fn comparison_row(r: &MissionResult) -> ComparisonRow {
    ComparisonRow {
        policy: r.policy,
        total_downloaded_mbit: r.total_downloaded_bits / BITS_PER_MBIT,
        handover_count: r.handover_count,
        hover_slot_count: r.hover_slot_count,
        distance_traveled_m: r.distance_traveled_m,
        per_sensor_mbit: r
            .per_sensor_downloaded_bits
            .iter()
            .map(|b| b / BITS_PER_MBIT)
            .collect(),
    }
}

/// `greedy/` and `hgad/` result sets plus `comparison.json`.
pub fn export_comparison(
    cmp: &PolicyComparison,
    mission_time_s: f64,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    let mut files = export_results(&cmp.greedy, &out_dir.join("greedy"))?;
    files.extend(export_results(&cmp.hgad, &out_dir.join("hgad"))?);
    let path = out_dir.join("comparison.json");
    write_json(
        &path,
        &ComparisonSummary {
            scenario: &cmp.greedy.scenario,
            mission_time_s,
            greedy: comparison_row(&cmp.greedy),
            hgad: comparison_row(&cmp.hgad),
            hgad_over_greedy: cmp.total_ratio(),
        },
    )?;
    files.push(path);
    Ok(files)
}

/// Reads a `slots.csv` back into slot records.
pub fn read_slot_log(path: &Path) -> Result<Vec<SlotRecord>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let headers = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    let n = headers.iter().filter(|h| h.starts_with("snr_")).count();
    if headers.len() != 8 + 3 * n {
        return Err(MuleError::Other(format!(
            "{}: unexpected column layout",
            path.display()
        )));
    }
    let mut out = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let bad = |c: usize| {
            MuleError::Other(format!(
                "{}: row {}, column {}: bad value",
                path.display(),
                k + 1,
                &headers[c]
            ))
        };
        let num = |c: usize| -> Result<f64> { rec[c].parse::<f64>().map_err(|_| bad(c)) };
        let int = |c: usize| -> Result<usize> { rec[c].parse::<usize>().map_err(|_| bad(c)) };
        out.push(SlotRecord {
            slot: int(0)?,
            time_s: num(1)?,
            uav_pos: Vec2::new(num(2)?, num(3)?),
            associated: if rec[4].is_empty() {
                None
            } else {
                Some(int(4)?)
            },
            downloaded_bits: num(5)?,
            hovering: int(6)? != 0,
            speed_mps: num(7)?,
            snr_db: (0..n).map(|i| num(8 + i)).collect::<Result<_>>()?,
            rate_bps: (0..n).map(|i| num(8 + n + i)).collect::<Result<_>>()?,
        });
    }
    Ok(out)
}
