//! SNR trace CSV: `t_s,x_m,y_m,alt_m,snr_0,snr_1,...`, positions in the
//! scenario's local frame.

use std::io::Read;
use std::path::Path;

use crate::channel::{SnrTrace, TraceSample};
use crate::error::{MuleError, Result};
use crate::geometry::Vec2;

const FIXED_COLUMNS: [&str; 4] = ["t_s", "x_m", "y_m", "alt_m"];

/// Parses a trace; `sensor_count` SNR columns are required. Row numbers in
/// errors count data rows from 1.
pub fn parse_trace(reader: impl Read, sensor_count: usize) -> Result<SnrTrace> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| MuleError::Trace {
            row: 0,
            message: format!("unreadable header: {e}"),
        })?
        .clone();
    let names: Vec<&str> = headers.iter().collect();
    if names.len() < FIXED_COLUMNS.len() || names[..4] != FIXED_COLUMNS {
        return Err(MuleError::Trace {
            row: 0,
            message: format!(
                "header must start with `t_s,x_m,y_m,alt_m`, found `{}`",
                names.join(",")
            ),
        });
    }
    for (k, name) in names[4..].iter().enumerate() {
        if *name != format!("snr_{k}") {
            return Err(MuleError::Trace {
                row: 0,
                message: format!("column {} should be `snr_{k}`, found `{name}`", k + 5),
            });
        }
    }
    let snr_cols = names.len() - 4;
    if snr_cols != sensor_count {
        return Err(MuleError::Trace {
            row: 0,
            message: format!("column mismatch: {snr_cols} SNR columns for {sensor_count} sensors"),
        });
    }

    let mut samples = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let row = k + 1;
        let rec = rec.map_err(|e| MuleError::Trace {
            row,
            message: e.to_string(),
        })?;
        if rec.len() != names.len() {
            return Err(MuleError::Trace {
                row,
                message: format!(
                    "column mismatch: {} cells, header has {}",
                    rec.len(),
                    names.len()
                ),
            });
        }
        let mut vals = Vec::with_capacity(rec.len());
        for (c, cell) in rec.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| MuleError::Trace {
                row,
                message: format!("column `{}`: `{cell}` is not a number", names[c]),
            })?;
            if !v.is_finite() {
                return Err(MuleError::Trace {
                    row,
                    message: format!("column `{}` is not finite", names[c]),
                });
            }
            vals.push(v);
        }
        samples.push(TraceSample {
            timestamp_s: vals[0],
            uav_pos: Vec2::new(vals[1], vals[2]),
            alt_m: vals[3],
            snr_db: vals[4..].to_vec(),
        });
    }
    SnrTrace::new(samples)
}

pub fn load_trace(path: &Path, sensor_count: usize) -> Result<SnrTrace> {
    let file = std::fs::File::open(path).map_err(|e| MuleError::Trace {
        row: 0,
        message: format!("{}: {e}", path.display()),
    })?;
    parse_trace(file, sensor_count)
}
