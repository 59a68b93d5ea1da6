use std::io::Read;
use std::path::Path;

use crate::error::{MuleError, Result};
use crate::types::{RateEntry, RateTable};

/// Parses `snr_db,rate_bps` CSV.
pub fn parse_rate_table(reader: impl Read) -> Result<RateTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| MuleError::Other(format!("rate table header: {e}")))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != ["snr_db", "rate_bps"] {
        return Err(MuleError::Other(format!(
            "rate table header must be `snr_db,rate_bps`, found `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut entries = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| MuleError::Other(format!("rate table row {}: {e}", k + 1)))?;
        let num = |col: usize| -> Result<f64> {
            rec.get(col)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| MuleError::Other(format!("rate table row {}: bad number", k + 1)))
        };
        entries.push(RateEntry {
            snr_db: num(0)?,
            rate_bps: num(1)?,
        });
    }
    RateTable::new(entries).map_err(MuleError::Other)
}

pub fn load_rate_table(path: &Path) -> Result<RateTable> {
    let file = std::fs::File::open(path).map_err(|e| MuleError::io(path, e))?;
    parse_rate_table(file)
}
