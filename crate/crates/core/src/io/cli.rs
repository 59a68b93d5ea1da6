//! `mulesim` command line: `run`, `compare`, `oracle`.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::batch::compare_policies;
use crate::channel::ChannelSource;
use crate::engine::run_mission;
use crate::error::{MuleError, Result};
use crate::io::{export_comparison, export_results, load_scenario_file, load_trace};
use crate::oracle::{optimal_schedule, CapacityMatrix};
use crate::types::{MissionConfig, Policy, BITS_PER_MBIT};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_TRACE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "mulesim", version, about = "UAV data-mule mission simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PolicyArg {
    Greedy,
    Hgad,
}

impl From<PolicyArg> for Policy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Greedy => Policy::Greedy,
            PolicyArg::Hgad => Policy::Hgad,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one mission and export its log.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        /// Override the scenario's association policy.
        #[arg(long, value_enum)]
        policy: Option<PolicyArg>,
        /// Replay SNR from this CSV instead of the free-space model.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run Greedy and HGAD on the same scenario and summarize side by side.
    Compare {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Exact best schedule for a small capacity matrix (bits per slot).
    Oracle {
        /// CSV, one row per slot, one column per sensor; optional header.
        #[arg(long)]
        capacities: PathBuf,
        /// Comma-separated quotas in bits.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        quotas: Vec<f64>,
    },
}

fn exit_code(err: &MuleError) -> i32 {
    match err {
        MuleError::Config(_) | MuleError::Parse { .. } => EXIT_VALIDATION,
        e if e.is_trace_error() => EXIT_TRACE,
        _ => EXIT_FAILURE,
    }
}

fn prepare(
    scenario: &Path,
    trace: Option<&Path>,
    seed: Option<u64>,
) -> Result<(MissionConfig, ChannelSource)> {
    let loaded = load_scenario_file(scenario)?;
    let mut config = loaded.config;
    if let Some(s) = seed {
        config.rng_seed = s;
    }
    let trace_path = trace.map(Path::to_path_buf).or(loaded.trace);
    let source = match trace_path {
        Some(p) => ChannelSource::Trace(load_trace(&p, config.sensors.len())?),
        None => ChannelSource::Analytic,
    };
    Ok((config, source))
}

fn mbit(bits: f64) -> f64 {
    bits / BITS_PER_MBIT
}

fn run(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Run {
            scenario,
            policy,
            trace,
            out,
            seed,
        } => {
            let (mut config, source) = prepare(&scenario, trace.as_deref(), seed)?;
            if let Some(p) = policy {
                config = config.with_policy(p.into());
            }
            let result = run_mission(&config, &source)?;
            export_results(&result, &out)?;
            println!(
                "{} [{}]: {:.2} Mbit in {} slots, {} handovers, {:.1} m flown",
                result.scenario,
                result.policy.name(),
                mbit(result.total_downloaded_bits),
                result.slot_log.len(),
                result.handover_count,
                result.distance_traveled_m
            );
            if result.truncated {
                eprintln!("warning: trace exhausted, result truncated");
                return Ok(EXIT_TRACE);
            }
            Ok(EXIT_OK)
        }
        Command::Compare {
            scenario,
            trace,
            out,
            seed,
        } => {
            let (config, source) = prepare(&scenario, trace.as_deref(), seed)?;
            let cmp = compare_policies(&config, &source)?;
            export_comparison(&cmp, config.mission_duration_s(), &out)?;
            println!(
                "{:<10} {:>14} {:>14} {:>10}",
                "policy", "total (Mbit)", "handovers", "hover (s)"
            );
            for r in [&cmp.greedy, &cmp.hgad] {
                println!(
                    "{:<10} {:>14.2} {:>14} {:>10.0}",
                    r.policy.name(),
                    mbit(r.total_downloaded_bits),
                    r.handover_count,
                    r.hover_slot_count as f64 * r.slot_dt_s
                );
            }
            println!("hgad/greedy = {:.4}", cmp.total_ratio());
            if cmp.greedy.truncated || cmp.hgad.truncated {
                eprintln!("warning: trace exhausted, results truncated");
                return Ok(EXIT_TRACE);
            }
            Ok(EXIT_OK)
        }
        Command::Oracle { capacities, quotas } => {
            let cap = read_capacities(&capacities)?;
            let best = optimal_schedule(&cap, &quotas)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&best).map_err(|e| MuleError::Other(e.to_string()))?
            );
            Ok(EXIT_OK)
        }
    }
}

/// Capacity CSV; a first line that does not parse as numbers is a header.
pub fn read_capacities(path: &Path) -> Result<CapacityMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| MuleError::Other(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| MuleError::Other(format!("{}: {e}", path.display())))?;
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(_) if k == 0 => continue,
            Err(_) => {
                return Err(MuleError::Dimension(format!(
                    "{}: row {} is not numeric",
                    path.display(),
                    k + 1
                )))
            }
        }
    }
    CapacityMatrix::new(rows)
}

/// Parses arguments, runs, and maps the outcome to a process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_VALIDATION
            } else {
                EXIT_OK
            };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
