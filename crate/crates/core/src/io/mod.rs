//! Scenario files, trace ingestion, result export and the command line.

pub mod cli;
pub mod export;
pub mod rate_table;
pub mod scenario;
pub mod trace;

pub use export::{export_comparison, export_results, read_slot_log};
pub use rate_table::load_rate_table;
pub use scenario::{load_scenario, load_scenario_file, Scenario};
pub use trace::load_trace;
