//! Experiment orchestration: configuration, method comparison, transfer
//! and scaling scans, and file output.

mod commands;
mod config;
mod io;
mod methods;
mod transfer;

pub use commands::{qsl_duration_grid, run, Command};
pub use config::{default_ansatz, default_actions, DriveSettings, ExperimentConfig, LandscapeSettings, LmgSettings, Method, TransferSettings};
pub use io::{fmt_f64, write_table, JsonlWriter, ProtocolRow, ProtocolTable};
pub use methods::{protocol_norm_density, qaoa_best, qaoa_sequence, run_comparison, train_cdqaoa, ComparisonRow, QaoaResult};
pub use transfer::{reoptimize_policy, scaling_scan, transfer_eval, unique_protocols, DurationPolicy, ScanAxis, ScanPoint, TransferResult};
