//! Detuning and parameter sweeps: configuration, parallel execution, CSV
//! emission, and run-to-run comparison.

mod config;
mod csv;
mod run;

pub use config::{
    parse_config, parse_with_overrides, preset, CliOverrides, ConfigError, NcutPolicy,
    SweepAxis, SweepConfig, SweepRange, DEFAULT_RANGE, PRESET_NAMES,
};
pub use csv::{
    compare_runs, emit_csv, parse_csv, render_csv, render_meta, ColumnComparison,
    CompareReport, CsvRow, CSV_HEADER,
};
pub use run::{auto_ncut, point_params, run_sweep, SweepError, SweepMetadata, SweepResult};
