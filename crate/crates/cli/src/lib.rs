//! Experiment orchestration around the duplex simulator core: TOML
//! experiment specs, a deterministic parallel runner, schema-stable CSV and
//! manifest output, and diversity-slope fitting.

pub mod error;
pub mod fit;
pub mod output;
pub mod runner;
pub mod spec;

pub use error::{CliError, Result};
pub use fit::{diversity_fit, sinr_at_outage_level, FitOptions, SchemeSlope};
pub use output::{
    aggregate, export_gnuplot, parse_aggregate_csv, render_aggregate_csv, render_region_csv,
    render_runs_csv, write_experiment_outputs, write_region_outputs, AggregateRow, Manifest,
    RunRow,
};
pub use runner::{run_experiment, run_jobs, WORKERS_ENV};
pub use spec::{ExperimentSpec, ResolvedJob};
