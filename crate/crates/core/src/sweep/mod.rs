//! Configuration-driven SNR sweeps over the metric paths, with CSV output.

mod config;
mod output;
mod run;

pub use config::{parse_config, parse_grid, ConfigError, Metric, Path, Preset, SweepSpec, SweepVar};
pub use output::{emit_csv, gnuplot_script, write_csv, CSV_HEADER};
pub use run::{run_sweep, ResultRow};
