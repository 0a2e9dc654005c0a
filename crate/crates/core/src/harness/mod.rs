//! Experiment driver: reference solutions, window sweeps, error metrics,
//! window selection and CSV/JSON reports.

mod config;
mod metric;
mod report;
mod sweep;

use std::path::{Path, PathBuf};

pub use config::{
    EtaCGrid, Method, ModelId, Preset, SweepConfig, KG_EPS, RSWE_EPS, RSWE_SLOW_EPS, SPRING_RHOS,
};
pub use metric::{error_metric, BuiltModel, MetricKind};
pub use report::{to_csv, to_json, write_report, CSV_FILE, CSV_HEADER, JSON_FILE};
pub use sweep::{
    build_reference, run_sweeps, select_windows, sort_rows, zeta_sweep, CellStatus, ErrorReport, Row, RunOptions,
    Selection,
};

use crate::error::Result;

/// Paths written by [`run_experiment`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub report: ErrorReport,
    pub csv: PathBuf,
    pub json: PathBuf,
}

/// Runs all sweeps and writes `results.csv` and `results.json` into `out_dir`.
pub fn run_experiment(configs: &[SweepConfig], options: &RunOptions, out_dir: &Path) -> Result<ExperimentOutput> {
    let report = run_sweeps(configs, options)?;
    let (csv, json) = write_report(out_dir, configs, &report)?;
    Ok(ExperimentOutput { report, csv, json })
}
