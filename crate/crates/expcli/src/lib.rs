//! Experiment harness for the `nlkdv` solvers.
//!
//! - [`catalog`]: the built-in figure experiments.
//! - [`runner`]: parallel execution of the runs of an experiment and the analyses.
//! - [`bundle`]: CSV snapshots and the JSON summary on disk.
//! - [`sweep`]: one-parameter sweeps around a base configuration.

pub mod bundle;
pub mod catalog;
pub mod error;
pub mod runner;
pub mod sweep;

pub use bundle::{load_experiment, read_csv, write_bundle, Summary};
pub use catalog::{catalog, find, Analysis, DtSource, ExperimentSpec, RunSpec, SweepParam};
pub use error::{CliError, Result};
pub use runner::{execute, ExperimentOutcome, RunOutcome};
pub use sweep::{sweep_spec, DtRule};

use std::path::{Path, PathBuf};

/// Executes `spec` and writes its bundle under `out`; returns the outcome and
/// the experiment directory.
pub fn run_experiment(spec: &ExperimentSpec, out: &Path, jobs: usize) -> Result<(ExperimentOutcome, PathBuf)> {
    let outcome = execute(spec, jobs)?;
    let dir = write_bundle(&outcome, out)?;
    Ok((outcome, dir))
}
