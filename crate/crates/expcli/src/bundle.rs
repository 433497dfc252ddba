//! Result bundles on disk.
//!
//! ```text
//! <out>/<experiment id>/summary.json
//! <out>/<experiment id>/<run label>/t<time>.csv
//! <out>/<experiment id>/<run label>/reference.csv        (ripple, convergence)
//! <out>/<experiment id>/<run label>/traveling_wave.csv   (attractor)
//! ```
//!
//! Every CSV has the header `x,u` and one row per node, written with 17
//! significant digits so values round-trip exactly.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use nlkdv::scheme::Diagnostics;
use nlkdv::{Config, State};

use crate::catalog::{Analysis, DtSource, ExperimentSpec, RunSpec};
use crate::error::{CliError, Result};
use crate::runner::{Comparisons, ExperimentOutcome, RunMetrics};

pub const SUMMARY_FILE: &str = "summary.json";
pub const REFERENCE_FILE: &str = "reference.csv";
pub const WAVE_FILE: &str = "traveling_wave.csv";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnapshotEntry {
    pub t: f64,
    /// Relative to the experiment directory.
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub label: String,
    pub steps: usize,
    pub t_reached: f64,
    pub steady_at: Option<f64>,
    pub snapshots: Vec<SnapshotEntry>,
    pub diagnostics: Vec<Diagnostics<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wave_file: Option<String>,
    pub metrics: RunMetrics,
}

/// The single JSON document of a bundle: the full experiment definition
/// (enough to re-run it), diagnostics and metrics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub code_version: String,
    pub experiment: ExperimentSpec,
    pub runs: Vec<RunSummary>,
    pub comparisons: Comparisons,
}

/// Snapshot file name for time `t`.
pub fn snapshot_name(t: f64) -> String {
    format!("t{t:.6}.csv")
}

/// Writes the bundle of `outcome` under `out` and returns the experiment directory.
pub fn write_bundle(outcome: &ExperimentOutcome, out: &Path) -> Result<PathBuf> {
    let dir = out.join(&outcome.spec.id);
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let mut runs = Vec::with_capacity(outcome.runs.len());
    for r in &outcome.runs {
        let label = &r.spec.label;
        let run_dir = dir.join(label);
        fs::create_dir_all(&run_dir).map_err(|e| CliError::io(&run_dir, e))?;
        let mut snapshots = Vec::new();
        for s in &r.trajectory.snapshots {
            let name = snapshot_name(s.t);
            write_state(&run_dir.join(&name), s)?;
            snapshots.push(SnapshotEntry { t: s.t, file: format!("{label}/{name}") });
        }
        let reference_file = match &r.reference {
            Some(reference) => {
                write_state(&run_dir.join(REFERENCE_FILE), reference)?;
                Some(format!("{label}/{REFERENCE_FILE}"))
            }
            None => None,
        };
        let wave_file = match &r.wave {
            Some(u) => {
                write_csv(&run_dir.join(WAVE_FILE), &r.last().grid.nodes(), u)?;
                Some(format!("{label}/{WAVE_FILE}"))
            }
            None => None,
        };
        runs.push(RunSummary {
            label: label.clone(),
            steps: r.trajectory.steps,
            t_reached: r.trajectory.t_reached,
            steady_at: r.trajectory.steady_at,
            snapshots,
            diagnostics: r.trajectory.diagnostics.clone(),
            reference_file,
            wave_file,
            metrics: r.metrics.clone(),
        });
    }
    let summary = Summary {
        code_version: env!("CARGO_PKG_VERSION").into(),
        experiment: outcome.spec.clone(),
        runs,
        comparisons: outcome.comparisons.clone(),
    };
    let path = dir.join(SUMMARY_FILE);
    let mut text = serde_json::to_string_pretty(&summary).map_err(CliError::Serialize)?;
    text.push('\n');
    fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    Ok(dir)
}

fn write_state(path: &Path, state: &State) -> Result<()> {
    write_csv(path, &state.grid.nodes(), &state.u)
}

fn write_csv(path: &Path, x: &[f64], u: &[f64]) -> Result<()> {
    let csv_error = |source| CliError::Csv { path: path.to_path_buf(), source };
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    w.write_record(["x", "u"]).map_err(csv_error)?;
    for (x, u) in x.iter().zip(u) {
        w.write_record([format!("{x:.16e}"), format!("{u:.16e}")]).map_err(csv_error)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Reads an `x,u` CSV back into two columns.
pub fn read_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let csv_error = |source| CliError::Csv { path: path.to_path_buf(), source };
    let mut r = csv::Reader::from_path(path).map_err(csv_error)?;
    let mut xs = Vec::new();
    let mut us = Vec::new();
    for record in r.deserialize::<(f64, f64)>() {
        let (x, u) = record.map_err(csv_error)?;
        xs.push(x);
        us.push(u);
    }
    Ok((xs, us))
}

/// Analyses applied to a bare run configuration.
pub const DEFAULT_ANALYSES: [Analysis; 3] = [Analysis::Oslc, Analysis::Ripple, Analysis::Oscillation];

/// Loads an experiment from a JSON file holding either a bundle summary, an
/// experiment definition, or a bare run configuration. A bare configuration
/// becomes a one-run experiment named after the file stem.
pub fn load_experiment(path: &Path) -> Result<ExperimentSpec> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let parse_error = |source| CliError::Parse { path: path.to_path_buf(), source };
    let value: Value = serde_json::from_str(&text).map_err(parse_error)?;
    if let Some(experiment) = value.get("experiment") {
        return serde_json::from_value(experiment.clone()).map_err(parse_error);
    }
    if value.get("runs").is_some() {
        return serde_json::from_value(value).map_err(parse_error);
    }
    let config: Config = serde_json::from_value(value).map_err(parse_error)?;
    let id = path.file_stem().and_then(|s| s.to_str()).unwrap_or("config").to_string();
    Ok(ExperimentSpec {
        description: format!("configuration from {}", path.display()),
        runs: vec![RunSpec { label: "run".into(), config, dt_source: DtSource::Manual, steady_tol: None }],
        analyses: DEFAULT_ANALYSES.to_vec(),
        sweep: None,
        id,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapshot_names() {
        assert_eq!(snapshot_name(0.0), "t0.000000.csv");
        assert_eq!(snapshot_name(0.5), "t0.500000.csv");
        assert_eq!(snapshot_name(0.49999999999), "t0.500000.csv");
    }

    #[test]
    fn csv_round_trips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.csv");
        let x = vec![-1.0, 0.1, 1.0 / 3.0];
        let u = vec![std::f64::consts::PI, -1e-300, 5e-324];
        write_csv(&path, &x, &u).unwrap();
        assert_eq!(read_csv(&path).unwrap(), (x, u));
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("x,u\n"));
    }
}
