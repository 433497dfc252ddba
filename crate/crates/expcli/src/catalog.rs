//! Built-in experiments reproducing the figure set.
//!
//! Parameters follow the figure captions. Where a caption omits the time step
//! it is filled in by [`suggest_dt`] at catalog construction and recorded as
//! [`DtSource::Suggested`], so bundles always carry the step actually used.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use nlkdv::scheme::suggest_dt;
use nlkdv::{Config, Dispersion, InitialProfile, RunConfig, SchemeKind};

use crate::error::{CliError, Result};

/// Where the time step of a run came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DtSource {
    /// Given directly in the caption.
    Caption,
    /// From a caption constraint `dt * delta = product`.
    DeltaProduct { product: f64 },
    /// Filled in by `suggest_dt`.
    Suggested,
    /// Set in a config file or by a sweep.
    Manual,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    /// Unique within the experiment; also the run's output directory name.
    pub label: String,
    pub config: Config,
    pub dt_source: DtSource,
    /// Stop once the per-step L-infinity change drops below this value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steady_tol: Option<f64>,
}

/// Measurements applied after the runs of an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    /// Nonincreasing `forward_slope_max` over the snapshots.
    Oslc,
    /// `forward_slope_max <= 1.05 / (1/p0 + t)`.
    DecayBound,
    /// L1 distance, excess extrema and overshoot against the entropy solution.
    Ripple,
    /// L1 to the entropy solution as `delta` decreases, per dispersion kind.
    Convergence,
    /// L1 differences between successive grid refinements.
    Refinement,
    /// Largest binary oscillation amplitude per snapshot.
    Oscillation,
    /// Fitted and predicted envelope of steady oscillations.
    Envelope,
    /// Distance to the traveling-wave profile.
    Attractor,
    /// Modified-equation residual orders for both dispersion kinds.
    ModifiedEquation,
}

impl Analysis {
    pub fn name(self) -> &'static str {
        match self {
            Analysis::Oslc => "oslc",
            Analysis::DecayBound => "decay_bound",
            Analysis::Ripple => "ripple",
            Analysis::Convergence => "convergence",
            Analysis::Refinement => "refinement",
            Analysis::Oscillation => "oscillation",
            Analysis::Envelope => "envelope",
            Analysis::Attractor => "attractor",
            Analysis::ModifiedEquation => "modified_equation",
        }
    }
}

/// The parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Delta,
    NPoints,
    Dt,
}

impl std::str::FromStr for SweepParam {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "delta" => Ok(SweepParam::Delta),
            "n_points" => Ok(SweepParam::NPoints),
            "dt" => Ok(SweepParam::Dt),
            _ => Err(CliError::UnknownName { what: "sweep parameter", given: s.into(), expected: "delta, n_points, dt" }),
        }
    }
}

impl std::fmt::Display for SweepParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SweepParam::Delta => "delta",
            SweepParam::NPoints => "n_points",
            SweepParam::Dt => "dt",
        })
    }
}

/// The swept parameter and its values, in run order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub id: String,
    pub description: String,
    pub runs: Vec<RunSpec>,
    pub analyses: Vec<Analysis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepAxis>,
}

impl ExperimentSpec {
    /// Checks that labels are unique directory names and that every config
    /// validates.
    pub fn validate(&self) -> Result<()> {
        let invalid = |reason: String| CliError::InvalidSpec { id: self.id.clone(), reason };
        if self.id.is_empty() || !is_path_safe(&self.id) {
            return Err(invalid(format!("id `{}` is not a plain directory name", self.id)));
        }
        if self.runs.is_empty() && self.analyses != [Analysis::ModifiedEquation] {
            return Err(invalid("no runs".into()));
        }
        let mut seen = HashSet::new();
        for run in &self.runs {
            if !is_path_safe(&run.label) {
                return Err(invalid(format!("label `{}` is not a plain directory name", run.label)));
            }
            if !seen.insert(run.label.as_str()) {
                return Err(invalid(format!("duplicate label `{}`", run.label)));
            }
            run.config
                .validate()
                .map_err(|e| invalid(format!("run `{}`: {e}", run.label)))?;
            if let Some(tol) = run.steady_tol {
                if !(tol > 0.0) {
                    return Err(invalid(format!("run `{}`: steady_tol must be positive", run.label)));
                }
            }
        }
        if let Some(axis) = &self.sweep {
            if axis.values.len() != self.runs.len() {
                return Err(invalid("sweep values and runs differ in number".into()));
            }
        }
        Ok(())
    }
}

fn is_path_safe(s: &str) -> bool {
    !s.is_empty()
        && s != "."
        && s != ".."
        && s.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.' | '='))
}

/// `dt * delta` of the exponential-data captions for `g = -|s|`.
pub const ABS_DT_DELTA: f64 = 1e-8;
/// `dt * delta` used with `g = -s^2`; the caption value `1e-8` is unstable
/// for the smooth dispersion on this data.
pub const SQUARE_DT_DELTA: f64 = 1e-10;
/// Steadiness threshold for the traveling-wave runs.
pub const STEADY_TOL: f64 = 1e-8;
/// Values of `delta` for the exponential-data families.
pub const EXP_DELTAS: [f64; 4] = [5e-3, 5e-4, 5e-5, 5e-6];

const T_END: f64 = 0.5;

fn exponential(g: Dispersion<f64>, intervals: usize, delta: f64) -> Config {
    RunConfig::new(intervals, false, InitialProfile::exponential(), g, delta, 1.0, T_END)
}

fn riemann(origin: bool, g: Dispersion<f64>, intervals: usize, delta: f64) -> Config {
    let profile = if origin {
        InitialProfile::riemann_with_origin(1.0, -1.0)
    } else {
        InitialProfile::riemann_plain(1.0, -1.0)
    };
    RunConfig::new(intervals, origin, profile, g, delta, 1.0, T_END)
}

fn caption(label: String, mut config: Config, dt: f64) -> RunSpec {
    config.dt = dt;
    RunSpec { label, config, dt_source: DtSource::Caption, steady_tol: None }
}

fn product(label: String, mut config: Config, product: f64) -> RunSpec {
    config.dt = product / config.delta;
    RunSpec { label, config, dt_source: DtSource::DeltaProduct { product }, steady_tol: None }
}

/// `suggest_dt`, shortened so that a whole number of steps reaches `t_end`.
fn suggested(label: String, mut config: Config) -> RunSpec {
    let dt = suggest_dt(&config).expect("catalog configurations are valid");
    config.dt = config.t_end / (config.t_end / dt).ceil();
    RunSpec { label, config, dt_source: DtSource::Suggested, steady_tol: None }
}

fn with_snapshots(mut run: RunSpec, times: &[f64]) -> RunSpec {
    run.config.snapshot_times = times.to_vec();
    run
}

fn kind_name(g: Dispersion<f64>) -> &'static str {
    match g {
        Dispersion::Abs => "abs",
        Dispersion::Square => "square",
        Dispersion::Power { .. } => "power",
    }
}

fn spec(id: &str, description: &str, runs: Vec<RunSpec>, analyses: &[Analysis]) -> ExperimentSpec {
    ExperimentSpec {
        id: id.into(),
        description: description.into(),
        runs,
        analyses: analyses.to_vec(),
        sweep: None,
    }
}

const EVOLUTION: [f64; 4] = [0.1, 0.2, 0.3, 0.4];
const FINE_EVOLUTION: [f64; 9] = [0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45];

fn exponential_family(g: Dispersion<f64>, deltas: &[f64], dt_delta: f64, snapshots: &[f64]) -> Vec<RunSpec> {
    deltas
        .iter()
        .map(|&d| {
            let label = format!("{}_delta{d:e}", kind_name(g));
            with_snapshots(product(label, exponential(g, 400, d), dt_delta), snapshots)
        })
        .collect()
}

fn riemann_pair(origin: bool, delta: f64) -> Vec<RunSpec> {
    [100, 200]
        .into_iter()
        .map(|n| suggested(format!("n{n}"), riemann(origin, Dispersion::Abs, n, delta)))
        .collect()
}

fn riemann_evolution(origin: bool) -> Vec<RunSpec> {
    vec![with_snapshots(suggested("n100".into(), riemann(origin, Dispersion::Abs, 100, 1e-6)), &EVOLUTION)]
}

fn traveling(delta: f64) -> Vec<RunSpec> {
    let mut run = suggested(format!("delta{delta:e}"), riemann(true, Dispersion::Square, 400, delta));
    run.steady_tol = Some(STEADY_TOL);
    vec![run]
}

/// The built-in experiments, in listing order.
pub fn catalog() -> Vec<ExperimentSpec> {
    use Analysis::*;
    let abs = Dispersion::Abs;
    let square = Dispersion::Square;
    let mut bo = exponential(abs, 400, 0.0);
    bo.scheme = SchemeKind::BoConservationLaw;
    bo.dt = 0.4 * bo.grid.build().expect("valid grid").dx();
    bo.snapshot_times = FINE_EVOLUTION.to_vec();
    let factor = [(100, 1e-5), (200, 1.25e-6), (400, 1.5625e-7)]
        .into_iter()
        .map(|(n, d)| suggested(format!("n{n}"), riemann(true, abs, n, d)))
        .collect();
    let conjecture = [(abs, ABS_DT_DELTA), (square, SQUARE_DT_DELTA)]
        .into_iter()
        .flat_map(|(g, p)| exponential_family(g, &EXP_DELTAS[..3], p, &FINE_EVOLUTION))
        .collect();

    vec![
        spec(
            "fig-trav.1",
            "smooth dispersion, Riemann data with origin, delta = 1e-5, N = 400, run to steady state",
            traveling(1e-5),
            &[Attractor],
        ),
        spec(
            "fig-trav.2",
            "smooth dispersion, Riemann data with origin, delta = 1e-6, N = 400, run to steady state",
            traveling(1e-6),
            &[Attractor],
        ),
        spec(
            "fig-ex1.1",
            "absolute-value dispersion, exponential data, N = 400, T = 0.5, dt * delta = 1e-8",
            exponential_family(abs, &EXP_DELTAS, ABS_DT_DELTA, &[]),
            &[Ripple, Convergence],
        ),
        spec(
            "fig-ex1.2",
            "absolute-value dispersion, exponential data, delta = 5e-4, N = 100, 200, 400",
            vec![
                caption("n100".into(), exponential(abs, 100, 5e-4), 2e-3),
                caption("n200".into(), exponential(abs, 200, 5e-4), 2e-4),
                caption("n400".into(), exponential(abs, 400, 5e-4), 2e-5),
            ],
            &[Ripple, Refinement],
        ),
        spec(
            "fig-ex1.3",
            "absolute-value dispersion, exponential data, time evolution, N = 400, delta = 5e-4",
            vec![with_snapshots(caption("n400".into(), exponential(abs, 400, 5e-4), 2e-5), &EVOLUTION)],
            &[Ripple],
        ),
        spec(
            "fig-ex1.4",
            "absolute-value dispersion, exponential data, delta = 1e-5, N = 100 and 200",
            vec![
                caption("n200".into(), exponential(abs, 200, 1e-5), 1e-4),
                caption("n100".into(), exponential(abs, 100, 1e-5), 1e-3),
            ],
            &[Ripple, Oscillation],
        ),
        spec(
            "fig-ex1.5",
            "smooth dispersion, exponential data, N = 400, T = 0.5, dt * delta = 1e-10",
            exponential_family(square, &EXP_DELTAS, SQUARE_DT_DELTA, &[]),
            &[Ripple, Convergence],
        ),
        spec(
            "fig-ex2.1",
            "absolute-value dispersion, Riemann data with origin, delta = 1e-5",
            riemann_pair(true, 1e-5),
            &[Oscillation, Envelope],
        ),
        spec(
            "fig-ex2.2",
            "absolute-value dispersion, Riemann data with origin, delta = 1e-6",
            riemann_pair(true, 1e-6),
            &[Oscillation, Envelope],
        ),
        spec(
            "fig-ex2.3",
            "absolute-value dispersion, Riemann data with origin, delta = 1e-6, N = 100, time evolution",
            riemann_evolution(true),
            &[Oscillation],
        ),
        spec(
            "fig-ex2.a.1",
            "absolute-value dispersion, Riemann data without origin, delta = 1e-5",
            riemann_pair(false, 1e-5),
            &[Oscillation],
        ),
        spec(
            "fig-ex2.a.2",
            "absolute-value dispersion, Riemann data without origin, delta = 1e-6",
            riemann_pair(false, 1e-6),
            &[Oscillation],
        ),
        spec(
            "fig-ex2.a.3",
            "absolute-value dispersion, Riemann data without origin, delta = 1e-6, N = 100, time evolution",
            riemann_evolution(false),
            &[Oscillation],
        ),
        spec(
            "fig-factor.1",
            "absolute-value dispersion, Riemann data with origin, delta / dx^3 fixed at 1.25",
            factor,
            &[Oscillation, Envelope],
        ),
        spec(
            "fig-env.1",
            "steady oscillation envelope, N = 100, delta = 1e-5",
            vec![suggested("n100".into(), riemann(true, abs, 100, 1e-5))],
            &[Oscillation, Envelope],
        ),
        spec(
            "fig-env.2",
            "steady oscillation envelope, N = 200, delta = 1e-6",
            vec![suggested("n200".into(), riemann(true, abs, 200, 1e-6))],
            &[Oscillation, Envelope],
        ),
        spec(
            "sweep-conjecture",
            "both dispersion kinds, exponential data, N = 400, delta = 5e-3, 5e-4, 5e-5: convergence to the entropy solution",
            conjecture,
            &[Oslc, Ripple, Convergence],
        ),
        spec(
            "check-modified-equation",
            "modified-equation residual orders on x^4 + x^2, dx = 1/40, 1/80, 1/160",
            Vec::new(),
            &[ModifiedEquation],
        ),
        spec(
            "check-oslc-bo",
            "Brenier-Osher scheme for Burgers, exponential data, N = 400, CFL 0.4: slope decay bound",
            vec![RunSpec { label: "n400".into(), config: bo, dt_source: DtSource::Manual, steady_tol: None }],
            &[DecayBound],
        ),
    ]
}

/// Looks up a catalog experiment by id.
pub fn find(id: &str) -> Result<ExperimentSpec> {
    catalog()
        .into_iter()
        .find(|e| e.id == id)
        .ok_or_else(|| CliError::UnknownExperiment(id.into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_ids_are_unique_and_valid() {
        let all = catalog();
        assert!(all.len() >= 16);
        let ids: HashSet<_> = all.iter().map(|e| e.id.as_str()).collect();
        assert_eq!(ids.len(), all.len());
        for e in &all {
            e.validate().unwrap();
        }
    }

    #[test]
    fn caption_parameters() {
        let ex11 = find("fig-ex1.1").unwrap();
        for r in &ex11.runs {
            assert_eq!(r.config.grid.n_points, 401);
            assert_eq!(r.config.t_end, 0.5);
            assert!((r.config.dt * r.config.delta - 1e-8).abs() < 1e-22);
        }
        let env2 = find("fig-env.2").unwrap();
        assert_eq!(env2.runs[0].config.delta, 1e-6);
        assert_eq!(env2.runs[0].config.grid.n_points, 201);
        for r in find("fig-ex2.1").unwrap().runs {
            let steps = r.config.t_end / r.config.dt;
            assert!((steps - steps.round()).abs() < 1e-9, "{steps}");
        }
        let ex12 = find("fig-ex1.2").unwrap();
        let dts: Vec<f64> = ex12.runs.iter().map(|r| r.config.dt).collect();
        assert_eq!(dts, [2e-3, 2e-4, 2e-5]);
    }

    #[test]
    fn fixed_factor_runs_share_the_envelope_rate() {
        for r in &find("fig-factor.1").unwrap().runs {
            let dx = r.config.grid.build().unwrap().dx();
            assert!((8.0 * r.config.delta / dx.powi(3) - 10.0).abs() < 1e-9);
        }
    }

    #[test]
    fn unknown_id_and_bad_labels() {
        assert!(matches!(find("fig-nope"), Err(CliError::UnknownExperiment(_))));
        let mut e = find("fig-env.1").unwrap();
        e.runs[0].label = "../escape".into();
        assert!(e.validate().is_err());
        let dup = e.runs[0].clone();
        e.runs[0].label = "a".into();
        e.runs.push(RunSpec { label: "a".into(), ..dup });
        assert!(e.validate().is_err());
    }

    #[test]
    fn spec_json_round_trips_and_rejects_unknown_fields() {
        let e = find("fig-ex1.2").unwrap();
        let text = serde_json::to_string(&e).unwrap();
        let back: ExperimentSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, e);
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["runs"][0]["config"]["bogus"] = serde_json::json!(1);
        assert!(serde_json::from_value::<ExperimentSpec>(v).is_err());
    }
}
