//! Executes experiments: independent runs in parallel, then the analyses.

use log::info;
use rayon::prelude::*;
use serde::Serialize;

use nlkdv::analysis::{
    attractor_distance, check_decay_bound, check_oslc, decompose_binary, fit_envelope, modified_equation_residual,
    ripple_metrics, traveling_wave, EnvelopeFit, EnvelopeFitOptions, EnvelopePrediction, ModifiedEquationReport,
    OslcReport, Parity, Polynomial, RippleMetrics,
};
use nlkdv::analysis::metrics::zero_crossing;
use nlkdv::scheme::entropy::{entropy_reference, DEFAULT_FACTOR};
use nlkdv::scheme::{run, run_to_steady};
use nlkdv::{ConvexFlux, Dispersion, Run, State, Transport};

use crate::catalog::{Analysis, ExperimentSpec, RunSpec, SweepParam};
use crate::error::{CliError, Result};

/// Slack of the outer-envelope containment check.
pub const ENVELOPE_SLACK: f64 = 0.05;
/// Allowed excess over the slope decay bound.
pub const DECAY_FACTOR: f64 = 1.05;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillationSeries {
    pub times: Vec<f64>,
    pub max_abs_w: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeMetrics {
    pub prediction: EnvelopePrediction<f64>,
    pub fit: Option<EnvelopeFit<f64>>,
    pub fit_error: Option<String>,
    pub slack: f64,
    /// Fraction of nodes not beyond the outer envelope curve.
    pub fraction_inside_outer: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttractorMetrics {
    pub u1: f64,
    pub support_half_width: f64,
    /// Zero crossing of the final state, where the profile is centered.
    pub center: f64,
    pub distance: f64,
}

/// Per-run analysis results; absent entries were not requested.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunMetrics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oslc: Option<OslcReport<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decay_bound: Option<OslcReport<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ripple: Option<RippleMetrics<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oscillation: Option<OscillationSeries>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub envelope: Option<EnvelopeMetrics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attractor: Option<AttractorMetrics>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub spec: RunSpec,
    pub trajectory: Run,
    /// Entropy solution at the final time on the run's grid.
    pub reference: Option<State>,
    /// Traveling-wave profile centered on the final state, on the run's grid.
    pub wave: Option<Vec<f64>>,
    pub metrics: RunMetrics,
}

impl RunOutcome {
    pub fn last(&self) -> &State {
        self.trajectory.last()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinementStep {
    pub coarse: String,
    pub fine: String,
    /// L1 difference with the finer solution restricted to the coarse nodes.
    pub l1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Refinement {
    pub steps: Vec<RefinementStep>,
    /// `l1[k] / l1[k + 1]`.
    pub ratios: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceSeries {
    pub dispersion: Dispersion<f64>,
    pub labels: Vec<String>,
    /// Decreasing.
    pub deltas: Vec<f64>,
    pub l1: Vec<f64>,
    pub strictly_decreasing: bool,
    /// Last over first L1 distance.
    pub reduction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModifiedEquationCase {
    pub dispersion: Dispersion<f64>,
    pub coefficients: Vec<f64>,
    pub window: (f64, f64),
    pub report: ModifiedEquationReport<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: SweepParam,
    pub value: f64,
    pub label: String,
    pub l1_reference: Option<f64>,
    pub ripple_amplitude: Option<f64>,
    pub oscillation_max: Option<f64>,
}

/// Results comparing several runs, or independent of runs.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Comparisons {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refinement: Option<Refinement>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence: Option<Vec<ConvergenceSeries>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modified_equation: Option<Vec<ModifiedEquationCase>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<SweepRow>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub spec: ExperimentSpec,
    pub runs: Vec<RunOutcome>,
    pub comparisons: Comparisons,
}

impl ExperimentOutcome {
    pub fn run(&self, label: &str) -> Option<&RunOutcome> {
        self.runs.iter().find(|r| r.spec.label == label)
    }
}

/// Runs every configuration of `spec` on `jobs` worker threads (0 picks the
/// number of cores) and applies the requested analyses.
///
/// Each run is a sequential time-stepping chain with no shared state, so the
/// results do not depend on `jobs`.
pub fn execute(spec: &ExperimentSpec, jobs: usize) -> Result<ExperimentOutcome> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    let runs = pool.install(|| {
        spec.runs
            .par_iter()
            .map(|r| execute_run(spec, r))
            .collect::<Result<Vec<_>>>()
    })?;
    let wants = |a: Analysis| spec.analyses.contains(&a);
    let analysis_error = |a: Analysis| {
        let experiment = spec.id.clone();
        move |source| CliError::Analysis { experiment, analysis: a.name(), source }
    };
    let mut comparisons = Comparisons::default();
    if wants(Analysis::Refinement) {
        comparisons.refinement = Some(refinement(&runs).map_err(analysis_error(Analysis::Refinement))?);
    }
    if wants(Analysis::Convergence) {
        comparisons.convergence = Some(convergence(&runs));
    }
    if wants(Analysis::ModifiedEquation) {
        comparisons.modified_equation =
            Some(modified_equation_cases().map_err(analysis_error(Analysis::ModifiedEquation))?);
    }
    if let Some(axis) = &spec.sweep {
        comparisons.sweep = Some(
            axis.values
                .iter()
                .zip(&runs)
                .map(|(&value, r)| SweepRow {
                    param: axis.param,
                    value,
                    label: r.spec.label.clone(),
                    l1_reference: r.metrics.ripple.map(|m| m.l1),
                    ripple_amplitude: r.metrics.ripple.map(|m| m.amplitude),
                    oscillation_max: r.metrics.oscillation.as_ref().and_then(|o| o.max_abs_w.last().copied()),
                })
                .collect(),
        );
    }
    Ok(ExperimentOutcome { spec: spec.clone(), runs, comparisons })
}

fn execute_run(experiment: &ExperimentSpec, spec: &RunSpec) -> Result<RunOutcome> {
    let wants = |a: Analysis| experiment.analyses.contains(&a);
    let fail = |source| CliError::Run { experiment: experiment.id.clone(), label: spec.label.clone(), source };
    let c = &spec.config;
    info!("{}/{}: dt = {:e}, {} steps", experiment.id, spec.label, c.dt, c.steps_to(c.t_end));
    let trajectory = match spec.steady_tol {
        Some(tol) => run_to_steady(c, tol),
        None => run(c),
    }
    .map_err(fail)?;
    info!("{}/{}: reached t = {}", experiment.id, spec.label, trajectory.t_reached);

    let analysis_error = |a: Analysis| {
        move |source| CliError::Analysis { experiment: format!("{}/{}", experiment.id, spec.label), analysis: a.name(), source }
    };
    let last = trajectory.last();
    let mut metrics = RunMetrics::default();
    let mut reference = None;
    let mut wave = None;
    if wants(Analysis::Oslc) && trajectory.snapshots.len() > 1 {
        metrics.oslc = Some(check_oslc(&trajectory).map_err(analysis_error(Analysis::Oslc))?);
    }
    if wants(Analysis::DecayBound) && trajectory.snapshots.len() > 1 {
        let alpha = c.transport.alpha();
        metrics.decay_bound =
            Some(check_decay_bound(&trajectory, alpha, DECAY_FACTOR).map_err(analysis_error(Analysis::DecayBound))?);
    }
    if wants(Analysis::Ripple) || wants(Analysis::Convergence) {
        let r = entropy_reference(&c.profile, &c.transport, last.t, &last.grid, DEFAULT_FACTOR)
            .map_err(analysis_error(Analysis::Ripple))?;
        metrics.ripple = Some(ripple_metrics(&trajectory, &r).map_err(analysis_error(Analysis::Ripple))?);
        reference = Some(r);
    }
    if wants(Analysis::Oscillation) {
        let (times, max_abs_w) = trajectory
            .snapshots
            .iter()
            .map(|s| (s.t, decompose_binary(s, Parity::EvenAtZero).max_abs_w()))
            .unzip();
        metrics.oscillation = Some(OscillationSeries { times, max_abs_w });
    }
    if wants(Analysis::Envelope) {
        let (left, right) = riemann_states(spec).map_err(analysis_error(Analysis::Envelope))?;
        let prediction =
            EnvelopePrediction::new(c.delta, last.dx(), left, right).map_err(analysis_error(Analysis::Envelope))?;
        let (fit, fit_error) =
            match fit_envelope(&decompose_binary(last, Parity::EvenAtZero), &last.grid, EnvelopeFitOptions::default()) {
                Ok(f) => (Some(f), None),
                Err(e) => (None, Some(e.to_string())),
            };
        metrics.envelope = Some(EnvelopeMetrics {
            prediction,
            fit,
            fit_error,
            slack: ENVELOPE_SLACK,
            fraction_inside_outer: prediction.fraction_inside_outer(last, ENVELOPE_SLACK),
        });
    }
    if wants(Analysis::Attractor) {
        let (left, right) = riemann_states(spec).map_err(analysis_error(Analysis::Attractor))?;
        let u1 = 0.5 * (left - right);
        let profile = traveling_wave(u1, c.delta, &[]).map_err(analysis_error(Analysis::Attractor))?;
        let center = zero_crossing(last).map_err(analysis_error(Analysis::Attractor))?;
        let distance = attractor_distance(last, &profile).map_err(analysis_error(Analysis::Attractor))?;
        wave = Some(last.grid.nodes().iter().map(|&x| profile.eval(x - center)).collect());
        metrics.attractor = Some(AttractorMetrics {
            u1,
            support_half_width: profile.support_half_width(),
            center,
            distance,
        });
    }
    Ok(RunOutcome { spec: spec.clone(), trajectory, reference, wave, metrics })
}

fn riemann_states(spec: &RunSpec) -> nlkdv::Result<(f64, f64)> {
    spec.config
        .profile
        .riemann_states()
        .ok_or_else(|| nlkdv::Error::Precondition("needs Riemann initial data".into()))
}

/// L1 differences between successive refinements; the finer grid must nest
/// the coarser one.
fn refinement(runs: &[RunOutcome]) -> nlkdv::Result<Refinement> {
    let mut sorted: Vec<&RunOutcome> = runs.iter().collect();
    sorted.sort_by_key(|r| r.last().len());
    let mut steps = Vec::new();
    for pair in sorted.windows(2) {
        let (coarse, fine) = (pair[0].last(), pair[1].last());
        let (nc, nf) = (coarse.len() - 1, fine.len() - 1);
        if nf % nc != 0 || coarse.grid.x_min() != fine.grid.x_min() || coarse.grid.x_max() != fine.grid.x_max() {
            return Err(nlkdv::Error::Alignment(format!(
                "grid with {nf} intervals does not refine the one with {nc}"
            )));
        }
        let k = nf / nc;
        let l1 = coarse.dx() * coarse.u.iter().enumerate().map(|(i, &u)| (u - fine.u[k * i]).abs()).sum::<f64>();
        steps.push(RefinementStep { coarse: pair[0].spec.label.clone(), fine: pair[1].spec.label.clone(), l1 });
    }
    let ratios = steps.windows(2).map(|w| w[0].l1 / w[1].l1).collect();
    Ok(Refinement { steps, ratios })
}

/// Groups runs by dispersion kind and orders each group by decreasing `delta`.
fn convergence(runs: &[RunOutcome]) -> Vec<ConvergenceSeries> {
    let mut kinds: Vec<Dispersion<f64>> = Vec::new();
    for r in runs {
        if !kinds.contains(&r.spec.config.dispersion) {
            kinds.push(r.spec.config.dispersion);
        }
    }
    kinds
        .into_iter()
        .map(|g| {
            let mut group: Vec<&RunOutcome> = runs.iter().filter(|r| r.spec.config.dispersion == g).collect();
            group.sort_by(|a, b| b.spec.config.delta.total_cmp(&a.spec.config.delta));
            let l1: Vec<f64> = group.iter().map(|r| r.metrics.ripple.map_or(f64::NAN, |m| m.l1)).collect();
            ConvergenceSeries {
                dispersion: g,
                labels: group.iter().map(|r| r.spec.label.clone()).collect(),
                deltas: group.iter().map(|r| r.spec.config.delta).collect(),
                strictly_decreasing: l1.windows(2).all(|w| w[1] < w[0]),
                reduction: l1.last().unwrap_or(&f64::NAN) / l1.first().unwrap_or(&f64::NAN),
                l1,
            }
        })
        .collect()
}

/// `u = x^4 + x^2` has `u_xx > 0` everywhere.
pub const MODIFIED_EQUATION_POLYNOMIAL: [f64; 5] = [0.0, 0.0, 1.0, 0.0, 1.0];
pub const MODIFIED_EQUATION_WINDOW: (f64, f64) = (0.2, 0.8);
pub const MODIFIED_EQUATION_LADDER: [f64; 3] = [1.0 / 40.0, 1.0 / 80.0, 1.0 / 160.0];

fn modified_equation_cases() -> nlkdv::Result<Vec<ModifiedEquationCase>> {
    let u = Polynomial { coeffs: MODIFIED_EQUATION_POLYNOMIAL.to_vec() };
    [Dispersion::Square, Dispersion::Abs]
        .into_iter()
        .map(|g| {
            let report = modified_equation_residual(
                &u,
                &Transport::Burgers,
                &g,
                1.0,
                MODIFIED_EQUATION_WINDOW,
                &MODIFIED_EQUATION_LADDER,
            )?;
            Ok(ModifiedEquationCase {
                dispersion: g,
                coefficients: u.coeffs.clone(),
                window: MODIFIED_EQUATION_WINDOW,
                report,
            })
        })
        .collect()
}
