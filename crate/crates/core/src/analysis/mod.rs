//! Measurements on solutions: slope bounds, traveling waves, binary
//! oscillations, modified-equation consistency and convergence metrics.

pub mod binary;
pub mod metrics;
pub mod modified;
pub mod oslc;
pub mod traveling;

pub use binary::{
    decompose_binary, envelope_prediction, fit_envelope, fit_envelope_rate, integrate_two_phase, two_phase_point,
    two_phase_rhs, AlphaBeta, EnvelopeFit, EnvelopeFitOptions, EnvelopePrediction, OscillationDecomposition, Parity,
    TwoPhaseHistory,
};
pub use metrics::{
    attractor_distance, l1_distance, linf_distance, ripple_metrics, ripple_metrics_of, scaled_profile_distance,
    RippleMetrics,
};
pub use modified::{modified_equation_residual, ModifiedEquationReport, Polynomial, SmoothFunction};
pub use oslc::{check_decay_bound, check_oslc, oslc_bound, OslcReport};
pub use traveling::{traveling_wave, TravelingWaveProfile, WaveResolution};
