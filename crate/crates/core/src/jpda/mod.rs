//! Joint probabilistic data association over sampler-provided feasible
//! assignments.
//!
//! State vectors are ordered `(x, ẋ, y, ẏ)`. Each scan is processed by
//! predicting every target, building the association cost matrix `Γ`,
//! weighting feasible assignments by `exp(−Σ Γ)`, and collapsing each
//! target's Gaussian mixture back to a single Gaussian.

mod association;
mod hybrid;
mod kalman;

pub use association::{
    assignment_weights, cost_matrix, jpda_scan_update, log_innovation_density, marginal_association_probabilities,
    AssignmentHypothesis, Scan, COST_CLAMP,
};
pub use hybrid::{
    condition_costs, hybrid_step, hypotheses_json, run_tracker, tracks_csv, HybridStep, HypothesisRecord,
    SamplerTemplate, CONDITIONED_COST_CAP, CONDITIONING_MARGIN,
};
pub use kalman::{
    kalman_gain, kalman_predict, kalman_update, moment_match, FovBounds, MotionModel, SensorModel, TargetState,
};
