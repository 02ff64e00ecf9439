use std::collections::HashSet;

use nalgebra::{Cholesky, DMatrix, Vector2};
use serde::{Deserialize, Serialize};

use super::kalman::{kalman_update, moment_match, SensorModel, TargetState};
use crate::error::{Error, Result};
use crate::ising::{encode, AssignmentMatrix, CostMatrix};

/// Upper limit on any cost entry, in nats. Keeps degenerate entries
/// (`pd = 1` misses, `λ = 0` clutter) finite.
pub const COST_CLAMP: f64 = 700.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scan {
    pub time_index: usize,
    pub measurements: Vec<[f64; 2]>,
}

impl Scan {
    pub fn new(time_index: usize, measurements: Vec<[f64; 2]>) -> Self {
        Self {
            time_index,
            measurements,
        }
    }

    pub fn measurement(&self, m: usize) -> Vector2<f64> {
        Vector2::from(self.measurements[m])
    }

    pub fn len(&self) -> usize {
        self.measurements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measurements.is_empty()
    }
}

/// `ln N(y; H·x̂, H·P·Hᵀ + R)` through a Cholesky factor of the innovation
/// covariance.
pub fn log_innovation_density(state: &TargetState, y: &Vector2<f64>, sensor: &SensorModel) -> Result<f64> {
    let s = sensor.innovation_covariance(state);
    let chol = Cholesky::new(s).ok_or(Error::SingularInnovation)?;
    let l = chol.l();
    let z = l
        .solve_lower_triangular(&(y - sensor.h * state.mean))
        .ok_or(Error::SingularInnovation)?;
    let log_det = 2.0 * (l[(0, 0)].ln() + l[(1, 1)].ln());
    Ok(-(2.0 * std::f64::consts::PI).ln() - 0.5 * log_det - 0.5 * z.norm_squared())
}

fn clamp(v: f64) -> f64 {
    if v.is_nan() {
        COST_CLAMP
    } else {
        v.min(COST_CLAMP)
    }
}

/// Association costs in nats: pairings `−ln[pd·N(y_m; ·)]`, misses
/// `−ln(1 − pd)`, clutter `−ln(λ/|FoV|)`.
pub fn cost_matrix(predicted: &[TargetState], scan: &Scan, sensor: &SensorModel) -> Result<CostMatrix> {
    if predicted.is_empty() {
        return Err(Error::InvalidArgument("cost matrix needs at least one target".into()));
    }
    let (n_t, n_m) = (predicted.len(), scan.len());
    let mut g = CostMatrix::zeros(n_t, n_m);
    let miss = clamp(-(1.0 - sensor.pd).ln());
    let clutter = clamp(-(sensor.lambda / sensor.fov_area()).ln());
    for n in 1..=n_t {
        g.set(0, n, miss);
    }
    for m in 1..=n_m {
        g.set(m, 0, clutter);
        let y = scan.measurement(m - 1);
        for (n, t) in predicted.iter().enumerate() {
            let ll = log_innovation_density(t, &y, sensor)?;
            g.set(m, n + 1, clamp(-sensor.pd.ln() - ll));
        }
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentHypothesis {
    pub assignment: AssignmentMatrix,
    pub log_weight: f64,
    pub weight: f64,
}

impl AssignmentHypothesis {
    /// Configuration index of the assignment.
    pub fn index(&self) -> u64 {
        encode(&self.assignment.to_configuration()).expect("assignment fits in 64 spins")
    }
}

/// Softmax of `−Σ Γ_ij S_ij` over the given assignments, sorted by
/// descending weight with ties broken by ascending configuration index.
pub fn assignment_weights(hypotheses: &[AssignmentMatrix], costs: &CostMatrix) -> Result<Vec<AssignmentHypothesis>> {
    if hypotheses.is_empty() {
        return Err(Error::EmptyHypotheses);
    }
    let (n_t, n_m) = (costs.n_targets(), costs.n_measurements());
    let mut seen = HashSet::new();
    let mut scored = Vec::with_capacity(hypotheses.len());
    for s in hypotheses {
        if s.n_targets() != n_t || s.n_measurements() != n_m {
            return Err(Error::InvalidArgument("assignment shape does not match cost matrix".into()));
        }
        if !s.is_feasible() {
            return Err(Error::InvalidArgument(format!("infeasible assignment {}", s.bitstring())));
        }
        if !seen.insert(s.clone()) {
            return Err(Error::InvalidArgument(format!("duplicate assignment {}", s.bitstring())));
        }
        let cost: f64 = s
            .entries()
            .iter()
            .zip(costs.as_slice())
            .filter(|(&x, _)| x == 1)
            .map(|(_, &g)| g)
            .sum();
        let index = encode(&s.to_configuration())?;
        scored.push((index, s.clone(), -cost));
    }
    let max = scored.iter().map(|h| h.2).fold(f64::NEG_INFINITY, f64::max);
    let z: f64 = scored.iter().map(|h| (h.2 - max).exp()).sum();
    let log_z = max + z.ln();
    let mut out: Vec<(u64, AssignmentHypothesis)> = scored
        .into_iter()
        .map(|(index, assignment, log_weight)| {
            (
                index,
                AssignmentHypothesis {
                    assignment,
                    log_weight,
                    weight: (log_weight - log_z).exp(),
                },
            )
        })
        .collect();
    out.sort_by(|a, b| b.1.weight.total_cmp(&a.1.weight).then(a.0.cmp(&b.0)));
    Ok(out.into_iter().map(|(_, h)| h).collect())
}

/// `β[(n-1, m)]`: probability that target `n` produced measurement `m`;
/// column 0 is the miss probability.
pub fn marginal_association_probabilities(
    hypotheses: &[AssignmentHypothesis],
    n_targets: usize,
    n_measurements: usize,
) -> DMatrix<f64> {
    let mut beta = DMatrix::zeros(n_targets, n_measurements + 1);
    for h in hypotheses {
        for n in 1..=n_targets {
            for m in 0..=n_measurements {
                if h.assignment.get(m, n) == 1 {
                    beta[(n - 1, m)] += h.weight;
                }
            }
        }
    }
    beta
}

/// Per-target mixture of the miss component and each measurement update,
/// weighted by the marginals and collapsed by moment matching.
pub fn jpda_scan_update(
    predicted: &[TargetState],
    scan: &Scan,
    hypotheses: &[AssignmentHypothesis],
    sensor: &SensorModel,
) -> Result<Vec<TargetState>> {
    let beta = marginal_association_probabilities(hypotheses, predicted.len(), scan.len());
    predicted
        .iter()
        .enumerate()
        .map(|(n, pred)| {
            let mut weights = vec![beta[(n, 0)]];
            let mut components = vec![pred.clone()];
            for m in 1..=scan.len() {
                let w = beta[(n, m)];
                if w > 0.0 {
                    weights.push(w);
                    components.push(kalman_update(pred, &scan.measurement(m - 1), sensor)?);
                }
            }
            moment_match(&weights, &components)
        })
        .collect()
}
