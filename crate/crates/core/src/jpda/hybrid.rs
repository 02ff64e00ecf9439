use serde::{Deserialize, Serialize};

use super::association::{assignment_weights, cost_matrix, jpda_scan_update, AssignmentHypothesis, Scan};
use super::kalman::{kalman_predict, MotionModel, SensorModel, TargetState};
use crate::error::{Error, Result};
use crate::ising::{build_mtda, decode, AssignmentMatrix, CostMatrix, ProblemKind};
use crate::rng::derive_seed;
use crate::sampler::{enumerate_below, sample, Backend, SamplerRequest};

/// Conditioned costs are capped at this many nats before scaling.
pub const CONDITIONED_COST_CAP: f64 = 40.0;
/// Conditioned costs are scaled to at most this fraction of `c`.
pub const CONDITIONING_MARGIN: f64 = 0.9;

/// Sampler settings for each scan; the model is filled in per scan and the
/// seed is derived from `seed` and the scan's time index.
#[derive(Debug, Clone)]
pub struct SamplerTemplate {
    pub backend: Backend,
    pub n_shots: usize,
    pub seed: u64,
}

/// Costs handed to the annealing model.
///
/// Each real row and column is shifted by its minimum, which moves every
/// feasible assignment's total by the same constant. Entries are then
/// capped and scaled to at most `CONDITIONING_MARGIN · c` so that no
/// single-line violation can lower the energy below the feasible manifold.
/// Feasible ranking is preserved except among assignments using capped
/// entries, whose weights are negligible.
pub fn condition_costs(costs: &CostMatrix, c: f64) -> CostMatrix {
    let (n_t, n_m) = (costs.n_targets(), costs.n_measurements());
    let mut g = costs.clone();
    for m in 1..=n_m {
        let min = (0..=n_t).map(|n| g.get(m, n)).fold(f64::INFINITY, f64::min);
        for n in 0..=n_t {
            g.set(m, n, g.get(m, n) - min);
        }
    }
    for n in 1..=n_t {
        let min = (0..=n_m).map(|m| g.get(m, n)).fold(f64::INFINITY, f64::min);
        for m in 0..=n_m {
            g.set(m, n, g.get(m, n) - min);
        }
    }
    let max = g.as_slice().iter().fold(0.0f64, |a, &v| a.max(v.min(CONDITIONED_COST_CAP)));
    let scale = if max > 0.0 { (CONDITIONING_MARGIN * c / max).min(1.0) } else { 1.0 };
    for m in 0..=n_m {
        for n in 0..=n_t {
            if m + n > 0 {
                g.set(m, n, g.get(m, n).min(CONDITIONED_COST_CAP) * scale);
            }
        }
    }
    g
}

#[derive(Debug, Clone)]
pub struct HybridStep {
    pub time_index: usize,
    pub targets: Vec<TargetState>,
    pub hypotheses: Vec<AssignmentHypothesis>,
    pub costs: CostMatrix,
}

/// Predict, build costs, sample the MTDA model, weight the distinct
/// feasible assignments, and collapse each target's mixture.
pub fn hybrid_step(
    targets: &[TargetState],
    scan: &Scan,
    sensor: &SensorModel,
    motion: &MotionModel,
    template: &SamplerTemplate,
    c: f64,
) -> Result<HybridStep> {
    let predicted: Vec<TargetState> = targets.iter().map(|t| kalman_predict(t, motion)).collect();
    let costs = cost_matrix(&predicted, scan, sensor)?;
    let (n_t, n_m) = (predicted.len(), scan.len());
    let kind = ProblemKind::Mtda {
        n_targets: n_t,
        n_measurements: n_m,
    };
    let model = build_mtda(n_t, n_m, &condition_costs(&costs, c), c)?;
    let shots = match &template.backend {
        Backend::Exhaustive { energy_cutoff } => {
            enumerate_below(&model, *energy_cutoff, |j| kind.is_feasible_index(j))?
        }
        backend => sample(&SamplerRequest {
            model,
            backend: backend.clone(),
            n_shots: template.n_shots,
            seed: derive_seed(template.seed, scan.time_index as u64),
        })?,
    };
    let feasible = shots
        .unique
        .iter()
        .filter(|u| kind.is_feasible_index(u.index))
        .map(|u| AssignmentMatrix::from_configuration(n_t, n_m, &decode(u.index, kind.n_spins())?))
        .collect::<Result<Vec<_>>>()?;
    if feasible.is_empty() {
        return Err(Error::NoFeasibleConfiguration {
            n_shots: shots.n_shots(),
        });
    }
    let hypotheses = assignment_weights(&feasible, &costs)?;
    let targets = jpda_scan_update(&predicted, scan, &hypotheses, sensor)?;
    Ok(HybridStep {
        time_index: scan.time_index,
        targets,
        hypotheses,
        costs,
    })
}

/// Runs [`hybrid_step`] over `scans` in order, starting from `initial`.
pub fn run_tracker(
    initial: &[TargetState],
    scans: &[Scan],
    sensor: &SensorModel,
    motion: &MotionModel,
    template: &SamplerTemplate,
    c: f64,
) -> Result<Vec<HybridStep>> {
    let mut current = initial.to_vec();
    let mut out = Vec::with_capacity(scans.len());
    for scan in scans {
        let step = hybrid_step(&current, scan, sensor, motion, template, c)?;
        current = step.targets.clone();
        out.push(step);
    }
    Ok(out)
}

/// One row per scan and target: mean, covariance upper triangle, and the
/// scan's top hypothesis weight (empty for the initial prior).
pub fn tracks_csv(initial: &[TargetState], initial_index: usize, steps: &[HybridStep]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["scan".to_string(), "target".into(), "x".into(), "vx".into(), "y".into(), "vy".into()];
    for r in 0..4 {
        for c in r..4 {
            header.push(format!("p{r}{c}"));
        }
    }
    header.push("top_weight".into());
    w.write_record(&header)?;
    let mut rows = |scan: usize, targets: &[TargetState], top: Option<f64>| -> Result<()> {
        for (n, t) in targets.iter().enumerate() {
            let mut rec = vec![scan.to_string(), (n + 1).to_string()];
            rec.extend(t.mean.iter().map(|v| v.to_string()));
            for r in 0..4 {
                for c in r..4 {
                    rec.push(t.covariance[(r, c)].to_string());
                }
            }
            rec.push(top.map(|v| v.to_string()).unwrap_or_default());
            w.write_record(&rec)?;
        }
        Ok(())
    };
    rows(initial_index, initial, None)?;
    for s in steps {
        rows(s.time_index, &s.targets, s.hypotheses.first().map(|h| h.weight))?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("utf8"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisRecord {
    pub scan: usize,
    /// `(assignment bitstring, weight)`, highest weight first.
    pub hypotheses: Vec<(String, f64)>,
}

pub fn hypotheses_json(steps: &[HybridStep]) -> Vec<HypothesisRecord> {
    steps
        .iter()
        .map(|s| HypothesisRecord {
            scan: s.time_index,
            hypotheses: s.hypotheses.iter().map(|h| (h.assignment.bitstring(), h.weight)).collect(),
        })
        .collect()
}
