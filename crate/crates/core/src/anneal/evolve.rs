use serde::{Deserialize, Serialize};

use super::krylov::expm_apply;
use super::operators::{build_driver, build_problem_operator, Hamiltonian, ProblemOperator, TransverseField};
use super::schedule::AnnealSchedule;
use super::state::{outcome_distribution, DensityMatrix, QuantumState};
use super::C64;
use crate::error::{Error, Result};
use crate::ising::SpinModel;

/// Step-doubling acceptance threshold on outcome probabilities.
pub const DEFAULT_STEP_TOLERANCE: f64 = 1e-8;

/// Density-matrix evolution refuses models above this many spins.
pub const GKSL_SPIN_LIMIT: usize = 10;

// Gauss nodes and weights of the two-exponential fourth-order
// commutator-free scheme.
const SQRT3_6: f64 = 0.288_675_134_594_812_9;
const NODE_1: f64 = 0.5 - SQRT3_6;
const NODE_2: f64 = 0.5 + SQRT3_6;
const WEIGHT_1: f64 = 0.25 - SQRT3_6;
const WEIGHT_2: f64 = 0.25 + SQRT3_6;

/// Per-spin `σz` dephasing at a uniform rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LindbladConfig {
    pub dephasing_rate: f64,
    pub enabled: bool,
}

impl Default for LindbladConfig {
    fn default() -> Self {
        Self {
            dephasing_rate: 0.0,
            enabled: false,
        }
    }
}

impl LindbladConfig {
    pub fn dephasing(rate: f64) -> Self {
        Self {
            dephasing_rate: rate,
            enabled: true,
        }
    }

    pub fn effective_rate(&self) -> f64 {
        if self.enabled {
            self.dephasing_rate
        } else {
            0.0
        }
    }
}

/// One integration interval of the waveform.
#[derive(Debug, Clone, Copy)]
struct Interval {
    start: f64,
    len: f64,
    steps: usize,
    constant: bool,
}

fn plan(schedule: &AnnealSchedule, steps: usize, split_constant: bool) -> Vec<Interval> {
    let bp = schedule.breakpoints();
    let varying: f64 = bp
        .windows(2)
        .filter(|w| split_constant || w[0].1 != w[1].1)
        .map(|w| w[1].0 - w[0].0)
        .sum();
    bp.windows(2)
        .map(|w| {
            let len = w[1].0 - w[0].0;
            let constant = w[0].1 == w[1].1;
            let n = if constant && !split_constant {
                1
            } else {
                ((steps as f64) * len / varying).round().max(1.0) as usize
            };
            Interval {
                start: w[0].0,
                len,
                steps: n,
                constant,
            }
        })
        .collect()
}

struct Propagator<'a> {
    driver: &'a TransverseField,
    problem: &'a ProblemOperator,
    schedule: &'a AnnealSchedule,
    krylov_tol: f64,
}

impl Propagator<'_> {
    fn ham(&self, a: f64, b: f64) -> Hamiltonian<'_> {
        Hamiltonian {
            driver: self.driver,
            problem: self.problem,
            a,
            b,
        }
    }

    /// Advances `psi` across `[t, t + h]`.
    fn step(&self, t: f64, h: f64, constant: bool, psi: &[C64]) -> Vec<C64> {
        if constant {
            let (a, b) = self.schedule.ab_at(t + 0.5 * h);
            return expm_apply(&self.ham(a, b), h, psi, self.krylov_tol);
        }
        let (a1, b1) = self.schedule.ab_at(t + NODE_1 * h);
        let (a2, b2) = self.schedule.ab_at(t + NODE_2 * h);
        let first = self.ham(2.0 * (WEIGHT_2 * a1 + WEIGHT_1 * a2), 2.0 * (WEIGHT_2 * b1 + WEIGHT_1 * b2));
        let second = self.ham(2.0 * (WEIGHT_1 * a1 + WEIGHT_2 * a2), 2.0 * (WEIGHT_1 * b1 + WEIGHT_2 * b2));
        let mid = expm_apply(&first, 0.5 * h, psi, self.krylov_tol);
        expm_apply(&second, 0.5 * h, &mid, self.krylov_tol)
    }
}

fn krylov_tol_for(steps: usize) -> f64 {
    (1e-10 / steps as f64).max(1e-14)
}

fn check_dims(n_state: usize, model: &SpinModel) -> Result<()> {
    if n_state != model.n_spins() {
        return Err(Error::DimensionMismatch {
            expected: model.n_spins(),
            actual: n_state,
        });
    }
    Ok(())
}

/// Integrates `i ∂t ψ = H(t) ψ` with `steps` fourth-order commutator-free
/// steps spread over the varying segments of the waveform. Segments where
/// `s` is constant are propagated in a single exponential.
pub fn evolve_schrodinger(
    initial: &QuantumState,
    model: &SpinModel,
    schedule: &AnnealSchedule,
    steps: usize,
) -> Result<QuantumState> {
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be >= 1".into()));
    }
    let n2 = initial.norm_sqr();
    if (n2 - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized(n2));
    }
    check_dims(initial.n_spins(), model)?;
    let driver = build_driver(model.n_spins())?;
    let problem = build_problem_operator(model)?;
    let prop = Propagator {
        driver: &driver,
        problem: &problem,
        schedule,
        krylov_tol: krylov_tol_for(steps),
    };
    let mut psi = initial.amplitudes().to_vec();
    for iv in plan(schedule, steps, false) {
        let h = iv.len / iv.steps as f64;
        for k in 0..iv.steps {
            psi = prop.step(iv.start + k as f64 * h, h, iv.constant, &psi);
        }
    }
    Ok(QuantumState::from_raw(psi))
}

#[derive(Debug, Clone)]
pub struct ConvergedEvolution {
    pub state: QuantumState,
    pub steps: usize,
    /// `max_j |p_j(steps) − p_j(steps/2)|` for the accepted result.
    pub max_change: f64,
    pub converged: bool,
}

/// Doubles the step count from `initial_steps` until outcome probabilities
/// move by less than `tol`, or `max_steps` is reached.
pub fn evolve_schrodinger_converged(
    initial: &QuantumState,
    model: &SpinModel,
    schedule: &AnnealSchedule,
    initial_steps: usize,
    tol: f64,
    max_steps: usize,
) -> Result<ConvergedEvolution> {
    let mut steps = initial_steps.max(1);
    let mut prev = evolve_schrodinger(initial, model, schedule, steps)?;
    let mut p_prev = outcome_distribution(&prev)?;
    loop {
        if steps * 2 > max_steps.max(initial_steps) {
            return Ok(ConvergedEvolution {
                state: prev,
                steps,
                max_change: f64::NAN,
                converged: false,
            });
        }
        steps *= 2;
        let next = evolve_schrodinger(initial, model, schedule, steps)?;
        let p = outcome_distribution(&next)?;
        let change = p.iter().zip(&p_prev).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if change < tol {
            return Ok(ConvergedEvolution {
                state: next,
                steps,
                max_change: change,
                converged: true,
            });
        }
        prev = next;
        p_prev = p;
    }
}

/// Multiplies each coherence `ρ_jk` by `exp(−2γ·h·popcount(j ⊕ k))`,
/// the exact solution of pure `σz` dephasing over time `h`.
fn dephase(rho: &mut DensityMatrix, rate: f64, h: f64) {
    let d = rho.dim();
    let n = rho.n_spins();
    let factors: Vec<f64> = (0..=n).map(|k| (-2.0 * rate * h * k as f64).exp()).collect();
    let data = rho.data_mut();
    for r in 0..d {
        for c in 0..d {
            data[r * d + c] *= factors[(r ^ c).count_ones() as usize];
        }
    }
}

/// `ρ ← U ρ U†` where `U` is the propagator over `[t, t + h]`.
fn conjugate(rho: &mut DensityMatrix, prop: &Propagator<'_>, t: f64, h: f64, constant: bool) {
    let d = rho.dim();
    let mut x = vec![C64::new(0.0, 0.0); d * d];
    let mut col = vec![C64::new(0.0, 0.0); d];
    for c in 0..d {
        for r in 0..d {
            col[r] = rho.get(r, c);
        }
        let uc = prop.step(t, h, constant, &col);
        for r in 0..d {
            x[r * d + c] = uc[r];
        }
    }
    // ρ' = X U† = (U X†)†, so row r of ρ' is conj(U · conj(row r of X)).
    let data = rho.data_mut();
    for r in 0..d {
        for c in 0..d {
            col[c] = x[r * d + c].conj();
        }
        let ur = prop.step(t, h, constant, &col);
        for c in 0..d {
            data[r * d + c] = ur[c].conj();
        }
    }
}

/// GKSL evolution with per-spin dephasing, Strang-split around the unitary
/// step. With a zero rate this reduces to `U ρ U†` using the same
/// propagator as [`evolve_schrodinger`].
pub fn evolve_gksl(
    initial: &DensityMatrix,
    model: &SpinModel,
    schedule: &AnnealSchedule,
    lindblad: &LindbladConfig,
    steps: usize,
) -> Result<DensityMatrix> {
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be >= 1".into()));
    }
    let rate = lindblad.effective_rate();
    if !(rate >= 0.0 && rate.is_finite()) {
        return Err(Error::InvalidArgument(format!("dephasing rate must be >= 0, got {rate}")));
    }
    if model.n_spins() > GKSL_SPIN_LIMIT {
        return Err(Error::GuardExceeded {
            what: "GKSL simulation",
            n_spins: model.n_spins(),
            limit: GKSL_SPIN_LIMIT,
        });
    }
    check_dims(initial.n_spins(), model)?;
    initial.validate()?;
    let driver = build_driver(model.n_spins())?;
    let problem = build_problem_operator(model)?;
    let prop = Propagator {
        driver: &driver,
        problem: &problem,
        schedule,
        krylov_tol: krylov_tol_for(steps),
    };
    let mut rho = initial.clone();
    for iv in plan(schedule, steps, rate > 0.0) {
        let h = iv.len / iv.steps as f64;
        for k in 0..iv.steps {
            if rate > 0.0 {
                dephase(&mut rho, rate, 0.5 * h);
            }
            conjugate(&mut rho, &prop, iv.start + k as f64 * h, h, iv.constant);
            if rate > 0.0 {
                dephase(&mut rho, rate, 0.5 * h);
            }
        }
    }
    rho.symmetrize();
    Ok(DensityMatrix::from_raw(rho.dim(), rho.data().to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anneal::{forward_schedule, reverse_pause_quench_schedule, Coefficients};
    use crate::ising::{build_krooks, BiasSpec};

    fn probs(s: &QuantumState) -> Vec<f64> {
        outcome_distribution(s).unwrap()
    }

    fn one_spin(h: f64) -> SpinModel {
        SpinModel::new(1, vec![0.0], vec![h], 0.0).unwrap()
    }

    #[test]
    fn commuting_case_preserves_probabilities() {
        let m = build_krooks(2, &BiasSpec::random(0.3, 2)).unwrap();
        let sched = forward_schedule(7.0).unwrap().with_coefficients(Coefficients::problem_only());
        let raw: Vec<C64> = (0..16).map(|i| C64::new((i as f64 + 1.0).sqrt(), 0.3 * i as f64)).collect();
        let n = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let init = QuantumState::new(raw.iter().map(|z| z / n).collect()).unwrap();
        let out = evolve_schrodinger(&init, &m, &sched, 13).unwrap();
        for (a, b) in probs(&init).iter().zip(probs(&out)) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn norm_is_conserved() {
        let m = build_krooks(2, &BiasSpec::random(0.1, 7)).unwrap();
        let out = evolve_schrodinger(&QuantumState::uniform(4), &m, &forward_schedule(20.0).unwrap(), 200).unwrap();
        assert!((out.norm_sqr() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn fourth_order_convergence() {
        let m = one_spin(0.4);
        let sched = forward_schedule(6.0).unwrap();
        let init = QuantumState::uniform(1);
        let reference = probs(&evolve_schrodinger(&init, &m, &sched, 4096).unwrap())[1];
        let e1 = (probs(&evolve_schrodinger(&init, &m, &sched, 8).unwrap())[1] - reference).abs();
        let e2 = (probs(&evolve_schrodinger(&init, &m, &sched, 16).unwrap())[1] - reference).abs();
        // ideal ratio is 16 for a fourth-order method
        assert!(e1 / e2 > 10.0, "ratio {}", e1 / e2);
    }

    #[test]
    fn adiabatic_limit_single_spin() {
        // ground state at s = 1 is σ = −1 (index 0) for q = +1
        let m = one_spin(1.0);
        let r = evolve_schrodinger_converged(
            &QuantumState::uniform(1),
            &m,
            &forward_schedule(200.0).unwrap(),
            64,
            DEFAULT_STEP_TOLERANCE,
            1 << 16,
        )
        .unwrap();
        assert!(r.converged);
        assert!(probs(&r.state)[0] > 0.99);
    }

    #[test]
    fn pause_segment_uses_single_exponential() {
        let s = reverse_pause_quench_schedule(0.45, 5.0, 93.0, 1.0).unwrap();
        let p = plan(&s, 60, false);
        assert_eq!(p.iter().map(|iv| iv.steps).collect::<Vec<_>>(), vec![50, 1, 10]);
        assert!(p[1].constant);
    }

    #[test]
    fn input_validation() {
        let m = one_spin(1.0);
        let s = forward_schedule(1.0).unwrap();
        assert!(evolve_schrodinger(&QuantumState::uniform(2), &m, &s, 10).is_err());
        assert!(evolve_schrodinger(&QuantumState::uniform(1), &m, &s, 0).is_err());
        let bad = QuantumState::from_raw(vec![C64::new(1.0, 0.0); 2]);
        assert!(matches!(evolve_schrodinger(&bad, &m, &s, 10), Err(Error::NotNormalized(_))));
        let big = SpinModel::zeros(11).unwrap();
        let rho = DensityMatrix::from_pure(&QuantumState::uniform(11));
        assert!(matches!(
            evolve_gksl(&rho, &big, &s, &LindbladConfig::default(), 1),
            Err(Error::GuardExceeded { .. })
        ));
    }

    #[test]
    fn gksl_closed_limit_matches_schrodinger() {
        let m = build_krooks(2, &BiasSpec::random(0.2, 11)).unwrap();
        let sched = forward_schedule(5.0).unwrap();
        let init = QuantumState::uniform(4);
        let psi = evolve_schrodinger(&init, &m, &sched, 120).unwrap();
        let rho = evolve_gksl(&DensityMatrix::from_pure(&init), &m, &sched, &LindbladConfig::dephasing(0.0), 120).unwrap();
        for (a, b) in probs(&psi).iter().zip(outcome_distribution(&rho).unwrap()) {
            assert!((a - b).abs() < 1e-8);
        }
        assert!((rho.trace().re - 1.0).abs() < 1e-8);
        assert!(rho.hermiticity_error() < 1e-9);
    }

    #[test]
    fn dephasing_keeps_diagonal_under_diagonal_hamiltonian() {
        let m = build_krooks(2, &BiasSpec::random(0.2, 3)).unwrap();
        let sched = forward_schedule(4.0).unwrap().with_coefficients(Coefficients::problem_only());
        let rho0 = DensityMatrix::from_pure(&QuantumState::uniform(4));
        let rho = evolve_gksl(&rho0, &m, &sched, &LindbladConfig::dephasing(0.5), 40).unwrap();
        for i in 0..16 {
            assert!((rho.get(i, i).re - rho0.get(i, i).re).abs() < 1e-12);
        }
        // coherences decay
        assert!(rho.get(0, 15).norm() < rho0.get(0, 15).norm() * 1e-3);
        rho.validate().unwrap();
    }

    #[test]
    fn dephasing_preserves_trace_and_positivity() {
        let m = build_krooks(2, &BiasSpec::random(0.2, 4)).unwrap();
        let rho0 = DensityMatrix::from_pure(&QuantumState::uniform(4));
        let rho = evolve_gksl(&rho0, &m, &forward_schedule(6.0).unwrap(), &LindbladConfig::dephasing(0.2), 60).unwrap();
        assert!((rho.trace().re - 1.0).abs() < 1e-8);
        assert!(rho.hermiticity_error() < 1e-9);
        assert!(rho.min_eigenvalue() > -1e-9);
    }
}
