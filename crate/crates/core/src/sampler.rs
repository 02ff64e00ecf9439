//! Shot-based sampling of spin configurations and unique-feasible
//! accumulation.
//!
//! Three backends share one request type:
//!
//! - exact dynamics: evolve the annealing Hamiltonian, then draw i.i.d.
//!   shots from `p_j = |c_j(t_f)|²`;
//! - surrogate: one parallel-tempering Metropolis run per shot, reporting
//!   the coldest replica's final configuration;
//! - exhaustive: every configuration at or below an energy cutoff, once.

use std::collections::{BTreeMap, HashSet};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::anneal::{
    evolve_gksl, evolve_schrodinger_converged, outcome_distribution, reverse_pause_quench_schedule, AnnealSchedule,
    DensityMatrix, LindbladConfig, QuantumState, DEFAULT_STEP_TOLERANCE,
};
use crate::error::{Error, Result};
use crate::ising::{decode, ProblemKind, SpinModel};
use crate::rng::{derive_seed, rng_from};

/// Shots are stored as integer indices, so models are capped at 64 spins.
pub const SAMPLER_SPIN_LIMIT: usize = 64;

/// Largest model the exhaustive backend will enumerate.
pub const EXHAUSTIVE_SPIN_LIMIT: usize = 30;

/// Cap on step doublings inside the exact-dynamics backend.
const MAX_DYNAMICS_STEPS: usize = 1 << 18;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialState {
    /// Uniform superposition, the driver ground state.
    #[default]
    Uniform,
    /// Computational basis state `|Φ_j⟩`.
    Basis { index: u64 },
}

impl InitialState {
    /// Rooks along the main diagonal of a `k × k` board.
    pub fn diagonal_rooks(k: usize) -> Self {
        let n = k * k;
        let index = (0..k).fold(0u64, |acc, r| acc | 1u64 << (n - 1 - (r * k + r)));
        InitialState::Basis { index }
    }

    fn to_state(self, n_spins: usize) -> Result<QuantumState> {
        match self {
            InitialState::Uniform => Ok(QuantumState::uniform(n_spins)),
            InitialState::Basis { index } => QuantumState::basis(n_spins, index),
        }
    }
}

/// Parallel-tempering parameters. Temperatures are geometric between
/// `t_min_factor` and `t_max_factor` times the largest `|Q_ij|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SurrogateParams {
    pub n_temperatures: usize,
    pub t_min_factor: f64,
    pub t_max_factor: f64,
    pub sweeps: usize,
}

impl Default for SurrogateParams {
    fn default() -> Self {
        Self {
            n_temperatures: 16,
            t_min_factor: 0.1,
            t_max_factor: 10.0,
            sweeps: 200,
        }
    }
}

impl SurrogateParams {
    fn validate(&self) -> Result<()> {
        if self.n_temperatures == 0 || self.sweeps == 0 {
            return Err(Error::InvalidArgument("surrogate needs temperatures and sweeps".into()));
        }
        if !(self.t_min_factor > 0.0 && self.t_max_factor >= self.t_min_factor && self.t_max_factor.is_finite()) {
            return Err(Error::InvalidArgument("invalid surrogate temperature range".into()));
        }
        Ok(())
    }

    /// Ascending temperature ladder for `model`.
    pub fn ladder(&self, model: &SpinModel) -> Vec<f64> {
        let mut scale = model.max_abs_coupling();
        if scale == 0.0 {
            scale = model.biases().iter().fold(0.0f64, |m, q| m.max(q.abs())).max(1.0);
        }
        let (lo, hi) = (self.t_min_factor * scale, self.t_max_factor * scale);
        let n = self.n_temperatures;
        if n == 1 {
            return vec![lo];
        }
        (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
    }
}

#[derive(Debug, Clone)]
pub enum Backend {
    ExactDynamics {
        schedule: AnnealSchedule,
        lindblad: LindbladConfig,
        initial: InitialState,
        /// Starting step count for step-doubling.
        steps: usize,
    },
    Surrogate(SurrogateParams),
    Exhaustive {
        energy_cutoff: f64,
    },
}

#[derive(Debug, Clone)]
pub struct SamplerRequest {
    pub model: SpinModel,
    pub backend: Backend,
    pub n_shots: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniqueShot {
    pub index: u64,
    pub count: usize,
    pub energy: f64,
}

/// Sampled configurations in shot order plus per-configuration tallies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotSet {
    pub n_spins: usize,
    /// Configuration index of every shot, in sampling order.
    pub sequence: Vec<u64>,
    /// Distinct configurations, ascending by index.
    pub unique: Vec<UniqueShot>,
}

impl ShotSet {
    fn from_sequence(model: &SpinModel, sequence: Vec<u64>) -> Self {
        let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
        for &j in &sequence {
            *counts.entry(j).or_default() += 1;
        }
        let unique = counts
            .into_iter()
            .map(|(index, count)| UniqueShot {
                index,
                count,
                energy: model.energy_of_index(index),
            })
            .collect();
        Self {
            n_spins: model.n_spins(),
            sequence,
            unique,
        }
    }

    pub fn n_shots(&self) -> usize {
        self.sequence.len()
    }

    pub fn bitstring(&self, index: u64) -> String {
        decode(index, self.n_spins).expect("valid index").bitstring()
    }

    /// CSV with header `bitstring,energy,count`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["bitstring", "energy", "count"])?;
        for u in &self.unique {
            w.write_record([self.bitstring(u.index), u.energy.to_string(), u.count.to_string()])?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("utf8"))
    }
}

fn validate_request(req: &SamplerRequest) -> Result<()> {
    if req.n_shots == 0 {
        return Err(Error::InvalidArgument("n_shots must be >= 1".into()));
    }
    if req.model.n_spins() > SAMPLER_SPIN_LIMIT {
        return Err(Error::GuardExceeded {
            what: "sampler",
            n_spins: req.model.n_spins(),
            limit: SAMPLER_SPIN_LIMIT,
        });
    }
    Ok(())
}

pub fn sample(req: &SamplerRequest) -> Result<ShotSet> {
    validate_request(req)?;
    match &req.backend {
        Backend::ExactDynamics {
            schedule,
            lindblad,
            initial,
            steps,
        } => {
            let p = final_distribution(&req.model, schedule, lindblad, *initial, *steps)?;
            sample_distribution(&req.model, &p, req.n_shots, req.seed)
        }
        Backend::Surrogate(params) => {
            params.validate()?;
            let sequence = (0..req.n_shots)
                .map(|shot| tempering_shot(&req.model, params, derive_seed(req.seed, shot as u64)))
                .collect();
            Ok(ShotSet::from_sequence(&req.model, sequence))
        }
        Backend::Exhaustive { energy_cutoff } => enumerate_below(&req.model, *energy_cutoff, |_| true),
    }
}

/// Outcome distribution after annealing from `initial`.
pub fn final_distribution(
    model: &SpinModel,
    schedule: &AnnealSchedule,
    lindblad: &LindbladConfig,
    initial: InitialState,
    steps: usize,
) -> Result<Vec<f64>> {
    let psi0 = initial.to_state(model.n_spins())?;
    if lindblad.effective_rate() > 0.0 {
        let rho = evolve_gksl(&DensityMatrix::from_pure(&psi0), model, schedule, lindblad, steps.max(1))?;
        outcome_distribution(&rho)
    } else {
        let r = evolve_schrodinger_converged(&psi0, model, schedule, steps, DEFAULT_STEP_TOLERANCE, MAX_DYNAMICS_STEPS)?;
        outcome_distribution(&r.state)
    }
}

/// i.i.d. draws of configuration indices from `p`.
pub fn sample_distribution(model: &SpinModel, p: &[f64], n_shots: usize, seed: u64) -> Result<ShotSet> {
    let dist = WeightedIndex::new(p).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut rng = rng_from(seed, &[]);
    let sequence = (0..n_shots).map(|_| dist.sample(&mut rng) as u64).collect();
    Ok(ShotSet::from_sequence(model, sequence))
}

/// Every configuration with energy at or below `cutoff` that passes `keep`,
/// each counted once, in ascending index order. Configurations are visited
/// in Gray-code order so each energy is an O(degree) update.
pub fn enumerate_below(model: &SpinModel, cutoff: f64, keep: impl Fn(u64) -> bool) -> Result<ShotSet> {
    let n = model.n_spins();
    if n > EXHAUSTIVE_SPIN_LIMIT {
        return Err(Error::GuardExceeded {
            what: "exhaustive sampler",
            n_spins: n,
            limit: EXHAUSTIVE_SPIN_LIMIT,
        });
    }
    let adj = model.neighbors();
    let slack = 1e-9 * cutoff.abs().max(1.0) + 1e-9 * model.energy_of_index(0).abs();
    let mut r = Replica::from_spins(model, &adj, vec![-1; n]);
    let mut unique = Vec::new();
    let mut visit = |r: &Replica| {
        if r.energy <= cutoff + slack {
            let index = r.index();
            if keep(index) {
                let energy = model.energy_of_index(index);
                if energy <= cutoff {
                    unique.push(UniqueShot {
                        index,
                        count: 1,
                        energy,
                    });
                }
            }
        }
    };
    visit(&r);
    for i in 1..(1u64 << n) {
        let spin = n - 1 - i.trailing_zeros() as usize;
        let delta = -2.0 * f64::from(r.spins[spin]) * r.fields[spin];
        r.flip(spin, &adj, delta);
        visit(&r);
    }
    unique.sort_unstable_by_key(|u| u.index);
    Ok(ShotSet {
        n_spins: n,
        sequence: unique.iter().map(|u| u.index).collect(),
        unique,
    })
}

struct Replica {
    spins: Vec<i8>,
    fields: Vec<f64>,
    energy: f64,
}

impl Replica {
    fn random(model: &SpinModel, adj: &[Vec<(usize, f64)>], rng: &mut impl Rng) -> Self {
        let spins: Vec<i8> = (0..model.n_spins()).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
        Self::from_spins(model, adj, spins)
    }

    fn from_spins(model: &SpinModel, adj: &[Vec<(usize, f64)>], spins: Vec<i8>) -> Self {
        let fields: Vec<f64> = (0..spins.len())
            .map(|i| model.biases()[i] + adj[i].iter().map(|&(j, w)| w * f64::from(spins[j])).sum::<f64>())
            .collect();
        let energy = model.offset()
            + spins
                .iter()
                .zip(model.biases())
                .map(|(&s, q)| q * f64::from(s))
                .sum::<f64>()
            + model
                .pairs()
                .iter()
                .map(|&(i, j, w)| w * f64::from(spins[i] * spins[j]))
                .sum::<f64>();
        Self { spins, fields, energy }
    }

    fn flip(&mut self, i: usize, adj: &[Vec<(usize, f64)>], delta: f64) {
        self.spins[i] = -self.spins[i];
        let ds = 2.0 * f64::from(self.spins[i]);
        for &(j, w) in &adj[i] {
            self.fields[j] += w * ds;
        }
        self.energy += delta;
    }

    /// One Metropolis sweep over all spins at inverse temperature `beta`.
    fn sweep(&mut self, adj: &[Vec<(usize, f64)>], beta: f64, rng: &mut impl Rng) {
        for i in 0..self.spins.len() {
            let delta = -2.0 * f64::from(self.spins[i]) * self.fields[i];
            if delta <= 0.0 || rng.random::<f64>() < (-beta * delta).exp() {
                self.flip(i, adj, delta);
            }
        }
    }

    fn index(&self) -> u64 {
        self.spins.iter().fold(0u64, |acc, &s| (acc << 1) | u64::from(s == 1))
    }
}

/// One surrogate shot: a parallel-tempering run from random replicas; the
/// coldest replica's final configuration is returned.
fn tempering_shot(model: &SpinModel, params: &SurrogateParams, seed: u64) -> u64 {
    let adj = model.neighbors();
    let mut rng = rng_from(seed, &[]);
    let betas: Vec<f64> = params.ladder(model).iter().map(|t| 1.0 / t).collect();
    let mut replicas: Vec<Replica> = betas.iter().map(|_| Replica::random(model, &adj, &mut rng)).collect();
    for sweep in 0..params.sweeps {
        for (r, &beta) in replicas.iter_mut().zip(&betas) {
            r.sweep(&adj, beta, &mut rng);
        }
        // alternate even and odd neighbor pairs
        let mut k = sweep % 2;
        while k + 1 < replicas.len() {
            let log_acc = (betas[k] - betas[k + 1]) * (replicas[k].energy - replicas[k + 1].energy);
            if log_acc >= 0.0 || rng.random::<f64>() < log_acc.exp() {
                replicas.swap(k, k + 1);
            }
            k += 2;
        }
    }
    replicas[0].index()
}

/// Unique feasible configurations found as shots accumulate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibleAccumulation {
    /// `(shot number, unique feasible so far)`, shot numbers starting at 1.
    pub curve: Vec<(usize, usize)>,
    /// Feasible configurations found, ascending by index.
    pub final_unique: Vec<u64>,
}

impl FeasibleAccumulation {
    pub fn final_count(&self) -> usize {
        self.final_unique.len()
    }

    /// CSV with header `shots,unique_feasible`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["shots", "unique_feasible"])?;
        for &(s, c) in &self.curve {
            w.write_record([s.to_string(), c.to_string()])?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("utf8"))
    }
}

pub fn accumulate_unique_feasible(shots: &ShotSet, kind: ProblemKind) -> FeasibleAccumulation {
    let mut seen = HashSet::new();
    let curve = shots
        .sequence
        .iter()
        .enumerate()
        .map(|(i, &j)| {
            if kind.is_feasible_index(j) {
                seen.insert(j);
            }
            (i + 1, seen.len())
        })
        .collect();
    let mut final_unique: Vec<u64> = seen.into_iter().collect();
    final_unique.sort_unstable();
    FeasibleAccumulation { curve, final_unique }
}

/// How each pause point is simulated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PauseBackend {
    /// Reverse pause-and-quench schedule integrated exactly.
    ExactDynamics {
        t_ramp: f64,
        t_pause: f64,
        t_quench: f64,
        steps: usize,
        #[serde(default)]
        dephasing_rate: f64,
    },
    /// Classical stand-in: Metropolis from the initial configuration at
    /// temperature `temperature_scale · A(s_p)/B(s_p)` for `sweeps` sweeps,
    /// then a zero-temperature quench.
    Surrogate { temperature_scale: f64, sweeps: usize },
}

/// One accumulation per pause point; point `g` uses seed
/// `derive_seed(seed, g)`.
pub fn pause_point_sweep(
    model: &SpinModel,
    kind: ProblemKind,
    s_grid: &[f64],
    shots_per_point: usize,
    backend: &PauseBackend,
    initial: InitialState,
    seed: u64,
) -> Result<Vec<(f64, usize)>> {
    s_grid
        .iter()
        .enumerate()
        .map(|(g, &s_p)| {
            let point_seed = derive_seed(seed, g as u64);
            let shots = match *backend {
                PauseBackend::ExactDynamics {
                    t_ramp,
                    t_pause,
                    t_quench,
                    steps,
                    dephasing_rate,
                } => {
                    let schedule = reverse_pause_quench_schedule(s_p, t_ramp, t_pause, t_quench)?;
                    let lindblad = if dephasing_rate > 0.0 {
                        LindbladConfig::dephasing(dephasing_rate)
                    } else {
                        LindbladConfig::default()
                    };
                    sample(&SamplerRequest {
                        model: model.clone(),
                        backend: Backend::ExactDynamics {
                            schedule,
                            lindblad,
                            initial,
                            steps,
                        },
                        n_shots: shots_per_point,
                        seed: point_seed,
                    })?
                }
                PauseBackend::Surrogate {
                    temperature_scale,
                    sweeps,
                } => {
                    if !(s_p > 0.0 && s_p < 1.0) {
                        return Err(Error::InvalidArgument(format!("pause point must be in (0, 1), got {s_p}")));
                    }
                    let start = match initial {
                        InitialState::Basis { index } => index,
                        InitialState::Uniform => {
                            return Err(Error::InvalidArgument("surrogate pause sweep needs a basis initial state".into()))
                        }
                    };
                    let temperature = temperature_scale * (1.0 - s_p) / s_p;
                    let sequence = (0..shots_per_point)
                        .map(|shot| pause_shot(model, start, temperature, sweeps, derive_seed(point_seed, shot as u64)))
                        .collect();
                    ShotSet::from_sequence(model, sequence)
                }
            };
            Ok((s_p, accumulate_unique_feasible(&shots, kind).final_count()))
        })
        .collect()
}

fn pause_shot(model: &SpinModel, start: u64, temperature: f64, sweeps: usize, seed: u64) -> u64 {
    let adj = model.neighbors();
    let mut rng = rng_from(seed, &[]);
    let spins = decode(start, model.n_spins()).expect("valid start").spins().to_vec();
    let mut r = Replica::from_spins(model, &adj, spins);
    for _ in 0..sweeps {
        r.sweep(&adj, 1.0 / temperature, &mut rng);
    }
    // quench until no downhill single flip remains
    loop {
        let mut moved = false;
        for i in 0..r.spins.len() {
            let delta = -2.0 * f64::from(r.spins[i]) * r.fields[i];
            if delta < 0.0 {
                r.flip(i, &adj, delta);
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    r.index()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anneal::{forward_schedule, Coefficients};
    use crate::ising::{brute_force_spectrum, build_krooks, BiasSpec};

    fn exhaustive_req(model: SpinModel, cutoff: f64) -> SamplerRequest {
        SamplerRequest {
            model,
            backend: Backend::Exhaustive { energy_cutoff: cutoff },
            n_shots: 1,
            seed: 0,
        }
    }

    #[test]
    fn exhaustive_returns_ground_manifold() {
        let m = build_krooks(2, &BiasSpec::none()).unwrap();
        let shots = sample(&exhaustive_req(m, -8.0)).unwrap();
        let idx: Vec<u64> = shots.unique.iter().map(|u| u.index).collect();
        assert_eq!(idx, vec![0b0110, 0b1001]);
        assert!(shots.unique.iter().all(|u| u.count == 1));
        let below = sample(&exhaustive_req(build_krooks(2, &BiasSpec::none()).unwrap(), -9.0)).unwrap();
        assert!(below.unique.is_empty());
    }

    #[test]
    fn exhaustive_matches_spectrum() {
        let m = build_krooks(3, &BiasSpec::random(0.2, 8)).unwrap();
        let spectrum = brute_force_spectrum(&m, None).unwrap();
        let cutoff = spectrum[40].energy;
        let shots = sample(&exhaustive_req(m, cutoff)).unwrap();
        let mut expect: Vec<(u64, f64)> = spectrum.iter().filter(|e| e.energy <= cutoff).map(|e| (e.index, e.energy)).collect();
        expect.sort_by_key(|e| e.0);
        let got: Vec<(u64, f64)> = shots.unique.iter().map(|u| (u.index, u.energy)).collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn exact_dynamics_commuting_basis_state() {
        let m = SpinModel::new(1, vec![0.0], vec![0.5], 0.0).unwrap();
        let sched = forward_schedule(3.0).unwrap().with_coefficients(Coefficients::problem_only());
        let shots = sample(&SamplerRequest {
            model: m,
            backend: Backend::ExactDynamics {
                schedule: sched,
                lindblad: LindbladConfig::default(),
                initial: InitialState::Basis { index: 1 },
                steps: 4,
            },
            n_shots: 200,
            seed: 3,
        })
        .unwrap();
        assert!(shots.sequence.iter().all(|&j| j == 1));
        assert_eq!(shots.unique, vec![UniqueShot { index: 1, count: 200, energy: 0.5 }]);
    }

    #[test]
    fn exact_dynamics_frequencies_converge() {
        let m = build_krooks(2, &BiasSpec::random(0.3, 4)).unwrap();
        let sched = forward_schedule(2.0).unwrap();
        let p = final_distribution(&m, &sched, &LindbladConfig::default(), InitialState::Uniform, 32).unwrap();
        let n = 20_000;
        let mut failures = 0;
        for seed in 0..20 {
            let shots = sample_distribution(&m, &p, n, seed).unwrap();
            let mut freq = [0.0; 16];
            for u in &shots.unique {
                freq[u.index as usize] = u.count as f64 / n as f64;
            }
            let sup = freq.iter().zip(&p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            if sup > 3.0 / (n as f64).sqrt() {
                failures += 1;
            }
        }
        assert!(failures == 0, "{failures} seeds out of bound");
    }

    #[test]
    fn reproducible_under_seed() {
        let m = build_krooks(3, &BiasSpec::random(0.1, 1)).unwrap();
        let req = SamplerRequest {
            model: m,
            backend: Backend::Surrogate(SurrogateParams { sweeps: 20, ..Default::default() }),
            n_shots: 50,
            seed: 17,
        };
        assert_eq!(sample(&req).unwrap(), sample(&req).unwrap());
        let other = SamplerRequest { seed: 18, ..req.clone() };
        assert_ne!(sample(&req).unwrap().sequence, sample(&other).unwrap().sequence);
    }

    #[test]
    fn surrogate_energies_are_exact() {
        let m = build_krooks(3, &BiasSpec::random(0.1, 2)).unwrap();
        let shots = sample(&SamplerRequest {
            model: m.clone(),
            backend: Backend::Surrogate(SurrogateParams { sweeps: 30, ..Default::default() }),
            n_shots: 100,
            seed: 5,
        })
        .unwrap();
        for u in &shots.unique {
            let e = crate::ising::spin_energy(&m, &decode(u.index, 9).unwrap()).unwrap();
            assert_eq!(u.energy, e);
        }
        assert_eq!(shots.unique.iter().map(|u| u.count).sum::<usize>(), 100);
    }

    #[test]
    fn surrogate_finds_low_states_on_krooks() {
        let m = build_krooks(3, &BiasSpec::random(0.1, 2)).unwrap();
        let shots = sample(&SamplerRequest {
            model: m.clone(),
            backend: Backend::Surrogate(SurrogateParams { sweeps: 50, ..Default::default() }),
            n_shots: 300,
            seed: 9,
        })
        .unwrap();
        let acc = accumulate_unique_feasible(&shots, ProblemKind::KRooks { k: 3 });
        assert_eq!(acc.final_count(), 6);
        let ground = brute_force_spectrum(&m, None).unwrap()[0].index;
        assert!(acc.final_unique.contains(&ground));
    }

    #[test]
    fn accumulation_edge_cases() {
        let m = build_krooks(2, &BiasSpec::none()).unwrap();
        let kind = ProblemKind::KRooks { k: 2 };
        let infeasible = ShotSet::from_sequence(&m, vec![0, 15, 3, 0]);
        let acc = accumulate_unique_feasible(&infeasible, kind);
        assert!(acc.curve.iter().all(|&(_, c)| c == 0));
        assert_eq!(acc.curve.len(), 4);

        let both = ShotSet::from_sequence(&m, vec![0b1001, 0, 0b1001, 0b0110]);
        let acc = accumulate_unique_feasible(&both, kind);
        assert_eq!(acc.curve, vec![(1, 1), (2, 1), (3, 1), (4, 2)]);
        assert_eq!(acc.final_unique, vec![0b0110, 0b1001]);
        assert_eq!(acc, accumulate_unique_feasible(&both, kind));
        assert!(acc.to_csv().unwrap().starts_with("shots,unique_feasible\n1,1\n"));
    }

    #[test]
    fn feasible_fraction_arithmetic() {
        let frac = |k: u32| ProblemKind::KRooks { k: k as usize }.feasible_count() as f64 / 2f64.powi((k * k) as i32);
        assert!((frac(6) - 1.0477e-8).abs() < 1e-11);
        assert!((frac(7) - 8.95e-12).abs() < 1e-13);
    }

    #[test]
    fn shot_csv_format() {
        let m = build_krooks(2, &BiasSpec::none()).unwrap();
        let s = ShotSet::from_sequence(&m, vec![0b1001, 0b1001]);
        assert_eq!(s.to_csv().unwrap(), "bitstring,energy,count\n1001,-8,2\n");
    }

    #[test]
    fn diagonal_rooks_initial_state() {
        assert_eq!(InitialState::diagonal_rooks(2), InitialState::Basis { index: 0b1001 });
        assert_eq!(InitialState::diagonal_rooks(3), InitialState::Basis { index: 0b100_010_001 });
    }

    #[test]
    fn single_point_sweep() {
        let m = build_krooks(2, &BiasSpec::random(0.1, 3)).unwrap();
        let out = pause_point_sweep(
            &m,
            ProblemKind::KRooks { k: 2 },
            &[0.5],
            50,
            &PauseBackend::Surrogate { temperature_scale: 2.0, sweeps: 5 },
            InitialState::diagonal_rooks(2),
            1,
        )
        .unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].0, 0.5);
    }

    #[test]
    fn request_validation() {
        let m = SpinModel::zeros(2).unwrap();
        let mut req = exhaustive_req(m, 0.0);
        req.n_shots = 0;
        assert!(sample(&req).is_err());
        let big = exhaustive_req(SpinModel::zeros(31).unwrap(), 0.0);
        assert!(matches!(sample(&big), Err(Error::GuardExceeded { .. })));
    }
}
