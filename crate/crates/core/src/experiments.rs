//! Config-driven experiment runners that emit plot-ready CSV and JSON.
//!
//! Each runner takes a typed config (unknown keys rejected) and returns the
//! files it produced; nothing here touches the filesystem except reading a
//! scenario file named by a tracking config.

use std::path::PathBuf;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::anneal::{forward_schedule, outcome_distribution, LindbladConfig, QuantumState};
use crate::anneal::{evolve_gksl, evolve_schrodinger_converged, DensityMatrix, GKSL_SPIN_LIMIT};
use crate::error::{Error, Result};
use crate::ising::{
    binary_to_spin, brute_force_spectrum, build_krooks, build_mtda, spin_energy, AssignmentMatrix, BiasSpec,
    BinaryQuadraticModel, CostMatrix, ProblemKind,
};
use crate::jpda::{assignment_weights, hypotheses_json, run_tracker, tracks_csv, SamplerTemplate};
use crate::rng::{derive_seed, rng_from};
use crate::sampler::{
    accumulate_unique_feasible, pause_point_sweep, sample, Backend, InitialState, PauseBackend, SamplerRequest,
    SurrogateParams,
};
use crate::scenario::{position_rmse, Scenario, ScenarioConfig};

/// Named output produced by a runner.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputFile {
    pub name: String,
    pub contents: String,
}

impl OutputFile {
    fn new(name: &str, contents: String) -> Self {
        Self {
            name: name.to_string(),
            contents,
        }
    }
}

/// Parses a config document, reporting the failing key path on error.
pub fn parse_config<T: DeserializeOwned>(json: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(json);
    serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("utf8"))
}

fn default_surrogate() -> SurrogateParams {
    SurrogateParams::default()
}

/// Backend selection as written in configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BackendConfig {
    /// Forward anneal of length `t_f`.
    ExactDynamics {
        #[serde(default = "default_t_f")]
        t_f: f64,
        #[serde(default = "default_steps")]
        steps: usize,
        #[serde(default)]
        dephasing_rate: f64,
        #[serde(default)]
        initial: InitialState,
    },
    Surrogate {
        #[serde(default = "default_surrogate")]
        params: SurrogateParams,
    },
    /// `energy_cutoff` absent means no cutoff.
    Exhaustive {
        #[serde(default)]
        energy_cutoff: Option<f64>,
    },
}

fn default_t_f() -> f64 {
    10.0
}

fn default_steps() -> usize {
    16
}

impl BackendConfig {
    /// Default settings for a backend named on the command line.
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "exact-dynamics" => Ok(Self::ExactDynamics {
                t_f: default_t_f(),
                steps: default_steps(),
                dephasing_rate: 0.0,
                initial: InitialState::Uniform,
            }),
            "surrogate" => Ok(Self::Surrogate {
                params: default_surrogate(),
            }),
            "exhaustive" => Ok(Self::Exhaustive { energy_cutoff: None }),
            other => Err(Error::InvalidArgument(format!(
                "unknown backend `{other}` (expected exact-dynamics, surrogate or exhaustive)"
            ))),
        }
    }

    pub fn to_backend(&self) -> Result<Backend> {
        Ok(match self {
            Self::ExactDynamics {
                t_f,
                steps,
                dephasing_rate,
                initial,
            } => Backend::ExactDynamics {
                schedule: forward_schedule(*t_f)?,
                lindblad: if *dephasing_rate > 0.0 {
                    LindbladConfig::dephasing(*dephasing_rate)
                } else {
                    LindbladConfig::default()
                },
                initial: *initial,
                steps: *steps,
            },
            Self::Surrogate { params } => Backend::Surrogate(*params),
            Self::Exhaustive { energy_cutoff } => Backend::Exhaustive {
                energy_cutoff: energy_cutoff.unwrap_or(f64::INFINITY),
            },
        })
    }
}

// ---------------------------------------------------------------- window

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KrooksWindowConfig {
    pub k: usize,
    pub bias: BiasSpec,
    pub t_f: Vec<f64>,
    pub initial_steps: usize,
    pub tolerance: f64,
    pub max_steps: usize,
    /// Per-spin dephasing rate; zero runs closed-system dynamics.
    pub dephasing_rate: f64,
    pub seed: u64,
}

impl Default for KrooksWindowConfig {
    fn default() -> Self {
        Self {
            k: 3,
            bias: BiasSpec::random(0.1, 1),
            t_f: vec![0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0, 300.0, 1000.0],
            initial_steps: 16,
            tolerance: 1e-8,
            max_steps: 1 << 18,
            dephasing_rate: 0.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowRow {
    pub t_f: f64,
    pub p_ground: f64,
    pub p_feasible_excited: f64,
    pub p_infeasible: f64,
    /// Probabilities of feasible states outside the ground manifold,
    /// largest first.
    pub excited_probabilities: Vec<f64>,
    pub steps: usize,
    pub converged: bool,
}

/// Final outcome probabilities of forward anneals from the uniform state,
/// split into ground manifold, feasible excited states and infeasible ones.
pub fn krooks_window(cfg: &KrooksWindowConfig) -> Result<Vec<WindowRow>> {
    let model = build_krooks(cfg.k, &cfg.bias)?;
    let kind = ProblemKind::KRooks { k: cfg.k };
    let spectrum = brute_force_spectrum(&model, Some(kind))?;
    let e0 = spectrum[0].energy;
    let tol = 1e-9 * (1.0 + e0.abs());
    let n = model.n_spins();
    if cfg.t_f.is_empty() {
        return Err(Error::InvalidArgument("t_f grid is empty".into()));
    }
    cfg.t_f
        .iter()
        .map(|&t_f| {
            let schedule = forward_schedule(t_f)?;
            let psi0 = QuantumState::uniform(n);
            let (p, steps, converged) = if cfg.dephasing_rate > 0.0 {
                if n > GKSL_SPIN_LIMIT {
                    return Err(Error::GuardExceeded {
                        what: "open-system window",
                        n_spins: n,
                        limit: GKSL_SPIN_LIMIT,
                    });
                }
                let lind = LindbladConfig::dephasing(cfg.dephasing_rate);
                let rho = evolve_gksl(&DensityMatrix::from_pure(&psi0), &model, &schedule, &lind, cfg.initial_steps)?;
                (outcome_distribution(&rho)?, cfg.initial_steps, true)
            } else {
                let r = evolve_schrodinger_converged(
                    &psi0,
                    &model,
                    &schedule,
                    cfg.initial_steps,
                    cfg.tolerance,
                    cfg.max_steps,
                )?;
                (outcome_distribution(&r.state)?, r.steps, r.converged)
            };
            let mut row = WindowRow {
                t_f,
                p_ground: 0.0,
                p_feasible_excited: 0.0,
                p_infeasible: 0.0,
                excited_probabilities: Vec::new(),
                steps,
                converged,
            };
            for e in &spectrum {
                let pj = p[e.index as usize];
                if e.energy <= e0 + tol {
                    row.p_ground += pj;
                } else if e.feasible {
                    row.p_feasible_excited += pj;
                    row.excited_probabilities.push(pj);
                } else {
                    row.p_infeasible += pj;
                }
            }
            row.excited_probabilities.sort_by(|a, b| b.total_cmp(a));
            Ok(row)
        })
        .collect()
}

pub fn cmd_krooks_window(cfg: &KrooksWindowConfig) -> Result<Vec<OutputFile>> {
    let rows = krooks_window(cfg)?;
    let csv = csv_string(
        &["t_f", "p_ground", "p_feasible_excited", "p_infeasible"],
        rows.iter().map(|r| {
            vec![
                r.t_f.to_string(),
                r.p_ground.to_string(),
                r.p_feasible_excited.to_string(),
                r.p_infeasible.to_string(),
            ]
        }),
    )?;
    Ok(vec![OutputFile::new("krooks_window.csv", csv)])
}

// ------------------------------------------------------- unique feasible

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BiasVariant {
    pub label: String,
    pub bias: BiasSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UniqueFeasibleConfig {
    pub k: usize,
    pub variants: Vec<BiasVariant>,
    pub n_shots: usize,
    pub backend: BackendConfig,
    pub seed: u64,
}

impl Default for UniqueFeasibleConfig {
    fn default() -> Self {
        Self {
            k: 4,
            variants: vec![
                BiasVariant {
                    label: "r".into(),
                    bias: BiasSpec::random(0.1, 1),
                },
                BiasVariant {
                    label: "c".into(),
                    bias: BiasSpec::clustered(vec![1, 3], 0.1, 1),
                },
            ],
            n_shots: 10_000,
            backend: BackendConfig::Surrogate {
                params: SurrogateParams::default(),
            },
            seed: 0,
        }
    }
}

/// Accumulation curves (`unique_feasible_curve.csv`) and the energies of
/// the distinct feasible states found (`unique_feasible_energies.csv`).
pub fn cmd_unique_feasible(cfg: &UniqueFeasibleConfig) -> Result<Vec<OutputFile>> {
    let kind = ProblemKind::KRooks { k: cfg.k };
    let mut curve_rows = Vec::new();
    let mut energy_rows = Vec::new();
    for (v, variant) in cfg.variants.iter().enumerate() {
        let model = build_krooks(cfg.k, &variant.bias)?;
        let shots = sample(&SamplerRequest {
            model,
            backend: cfg.backend.to_backend()?,
            n_shots: cfg.n_shots,
            seed: derive_seed(cfg.seed, v as u64),
        })?;
        let acc = accumulate_unique_feasible(&shots, kind);
        curve_rows.extend(
            acc.curve
                .iter()
                .map(|&(s, c)| vec![variant.label.clone(), s.to_string(), c.to_string()]),
        );
        for u in shots.unique.iter().filter(|u| kind.is_feasible_index(u.index)) {
            energy_rows.push(vec![variant.label.clone(), shots.bitstring(u.index), u.energy.to_string()]);
        }
    }
    Ok(vec![
        OutputFile::new(
            "unique_feasible_curve.csv",
            csv_string(&["variant", "shots", "unique_feasible"], curve_rows)?,
        ),
        OutputFile::new(
            "unique_feasible_energies.csv",
            csv_string(&["variant", "bitstring", "energy"], energy_rows)?,
        ),
    ])
}

// ----------------------------------------------------------- pause sweep

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PauseSweepConfig {
    pub k: usize,
    pub bias: BiasSpec,
    /// Explicit pause points; when absent the grid runs from `s_min` to
    /// `s_max` in steps of `resolution`.
    pub s_grid: Option<Vec<f64>>,
    pub s_min: f64,
    pub s_max: f64,
    pub resolution: f64,
    pub shots_per_point: usize,
    pub backend: PauseBackend,
    /// Starting configuration; defaults to rooks on the main diagonal.
    pub initial: Option<InitialState>,
    pub seed: u64,
}

impl Default for PauseSweepConfig {
    fn default() -> Self {
        Self {
            k: 3,
            bias: BiasSpec::random(0.1, 1),
            s_grid: None,
            s_min: 0.1,
            s_max: 0.9,
            resolution: 0.1,
            shots_per_point: 10_000,
            backend: PauseBackend::ExactDynamics {
                t_ramp: 5.0,
                t_pause: 10.0,
                t_quench: 1.0,
                steps: 64,
                dephasing_rate: 0.0,
            },
            initial: None,
            seed: 0,
        }
    }
}

impl PauseSweepConfig {
    pub fn grid(&self) -> Result<Vec<f64>> {
        if let Some(g) = &self.s_grid {
            return Ok(g.clone());
        }
        if !(self.resolution > 0.0) || self.s_max < self.s_min {
            return Err(Error::InvalidArgument("invalid pause grid".into()));
        }
        let n = ((self.s_max - self.s_min) / self.resolution + 1e-9).floor() as usize;
        Ok((0..=n)
            .map(|i| ((self.s_min + i as f64 * self.resolution) * 1e12).round() / 1e12)
            .collect())
    }
}

pub fn cmd_pause_sweep(cfg: &PauseSweepConfig) -> Result<Vec<OutputFile>> {
    let model = build_krooks(cfg.k, &cfg.bias)?;
    let initial = cfg.initial.unwrap_or_else(|| InitialState::diagonal_rooks(cfg.k));
    let rows = pause_point_sweep(
        &model,
        ProblemKind::KRooks { k: cfg.k },
        &cfg.grid()?,
        cfg.shots_per_point,
        &cfg.backend,
        initial,
        cfg.seed,
    )?;
    let csv = csv_string(
        &["s_p", "unique_feasible"],
        rows.iter().map(|(s, c)| vec![s.to_string(), c.to_string()]),
    )?;
    Ok(vec![OutputFile::new("pause_sweep.csv", csv)])
}

// ----------------------------------------------------------------- track

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrackConfig {
    /// Scenario JSON file; when absent one is generated from `scenario`.
    pub scenario_file: Option<PathBuf>,
    pub scenario: ScenarioConfig,
    pub c: f64,
    pub n_shots: usize,
    pub backend: BackendConfig,
    pub seed: u64,
}

impl Default for TrackConfig {
    fn default() -> Self {
        Self {
            scenario_file: None,
            scenario: ScenarioConfig::default(),
            c: 2.0,
            n_shots: 10_000,
            backend: BackendConfig::Surrogate {
                params: SurrogateParams::default(),
            },
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrackRun {
    pub scenario: Scenario,
    pub steps: Vec<crate::jpda::HybridStep>,
    /// Position RMSE per processed scan.
    pub rmse: Vec<(usize, f64)>,
}

/// Tracks every scan after the first; the prior at scan 0 is the truth
/// with the configured covariance.
pub fn track(cfg: &TrackConfig) -> Result<TrackRun> {
    let scenario = match &cfg.scenario_file {
        Some(path) => Scenario::from_json(&std::fs::read_to_string(path)?)?,
        None => Scenario::generate(cfg.scenario.clone())?,
    };
    let sc = &scenario.config;
    let template = SamplerTemplate {
        backend: cfg.backend.to_backend()?,
        n_shots: cfg.n_shots,
        seed: cfg.seed,
    };
    let steps = run_tracker(
        &sc.initial_prior()?,
        &scenario.scans[1..],
        &sc.sensor()?,
        &sc.motion()?,
        &template,
        cfg.c,
    )?;
    let estimates: Vec<_> = steps.iter().map(|s| (s.time_index, s.targets.clone())).collect();
    let rmse = position_rmse(&scenario.truth, &estimates);
    Ok(TrackRun { scenario, steps, rmse })
}

pub fn cmd_track(cfg: &TrackConfig) -> Result<Vec<OutputFile>> {
    let run = track(cfg)?;
    let prior = run.scenario.config.initial_prior()?;
    Ok(vec![
        OutputFile::new("tracks.csv", tracks_csv(&prior, 0, &run.steps)?),
        OutputFile::new(
            "hypotheses.json",
            serde_json::to_string_pretty(&hypotheses_json(&run.steps))? + "\n",
        ),
        OutputFile::new(
            "rmse.csv",
            csv_string(
                &["scan", "position_rmse"],
                run.rmse.iter().map(|(k, r)| vec![k.to_string(), r.to_string()]),
            )?,
        ),
    ])
}

// ---------------------------------------------------------- oracle check

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleCheckConfig {
    /// Random MTDA instances for the energy/weight check.
    pub n_random: usize,
    pub seed: u64,
}

impl Default for OracleCheckConfig {
    fn default() -> Self {
        Self { n_random: 50, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

/// Brute-force invariant suite over small instances.
pub fn oracle_check(cfg: &OracleCheckConfig) -> Result<Vec<OracleResult>> {
    use rand::Rng;
    let mut out = Vec::new();
    let fact = |k: usize| (1..=k).product::<usize>();
    for k in 2..=4 {
        let spectrum = brute_force_spectrum(&build_krooks(k, &BiasSpec::none())?, Some(ProblemKind::KRooks { k }))?;
        let ground: Vec<_> = spectrum.iter().take_while(|e| e.energy == spectrum[0].energy).collect();
        let passed = ground.len() == fact(k) && ground.iter().all(|e| e.feasible);
        out.push(OracleResult {
            check: format!("krooks-ground-manifold-k{k}"),
            passed,
            detail: format!("{} ground states", ground.len()),
        });
    }
    for (n, m) in [(1, 1), (1, 2), (2, 2), (2, 3)] {
        let kind = ProblemKind::Mtda {
            n_targets: n,
            n_measurements: m,
        };
        let model = build_mtda(n, m, &CostMatrix::zeros(n, m), 2.0)?;
        let spectrum = brute_force_spectrum(&model, Some(kind))?;
        let ground: Vec<_> = spectrum.iter().take_while(|e| e.energy == spectrum[0].energy).collect();
        let passed = ground.len() as u128 == kind.feasible_count() && ground.iter().all(|e| e.feasible);
        out.push(OracleResult {
            check: format!("mtda-ground-manifold-{n}x{m}"),
            passed,
            detail: format!("{} ground states, {} feasible", ground.len(), kind.feasible_count()),
        });
    }
    let mut rng = rng_from(cfg.seed, &[]);
    let mut worst = 0.0f64;
    let mut argmax_ok = 0;
    for _ in 0..cfg.n_random {
        let (n, m) = loop {
            let n = rng.random_range(1..=3usize);
            let m = rng.random_range(0..=3usize);
            if (n + 1) * (m + 1) <= 12 {
                break (n, m);
            }
        };
        let mut g = CostMatrix::zeros(n, m);
        for r in 0..=m {
            for c in 0..=n {
                if r + c > 0 {
                    g.set(r, c, rng.random_range(0.0..0.5));
                }
            }
        }
        let kind = ProblemKind::Mtda {
            n_targets: n,
            n_measurements: m,
        };
        let spectrum = brute_force_spectrum(&build_mtda(n, m, &g, 2.0)?, Some(kind))?;
        let feasible: Vec<_> = spectrum.iter().filter(|e| e.feasible).collect();
        let assignments: Vec<AssignmentMatrix> = feasible
            .iter()
            .map(|e| AssignmentMatrix::from_configuration(n, m, &e.configuration()))
            .collect::<Result<_>>()?;
        let hyps = assignment_weights(&assignments, &g)?;
        if hyps[0].assignment == assignments[0] {
            argmax_ok += 1;
        }
        let z: f64 = assignments.iter().map(|a| (-assignment_cost(a, &g)).exp()).sum();
        for h in &hyps {
            worst = worst.max((h.weight - (-assignment_cost(&h.assignment, &g)).exp() / z).abs());
        }
    }
    out.push(OracleResult {
        check: "mtda-energy-weight-consistency".into(),
        passed: argmax_ok == cfg.n_random && worst <= 1e-12,
        detail: format!("{argmax_ok}/{} argmax agree, max weight error {worst:e}", cfg.n_random),
    });
    let mut worst = 0.0f64;
    for t in 0..200u64 {
        let mut r = rng_from(cfg.seed, &[1, t]);
        let n = r.random_range(1..=6usize);
        let mut quad = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let w = r.random_range(-2.0..2.0);
                quad[i * n + j] = w;
                quad[j * n + i] = w;
            }
        }
        let lin = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
        let bqm = BinaryQuadraticModel::new(n, quad, lin, r.random_range(-2.0..2.0))?;
        let spin = binary_to_spin(&bqm)?;
        for j in 0..(1u64 << n) {
            let x: Vec<u8> = (0..n).map(|i| ((j >> (n - 1 - i)) & 1) as u8).collect();
            let cfg_j = crate::ising::decode(j, n)?;
            let e = spin_energy(&spin, &cfg_j)?;
            let b = bqm.energy(&x)?;
            worst = worst.max((e - b).abs() / (1.0 + b.abs()));
        }
    }
    out.push(OracleResult {
        check: "qubo-ising-energy-preservation".into(),
        passed: worst <= 1e-12,
        detail: format!("max relative error {worst:e}"),
    });
    Ok(out)
}

fn assignment_cost(a: &AssignmentMatrix, g: &CostMatrix) -> f64 {
    a.entries()
        .iter()
        .zip(g.as_slice())
        .filter(|(&x, _)| x == 1)
        .map(|(_, &c)| c)
        .sum()
}

pub fn cmd_oracle_check(cfg: &OracleCheckConfig) -> Result<Vec<OutputFile>> {
    let results = oracle_check(cfg)?;
    let csv = csv_string(
        &["check", "passed", "detail"],
        results
            .iter()
            .map(|r| vec![r.check.clone(), r.passed.to_string(), r.detail.clone()]),
    )?;
    Ok(vec![OutputFile::new("oracle_check.csv", csv)])
}
