//! Ground-truth trajectories and synthetic scans.
//!
//! Every random draw comes from a generator keyed by `(seed, stream, scan,
//! index)`, so any scan can be regenerated on its own.

use nalgebra::{Cholesky, Matrix4, Vector2, Vector4};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jpda::{FovBounds, MotionModel, Scan, SensorModel, TargetState};
use crate::rng::rng_from;

const TRUTH_STREAM: u64 = 1;
const DETECTION_STREAM: u64 = 2;
const CLUTTER_COUNT_STREAM: u64 = 3;
const CLUTTER_POINT_STREAM: u64 = 4;
const SHUFFLE_STREAM: u64 = 5;

/// Four targets starting within 40 m of the origin and moving outward;
/// the third and fourth cross near scan 5.
pub fn crossing_initial_states() -> Vec<[f64; 4]> {
    vec![
        [-10.0, -15.0, -10.0, -12.0],
        [10.0, 14.0, -15.0, -13.0],
        [-30.0, 6.0, 20.0, 15.0],
        [30.0, -6.0, 20.0, 15.0],
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub n_scans: usize,
    pub dt: f64,
    pub sigma_p: f64,
    pub sigma_m: f64,
    pub pd: f64,
    pub lambda: f64,
    pub fov: FovBounds,
    /// Truth at scan 0, one `(x, ẋ, y, ẏ)` per target.
    pub initial_states: Vec<[f64; 4]>,
    /// Diagonal of the prior covariance at scan 0.
    pub p_init_diag: [f64; 4],
    /// Drive the truth with process noise instead of exact kinematics.
    pub noisy_truth: bool,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n_scans: 19,
            dt: 1.0,
            sigma_p: 3.0,
            sigma_m: 25.0,
            pd: 0.9,
            lambda: 1.0,
            fov: FovBounds::square(600.0),
            initial_states: crossing_initial_states(),
            p_init_diag: [625.0, 25.0, 625.0, 25.0],
            noisy_truth: false,
            seed: 0,
        }
    }
}

impl ScenarioConfig {
    pub fn n_targets(&self) -> usize {
        self.initial_states.len()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.n_scans == 0 {
            return bad("n_scans must be >= 1".into());
        }
        if self.initial_states.is_empty() {
            return bad("at least one target is required".into());
        }
        if !(0.0..=1.0).contains(&self.pd) {
            return bad(format!("pd must be in [0, 1], got {}", self.pd));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return bad(format!("lambda must be >= 0, got {}", self.lambda));
        }
        if !(self.sigma_m >= 0.0 && self.sigma_m.is_finite()) {
            return bad(format!("sigma_m must be >= 0, got {}", self.sigma_m));
        }
        if self.p_init_diag.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return bad("p_init_diag entries must be > 0".into());
        }
        if self.initial_states.iter().flatten().any(|v| !v.is_finite()) {
            return bad("initial states must be finite".into());
        }
        self.fov.validate()?;
        MotionModel::new(self.dt, self.sigma_p)?;
        Ok(())
    }

    pub fn motion(&self) -> Result<MotionModel> {
        MotionModel::new(self.dt, self.sigma_p)
    }

    /// Tracker-side sensor model; needs `pd > 0` and `sigma_m > 0`.
    pub fn sensor(&self) -> Result<SensorModel> {
        SensorModel::new(self.sigma_m, self.pd, self.lambda, self.fov)
    }

    /// Prior at scan 0: truth mean with the configured diagonal covariance.
    pub fn initial_prior(&self) -> Result<Vec<TargetState>> {
        self.initial_states
            .iter()
            .map(|&x| TargetState::from_arrays(x, self.p_init_diag))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundTruth {
    /// `states[n][k]`: target `n` at scan `k`.
    pub states: Vec<Vec<[f64; 4]>>,
}

impl GroundTruth {
    pub fn at_scan(&self, k: usize) -> Vec<[f64; 4]> {
        self.states.iter().map(|t| t[k]).collect()
    }

    pub fn n_scans(&self) -> usize {
        self.states.first().map_or(0, Vec::len)
    }
}

/// One draw from `N(0, Q_proc)`.
pub fn process_noise_sample(motion: &MotionModel, rng: &mut impl Rng) -> Vector4<f64> {
    if motion.sigma_p == 0.0 {
        return Vector4::zeros();
    }
    let l: Matrix4<f64> = Cholesky::new(motion.q).expect("process covariance is positive definite").l();
    let z = Vector4::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
    l * z
}

pub fn simulate_truth(config: &ScenarioConfig) -> Result<GroundTruth> {
    config.validate()?;
    let motion = config.motion()?;
    let states = config
        .initial_states
        .iter()
        .enumerate()
        .map(|(n, &x0)| {
            let mut x = Vector4::from(x0);
            let mut track = vec![x0];
            for k in 1..config.n_scans {
                x = motion.f * x;
                if config.noisy_truth {
                    let mut rng = rng_from(config.seed, &[TRUTH_STREAM, n as u64, k as u64]);
                    x += process_noise_sample(&motion, &mut rng);
                }
                track.push(x.into());
            }
            track
        })
        .collect();
    Ok(GroundTruth { states })
}

/// Detections (probability `pd`, noise `σ_M²·I`) plus Poisson clutter
/// uniform over the field of view, in shuffled order. Noisy detections
/// outside the field of view are kept.
pub fn generate_scan(truth_at_k: &[[f64; 4]], time_index: usize, config: &ScenarioConfig) -> Result<Scan> {
    config.validate()?;
    let k = time_index as u64;
    let mut measurements = Vec::new();
    for (n, x) in truth_at_k.iter().enumerate() {
        let mut rng = rng_from(config.seed, &[DETECTION_STREAM, k, n as u64]);
        if rng.random::<f64>() < config.pd {
            let e: [f64; 2] = [rng.sample(StandardNormal), rng.sample(StandardNormal)];
            measurements.push([x[0] + config.sigma_m * e[0], x[2] + config.sigma_m * e[1]]);
        }
    }
    let n_clutter = if config.lambda > 0.0 {
        let poisson = Poisson::new(config.lambda).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        poisson.sample(&mut rng_from(config.seed, &[CLUTTER_COUNT_STREAM, k])) as u64
    } else {
        0
    };
    let fov = &config.fov;
    for i in 0..n_clutter {
        let mut rng = rng_from(config.seed, &[CLUTTER_POINT_STREAM, k, i]);
        measurements.push([
            rng.random_range(fov.x_min..fov.x_max),
            rng.random_range(fov.y_min..fov.y_max),
        ]);
    }
    measurements.shuffle(&mut rng_from(config.seed, &[SHUFFLE_STREAM, k]));
    Ok(Scan::new(time_index, measurements))
}

/// Configuration, truth, and one scan per time index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub truth: GroundTruth,
    pub scans: Vec<Scan>,
}

impl Scenario {
    pub fn generate(config: ScenarioConfig) -> Result<Self> {
        let truth = simulate_truth(&config)?;
        let scans = (0..config.n_scans)
            .map(|k| generate_scan(&truth.at_scan(k), k, &config))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { config, truth, scans })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(s);
        let sc: Self = serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        sc.config.validate()?;
        if sc.truth.states.len() != sc.config.n_targets() || sc.truth.states.iter().any(|t| t.len() != sc.config.n_scans) {
            return Err(Error::InvalidArgument("truth shape does not match config".into()));
        }
        Ok(sc)
    }
}

/// Root-mean-square position error over targets at each scan.
pub fn position_rmse(truth: &GroundTruth, estimates: &[(usize, Vec<TargetState>)]) -> Vec<(usize, f64)> {
    estimates
        .iter()
        .map(|(k, targets)| {
            let sq: f64 = targets
                .iter()
                .zip(truth.at_scan(*k))
                .map(|(t, x)| (t.position() - Vector2::new(x[0], x[2])).norm_squared())
                .sum();
            (*k, (sq / targets.len() as f64).sqrt())
        })
        .collect()
}
