use nalgebra::{Cholesky, Matrix2, Matrix2x4, Matrix4, Matrix4x2, Vector2, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct TargetState {
    pub mean: Vector4<f64>,
    pub covariance: Matrix4<f64>,
}

impl TargetState {
    pub fn new(mean: Vector4<f64>, covariance: Matrix4<f64>) -> Result<Self> {
        let s = Self { mean, covariance };
        s.validate()?;
        Ok(s)
    }

    pub fn from_arrays(mean: [f64; 4], covariance_diag: [f64; 4]) -> Result<Self> {
        Self::new(
            Vector4::from(mean),
            Matrix4::from_diagonal(&Vector4::from(covariance_diag)),
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.mean.iter().chain(self.covariance.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite target state".into()));
        }
        let asym = (self.covariance - self.covariance.transpose()).abs().max();
        if asym > SYMMETRY_TOL * (1.0 + self.covariance.abs().max()) {
            return Err(Error::InvalidArgument(format!("covariance asymmetric by {asym:e}")));
        }
        if Cholesky::new(self.covariance).is_none() {
            return Err(Error::InvalidArgument("covariance is not positive definite".into()));
        }
        Ok(())
    }

    pub fn position(&self) -> Vector2<f64> {
        Vector2::new(self.mean[0], self.mean[2])
    }
}

fn symmetrize(p: &Matrix4<f64>) -> Matrix4<f64> {
    (p + p.transpose()) * 0.5
}

/// Constant-velocity motion in each axis with white-acceleration noise.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionModel {
    pub dt: f64,
    pub sigma_p: f64,
    pub f: Matrix4<f64>,
    pub q: Matrix4<f64>,
}

impl MotionModel {
    pub fn new(dt: f64, sigma_p: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) || !(sigma_p >= 0.0 && sigma_p.is_finite()) {
            return Err(Error::InvalidArgument(format!("invalid motion model dt={dt}, sigma_p={sigma_p}")));
        }
        let mut f = Matrix4::identity();
        f[(0, 1)] = dt;
        f[(2, 3)] = dt;
        let s2 = sigma_p * sigma_p;
        let (a, b, c) = (s2 * dt.powi(3) / 3.0, s2 * dt * dt / 2.0, s2 * dt);
        let mut q = Matrix4::zeros();
        for o in [0, 2] {
            q[(o, o)] = a;
            q[(o, o + 1)] = b;
            q[(o + 1, o)] = b;
            q[(o + 1, o + 1)] = c;
        }
        Ok(Self { dt, sigma_p, f, q })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FovBounds {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl FovBounds {
    pub fn square(half_width: f64) -> Self {
        Self {
            x_min: -half_width,
            x_max: half_width,
            y_min: -half_width,
            y_max: half_width,
        }
    }

    pub fn area(&self) -> f64 {
        (self.x_max - self.x_min) * (self.y_max - self.y_min)
    }

    pub fn contains(&self, p: &Vector2<f64>) -> bool {
        (self.x_min..=self.x_max).contains(&p[0]) && (self.y_min..=self.y_max).contains(&p[1])
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_max > self.x_min && self.y_max > self.y_min) || !self.area().is_finite() {
            return Err(Error::InvalidArgument("field of view must have positive finite area".into()));
        }
        Ok(())
    }
}

/// Position-only linear-Gaussian sensor with uniform Poisson clutter.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorModel {
    pub h: Matrix2x4<f64>,
    pub r: Matrix2<f64>,
    pub sigma_m: f64,
    pub pd: f64,
    pub lambda: f64,
    pub fov: FovBounds,
}

impl SensorModel {
    pub fn new(sigma_m: f64, pd: f64, lambda: f64, fov: FovBounds) -> Result<Self> {
        if !(sigma_m > 0.0 && sigma_m.is_finite()) {
            return Err(Error::InvalidArgument(format!("sigma_m must be > 0, got {sigma_m}")));
        }
        if !(pd > 0.0 && pd <= 1.0) {
            return Err(Error::InvalidArgument(format!("pd must be in (0, 1], got {pd}")));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("lambda must be >= 0, got {lambda}")));
        }
        fov.validate()?;
        let mut h = Matrix2x4::zeros();
        h[(0, 0)] = 1.0;
        h[(1, 2)] = 1.0;
        Ok(Self {
            h,
            r: Matrix2::identity() * sigma_m * sigma_m,
            sigma_m,
            pd,
            lambda,
            fov,
        })
    }

    pub fn fov_area(&self) -> f64 {
        self.fov.area()
    }

    pub(crate) fn innovation_covariance(&self, state: &TargetState) -> Matrix2<f64> {
        let s = self.h * state.covariance * self.h.transpose() + self.r;
        (s + s.transpose()) * 0.5
    }
}

pub fn kalman_predict(state: &TargetState, motion: &MotionModel) -> TargetState {
    TargetState {
        mean: motion.f * state.mean,
        covariance: symmetrize(&(motion.f * state.covariance * motion.f.transpose() + motion.q)),
    }
}

pub fn kalman_gain(state: &TargetState, sensor: &SensorModel) -> Result<Matrix4x2<f64>> {
    let s = sensor.innovation_covariance(state);
    let chol = Cholesky::new(s).ok_or(Error::SingularInnovation)?;
    // K = P Hᵀ S⁻¹, solved as S Kᵀ = H P
    let kt = chol.solve(&(sensor.h * state.covariance));
    Ok(kt.transpose())
}

/// Kalman update with the Joseph-form covariance.
pub fn kalman_update(state: &TargetState, y: &Vector2<f64>, sensor: &SensorModel) -> Result<TargetState> {
    let k = kalman_gain(state, sensor)?;
    let innovation = y - sensor.h * state.mean;
    let a = Matrix4::identity() - k * sensor.h;
    let p = a * state.covariance * a.transpose() + k * sensor.r * k.transpose();
    Ok(TargetState {
        mean: state.mean + k * innovation,
        covariance: symmetrize(&p),
    })
}

/// Single Gaussian with the mixture's mean and covariance.
pub fn moment_match(weights: &[f64], components: &[TargetState]) -> Result<TargetState> {
    if weights.is_empty() || weights.len() != components.len() {
        return Err(Error::DimensionMismatch {
            expected: components.len(),
            actual: weights.len(),
        });
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-6 || weights.iter().any(|&w| !(w >= 0.0)) {
        return Err(Error::WeightNormalization(total));
    }
    let active: Vec<(f64, &TargetState)> = weights
        .iter()
        .zip(components)
        .filter(|(w, _)| **w > 0.0)
        .map(|(&w, c)| (w, c))
        .collect();
    let mean = if let [(_, only)] = active.as_slice() {
        only.mean
    } else {
        active.iter().fold(Vector4::zeros(), |acc, (w, c)| acc + c.mean * *w)
    };
    let cov = active.iter().fold(Matrix4::zeros(), |acc, (w, c)| {
        let d = c.mean - mean;
        acc + (c.covariance + d * d.transpose()) * *w
    });
    Ok(TargetState {
        mean,
        covariance: symmetrize(&cov),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn sensor() -> SensorModel {
        SensorModel::new(25.0, 0.9, 1.0, FovBounds::square(600.0)).unwrap()
    }

    #[test]
    fn process_noise_block() {
        let m = MotionModel::new(1.0, 3.0).unwrap();
        for o in [0, 2] {
            assert_eq!(m.q[(o, o)], 3.0);
            assert_eq!(m.q[(o, o + 1)], 4.5);
            assert_eq!(m.q[(o + 1, o)], 4.5);
            assert_eq!(m.q[(o + 1, o + 1)], 9.0);
        }
        assert_eq!(m.q[(0, 2)], 0.0);
        assert!(m.q.symmetric_eigenvalues().iter().all(|&e| e >= 0.0));
    }

    #[test]
    fn constant_velocity_prediction() {
        let m = MotionModel::new(1.0, 3.0).unwrap();
        let s = TargetState::from_arrays([0.0, 1.0, 0.0, 2.0], [1.0; 4]).unwrap();
        let p = kalman_predict(&s, &m);
        assert_eq!(p.position(), Vector2::new(1.0, 2.0));

        let still = MotionModel::new(1.0, 0.0).unwrap();
        let s = TargetState::from_arrays([5.0, 0.0, -3.0, 0.0], [1.0; 4]).unwrap();
        assert_eq!(kalman_predict(&s, &still).mean, s.mean);
    }

    #[test]
    fn uninformative_measurement() {
        let mut sens = sensor();
        sens.r *= 1e12;
        let s = TargetState::from_arrays([10.0, 1.0, -20.0, 2.0], [100.0, 1.0, 100.0, 1.0]).unwrap();
        let u = kalman_update(&s, &Vector2::new(500.0, 500.0), &sens).unwrap();
        assert!((u.mean - s.mean).norm() <= 1e-6 * s.mean.norm());
        assert!((u.covariance - s.covariance).norm() <= 1e-6 * s.covariance.norm());
    }

    #[test]
    fn certain_prior() {
        let s = TargetState {
            mean: Vector4::new(1.0, 2.0, 3.0, 4.0),
            covariance: Matrix4::zeros(),
        };
        let u = kalman_update(&s, &Vector2::new(50.0, -50.0), &sensor()).unwrap();
        assert_eq!(u.mean, s.mean);
        assert_eq!(u.covariance, s.covariance);
    }

    #[test]
    fn matches_reference_filter() {
        let sens = sensor();
        let s = TargetState::from_arrays([0.0, 1.0, 0.0, -1.0], [100.0, 1.0, 100.0, 1.0]).unwrap();
        let y = sens.h * s.mean + Vector2::new(10.0, 0.0);
        let u = kalman_update(&s, &y, &sens).unwrap();
        // Diagonal P decouples axes: x-gain = 100 / (100 + 625).
        let g = 100.0 / 725.0;
        let k = kalman_gain(&s, &sens).unwrap();
        assert_relative_eq!(k[(0, 0)], g, epsilon = 1e-12);
        assert_relative_eq!(k[(2, 1)], g, epsilon = 1e-12);
        assert_eq!(k[(1, 0)], 0.0);
        assert_relative_eq!(u.mean[0], 10.0 * g, epsilon = 1e-10);
        assert_relative_eq!(u.mean[2], 0.0, epsilon = 1e-10);
        assert_relative_eq!(u.covariance[(0, 0)], 100.0 * (1.0 - g), epsilon = 1e-10);
        assert_relative_eq!(u.covariance[(1, 1)], 1.0, epsilon = 1e-10);
    }

    #[test]
    fn moment_match_cases() {
        let p = Matrix4::from_diagonal(&Vector4::new(4.0, 1.0, 9.0, 2.0));
        let a = Vector4::new(3.0, -1.0, 2.0, 0.5);
        let plus = TargetState { mean: a, covariance: p };
        let minus = TargetState { mean: -a, covariance: p };
        let m = moment_match(&[0.5, 0.5], &[plus.clone(), minus.clone()]).unwrap();
        assert_relative_eq!(m.mean, Vector4::zeros(), epsilon = 1e-15);
        assert_relative_eq!(m.covariance, p + a * a.transpose(), epsilon = 1e-12);

        assert_eq!(moment_match(&[1.0], std::slice::from_ref(&plus)).unwrap(), plus);
        assert_eq!(moment_match(&[1.0, 0.0], &[plus.clone(), minus.clone()]).unwrap(), plus);
        assert!(matches!(
            moment_match(&[0.5, 0.4], &[plus, minus]),
            Err(Error::WeightNormalization(_))
        ));
    }

    #[test]
    fn invalid_models() {
        assert!(SensorModel::new(25.0, 0.0, 1.0, FovBounds::square(1.0)).is_err());
        assert!(SensorModel::new(25.0, 0.5, -1.0, FovBounds::square(1.0)).is_err());
        assert!(SensorModel::new(0.0, 0.5, 1.0, FovBounds::square(1.0)).is_err());
        assert!(MotionModel::new(0.0, 1.0).is_err());
        assert!(TargetState::from_arrays([0.0; 4], [1.0, 1.0, -1.0, 1.0]).is_err());
        assert_eq!(FovBounds::square(600.0).area(), 1.44e6);
    }

    fn is_psd(p: &Matrix4<f64>) -> bool {
        let tol = 1e-9 * (1.0 + p.abs().max());
        (p - p.transpose()).abs().max() <= tol && p.symmetric_eigenvalues().iter().all(|&e| e >= -tol)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn update_shrinks_covariance(
            d in prop::array::uniform4(0.1f64..500.0),
            y in prop::array::uniform2(-300.0f64..300.0),
        ) {
            let s = TargetState::from_arrays([0.0, 1.0, 0.0, -1.0], d).unwrap();
            let u = kalman_update(&s, &Vector2::from(y), &sensor()).unwrap();
            prop_assert!(is_psd(&u.covariance));
            let diff = s.covariance - u.covariance;
            prop_assert!(diff.symmetric_eigenvalues().iter().all(|&e| e >= -1e-9 * s.covariance.abs().max()));
        }

        #[test]
        fn moment_match_preserves_moments(
            w in 0.01f64..0.99,
            a in prop::array::uniform4(-50.0f64..50.0),
            b in prop::array::uniform4(-50.0f64..50.0),
        ) {
            let c1 = TargetState::from_arrays(a, [1.0, 2.0, 3.0, 4.0]).unwrap();
            let c2 = TargetState::from_arrays(b, [4.0, 3.0, 2.0, 1.0]).unwrap();
            let m = moment_match(&[w, 1.0 - w], &[c1.clone(), c2.clone()]).unwrap();
            let mean = c1.mean * w + c2.mean * (1.0 - w);
            let second = (c1.covariance + c1.mean * c1.mean.transpose()) * w
                + (c2.covariance + c2.mean * c2.mean.transpose()) * (1.0 - w);
            prop_assert!((m.mean - mean).norm() < 1e-10);
            prop_assert!((m.covariance + m.mean * m.mean.transpose() - second).norm() < 1e-8 * (1.0 + second.norm()));
        }
    }

    #[test]
    fn psd_soak() {
        use rand::Rng;
        let motion = MotionModel::new(1.0, 3.0).unwrap();
        let sens = sensor();
        let mut rng = crate::rng::rng_from(11, &[]);
        let mut s = TargetState::from_arrays([0.0, 5.0, 0.0, -5.0], [625.0, 25.0, 625.0, 25.0]).unwrap();
        for _ in 0..10_000 {
            s = kalman_predict(&s, &motion);
            match rng.random_range(0..3) {
                0 => {}
                1 => {
                    let y = sens.h * s.mean + Vector2::new(rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0));
                    s = kalman_update(&s, &y, &sens).unwrap();
                }
                _ => {
                    let y = sens.h * s.mean + Vector2::new(rng.random_range(-50.0..50.0), 0.0);
                    let u = kalman_update(&s, &y, &sens).unwrap();
                    let w = rng.random_range(0.0..1.0);
                    s = moment_match(&[w, 1.0 - w], &[u, s]).unwrap();
                }
            }
            assert!(is_psd(&s.covariance));
        }
    }
}
