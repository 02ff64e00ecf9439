use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type CoefFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// The coefficient pair `(A(s), B(s))`.
#[derive(Clone)]
pub struct Coefficients {
    label: String,
    a: CoefFn,
    b: CoefFn,
    /// Exact derivatives, when known.
    derivatives: Option<(CoefFn, CoefFn)>,
}

impl fmt::Debug for Coefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Coefficients").field("label", &self.label).finish()
    }
}

impl Coefficients {
    /// `A(s) = 1 − s`, `B(s) = s`.
    pub fn linear() -> Self {
        Self {
            label: "linear".into(),
            a: Arc::new(|s| 1.0 - s),
            b: Arc::new(|s| s),
            derivatives: Some((Arc::new(|_| -1.0), Arc::new(|_| 1.0))),
        }
    }

    /// `A ≡ 0`, `B ≡ 1`: the problem Hamiltonian alone.
    pub fn problem_only() -> Self {
        Self {
            label: "problem-only".into(),
            a: Arc::new(|_| 0.0),
            b: Arc::new(|_| 1.0),
            derivatives: Some((Arc::new(|_| 0.0), Arc::new(|_| 0.0))),
        }
    }

    /// Arbitrary coefficient functions; derivatives are taken numerically.
    pub fn custom(
        label: impl Into<String>,
        a: impl Fn(f64) -> f64 + Send + Sync + 'static,
        b: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            a: Arc::new(a),
            b: Arc::new(b),
            derivatives: None,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn a(&self, s: f64) -> f64 {
        (self.a)(s)
    }

    pub fn b(&self, s: f64) -> f64 {
        (self.b)(s)
    }

    /// `(A'(s), B'(s))`.
    pub fn derivatives(&self, s: f64) -> (f64, f64) {
        if let Some((da, db)) = &self.derivatives {
            return (da(s), db(s));
        }
        let h = 1e-6;
        let (lo, hi) = ((s - h).max(0.0), (s + h).min(1.0));
        let w = hi - lo;
        ((self.a(hi) - self.a(lo)) / w, (self.b(hi) - self.b(lo)) / w)
    }
}

/// Piecewise-linear waveform `t ↦ s(t)` plus the coefficient pair.
#[derive(Debug, Clone)]
pub struct AnnealSchedule {
    breakpoints: Vec<(f64, f64)>,
    coefficients: Coefficients,
}

impl AnnealSchedule {
    pub fn new(breakpoints: Vec<(f64, f64)>, coefficients: Coefficients) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidArgument("schedule needs at least two breakpoints".into()));
        }
        if breakpoints[0].0 != 0.0 {
            return Err(Error::InvalidArgument("schedule must start at t = 0".into()));
        }
        for w in breakpoints.windows(2) {
            if !(w[1].0 > w[0].0) || !w[1].0.is_finite() {
                return Err(Error::InvalidArgument("breakpoint times must strictly increase".into()));
            }
        }
        if breakpoints.iter().any(|&(_, s)| !(0.0..=1.0).contains(&s)) {
            return Err(Error::InvalidArgument("s must lie in [0, 1]".into()));
        }
        Ok(Self {
            breakpoints,
            coefficients,
        })
    }

    pub fn with_coefficients(mut self, coefficients: Coefficients) -> Self {
        self.coefficients = coefficients;
        self
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.breakpoints
    }

    pub fn coefficients(&self) -> &Coefficients {
        &self.coefficients
    }

    pub fn total_time(&self) -> f64 {
        self.breakpoints.last().expect("nonempty").0
    }

    pub fn s_at(&self, t: f64) -> f64 {
        let bp = &self.breakpoints;
        if t <= 0.0 {
            return bp[0].1;
        }
        for w in bp.windows(2) {
            let ((t0, s0), (t1, s1)) = (w[0], w[1]);
            if t <= t1 {
                return s0 + (s1 - s0) * (t - t0) / (t1 - t0);
            }
        }
        bp[bp.len() - 1].1
    }

    /// `(A, B)` at time `t`.
    pub fn ab_at(&self, t: f64) -> (f64, f64) {
        let s = self.s_at(t);
        (self.coefficients.a(s), self.coefficients.b(s))
    }

    /// Starting value of the waveform.
    pub fn initial_s(&self) -> f64 {
        self.breakpoints[0].1
    }
}

/// `s(t) = t / t_f` from 0 to 1 with linear coefficients.
pub fn forward_schedule(t_f: f64) -> Result<AnnealSchedule> {
    if !(t_f > 0.0 && t_f.is_finite()) {
        return Err(Error::InvalidArgument(format!("anneal time must be > 0, got {t_f}")));
    }
    AnnealSchedule::new(vec![(0.0, 0.0), (t_f, 1.0)], Coefficients::linear())
}

/// Reverse anneal: ramp `1 → s_p` over `t_ramp`, hold for `t_pause`, then
/// quench back to 1 over `t_quench`. A zero pause drops the hold segment.
pub fn reverse_pause_quench_schedule(
    s_p: f64,
    t_ramp: f64,
    t_pause: f64,
    t_quench: f64,
) -> Result<AnnealSchedule> {
    if !(s_p > 0.0 && s_p < 1.0) {
        return Err(Error::InvalidArgument(format!("pause point must be in (0, 1), got {s_p}")));
    }
    if !(t_ramp > 0.0 && t_quench > 0.0 && t_pause >= 0.0) || !(t_ramp + t_pause + t_quench).is_finite() {
        return Err(Error::InvalidArgument("invalid reverse-anneal durations".into()));
    }
    let mut bp = vec![(0.0, 1.0), (t_ramp, s_p)];
    if t_pause > 0.0 {
        bp.push((t_ramp + t_pause, s_p));
    }
    bp.push((t_ramp + t_pause + t_quench, 1.0));
    AnnealSchedule::new(bp, Coefficients::linear())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reverse_schedule_total_time() {
        let s = reverse_pause_quench_schedule(0.45, 5.0, 93.0, 1.0).unwrap();
        assert_eq!(s.total_time(), 99.0);
        assert_eq!(s.breakpoints(), &[(0.0, 1.0), (5.0, 0.45), (98.0, 0.45), (99.0, 1.0)]);
        assert_eq!(s.s_at(50.0), 0.45);
    }

    #[test]
    fn forward_is_linear() {
        let s = forward_schedule(10.0).unwrap();
        assert_eq!(s.s_at(5.0), 0.5);
        assert_eq!(s.ab_at(10.0), (0.0, 1.0));
        assert_eq!(s.ab_at(0.0), (1.0, 0.0));
    }

    #[test]
    fn reverse_without_pause() {
        let s = reverse_pause_quench_schedule(0.3, 2.0, 0.0, 1.0).unwrap();
        assert_eq!(s.breakpoints().len(), 3);
        assert!(s.s_at(1.0) < 1.0 && (s.s_at(2.0) - 0.3).abs() < 1e-15 && s.s_at(2.5) > 0.3);
    }

    #[test]
    fn schedule_errors() {
        assert!(forward_schedule(0.0).is_err());
        assert!(reverse_pause_quench_schedule(1.0, 1.0, 1.0, 1.0).is_err());
        assert!(reverse_pause_quench_schedule(0.5, 0.0, 1.0, 1.0).is_err());
        assert!(reverse_pause_quench_schedule(0.5, 1.0, -1.0, 1.0).is_err());
        assert!(AnnealSchedule::new(vec![(0.0, 0.0), (0.0, 1.0)], Coefficients::linear()).is_err());
        assert!(AnnealSchedule::new(vec![(1.0, 0.0), (2.0, 1.0)], Coefficients::linear()).is_err());
    }

    #[test]
    fn numeric_derivatives() {
        let c = Coefficients::custom("quad", |s| (1.0 - s) * (1.0 - s), |s| s * s);
        let (da, db) = c.derivatives(0.5);
        assert!((da + 1.0).abs() < 1e-8 && (db - 1.0).abs() < 1e-8);
        assert_eq!(Coefficients::linear().derivatives(0.3), (-1.0, 1.0));
    }
}
