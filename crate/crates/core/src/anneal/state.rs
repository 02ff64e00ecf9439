use nalgebra::DMatrix;

use super::C64;
use crate::error::{Error, Result};

const NORM_TOL: f64 = 1e-9;

/// Pure state over the `2^Ns` computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    amplitudes: Vec<C64>,
}

impl QuantumState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if !amplitudes.len().is_power_of_two() {
            return Err(Error::InvalidArgument("state dimension must be a power of two".into()));
        }
        let n2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self { amplitudes })
    }

    pub(crate) fn from_raw(amplitudes: Vec<C64>) -> Self {
        Self { amplitudes }
    }

    /// Ground state of the transverse-field driver.
    pub fn uniform(n_spins: usize) -> Self {
        let d = 1usize << n_spins;
        Self {
            amplitudes: vec![C64::new(1.0 / (d as f64).sqrt(), 0.0); d],
        }
    }

    /// Computational basis state `|Φ_j⟩`.
    pub fn basis(n_spins: usize, index: u64) -> Result<Self> {
        let d = 1usize << n_spins;
        if index as usize >= d {
            return Err(Error::IndexOutOfRange { index, n_bits: n_spins });
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); d];
        amplitudes[index as usize] = C64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn n_spins(&self) -> usize {
        self.amplitudes.len().trailing_zeros() as usize
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Dense density matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl DensityMatrix {
    /// Validates hermiticity, unit trace, and positivity (all within 1e−9).
    pub fn new(dim: usize, data: Vec<C64>) -> Result<Self> {
        if !dim.is_power_of_two() || data.len() != dim * dim {
            return Err(Error::InvalidDensityMatrix("shape must be 2^n × 2^n".into()));
        }
        let rho = Self { dim, data };
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn from_raw(dim: usize, data: Vec<C64>) -> Self {
        Self { dim, data }
    }

    pub fn from_pure(state: &QuantumState) -> Self {
        let a = state.amplitudes();
        let dim = a.len();
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(a[r] * a[c].conj());
            }
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_spins(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.dim + c]
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.dim {
            for c in r..self.dim {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let m = DMatrix::from_row_slice(self.dim, self.dim, &self.data);
        m.symmetric_eigenvalues().iter().fold(f64::INFINITY, |a, &b| a.min(b))
    }

    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > NORM_TOL {
            return Err(Error::InvalidDensityMatrix(format!("not Hermitian (error {herm:e})")));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr} is not 1")));
        }
        let lmin = self.min_eigenvalue();
        if lmin < -NORM_TOL {
            return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {lmin:e}")));
        }
        Ok(())
    }

    /// Replaces `ρ` by `(ρ + ρ†)/2`.
    pub(crate) fn symmetrize(&mut self) {
        let d = self.dim;
        for r in 0..d {
            for c in r..d {
                let avg = (self.data[r * d + c] + self.data[c * d + r].conj()) * 0.5;
                self.data[r * d + c] = avg;
                self.data[c * d + r] = avg.conj();
            }
        }
    }
}

/// States whose computational-basis measurement statistics are available.
pub trait MeasurableState {
    fn raw_probabilities(&self) -> Vec<f64>;
}

impl MeasurableState for QuantumState {
    fn raw_probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

impl MeasurableState for DensityMatrix {
    fn raw_probabilities(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i).re).collect()
    }
}

/// `p_j = |c_j|²` (or `ρ_jj`). Tiny negative diagonals from roundoff are
/// clamped to zero.
pub fn outcome_distribution(state: &impl MeasurableState) -> Result<Vec<f64>> {
    let mut p = state.raw_probabilities();
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > NORM_TOL || p.iter().any(|&x| x < -NORM_TOL || !x.is_finite()) {
        return Err(Error::NotNormalized(total));
    }
    for x in &mut p {
        *x = x.max(0.0);
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_distribution() {
        let p = outcome_distribution(&QuantumState::uniform(3)).unwrap();
        assert!(p.iter().all(|&x| (x - 0.125).abs() < 1e-15));
    }

    #[test]
    fn basis_state_distribution() {
        let p = outcome_distribution(&QuantumState::basis(3, 5).unwrap()).unwrap();
        assert_eq!(p[5], 1.0);
        assert_eq!(p.iter().sum::<f64>(), 1.0);
        assert!(QuantumState::basis(3, 8).is_err());
    }

    #[test]
    fn rejects_unnormalized() {
        assert!(QuantumState::new(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).is_err());
        assert!(QuantumState::new(vec![C64::new(1.0, 0.0); 3]).is_err());
    }

    #[test]
    fn density_validation() {
        let rho = DensityMatrix::from_pure(&QuantumState::uniform(2));
        rho.validate().unwrap();
        assert!((rho.trace().re - 1.0).abs() < 1e-15);
        let p = outcome_distribution(&rho).unwrap();
        assert!(p.iter().all(|&x| (x - 0.25).abs() < 1e-15));

        let o = C64::new(0.0, 0.0);
        let bad_trace = vec![C64::new(1.0, 0.0), o, o, C64::new(1.0, 0.0)];
        assert!(DensityMatrix::new(2, bad_trace).is_err());
        let non_herm = vec![C64::new(0.5, 0.0), C64::new(0.1, 0.0), o, C64::new(0.5, 0.0)];
        assert!(DensityMatrix::new(2, non_herm).is_err());
        let negative = vec![C64::new(1.5, 0.0), o, o, C64::new(-0.5, 0.0)];
        assert!(DensityMatrix::new(2, negative).is_err());
    }
}
