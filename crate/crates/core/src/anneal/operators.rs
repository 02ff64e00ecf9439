use nalgebra::DMatrix;

use super::C64;
use crate::error::{Error, Result};
use crate::ising::SpinModel;

/// Statevector paths refuse models above this many spins (2^20 amplitudes).
pub const STATEVECTOR_SPIN_LIMIT: usize = 20;

fn guard(n_spins: usize, limit: usize, what: &'static str) -> Result<()> {
    if n_spins == 0 {
        return Err(Error::InvalidArgument("need at least one spin".into()));
    }
    if n_spins > limit {
        return Err(Error::GuardExceeded { what, n_spins, limit });
    }
    Ok(())
}

pub(crate) fn statevector_guard(n_spins: usize) -> Result<()> {
    guard(n_spins, STATEVECTOR_SPIN_LIMIT, "statevector simulation")
}

/// `H_B = −Σ_i σx_i`, applied matrix-free by bit flips.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransverseField {
    n_spins: usize,
}

impl TransverseField {
    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn dim(&self) -> usize {
        1 << self.n_spins
    }

    /// `out ← H_B x`.
    pub fn apply(&self, x: &[C64], out: &mut [C64]) {
        for (j, o) in out.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..self.n_spins {
                acc -= x[j ^ (1 << i)];
            }
            *o = acc;
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |r, c| if (r ^ c).count_ones() == 1 { -1.0 } else { 0.0 })
    }
}

pub fn build_driver(n_spins: usize) -> Result<TransverseField> {
    statevector_guard(n_spins)?;
    Ok(TransverseField { n_spins })
}

/// Diagonal `H_P` in the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemOperator {
    n_spins: usize,
    diagonal: Vec<f64>,
}

impl ProblemOperator {
    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.diagonal))
    }
}

pub fn build_problem_operator(model: &SpinModel) -> Result<ProblemOperator> {
    statevector_guard(model.n_spins())?;
    let d = 1u64 << model.n_spins();
    Ok(ProblemOperator {
        n_spins: model.n_spins(),
        diagonal: (0..d).map(|j| model.energy_of_index(j)).collect(),
    })
}

/// `a·H_B + b·H_P` at fixed coefficients.
#[derive(Debug, Clone, Copy)]
pub struct Hamiltonian<'a> {
    pub driver: &'a TransverseField,
    pub problem: &'a ProblemOperator,
    pub a: f64,
    pub b: f64,
}

impl Hamiltonian<'_> {
    pub fn dim(&self) -> usize {
        self.problem.diagonal.len()
    }

    pub fn apply(&self, x: &[C64], out: &mut [C64]) {
        if self.a != 0.0 {
            self.driver.apply(x, out);
            for ((o, xi), e) in out.iter_mut().zip(x).zip(&self.problem.diagonal) {
                *o = *o * self.a + xi * (self.b * e);
            }
        } else {
            for ((o, xi), e) in out.iter_mut().zip(x).zip(&self.problem.diagonal) {
                *o = xi * (self.b * e);
            }
        }
    }

    pub fn is_diagonal(&self) -> bool {
        self.a == 0.0
    }

    /// Crude bound on the spectral radius, used to size Krylov steps.
    pub fn norm_bound(&self) -> f64 {
        let pmax = self.problem.diagonal.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        self.a.abs() * self.driver.n_spins as f64 + self.b.abs() * pmax
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        self.driver.to_dense() * self.a + self.problem.to_dense() * self.b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::{build_krooks, decode, spin_energy, BiasSpec};

    #[test]
    fn single_spin_driver() {
        let d = build_driver(1).unwrap().to_dense();
        assert_eq!(d, DMatrix::from_row_slice(2, 2, &[0.0, -1.0, -1.0, 0.0]));
    }

    #[test]
    fn two_spin_driver_structure() {
        let d = build_driver(2).unwrap().to_dense();
        for r in 0..4 {
            let row: Vec<f64> = d.row(r).iter().copied().collect();
            assert_eq!(row.iter().filter(|&&v| v == -1.0).count(), 2);
            assert_eq!(row.iter().filter(|&&v| v == 0.0).count(), 2);
        }
    }

    #[test]
    fn driver_ground_state_is_uniform() {
        for n in 1..=6 {
            let d = build_driver(n).unwrap().to_dense();
            let eig = d.symmetric_eigen();
            let (imin, emin) = eig
                .eigenvalues
                .iter()
                .enumerate()
                .fold((0, f64::INFINITY), |acc, (i, &e)| if e < acc.1 { (i, e) } else { acc });
            assert!((emin + n as f64).abs() < 1e-10);
            let v = eig.eigenvectors.column(imin);
            let amp = 1.0 / ((1 << n) as f64).sqrt();
            assert!(v.iter().all(|x| (x.abs() - amp).abs() < 1e-8));
        }
    }

    #[test]
    fn guard_on_driver_size() {
        assert!(matches!(build_driver(21), Err(Error::GuardExceeded { .. })));
        assert!(build_driver(0).is_err());
    }

    #[test]
    fn problem_operator_matches_spin_energy() {
        let zero = build_problem_operator(&SpinModel::zeros(3).unwrap()).unwrap();
        assert!(zero.diagonal().iter().all(|&e| e == 0.0));

        // index 0 is the unoccupied (σ = −1) state
        let one = SpinModel::new(1, vec![0.0], vec![1.0], 0.0).unwrap();
        assert_eq!(build_problem_operator(&one).unwrap().diagonal(), &[-1.0, 1.0]);

        let m = build_krooks(3, &BiasSpec::random(0.3, 1)).unwrap();
        let p = build_problem_operator(&m).unwrap();
        for (j, &e) in p.diagonal().iter().enumerate() {
            assert_eq!(e, spin_energy(&m, &decode(j as u64, 9).unwrap()).unwrap());
        }
        let k2 = build_problem_operator(&build_krooks(2, &BiasSpec::none()).unwrap()).unwrap();
        assert_eq!(k2.diagonal().iter().filter(|&&e| e == -8.0).count(), 2);
    }

    #[test]
    fn matrix_free_matches_dense() {
        let m = build_krooks(2, &BiasSpec::random(0.5, 3)).unwrap();
        let (drv, prob) = (build_driver(4).unwrap(), build_problem_operator(&m).unwrap());
        let h = Hamiltonian { driver: &drv, problem: &prob, a: 0.7, b: 0.4 };
        let x: Vec<C64> = (0..16).map(|i| C64::new(i as f64 * 0.1, 1.0 - i as f64 * 0.05)).collect();
        let mut y = vec![C64::new(0.0, 0.0); 16];
        h.apply(&x, &mut y);
        let dense = h.to_dense();
        for r in 0..16 {
            let want: C64 = (0..16).map(|c| x[c] * dense[(r, c)]).sum();
            assert!((want - y[r]).norm() < 1e-12);
        }
    }
}
