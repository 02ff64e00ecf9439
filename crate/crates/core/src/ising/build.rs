use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::model::SpinModel;
use crate::error::{Error, Result};
use crate::rng::rng_from;

/// Linear bias (in units of the constraint coefficient `c`) placed on the
/// unconstrained dummy cell `S_00` so that ground states have `S_00 = 0`.
pub const MTDA_TIE_BREAK: f64 = 1.0;

/// On-site bias added to the k-rooks linear term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BiasKind {
    None,
    /// `q_b ~ N(0, σ_b²)` independently on every cell.
    RandomGaussian { sigma: f64 },
    /// Gaussian magnitudes, negative inside the diagonal blocks and positive
    /// elsewhere.
    Clustered { block_sizes: Vec<usize>, sigma: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasSpec {
    #[serde(flatten)]
    pub kind: BiasKind,
    #[serde(default)]
    pub seed: u64,
}

impl BiasSpec {
    pub fn none() -> Self {
        Self {
            kind: BiasKind::None,
            seed: 0,
        }
    }

    pub fn random(sigma: f64, seed: u64) -> Self {
        Self {
            kind: BiasKind::RandomGaussian { sigma },
            seed,
        }
    }

    pub fn clustered(block_sizes: Vec<usize>, sigma: f64, seed: u64) -> Self {
        Self {
            kind: BiasKind::Clustered { block_sizes, sigma },
            seed,
        }
    }

    /// Per-cell bias for a `k × k` board, row-major.
    pub fn sample(&self, k: usize) -> Result<Vec<f64>> {
        let draw = |sigma: f64| -> Result<Vec<f64>> {
            if !(sigma > 0.0 && sigma.is_finite()) {
                return Err(Error::InvalidArgument(format!("bias sigma must be > 0, got {sigma}")));
            }
            let normal = Normal::new(0.0, sigma).map_err(|e| Error::InvalidArgument(e.to_string()))?;
            let mut rng = rng_from(self.seed, &[k as u64]);
            Ok((0..k * k).map(|_| normal.sample(&mut rng)).collect())
        };
        match &self.kind {
            BiasKind::None => Ok(vec![0.0; k * k]),
            BiasKind::RandomGaussian { sigma } => draw(*sigma),
            BiasKind::Clustered { block_sizes, sigma } => {
                if block_sizes.iter().sum::<usize>() != k || block_sizes.contains(&0) {
                    return Err(Error::InvalidArgument(format!(
                        "block sizes {block_sizes:?} do not partition {k}"
                    )));
                }
                let mut block_of = Vec::with_capacity(k);
                for (b, &size) in block_sizes.iter().enumerate() {
                    block_of.extend(std::iter::repeat_n(b, size));
                }
                let mut q = draw(*sigma)?;
                for r in 0..k {
                    for c in 0..k {
                        let v = q[r * k + c].abs();
                        q[r * k + c] = if block_of[r] == block_of[c] { -v } else { v };
                    }
                }
                Ok(q)
            }
        }
    }
}

/// Column vector of ones.
fn ones(k: usize) -> DVector<f64> {
    DVector::from_element(k, 1.0)
}

/// Ones with a zero in the first entry.
fn ones0(k: usize) -> DVector<f64> {
    let mut v = ones(k);
    v[0] = 0.0;
    v
}

/// Identity with a zero in the `(0, 0)` entry.
fn identity0(k: usize) -> DMatrix<f64> {
    let mut m = DMatrix::identity(k, k);
    m[(0, 0)] = 0.0;
    m
}

/// All ones off the diagonal.
fn hollow_ones(k: usize) -> DMatrix<f64> {
    DMatrix::from_element(k, k, 1.0) - DMatrix::identity(k, k)
}

fn model_from(q: &DMatrix<f64>, lin: &DVector<f64>) -> Result<SpinModel> {
    let n = lin.len();
    let mut flat = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            flat.push(q[(r, c)]);
        }
    }
    SpinModel::new(n, flat, lin.iter().copied().collect(), 0.0)
}

/// k-rooks Hamiltonian `Q = I⊗J + J⊗I`, `q = 2(2k−4)·1 + q_b`.
pub fn build_krooks(k: usize, bias: &BiasSpec) -> Result<SpinModel> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k-rooks needs k >= 2, got {k}")));
    }
    let id = DMatrix::<f64>::identity(k, k);
    let j = hollow_ones(k);
    let q = id.kronecker(&j) + j.kronecker(&id);
    let line = (2.0 * k as f64 - 4.0) * ones(k * k);
    let lin = &line + &line + DVector::from_vec(bias.sample(k)?);
    model_from(&q, &lin)
}

/// `(M+1) × (N+1)` association cost matrix Γ in nats. Row 0 holds miss
/// costs, column 0 holds clutter costs, and `Γ_00 = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostMatrix {
    n_targets: usize,
    n_measurements: usize,
    entries: Vec<f64>,
}

impl CostMatrix {
    pub fn zeros(n_targets: usize, n_measurements: usize) -> Self {
        Self {
            n_targets,
            n_measurements,
            entries: vec![0.0; (n_measurements + 1) * (n_targets + 1)],
        }
    }

    /// `rows` is indexed `[m][n]` with `m ∈ 0..=M`, `n ∈ 0..=N`.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m1 = rows.len();
        if m1 == 0 {
            return Err(Error::InvalidArgument("cost matrix needs a dummy row".into()));
        }
        let n1 = rows[0].len();
        if n1 < 2 {
            return Err(Error::InvalidArgument("cost matrix needs at least one target column".into()));
        }
        let mut entries = Vec::with_capacity(m1 * n1);
        for r in rows {
            if r.len() != n1 {
                return Err(Error::DimensionMismatch {
                    expected: n1,
                    actual: r.len(),
                });
            }
            entries.extend(r);
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite cost".into()));
        }
        if entries[0] != 0.0 {
            return Err(Error::InvalidArgument("cost entry (0,0) must be zero".into()));
        }
        Ok(Self {
            n_targets: n1 - 1,
            n_measurements: m1 - 1,
            entries,
        })
    }

    pub fn n_targets(&self) -> usize {
        self.n_targets
    }

    pub fn n_measurements(&self) -> usize {
        self.n_measurements
    }

    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.entries[m * (self.n_targets + 1) + n]
    }

    pub fn set(&mut self, m: usize, n: usize, v: f64) {
        self.entries[m * (self.n_targets + 1) + n] = v;
    }

    /// Row-major vectorization (`Γ_00` first), matching the Kronecker layout.
    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.n_targets + 1).map(|r| r.to_vec()).collect()
    }
}

/// MTDA Hamiltonian with dummy row/column:
/// `Q = c(I₀⊗J + J⊗I₀)`, `q = c(θ'_r + θ'_c) + vec(Γ)`, plus
/// [`MTDA_TIE_BREAK`]`·c` on `S_00`.
pub fn build_mtda(
    n_targets: usize,
    n_measurements: usize,
    costs: &CostMatrix,
    c: f64,
) -> Result<SpinModel> {
    if n_targets < 1 {
        return Err(Error::InvalidArgument("MTDA needs at least one target".into()));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidArgument(format!("constraint coefficient must be > 0, got {c}")));
    }
    if costs.n_targets != n_targets || costs.n_measurements != n_measurements {
        return Err(Error::InvalidArgument(format!(
            "cost matrix is {}x{}, expected {}x{}",
            costs.n_measurements + 1,
            costs.n_targets + 1,
            n_measurements + 1,
            n_targets + 1
        )));
    }
    let (rows, cols) = (n_measurements + 1, n_targets + 1);
    let w_r = identity0(rows).kronecker(&hollow_ones(cols));
    let w_c = hollow_ones(rows).kronecker(&identity0(cols));
    let theta_r = (2.0 * n_targets as f64 - 2.0) * ones0(rows).kronecker(&ones(cols));
    let theta_c = (2.0 * n_measurements as f64 - 2.0) * ones(rows).kronecker(&ones0(cols));
    let q = c * (w_r + w_c);
    let mut lin = c * (theta_r + theta_c) + DVector::from_column_slice(costs.as_slice());
    lin[0] += MTDA_TIE_BREAK * c;
    model_from(&q, &lin)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn krooks_k2_has_no_linear_term() {
        let m = build_krooks(2, &BiasSpec::none()).unwrap();
        assert_eq!(m.n_spins(), 4);
        assert!(m.biases().iter().all(|&q| q == 0.0));
        // same row: cells 0,1; same column: cells 0,2; diagonal: none
        assert_eq!(m.coupling(0, 1), 1.0);
        assert_eq!(m.coupling(0, 2), 1.0);
        assert_eq!(m.coupling(0, 3), 0.0);
    }

    #[test]
    fn krooks_k3_bias_is_four() {
        let m = build_krooks(3, &BiasSpec::none()).unwrap();
        assert!(m.biases().iter().all(|&q| q == 4.0));
    }

    #[test]
    fn krooks_rejects_small_k() {
        assert!(build_krooks(1, &BiasSpec::none()).is_err());
    }

    #[test]
    fn clustered_signs_follow_blocks() {
        let q = BiasSpec::clustered(vec![1, 2, 3], 0.1, 4).sample(6).unwrap();
        let block = [0, 1, 1, 2, 2, 2];
        for r in 0..6 {
            for c in 0..6 {
                let v = q[r * 6 + c];
                if block[r] == block[c] {
                    assert!(v <= 0.0);
                } else {
                    assert!(v >= 0.0);
                }
            }
        }
        assert!(BiasSpec::clustered(vec![1, 2], 0.1, 4).sample(6).is_err());
        assert!(BiasSpec::random(0.0, 1).sample(3).is_err());
    }

    #[test]
    fn bias_is_seed_deterministic() {
        let a = BiasSpec::random(0.1, 9).sample(4).unwrap();
        assert_eq!(a, BiasSpec::random(0.1, 9).sample(4).unwrap());
        assert_ne!(a, BiasSpec::random(0.1, 10).sample(4).unwrap());
    }

    #[test]
    fn mtda_line_terms_vanish_for_one_by_one() {
        let m = build_mtda(1, 1, &CostMatrix::zeros(1, 1), 1.0).unwrap();
        assert_eq!(m.biases(), &[MTDA_TIE_BREAK, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn mtda_two_by_two_row_term() {
        let m = build_mtda(2, 2, &CostMatrix::zeros(2, 2), 1.0).unwrap();
        // θ'_r = 2·(0,0,0,1,1,1,1,1,1) and θ'_c = 2·(0,1,1,0,1,1,0,1,1)
        let want = [1.0, 2.0, 2.0, 2.0, 4.0, 4.0, 2.0, 4.0, 4.0];
        assert_eq!(m.biases(), &want);
        // row 1 cells (1,0),(1,1),(1,2) interact; dummy row 0 does not
        assert_eq!(m.coupling(3, 4), 1.0);
        assert_eq!(m.coupling(0, 1), 0.0);
        // column 1 cells (0,1),(1,1),(2,1) interact; dummy column 0 does not
        assert_eq!(m.coupling(1, 4), 1.0);
        assert_eq!(m.coupling(0, 3), 0.0);
    }

    #[test]
    fn mtda_adds_costs_row_major() {
        let mut g = CostMatrix::zeros(2, 1);
        g.set(1, 2, 5.0);
        g.set(0, 1, 3.0);
        let m = build_mtda(2, 1, &g, 2.0).unwrap();
        let base = build_mtda(2, 1, &CostMatrix::zeros(2, 1), 2.0).unwrap();
        let diff: Vec<f64> = m.biases().iter().zip(base.biases()).map(|(a, b)| a - b).collect();
        assert_eq!(diff, vec![0.0, 3.0, 0.0, 0.0, 0.0, 5.0]);
    }

    #[test]
    fn mtda_argument_errors() {
        assert!(build_mtda(2, 2, &CostMatrix::zeros(2, 1), 1.0).is_err());
        assert!(build_mtda(2, 2, &CostMatrix::zeros(2, 2), 0.0).is_err());
        assert!(build_mtda(0, 2, &CostMatrix::zeros(0, 2), 1.0).is_err());
        assert!(CostMatrix::from_rows(vec![vec![1.0, 0.0]]).is_err());
    }

    #[test]
    fn bias_spec_json_shape() {
        let b: BiasSpec =
            serde_json::from_str(r#"{"kind":"clustered","block_sizes":[2,2,3],"sigma":0.1,"seed":3}"#).unwrap();
        assert_eq!(b, BiasSpec::clustered(vec![2, 2, 3], 0.1, 3));
        let r: BiasSpec = serde_json::from_str(r#"{"kind":"random-gaussian","sigma":0.01}"#).unwrap();
        assert_eq!(r, BiasSpec::random(0.01, 0));
    }
}
