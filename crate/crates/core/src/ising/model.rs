use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ising problem `E(σ) = Σ_{i≠j} Q_ij σ_i σ_j + Σ_i q_i σ_i + offset`.
///
/// Couplings are stored dense and symmetric with a zero diagonal. A sparse
/// pair list (`i < j`, nonzero only) is kept alongside for fast evaluation;
/// every energy in the crate goes through [`SpinModel::energy_of_index`] or
/// the equivalent spin-vector path so that equal configurations always get
/// bit-identical energies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpinModelRepr", into = "SpinModelRepr")]
pub struct SpinModel {
    n_spins: usize,
    couplings: Vec<f64>,
    biases: Vec<f64>,
    offset: f64,
    #[serde(skip)]
    pairs: Vec<(usize, usize, f64)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpinModelRepr {
    n_spins: usize,
    couplings: Vec<Vec<f64>>,
    biases: Vec<f64>,
    offset: f64,
}

impl TryFrom<SpinModelRepr> for SpinModel {
    type Error = Error;

    fn try_from(r: SpinModelRepr) -> Result<Self> {
        if r.couplings.len() != r.n_spins {
            return Err(Error::DimensionMismatch {
                expected: r.n_spins,
                actual: r.couplings.len(),
            });
        }
        let mut flat = Vec::with_capacity(r.n_spins * r.n_spins);
        for row in r.couplings {
            if row.len() != r.n_spins {
                return Err(Error::DimensionMismatch {
                    expected: r.n_spins,
                    actual: row.len(),
                });
            }
            flat.extend(row);
        }
        SpinModel::new(r.n_spins, flat, r.biases, r.offset)
    }
}

impl From<SpinModel> for SpinModelRepr {
    fn from(m: SpinModel) -> Self {
        let n = m.n_spins;
        SpinModelRepr {
            n_spins: n,
            couplings: m.couplings.chunks(n).map(|r| r.to_vec()).collect(),
            biases: m.biases,
            offset: m.offset,
        }
    }
}

fn validate_square(n: usize, quad: &[f64], lin: &[f64], offset: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidModel("model needs at least one variable".into()));
    }
    if quad.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            actual: quad.len(),
        });
    }
    if lin.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: lin.len(),
        });
    }
    if !offset.is_finite() || quad.iter().chain(lin).any(|v| !v.is_finite()) {
        return Err(Error::InvalidModel("non-finite coefficient".into()));
    }
    for i in 0..n {
        if quad[i * n + i] != 0.0 {
            return Err(Error::InvalidModel(format!("nonzero diagonal at {i}")));
        }
        for j in (i + 1)..n {
            if quad[i * n + j] != quad[j * n + i] {
                return Err(Error::InvalidModel(format!("asymmetric entry ({i}, {j})")));
            }
        }
    }
    Ok(())
}

impl SpinModel {
    /// `couplings` is dense row-major `n × n`.
    pub fn new(n_spins: usize, couplings: Vec<f64>, biases: Vec<f64>, offset: f64) -> Result<Self> {
        validate_square(n_spins, &couplings, &biases, offset)?;
        let mut pairs = Vec::new();
        for i in 0..n_spins {
            for j in (i + 1)..n_spins {
                let v = couplings[i * n_spins + j];
                if v != 0.0 {
                    pairs.push((i, j, 2.0 * v));
                }
            }
        }
        Ok(Self {
            n_spins,
            couplings,
            biases,
            offset,
            pairs,
        })
    }

    pub fn zeros(n_spins: usize) -> Result<Self> {
        Self::new(n_spins, vec![0.0; n_spins * n_spins], vec![0.0; n_spins], 0.0)
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.couplings[i * self.n_spins + j]
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Unordered interacting pairs `(i, j, 2·Q_ij)` with `i < j`.
    pub fn pairs(&self) -> &[(usize, usize, f64)] {
        &self.pairs
    }

    pub fn max_abs_coupling(&self) -> f64 {
        self.couplings.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Adjacency lists `(neighbor, 2·Q_ij)` per spin.
    pub fn neighbors(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.n_spins];
        for &(i, j, w) in &self.pairs {
            adj[i].push((j, w));
            adj[j].push((i, w));
        }
        adj
    }

    /// Returns a copy with `extra` added to the linear term.
    pub fn with_added_biases(&self, extra: &[f64]) -> Result<Self> {
        if extra.len() != self.n_spins {
            return Err(Error::DimensionMismatch {
                expected: self.n_spins,
                actual: extra.len(),
            });
        }
        let biases = self.biases.iter().zip(extra).map(|(a, b)| a + b).collect();
        Self::new(self.n_spins, self.couplings.clone(), biases, self.offset)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    fn energy_with<F: Fn(usize) -> f64>(&self, spin: F) -> f64 {
        let mut e = self.offset;
        for (i, q) in self.biases.iter().enumerate() {
            e += q * spin(i);
        }
        for &(i, j, w) in &self.pairs {
            e += w * spin(i) * spin(j);
        }
        e
    }

    /// Energy of the configuration encoded by `index` (spin 0 = most
    /// significant bit, set bit = `+1`). Caller guarantees `n_spins ≤ 64`.
    pub fn energy_of_index(&self, index: u64) -> f64 {
        let top = self.n_spins - 1;
        self.energy_with(|i| if (index >> (top - i)) & 1 == 1 { 1.0 } else { -1.0 })
    }
}

/// A vector of `±1` spins.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct SpinConfiguration(Vec<i8>);

impl TryFrom<Vec<i8>> for SpinConfiguration {
    type Error = Error;

    fn try_from(v: Vec<i8>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SpinConfiguration> for Vec<i8> {
    fn from(c: SpinConfiguration) -> Self {
        c.0
    }
}

impl SpinConfiguration {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if let Some(bad) = spins.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::InvalidArgument(format!("spin value {bad} is not ±1")));
        }
        Ok(Self(spins))
    }

    /// All spins down (nothing occupied).
    pub fn all_down(n: usize) -> Self {
        Self(vec![-1; n])
    }

    /// Spins from occupation bits (`true` ↦ `+1`).
    pub fn from_occupation(bits: impl IntoIterator<Item = bool>) -> Self {
        Self(bits.into_iter().map(|b| if b { 1 } else { -1 }).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn spins(&self) -> &[i8] {
        &self.0
    }

    pub fn occupied(&self, i: usize) -> bool {
        self.0[i] == 1
    }

    /// Bitstring with spin 0 first, `1` for occupied.
    pub fn bitstring(&self) -> String {
        self.0.iter().map(|&s| if s == 1 { '1' } else { '0' }).collect()
    }
}

/// Evaluates the spin model on a configuration.
pub fn spin_energy(model: &SpinModel, config: &SpinConfiguration) -> Result<f64> {
    if config.len() != model.n_spins {
        return Err(Error::DimensionMismatch {
            expected: model.n_spins,
            actual: config.len(),
        });
    }
    let s = config.spins();
    Ok(model.energy_with(|i| f64::from(s[i])))
}

/// QUBO over `x ∈ {0,1}`: `E = Σ_{i≠j} W_ij x_i x_j + Σ_i w_i x_i + offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryQuadraticModel {
    n_vars: usize,
    quad: Vec<f64>,
    lin: Vec<f64>,
    offset: f64,
}

impl BinaryQuadraticModel {
    pub fn new(n_vars: usize, quad: Vec<f64>, lin: Vec<f64>, offset: f64) -> Result<Self> {
        validate_square(n_vars, &quad, &lin, offset)?;
        Ok(Self {
            n_vars,
            quad,
            lin,
            offset,
        })
    }

    pub fn zeros(n_vars: usize) -> Result<Self> {
        Self::new(n_vars, vec![0.0; n_vars * n_vars], vec![0.0; n_vars], 0.0)
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn quad(&self, i: usize, j: usize) -> f64 {
        self.quad[i * self.n_vars + j]
    }

    pub fn lin(&self) -> &[f64] {
        &self.lin
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Adds `weight · (Σ_{i∈line} x_i − 1)²` expanded with `x² = x`.
    pub fn add_one_hot_penalty(&mut self, line: &[usize], weight: f64) {
        let n = self.n_vars;
        for (a, &i) in line.iter().enumerate() {
            self.lin[i] -= weight;
            for &j in &line[a + 1..] {
                self.quad[i * n + j] += weight;
                self.quad[j * n + i] += weight;
            }
        }
        self.offset += weight;
    }

    pub fn energy(&self, x: &[u8]) -> Result<f64> {
        if x.len() != self.n_vars {
            return Err(Error::DimensionMismatch {
                expected: self.n_vars,
                actual: x.len(),
            });
        }
        let n = self.n_vars;
        let mut e = self.offset;
        for i in 0..n {
            let xi = f64::from(x[i]);
            e += self.lin[i] * xi;
            for j in 0..n {
                e += self.quad[i * n + j] * xi * f64::from(x[j]);
            }
        }
        Ok(e)
    }
}

/// Rewrites a QUBO in spin variables via `x = (1 + σ)/2`.
pub fn binary_to_spin(bqm: &BinaryQuadraticModel) -> Result<SpinModel> {
    let n = bqm.n_vars;
    let mut couplings = vec![0.0; n * n];
    let mut biases = vec![0.0; n];
    let mut offset = bqm.offset;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let w = bqm.quad[i * n + j];
            // W x_i x_j = W/4 (1 + σ_i + σ_j + σ_i σ_j)
            couplings[i * n + j] = w / 4.0;
            biases[i] += w / 4.0;
            biases[j] += w / 4.0;
            offset += w / 4.0;
        }
        biases[i] += bqm.lin[i] / 2.0;
        offset += bqm.lin[i] / 2.0;
    }
    SpinModel::new(n, couplings, biases, offset)
}
