use serde::{Deserialize, Serialize};

use super::model::SpinConfiguration;
use crate::error::{Error, Result};

/// Binary association matrix `S` of shape `(M+1) × (N+1)`; row 0 is the
/// dummy "missed detection" row and column 0 the dummy "clutter" column.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AssignmentMatrix {
    n_targets: usize,
    n_measurements: usize,
    entries: Vec<u8>,
}

impl AssignmentMatrix {
    pub fn zeros(n_targets: usize, n_measurements: usize) -> Self {
        Self {
            n_targets,
            n_measurements,
            entries: vec![0; (n_targets + 1) * (n_measurements + 1)],
        }
    }

    /// Builds the matrix where measurement `m` (1-based) goes to
    /// `origin[m-1]`: `Some(n)` for target `n` (1-based) or `None` for
    /// clutter. Targets left unassigned are marked missed.
    pub fn from_origins(n_targets: usize, origin: &[Option<usize>]) -> Result<Self> {
        let mut s = Self::zeros(n_targets, origin.len());
        let mut taken = vec![false; n_targets + 1];
        for (i, o) in origin.iter().enumerate() {
            match *o {
                Some(n) if n >= 1 && n <= n_targets && !taken[n] => {
                    taken[n] = true;
                    s.set(i + 1, n, 1);
                }
                Some(n) => {
                    return Err(Error::InvalidArgument(format!("target {n} invalid or used twice")))
                }
                None => s.set(i + 1, 0, 1),
            }
        }
        for (n, t) in taken.iter().enumerate().skip(1) {
            if !t {
                s.set(0, n, 1);
            }
        }
        Ok(s)
    }

    pub fn from_configuration(
        n_targets: usize,
        n_measurements: usize,
        config: &SpinConfiguration,
    ) -> Result<Self> {
        let len = (n_targets + 1) * (n_measurements + 1);
        if config.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                actual: config.len(),
            });
        }
        Ok(Self {
            n_targets,
            n_measurements,
            entries: config.spins().iter().map(|&s| u8::from(s == 1)).collect(),
        })
    }

    pub fn n_targets(&self) -> usize {
        self.n_targets
    }

    pub fn n_measurements(&self) -> usize {
        self.n_measurements
    }

    pub fn n_cells(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, m: usize, n: usize) -> u8 {
        self.entries[m * (self.n_targets + 1) + n]
    }

    pub fn set(&mut self, m: usize, n: usize, v: u8) {
        self.entries[m * (self.n_targets + 1) + n] = v;
    }

    pub fn entries(&self) -> &[u8] {
        &self.entries
    }

    pub fn to_configuration(&self) -> SpinConfiguration {
        SpinConfiguration::from_occupation(self.entries.iter().map(|&b| b == 1))
    }

    pub fn bitstring(&self) -> String {
        self.entries.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()
    }

    /// Exactly one entry in every non-dummy row and column, and `S_00 = 0`.
    pub fn is_feasible(&self) -> bool {
        let (rows, cols) = (self.n_measurements + 1, self.n_targets + 1);
        if self.get(0, 0) != 0 {
            return false;
        }
        (1..rows).all(|m| (0..cols).map(|n| u32::from(self.get(m, n))).sum::<u32>() == 1)
            && (1..cols).all(|n| (0..rows).map(|m| u32::from(self.get(m, n))).sum::<u32>() == 1)
    }

    /// Measurement index (1-based) assigned to target `n`, `None` if missed.
    pub fn measurement_for_target(&self, n: usize) -> Option<usize> {
        (1..=self.n_measurements).find(|&m| self.get(m, n) == 1)
    }
}

/// Constraint family used to label configurations feasible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProblemKind {
    /// One rook per row and column on a `k × k` board.
    KRooks { k: usize },
    /// Association matrix with dummy row and column.
    Mtda { n_targets: usize, n_measurements: usize },
}

impl ProblemKind {
    pub fn n_spins(&self) -> usize {
        match *self {
            ProblemKind::KRooks { k } => k * k,
            ProblemKind::Mtda {
                n_targets,
                n_measurements,
            } => (n_targets + 1) * (n_measurements + 1),
        }
    }

    /// Feasibility of an encoded index (spin 0 = most significant bit).
    pub fn is_feasible_index(&self, index: u64) -> bool {
        let ns = self.n_spins();
        let bit = |i: usize| ((index >> (ns - 1 - i)) & 1) as u32;
        match *self {
            ProblemKind::KRooks { k } => (0..k).all(|r| {
                (0..k).map(|c| bit(r * k + c)).sum::<u32>() == 1
                    && (0..k).map(|c| bit(c * k + r)).sum::<u32>() == 1
            }),
            ProblemKind::Mtda {
                n_targets,
                n_measurements,
            } => {
                let cols = n_targets + 1;
                bit(0) == 0
                    && (1..=n_measurements).all(|m| (0..cols).map(|n| bit(m * cols + n)).sum::<u32>() == 1)
                    && (1..cols).all(|n| (0..=n_measurements).map(|m| bit(m * cols + n)).sum::<u32>() == 1)
            }
        }
    }

    /// Number of feasible configurations: `k!` for rooks, and for MTDA
    /// `Σ_a C(N,a)·C(M,a)·a!` over the number `a` of detected targets.
    pub fn feasible_count(&self) -> u128 {
        let fact = |n: usize| (1..=n as u128).product::<u128>();
        let choose = |n: usize, r: usize| fact(n) / (fact(r) * fact(n - r));
        match *self {
            ProblemKind::KRooks { k } => fact(k),
            ProblemKind::Mtda {
                n_targets,
                n_measurements,
            } => (0..=n_targets.min(n_measurements))
                .map(|a| choose(n_targets, a) * choose(n_measurements, a) * fact(a))
                .sum(),
        }
    }
}

/// Integer index of a configuration; spin 0 (`S_00`) is the most
/// significant bit and occupied cells are set bits.
pub fn encode(config: &SpinConfiguration) -> Result<u64> {
    let n = config.len();
    if n == 0 || n > 64 {
        return Err(Error::GuardExceeded {
            what: "integer encoding",
            n_spins: n,
            limit: 64,
        });
    }
    Ok(config
        .spins()
        .iter()
        .fold(0u64, |acc, &s| (acc << 1) | u64::from(s == 1)))
}

/// Inverse of [`encode`] for `n_spins` spins.
pub fn decode(index: u64, n_spins: usize) -> Result<SpinConfiguration> {
    if n_spins == 0 || n_spins > 64 {
        return Err(Error::GuardExceeded {
            what: "integer encoding",
            n_spins,
            limit: 64,
        });
    }
    if n_spins < 64 && index >> n_spins != 0 {
        return Err(Error::IndexOutOfRange {
            index,
            n_bits: n_spins,
        });
    }
    Ok(SpinConfiguration::from_occupation(
        (0..n_spins).map(|i| (index >> (n_spins - 1 - i)) & 1 == 1),
    ))
}

pub fn is_feasible(config: &SpinConfiguration, kind: ProblemKind) -> Result<bool> {
    if config.len() != kind.n_spins() {
        return Err(Error::DimensionMismatch {
            expected: kind.n_spins(),
            actual: config.len(),
        });
    }
    Ok(kind.is_feasible_index(encode(config)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn board(k: usize, cells: &[(usize, usize)]) -> SpinConfiguration {
        let mut bits = vec![false; k * k];
        for &(r, c) in cells {
            bits[r * k + c] = true;
        }
        SpinConfiguration::from_occupation(bits)
    }

    #[test]
    fn zero_index_is_empty() {
        let c = decode(0, 4).unwrap();
        assert_eq!(c, SpinConfiguration::all_down(4));
        let s = AssignmentMatrix::from_configuration(1, 1, &c).unwrap();
        assert!(s.entries().iter().all(|&b| b == 0));
    }

    #[test]
    fn identity_permutation_index() {
        // cells S_00 S_01 S_10 S_11 → bits 1001
        let c = board(2, &[(0, 0), (1, 1)]);
        assert_eq!(encode(&c).unwrap(), 0b1001);
        assert_eq!(decode(0b1001, 4).unwrap(), c);
    }

    #[test]
    fn all_ones_index() {
        let c = SpinConfiguration::from_occupation(vec![true; 9]);
        assert_eq!(encode(&c).unwrap(), (1 << 9) - 1);
    }

    #[test]
    fn decode_range_checks() {
        assert!(matches!(decode(16, 4), Err(Error::IndexOutOfRange { .. })));
        assert!(decode(u64::MAX, 64).is_ok());
        assert!(decode(0, 65).is_err());
    }

    #[test]
    fn encode_decode_exhaustive_small() {
        for n in 1..=12 {
            for j in 0..1u64 << n {
                assert_eq!(encode(&decode(j, n).unwrap()).unwrap(), j);
            }
        }
    }

    #[test]
    fn krooks_feasibility() {
        let kind = ProblemKind::KRooks { k: 3 };
        assert!(is_feasible(&board(3, &[(0, 1), (1, 2), (2, 0)]), kind).unwrap());
        assert!(!is_feasible(&board(3, &[(0, 0), (0, 1), (2, 2)]), kind).unwrap());
        assert!(is_feasible(&board(2, &[(0, 0)]), kind).is_err());
    }

    #[test]
    fn mtda_one_by_one_has_two_feasible() {
        let kind = ProblemKind::Mtda {
            n_targets: 1,
            n_measurements: 1,
        };
        let feasible: Vec<u64> = (0..16).filter(|&j| kind.is_feasible_index(j)).collect();
        // {S_11 = 1} → 0001, {S_01 = S_10 = 1} → 0110
        assert_eq!(feasible, vec![0b0001, 0b0110]);
        assert_eq!(kind.feasible_count(), 2);
        let miss_and_clutter = decode(0b0110, 4).unwrap();
        let s = AssignmentMatrix::from_configuration(1, 1, &miss_and_clutter).unwrap();
        assert_eq!((s.get(0, 1), s.get(1, 0), s.get(1, 1), s.get(0, 0)), (1, 1, 0, 0));
        assert!(s.is_feasible());
    }

    #[test]
    fn feasible_counts_match_enumeration() {
        for (n, m) in [(1, 0), (1, 2), (2, 2), (2, 3), (3, 1)] {
            let kind = ProblemKind::Mtda {
                n_targets: n,
                n_measurements: m,
            };
            let count = (0..1u64 << kind.n_spins()).filter(|&j| kind.is_feasible_index(j)).count();
            assert_eq!(count as u128, kind.feasible_count(), "N={n} M={m}");
        }
        for k in 2..=4 {
            let kind = ProblemKind::KRooks { k };
            let count = (0..1u64 << kind.n_spins()).filter(|&j| kind.is_feasible_index(j)).count();
            assert_eq!(count as u128, kind.feasible_count());
        }
    }

    #[test]
    fn origins_build_feasible_matrices() {
        let s = AssignmentMatrix::from_origins(2, &[Some(2), None]).unwrap();
        assert!(s.is_feasible());
        assert_eq!(s.measurement_for_target(2), Some(1));
        assert_eq!(s.measurement_for_target(1), None);
        assert_eq!(s.get(0, 1), 1);
        assert!(AssignmentMatrix::from_origins(2, &[Some(1), Some(1)]).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn round_trip_large(n in 13usize..=64, raw in any::<u64>()) {
                let j = if n == 64 { raw } else { raw & ((1u64 << n) - 1) };
                prop_assert_eq!(encode(&decode(j, n).unwrap()).unwrap(), j);
            }
        }
    }
}
