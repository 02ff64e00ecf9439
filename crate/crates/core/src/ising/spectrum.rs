use super::assignment::{decode, ProblemKind};
use super::model::{SpinConfiguration, SpinModel};
use crate::error::{Error, Result};

/// Largest model accepted by [`brute_force_spectrum`].
pub const SPECTRUM_SPIN_LIMIT: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumEntry {
    pub index: u64,
    pub n_spins: usize,
    pub energy: f64,
    pub feasible: bool,
}

impl SpectrumEntry {
    pub fn configuration(&self) -> SpinConfiguration {
        decode(self.index, self.n_spins).expect("index within range by construction")
    }
}

/// Every configuration with its energy, ascending in energy and then in
/// index. Without a `kind`, every configuration counts as feasible.
pub fn brute_force_spectrum(model: &SpinModel, kind: Option<ProblemKind>) -> Result<Vec<SpectrumEntry>> {
    let n = model.n_spins();
    if n > SPECTRUM_SPIN_LIMIT {
        return Err(Error::GuardExceeded {
            what: "brute-force spectrum",
            n_spins: n,
            limit: SPECTRUM_SPIN_LIMIT,
        });
    }
    if let Some(k) = kind {
        if k.n_spins() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: k.n_spins(),
            });
        }
    }
    let mut out: Vec<SpectrumEntry> = (0..1u64 << n)
        .map(|index| SpectrumEntry {
            index,
            n_spins: n,
            energy: model.energy_of_index(index),
            feasible: kind.is_none_or(|k| k.is_feasible_index(index)),
        })
        .collect();
    out.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.index.cmp(&b.index)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::{build_krooks, spin_energy, BiasSpec};

    #[test]
    fn single_spin() {
        let m = SpinModel::new(1, vec![0.0], vec![1.0], 0.0).unwrap();
        let s = brute_force_spectrum(&m, None).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!((s[0].configuration().spins()[0], s[0].energy), (-1, -1.0));
        assert_eq!((s[1].configuration().spins()[0], s[1].energy), (1, 1.0));
    }

    #[test]
    fn krooks_two_spectrum() {
        let m = build_krooks(2, &BiasSpec::none()).unwrap();
        let s = brute_force_spectrum(&m, Some(ProblemKind::KRooks { k: 2 })).unwrap();
        let ground: Vec<_> = s.iter().filter(|e| e.energy == -8.0).collect();
        assert_eq!(ground.len(), 2);
        assert!(ground.iter().all(|e| e.feasible));
        assert_eq!(s.last().unwrap().energy, 8.0);
        assert_eq!(s.last().unwrap().index, 0b1111);
        // ties broken by index
        assert_eq!((ground[0].index, ground[1].index), (0b0110, 0b1001));
        // all-empty board
        assert_eq!(m.energy_of_index(0), 8.0);
        let diag = crate::ising::decode(0b1001, 4).unwrap();
        assert_eq!(spin_energy(&m, &diag).unwrap(), -8.0);
    }

    #[test]
    fn krooks_three_counts() {
        let m = build_krooks(3, &BiasSpec::none()).unwrap();
        let s = brute_force_spectrum(&m, Some(ProblemKind::KRooks { k: 3 })).unwrap();
        assert_eq!(s.iter().filter(|e| e.feasible).count(), 6);
        assert_eq!(s.iter().filter(|e| !e.feasible).count(), 506);
        let e0 = s[0].energy;
        let ground: Vec<_> = s.iter().filter(|e| e.energy == e0).collect();
        assert_eq!(ground.len(), 6);
        assert!(ground.iter().all(|e| e.feasible));
    }

    #[test]
    fn guard_limit() {
        let m = SpinModel::zeros(25).unwrap();
        assert!(matches!(brute_force_spectrum(&m, None), Err(Error::GuardExceeded { .. })));
    }
}
