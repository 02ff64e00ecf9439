use nalgebra::DMatrix;

use super::operators::{build_driver, build_problem_operator, Hamiltonian};
use super::schedule::AnnealSchedule;
use crate::error::{Error, Result};
use crate::ising::SpinModel;

/// Level pairs closer than this are treated as degenerate and skipped.
pub const DEGENERATE_GAP: f64 = 1e-10;

/// Dense diagonalization is limited to this many spins.
const DENSE_SPIN_LIMIT: usize = 12;

/// Lowest instantaneous eigenvalues of `H(s)` along a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSpectrum {
    pub s_grid: Vec<f64>,
    /// `eigenvalues[g][n]`, ascending in `n`.
    pub eigenvalues: Vec<Vec<f64>>,
}

impl PathSpectrum {
    /// `E_1(s) − E_0(s)` at each grid point.
    pub fn gaps(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|e| e[1] - e[0]).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdiabaticityReport {
    /// `(1/t_f) max_s max_{n≠m} |⟨n|∂_s H|m⟩| / |E_n − E_m|`.
    pub metric: f64,
    pub s_at_max: f64,
    pub levels_at_max: (usize, usize),
    /// Level pairs skipped because their gap was below [`DEGENERATE_GAP`].
    pub degenerate_pairs: usize,
}

fn check_grid(s_grid: &[f64], n_levels: usize, model: &SpinModel) -> Result<()> {
    if s_grid.is_empty() || s_grid.iter().any(|s| !(0.0..=1.0).contains(s)) {
        return Err(Error::InvalidArgument("s grid must be nonempty and within [0, 1]".into()));
    }
    if n_levels > 1usize << model.n_spins() {
        return Err(Error::InvalidArgument("more levels requested than the Hilbert space holds".into()));
    }
    if model.n_spins() > DENSE_SPIN_LIMIT {
        return Err(Error::GuardExceeded {
            what: "dense diagonalization",
            n_spins: model.n_spins(),
            limit: DENSE_SPIN_LIMIT,
        });
    }
    Ok(())
}

/// Sorted eigenpairs of a real symmetric matrix.
fn sorted_eigen(h: DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let eig = h.symmetric_eigen();
    if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigensolver("non-finite eigenvalue".into()));
    }
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((vals, vecs))
}

pub fn spectrum_along_path(
    model: &SpinModel,
    schedule: &AnnealSchedule,
    s_grid: &[f64],
    n_levels: usize,
) -> Result<PathSpectrum> {
    check_grid(s_grid, n_levels, model)?;
    let driver = build_driver(model.n_spins())?;
    let problem = build_problem_operator(model)?;
    let coef = schedule.coefficients();
    let eigenvalues = s_grid
        .iter()
        .map(|&s| {
            let h = Hamiltonian {
                driver: &driver,
                problem: &problem,
                a: coef.a(s),
                b: coef.b(s),
            };
            let (vals, _) = sorted_eigen(h.to_dense())?;
            Ok(vals.into_iter().take(n_levels).collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(PathSpectrum {
        s_grid: s_grid.to_vec(),
        eigenvalues,
    })
}

/// Adiabaticity ratio over the `n_levels` lowest instantaneous levels, with
/// `∂_s H = A'(s) H_B + B'(s) H_P` and `t_f` the schedule's total time.
pub fn adiabaticity_metric(
    model: &SpinModel,
    schedule: &AnnealSchedule,
    s_grid: &[f64],
    n_levels: usize,
) -> Result<AdiabaticityReport> {
    if n_levels < 2 {
        return Err(Error::InvalidArgument("need at least two levels".into()));
    }
    check_grid(s_grid, n_levels, model)?;
    let driver = build_driver(model.n_spins())?;
    let problem = build_problem_operator(model)?;
    let (hb, hp) = (driver.to_dense(), problem.to_dense());
    let coef = schedule.coefficients();
    let mut report = AdiabaticityReport {
        metric: 0.0,
        s_at_max: s_grid[0],
        levels_at_max: (0, 1),
        degenerate_pairs: 0,
    };
    let mut best = 0.0f64;
    for &s in s_grid {
        let (vals, vecs) = sorted_eigen(&hb * coef.a(s) + &hp * coef.b(s))?;
        let (da, db) = coef.derivatives(s);
        let dh = &hb * da + &hp * db;
        let low = vecs.columns(0, n_levels);
        let elems = low.transpose() * &dh * low;
        for n in 0..n_levels {
            for m in (n + 1)..n_levels {
                let gap = (vals[n] - vals[m]).abs();
                if gap < DEGENERATE_GAP {
                    report.degenerate_pairs += 1;
                    continue;
                }
                let ratio = elems[(n, m)].abs() / gap;
                if ratio > best {
                    best = ratio;
                    report.s_at_max = s;
                    report.levels_at_max = (n, m);
                }
            }
        }
    }
    report.metric = best / schedule.total_time();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anneal::{forward_schedule, Coefficients};
    use crate::ising::{brute_force_spectrum, build_krooks, BiasSpec};

    fn grid(n: usize) -> Vec<f64> {
        (0..=n).map(|i| i as f64 / n as f64).collect()
    }

    #[test]
    fn endpoints_match_oracles() {
        let m = build_krooks(2, &BiasSpec::random(0.3, 8)).unwrap();
        let sched = forward_schedule(1.0).unwrap();
        let ps = spectrum_along_path(&m, &sched, &[0.0, 1.0], 16).unwrap();
        assert!((ps.eigenvalues[0][0] + 4.0).abs() < 1e-10);
        let brute: Vec<f64> = brute_force_spectrum(&m, None).unwrap().iter().map(|e| e.energy).collect();
        for (a, b) in ps.eigenvalues[1].iter().zip(&brute) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn single_spin_gap_closed_form() {
        let h = 0.3;
        let m = SpinModel::new(1, vec![0.0], vec![h], 0.0).unwrap();
        let g = grid(10);
        let ps = spectrum_along_path(&m, &forward_schedule(1.0).unwrap(), &g, 2).unwrap();
        for (s, gap) in g.iter().zip(ps.gaps()) {
            let want = 2.0 * ((1.0 - s) * (1.0 - s) + s * s * h * h).sqrt();
            assert!((gap - want).abs() < 1e-12);
        }
    }

    #[test]
    fn commuting_family_has_zero_metric() {
        let m = build_krooks(2, &BiasSpec::random(0.3, 1)).unwrap();
        let sched = forward_schedule(1.0).unwrap().with_coefficients(Coefficients::custom("b-only", |_| 0.0, |s| 1.0 + s));
        let r = adiabaticity_metric(&m, &sched, &grid(5), 6).unwrap();
        assert!(r.metric < 1e-12);
    }

    #[test]
    fn metric_scales_inverse_with_time() {
        let m = build_krooks(2, &BiasSpec::random(0.3, 1)).unwrap();
        let a = adiabaticity_metric(&m, &forward_schedule(10.0).unwrap(), &grid(20), 4).unwrap();
        let b = adiabaticity_metric(&m, &forward_schedule(20.0).unwrap(), &grid(20), 4).unwrap();
        assert!((a.metric - 2.0 * b.metric).abs() < 1e-12 * a.metric);
    }

    #[test]
    fn small_gap_single_spin_metric() {
        // ratio h / (2((1−s)² + s²h²)) peaks at s* = 1/(1+h²) with value (1+h²)/(2h)
        for h in [0.5, 0.05] {
            let m = SpinModel::new(1, vec![0.0], vec![h], 0.0).unwrap();
            let s_star = 1.0 / (1.0 + h * h);
            let r = adiabaticity_metric(&m, &forward_schedule(1.0).unwrap(), &[0.2, s_star, 0.999], 2).unwrap();
            let want = (1.0 + h * h) / (2.0 * h);
            assert!((r.metric - want).abs() < 1e-8 * want, "{} vs {want}", r.metric);
            assert_eq!(r.s_at_max, s_star);
        }
    }

    #[test]
    fn degenerate_pairs_are_counted() {
        let m = build_krooks(2, &BiasSpec::none()).unwrap();
        let r = adiabaticity_metric(&m, &forward_schedule(1.0).unwrap(), &[1.0], 3).unwrap();
        assert!(r.degenerate_pairs >= 1);
    }

    #[test]
    fn argument_errors() {
        let m = SpinModel::zeros(2).unwrap();
        let s = forward_schedule(1.0).unwrap();
        assert!(adiabaticity_metric(&m, &s, &[0.5], 1).is_err());
        assert!(spectrum_along_path(&m, &s, &[1.5], 2).is_err());
        assert!(spectrum_along_path(&m, &s, &[0.5], 5).is_err());
    }
}
