//! Lanczos approximation of `exp(−iτH) v` for real symmetric `H`.

use nalgebra::DMatrix;

use super::operators::Hamiltonian;
use super::C64;

const MAX_BASIS: usize = 40;
const CHECK_EVERY: usize = 4;
/// Local error targets are never set below this multiple of `‖v‖`.
const ROUNDING_FLOOR: f64 = 1e-15;

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Coefficients of `exp(−iτT) e₁` in the Lanczos basis.
fn small_expm(alpha: &[f64], beta: &[f64], tau: f64) -> Vec<C64> {
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |r, c| {
        if r == c {
            alpha[r]
        } else if r + 1 == c {
            beta[r]
        } else if c + 1 == r {
            beta[c]
        } else {
            0.0
        }
    });
    let eig = t.symmetric_eigen();
    (0..m)
        .map(|k| {
            (0..m)
                .map(|l| {
                    let w = eig.eigenvectors[(k, l)] * eig.eigenvectors[(0, l)];
                    C64::from_polar(w, -tau * eig.eigenvalues[l])
                })
                .sum()
        })
        .collect()
}

/// One Krylov step. Returns `None` when the basis limit is hit before the
/// error estimate drops below `tol`.
fn lanczos_step(h: &Hamiltonian<'_>, tau: f64, v: &[C64], tol: f64) -> Option<Vec<C64>> {
    let d = v.len();
    let nrm = norm(v);
    let mut basis: Vec<Vec<C64>> = vec![v.iter().map(|x| x / nrm).collect()];
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![C64::new(0.0, 0.0); d];
    loop {
        let j = basis.len() - 1;
        h.apply(&basis[j], &mut w);
        alpha.push(dot(&basis[j], &w).re);
        // full reorthogonalization, two passes
        for _ in 0..2 {
            for b in &basis {
                let p = dot(b, &w);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= p * bi;
                }
            }
        }
        let bnext = norm(&w);
        let m = alpha.len();
        let breakdown = bnext <= 1e-14 * (1.0 + alpha.iter().fold(0.0f64, |a, x| a.max(x.abs())));
        if breakdown || m % CHECK_EVERY == 0 || m == MAX_BASIS || m == d {
            let y = small_expm(&alpha, &beta, tau);
            let err = if breakdown || m == d { 0.0 } else { bnext * y[m - 1].norm() };
            if err <= tol {
                let mut out = vec![C64::new(0.0, 0.0); d];
                for (yk, b) in y.iter().zip(&basis) {
                    let c = yk * nrm;
                    for (o, bi) in out.iter_mut().zip(b) {
                        *o += c * bi;
                    }
                }
                return Some(out);
            }
            if m == MAX_BASIS || m == d {
                return None;
            }
        }
        beta.push(bnext);
        basis.push(w.iter().map(|x| x / bnext).collect());
    }
}

/// `exp(−iτH) v`. Diagonal Hamiltonians are exponentiated exactly; otherwise
/// Lanczos steps are taken, subdividing `τ` until each substep meets a
/// local error of `tol · (substep / τ)`.
pub fn expm_apply(h: &Hamiltonian<'_>, tau: f64, v: &[C64], tol: f64) -> Vec<C64> {
    if h.is_diagonal() {
        return v
            .iter()
            .zip(h.problem.diagonal())
            .map(|(x, e)| x * C64::from_polar(1.0, -tau * h.b * e))
            .collect();
    }
    if tau == 0.0 || norm(v) == 0.0 {
        return v.to_vec();
    }
    let bound = h.norm_bound().max(1e-300);
    let max_dt = tau.abs().min(12.0 / bound);
    let floor = ROUNDING_FLOOR * norm(v);
    let mut dt = max_dt.copysign(tau);
    let mut done = 0.0;
    let mut cur = v.to_vec();
    while (tau - done).abs() > 1e-15 * tau.abs() {
        if (done + dt).abs() > tau.abs() {
            dt = tau - done;
        }
        let local_tol = (tol * (dt / tau).abs()).max(floor);
        match lanczos_step(h, dt, &cur, local_tol) {
            Some(next) => {
                cur = next;
                done += dt;
                dt = (dt.abs() * 1.5).min(max_dt).copysign(tau);
            }
            None => dt *= 0.5,
        }
    }
    cur
}
