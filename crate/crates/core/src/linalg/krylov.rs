//! Lanczos-based propagation `exp(-i t H) v` and lowest eigenpairs.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sparse::{axpy, dot, norm, scale_in_place, CsrMatrix, C64};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct ExpmvOptions {
    /// Maximum Krylov subspace dimension per step.
    pub max_dim: usize,
    /// Error estimate allowed per step.
    pub tol: f64,
}

impl Default for ExpmvOptions {
    fn default() -> Self {
        Self { max_dim: 30, tol: 1e-12 }
    }
}

struct LanczosBasis {
    vecs: Vec<Vec<C64>>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    invariant: bool,
}

/// Builds an orthonormal Krylov basis from `start` (assumed normalized),
/// keeping every vector orthogonal to `locked`.
fn lanczos(h: &CsrMatrix, start: Vec<C64>, max_dim: usize, locked: &[Vec<C64>]) -> LanczosBasis {
    let n = h.dim();
    let max_dim = max_dim.min(n.saturating_sub(locked.len())).max(1);
    let scale = h.inf_norm().max(1e-300);
    let mut vecs: Vec<Vec<C64>> = vec![start];
    let mut alpha = Vec::with_capacity(max_dim);
    let mut beta = Vec::with_capacity(max_dim);
    let mut u = vec![C64::new(0.0, 0.0); n];
    let mut invariant = false;
    for j in 0..max_dim {
        h.matvec_into(&vecs[j], &mut u);
        let a = dot(&vecs[j], &u).re;
        alpha.push(a);
        for _ in 0..2 {
            for l in locked {
                let c = dot(l, &u);
                axpy(-c, l, &mut u);
            }
            for v in &vecs {
                let c = dot(v, &u);
                axpy(-c, v, &mut u);
            }
        }
        let b = norm(&u);
        if b <= 1e-13 * scale {
            invariant = true;
            break;
        }
        beta.push(b);
        if j + 1 == max_dim {
            break;
        }
        let mut next = u.clone();
        scale_in_place(1.0 / b, &mut next);
        vecs.push(next);
    }
    LanczosBasis { vecs, alpha, beta, invariant }
}

fn tridiagonal_eigen(alpha: &[f64], beta: &[f64]) -> SymmetricEigen<f64, nalgebra::Dyn> {
    let m = alpha.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    SymmetricEigen::new(t)
}

/// Computes `exp(-i t H) v` for real `t` of either sign, splitting the
/// interval whenever the Krylov error estimate of a step exceeds `opts.tol`.
pub fn expmv_signed(h: &CsrMatrix, t: f64, v: &[C64], opts: ExpmvOptions) -> Result<Vec<C64>> {
    if v.len() != h.dim() {
        return Err(Error::Dimension(format!("vector length {} vs operator dim {}", v.len(), h.dim())));
    }
    if !t.is_finite() {
        return Err(Error::Numerical(format!("non-finite evolution time {t}")));
    }
    if h.nnz() <= h.dim() {
        if let Some(diag) = h.diagonal() {
            return Ok(v.iter().zip(&diag).map(|(x, d)| x * (C64::new(0.0, -t) * d).exp()).collect());
        }
    }
    let mut w = v.to_vec();
    let sign = t.signum();
    let mut remaining = t.abs();
    let mut hint = remaining;
    while remaining > 0.0 {
        let wn = norm(&w);
        if wn == 0.0 {
            return Ok(w);
        }
        let mut start = w.clone();
        scale_in_place(1.0 / wn, &mut start);
        let basis = lanczos(h, start, opts.max_dim, &[]);
        let m = basis.alpha.len();
        let eig = tridiagonal_eigen(&basis.alpha, &basis.beta[..m - 1]);
        let mut dt = remaining.min(hint);
        // Below this the estimate is dominated by rounding in `small_exp`.
        let floor = if basis.invariant { 0.0 } else { 4.0 * m as f64 * f64::EPSILON * basis.beta[m - 1] * wn };
        let coeffs = loop {
            let c = small_exp(&eig, sign * dt);
            let err = if basis.invariant { 0.0 } else { basis.beta[m - 1] * c[m - 1].norm() * wn };
            if err <= opts.tol.max(floor) {
                break c;
            }
            dt *= 0.5;
            if dt < 1e-14 * t.abs().max(1.0) {
                return Err(Error::Numerical("Krylov step size underflow".into()));
            }
        };
        let mut next = vec![C64::new(0.0, 0.0); w.len()];
        for (k, vk) in basis.vecs.iter().take(m).enumerate() {
            axpy(coeffs[k] * wn, vk, &mut next);
        }
        w = next;
        remaining -= dt;
        if remaining < 1e-15 * t.abs() {
            remaining = 0.0;
        }
        hint = if dt < hint { dt } else { hint * 1.5 };
        if !w.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Numerical("non-finite state during propagation".into()));
        }
    }
    Ok(w)
}

/// `Q exp(-i tau Lambda) Q^T e_1` for a tridiagonal eigendecomposition.
fn small_exp(eig: &SymmetricEigen<f64, nalgebra::Dyn>, tau: f64) -> Vec<C64> {
    let m = eig.eigenvalues.len();
    let q = &eig.eigenvectors;
    let mut out = vec![C64::new(0.0, 0.0); m];
    for k in 0..m {
        let ph = C64::from_polar(1.0, -tau * eig.eigenvalues[k]) * q[(0, k)];
        for (i, o) in out.iter_mut().enumerate() {
            *o += q[(i, k)] * ph;
        }
    }
    out
}

#[derive(Debug, Clone, Copy)]
pub struct EigOptions {
    pub krylov_dim: usize,
    /// Required residual norm `|H x - E x|`.
    pub tol: f64,
    pub max_restarts: usize,
    pub seed: u64,
}

impl Default for EigOptions {
    fn default() -> Self {
        Self { krylov_dim: 100, tol: 1e-10, max_restarts: 400, seed: 0x5eed }
    }
}

/// Lowest `k` eigenpairs of a Hermitian operator by restarted Lanczos with
/// locking. Eigenvalues are returned in ascending order.
pub fn lowest_eigenpairs(h: &CsrMatrix, k: usize, opts: EigOptions) -> Result<Vec<(f64, Vec<C64>)>> {
    let n = h.dim();
    if k > n {
        return Err(Error::Dimension(format!("requested {k} eigenpairs of a {n}-dimensional operator")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut locked: Vec<Vec<C64>> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    for _ in 0..k {
        let mut x = random_orthogonal(&mut rng, n, &locked);
        let mut converged = None;
        let mut best_res = f64::INFINITY;
        for _ in 0..opts.max_restarts {
            let basis = lanczos(h, x.clone(), opts.krylov_dim, &locked);
            let m = basis.alpha.len();
            let eig = tridiagonal_eigen(&basis.alpha, &basis.beta[..m.saturating_sub(1).min(basis.beta.len())]);
            let (imin, theta) = eig
                .eigenvalues
                .iter()
                .copied()
                .enumerate()
                .fold((0, f64::INFINITY), |acc, (i, e)| if e < acc.1 { (i, e) } else { acc });
            let mut ritz = vec![C64::new(0.0, 0.0); n];
            for (j, vj) in basis.vecs.iter().take(m).enumerate() {
                axpy(C64::new(eig.eigenvectors[(j, imin)], 0.0), vj, &mut ritz);
            }
            reorthogonalize(&mut ritz, &locked);
            let rn = norm(&ritz);
            scale_in_place(1.0 / rn, &mut ritz);
            let hr = h.matvec(&ritz);
            let rayleigh = dot(&ritz, &hr).re;
            let res = hr.iter().zip(&ritz).map(|(a, b)| (a - b * rayleigh).norm_sqr()).sum::<f64>().sqrt();
            best_res = best_res.min(res);
            x = ritz;
            if res <= opts.tol {
                converged = Some(rayleigh);
                break;
            }
            if basis.invariant {
                // Krylov space exhausted without convergence: perturb the start.
                let mut p = random_orthogonal(&mut rng, n, &locked);
                scale_in_place(1e-3, &mut p);
                axpy(C64::new(1.0, 0.0), &p.clone(), &mut x);
                reorthogonalize(&mut x, &locked);
                let xn = norm(&x);
                scale_in_place(1.0 / xn, &mut x);
            }
            let _ = theta;
        }
        let e = converged.ok_or_else(|| {
            Error::Numerical(format!("Lanczos did not converge (best residual {best_res:.3e})"))
        })?;
        values.push(e);
        locked.push(x);
    }
    let mut pairs: Vec<(f64, Vec<C64>)> = values.into_iter().zip(locked).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs)
}

fn reorthogonalize(x: &mut [C64], locked: &[Vec<C64>]) {
    for _ in 0..2 {
        for l in locked {
            let c = dot(l, x);
            axpy(-c, l, x);
        }
    }
}

fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize, locked: &[Vec<C64>]) -> Vec<C64> {
    let mut x: Vec<C64> = (0..n).map(|_| C64::new(rng.gen::<f64>() - 0.5, 0.0)).collect();
    reorthogonalize(&mut x, locked);
    let xn = norm(&x);
    scale_in_place(1.0 / xn, &mut x);
    x
}
