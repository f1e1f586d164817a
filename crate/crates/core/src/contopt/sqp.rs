//! Sequential quadratic programming on the scaled simplex
//! `{x : x >= 0, sum x = total}` with damped BFGS curvature.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct SqpOptions {
    /// Stationarity tolerance on the projected gradient.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SqpOptions {
    fn default() -> Self {
        Self { tol: 1e-6, max_iter: 500 }
    }
}

#[derive(Debug, Clone)]
pub struct SqpResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// Projected-gradient norm at the returned point.
    pub stationarity: f64,
}

/// Euclidean projection onto `{x >= 0, sum x = total}`.
pub fn project_simplex(v: &[f64], total: f64) -> Vec<f64> {
    if v.is_empty() {
        return Vec::new();
    }
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut css = 0.0;
    let mut theta = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        css += uk;
        let t = (css - total) / (k + 1) as f64;
        if uk - t > 0.0 {
            theta = t;
        }
    }
    let mut x: Vec<f64> = v.iter().map(|&vi| (vi - theta).max(0.0)).collect();
    // Remove rounding drift from the sum.
    let s: f64 = x.iter().sum();
    if s > 0.0 && (s - total).abs() > 0.0 {
        let (imax, _) = x.iter().enumerate().fold((0, f64::MIN), |a, (i, &xi)| if xi > a.1 { (i, xi) } else { a });
        x[imax] = (x[imax] + total - s).max(0.0);
    }
    x
}

/// `|x - P(x - g)|`, zero exactly at KKT points.
pub fn projected_gradient_norm(x: &[f64], g: &[f64], total: f64) -> f64 {
    let y: Vec<f64> = x.iter().zip(g).map(|(a, b)| a - b).collect();
    let p = project_simplex(&y, total);
    x.iter().zip(&p).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
}

/// Solves `min 1/2 d'Bd + g'd` subject to `sum d = 0`, `d >= lower` by a
/// primal active-set method started from `d = 0`.
fn solve_qp(b: &DMatrix<f64>, g: &[f64], lower: &[f64]) -> Vec<f64> {
    let n = g.len();
    let mut d = vec![0.0; n];
    let mut active: Vec<bool> = lower.iter().map(|&l| l >= 0.0).collect();
    if active.iter().all(|&a| a) {
        return d;
    }
    for _ in 0..(20 * n + 20) {
        let free: Vec<usize> = (0..n).filter(|&i| !active[i]).collect();
        let r: Vec<f64> = (0..n).map(|i| g[i] + (0..n).map(|j| b[(i, j)] * d[j]).sum::<f64>()).collect();
        let m = free.len();
        let mut kkt = DMatrix::<f64>::zeros(m + 1, m + 1);
        let mut rhs = DVector::<f64>::zeros(m + 1);
        for (a, &i) in free.iter().enumerate() {
            for (c, &j) in free.iter().enumerate() {
                kkt[(a, c)] = b[(i, j)];
            }
            kkt[(a, m)] = 1.0;
            kkt[(m, a)] = 1.0;
            rhs[a] = -r[i];
        }
        let sol = match kkt.lu().solve(&rhs) {
            Some(s) => s,
            None => return d,
        };
        let nu = sol[m];
        let p: Vec<f64> = sol.iter().take(m).copied().collect();
        let pnorm = p.iter().map(|v| v * v).sum::<f64>().sqrt();
        let dnorm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        if pnorm <= 1e-14 * (1.0 + dnorm) {
            // Multipliers of active lower bounds must be nonnegative.
            let worst = (0..n)
                .filter(|&i| active[i])
                .map(|i| (i, r[i] + nu))
                .fold(None, |acc: Option<(usize, f64)>, (i, l)| match acc {
                    Some((_, best)) if best <= l => acc,
                    _ => Some((i, l)),
                });
            match worst {
                Some((i, l)) if l < -1e-12 => active[i] = false,
                _ => return d,
            }
            continue;
        }
        let mut step = 1.0;
        let mut blocking = None;
        for (a, &i) in free.iter().enumerate() {
            if p[a] < 0.0 {
                let ratio = (lower[i] - d[i]) / p[a];
                if ratio < step {
                    step = ratio.max(0.0);
                    blocking = Some(i);
                }
            }
        }
        for (a, &i) in free.iter().enumerate() {
            d[i] += step * p[a];
        }
        if let Some(i) = blocking {
            d[i] = lower[i];
            active[i] = true;
        }
    }
    d
}

/// Minimizes `f` over the scaled simplex starting from (the projection of) `x0`.
pub fn minimize_simplex(
    mut fg: impl FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
    x0: &[f64],
    total: f64,
    opts: SqpOptions,
) -> Result<SqpResult> {
    let n = x0.len();
    if n == 0 || !(total > 0.0) {
        return Err(Error::Config("simplex problem needs variables and a positive total".into()));
    }
    let mut x = project_simplex(x0, total);
    let (mut f, mut g) = fg(&x)?;
    let mut evaluations = 1;
    let mut bmat = DMatrix::<f64>::identity(n, n);
    let mut fresh = true;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        if projected_gradient_norm(&x, &g, total) <= opts.tol {
            converged = true;
            break;
        }
        iterations += 1;
        let lower: Vec<f64> = x.iter().map(|&v| -v).collect();
        let d = solve_qp(&bmat, &g, &lower);
        let slope: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
        if slope >= 0.0 || d.iter().all(|v| v.abs() < 1e-15) {
            if fresh {
                break;
            }
            bmat = DMatrix::identity(n, n);
            fresh = true;
            continue;
        }
        let mut s = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let trial: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + s * b).collect();
            let trial = project_simplex(&trial, total);
            let (ft, gt) = fg(&trial)?;
            evaluations += 1;
            if ft <= f + 1e-4 * s * slope {
                accepted = Some((trial, ft, gt));
                break;
            }
            s *= 0.5;
        }
        let Some((xn, fnew, gn)) = accepted else {
            if fresh {
                break;
            }
            bmat = DMatrix::identity(n, n);
            fresh = true;
            continue;
        };
        let sv = DVector::from_iterator(n, xn.iter().zip(&x).map(|(a, b)| a - b));
        let yv = DVector::from_iterator(n, gn.iter().zip(&g).map(|(a, b)| a - b));
        let bs = &bmat * &sv;
        let sbs = sv.dot(&bs);
        let sy = sv.dot(&yv);
        if sbs > 1e-300 {
            let theta = if sy >= 0.2 * sbs { 1.0 } else { 0.8 * sbs / (sbs - sy) };
            let r = &yv * theta + &bs * (1.0 - theta);
            let sr = sv.dot(&r);
            if sr > 1e-300 {
                bmat += &r * r.transpose() / sr - &bs * bs.transpose() / sbs;
                fresh = false;
            }
        }
        let tiny_change = (f - fnew).abs() <= 1e-15 * f.abs().max(1.0) && sv.norm() <= 1e-13 * total;
        x = xn;
        f = fnew;
        g = gn;
        if tiny_change {
            break;
        }
    }
    let stationarity = projected_gradient_norm(&x, &g, total);
    converged = converged || stationarity <= opts.tol;
    Ok(SqpResult { x, f, iterations, evaluations, converged, stationarity })
}
