//! Variational adiabatic gauge potentials and counterdiabatic driving along
//! `H(lambda) = H2 + lambda H1` with `lambda(t) = sin^2(pi t / 2T)`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dynamics::{expmv, norm_density, NormSchedule};
use crate::error::{Error, Result};
use crate::linalg::{dot, CsrMatrix, EigOptions, C64};
use crate::problem::ControlProblem;
use crate::spin_ops::ground_state;

/// Ground-state covariance of the operators `B_0 = dH/dlambda` and
/// `B_j = i[H_j, H]`: `C_jk = Re<B_j B_k> - <B_j><B_k>`.
pub fn gauge_covariance(h: &CsrMatrix, dh: &CsrMatrix, ansatz: &[&CsrMatrix], psi: &[C64]) -> DMatrix<f64> {
    let hpsi = h.matvec(psi);
    let mut b: Vec<Vec<C64>> = vec![dh.matvec(psi)];
    for hj in ansatz {
        let hj_hpsi = hj.matvec(&hpsi);
        let h_hjpsi = h.matvec(&hj.matvec(psi));
        b.push(hj_hpsi.iter().zip(&h_hjpsi).map(|(a, c)| C64::new(0.0, 1.0) * (a - c)).collect());
    }
    let means: Vec<f64> = b.iter().map(|v| dot(psi, v).re).collect();
    let r = b.len();
    DMatrix::from_fn(r, r, |i, j| dot(&b[i], &b[j]).re - means[i] * means[j])
}

/// Action `S(beta) = sum_ij C_ij b_i b_j` with `b = (1, beta)`.
pub fn gauge_action(cov: &DMatrix<f64>, beta: &[f64]) -> f64 {
    let mut b = vec![1.0];
    b.extend_from_slice(beta);
    let v = DVector::from_vec(b);
    (v.transpose() * cov * &v)[(0, 0)]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaugeSolution {
    pub beta: Vec<f64>,
    /// The normal equations were rank deficient; `beta` is the minimum-norm
    /// least-squares solution.
    pub singular: bool,
    pub action: f64,
}

/// Minimizes the action for a given ground state `psi` of `h`.
pub fn solve_gauge_for_state(h: &CsrMatrix, dh: &CsrMatrix, ansatz: &[&CsrMatrix], psi: &[C64]) -> Result<GaugeSolution> {
    solve_gauge_near(h, dh, ansatz, psi, None)
}

/// As [`solve_gauge_for_state`], but components of `beta` that the action
/// leaves undetermined are taken from `prior` instead of being set to zero.
pub fn solve_gauge_near(
    h: &CsrMatrix,
    dh: &CsrMatrix,
    ansatz: &[&CsrMatrix],
    psi: &[C64],
    prior: Option<&[f64]>,
) -> Result<GaugeSolution> {
    let cov = gauge_covariance(h, dh, ansatz, psi);
    let r = ansatz.len();
    if r == 0 {
        return Ok(GaugeSolution { beta: vec![], singular: false, action: cov[(0, 0)] });
    }
    let m = cov.view((1, 1), (r, r)).into_owned();
    let rhs = -cov.view((1, 0), (r, 1)).into_owned();
    let svd = m.svd(true, true);
    let smax = svd.singular_values.max();
    let cutoff = 1e-12 * smax.max(1e-300);
    let singular = svd.singular_values.iter().any(|&s| s <= cutoff);
    let sol = svd
        .solve(&rhs, cutoff)
        .map_err(|e| Error::Numerical(format!("gauge system: {e}")))?;
    let mut beta: Vec<f64> = sol.iter().copied().collect();
    if let (true, Some(p), Some(vt)) = (singular, prior, svd.v_t.as_ref()) {
        if p.len() != r {
            return Err(Error::Dimension(format!("prior of length {} for {r} gauge terms", p.len())));
        }
        for (k, &s) in svd.singular_values.iter().enumerate() {
            if s <= cutoff {
                let v = vt.row(k);
                let c: f64 = v.iter().zip(p).map(|(a, b)| a * b).sum();
                beta.iter_mut().zip(v.iter()).for_each(|(b, a)| *b += c * a);
            }
        }
    }
    if beta.iter().any(|b| !b.is_finite()) {
        return Err(Error::Numerical("non-finite gauge coefficients".into()));
    }
    let action = gauge_action(&cov, &beta);
    Ok(GaugeSolution { beta, singular, action })
}

/// Gauge coefficients at `lambda` for `H = h0 + lambda dh`, using its ground
/// state. A degenerate ground level is flagged as singular.
pub fn solve_gauge_coefficients(h0: &CsrMatrix, dh: &CsrMatrix, lambda: f64, ansatz: &[&CsrMatrix]) -> Result<GaugeSolution> {
    solve_at(h0, dh, lambda, ansatz, None)
}

fn solve_at(h0: &CsrMatrix, dh: &CsrMatrix, lambda: f64, ansatz: &[&CsrMatrix], prior: Option<&[f64]>) -> Result<GaugeSolution> {
    let h = CsrMatrix::linear_combination(&[(1.0, h0), (lambda, dh)]);
    let gs = ground_state(&h, EigOptions::default())?;
    let mut sol = solve_gauge_near(&h, dh, ansatz, &gs.states[0], prior)?;
    sol.singular |= gs.degenerate();
    Ok(sol)
}

/// Solutions along a path of `lambda` values, computed from the last point
/// backwards so that undetermined components continue smoothly from the
/// better conditioned end of the path.
pub fn solve_gauge_path(h0: &CsrMatrix, dh: &CsrMatrix, lambdas: &[f64], ansatz: &[&CsrMatrix]) -> Result<Vec<GaugeSolution>> {
    let mut out: Vec<GaugeSolution> = Vec::with_capacity(lambdas.len());
    for &lam in lambdas.iter().rev() {
        let prior = out.last().map(|s| s.beta.clone());
        out.push(solve_at(h0, dh, lam, ansatz, prior.as_deref())?);
    }
    out.reverse();
    Ok(out)
}

/// Where within each time slab the schedule is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    Midpoint,
    LeftEndpoint,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct DriveConfig {
    pub total: f64,
    pub dt: f64,
    /// Solve for the gauge coefficients on this coarser grid and interpolate
    /// linearly; `None` solves at every evolution step.
    pub beta_dt: Option<f64>,
    pub sampling: Sampling,
    pub record_trace: bool,
}

impl Default for DriveConfig {
    fn default() -> Self {
        Self { total: 1.0, dt: 0.2, beta_dt: None, sampling: Sampling::Midpoint, record_trace: false }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DrivePoint {
    pub t: f64,
    pub energy_ratio: f64,
    pub fidelity: f64,
    /// `2 S / N` for the half-chain entropy `S`.
    pub entropy_density: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DriveResult {
    pub energy_ratio: f64,
    pub fidelity: f64,
    pub norm_density: f64,
    pub trace: Vec<DrivePoint>,
    /// Gauge coefficients used on each step, keyed by the sampling time.
    pub betas: Vec<(f64, Vec<f64>)>,
    pub singular_steps: usize,
    #[serde(skip)]
    pub state: Vec<C64>,
}

pub fn lambda(t: f64, total: f64) -> f64 {
    (std::f64::consts::PI * t / (2.0 * total)).sin().powi(2)
}

pub fn lambda_dot(t: f64, total: f64) -> f64 {
    std::f64::consts::PI / (2.0 * total) * (std::f64::consts::PI * t / total).sin()
}

fn time_grid(total: f64, dt: f64) -> Vec<(f64, f64)> {
    let steps = (total / dt - 1e-9).ceil().max(1.0) as usize;
    let mut out = Vec::with_capacity(steps);
    let mut t = 0.0;
    for _ in 0..steps {
        let h = dt.min(total - t);
        out.push((t, h));
        t += h;
    }
    out
}

/// Counterdiabatic drive with the given gauge-potential labels from the
/// problem's action set; an empty ansatz gives plain adiabatic driving.
pub fn run_cd_drive(problem: &ControlProblem, ansatz_labels: &[&str], cfg: &DriveConfig) -> Result<DriveResult> {
    if !(cfg.total > 0.0) || !(cfg.dt > 0.0) {
        return Err(Error::Config("drive needs positive T and dt".into()));
    }
    let h1 = &problem.actions.matrices[problem.actions.index("H1")?];
    let h2 = &problem.actions.matrices[problem.actions.index("H2")?];
    let ansatz: Vec<&CsrMatrix> = ansatz_labels
        .iter()
        .map(|l| problem.actions.index(l).map(|i| &problem.actions.matrices[i]))
        .collect::<Result<_>>()?;
    let total = cfg.total;
    let grid = time_grid(total, cfg.dt);
    let sample = |t0: f64, h: f64| match cfg.sampling {
        Sampling::Midpoint => t0 + 0.5 * h,
        Sampling::LeftEndpoint => t0,
    };
    // Gauge coefficients per evolution step.
    let step_betas: Vec<(Vec<f64>, bool)> = if ansatz.is_empty() {
        vec![(Vec::new(), false); grid.len()]
    } else if let Some(bdt) = cfg.beta_dt {
        let n = (total / bdt).round().max(1.0) as usize;
        let ts: Vec<f64> = (0..=n).map(|k| total * k as f64 / n as f64).collect();
        let lams: Vec<f64> = ts.iter().map(|&t| lambda(t, total)).collect();
        let sols = solve_gauge_path(h2, h1, &lams, &ansatz)?;
        let pts: Vec<(f64, Vec<f64>, bool)> = ts.into_iter().zip(sols).map(|(t, s)| (t, s.beta, s.singular)).collect();
        grid.iter().map(|&(t0, h)| interpolate(&pts, sample(t0, h))).collect()
    } else {
        let lams: Vec<f64> = grid.iter().map(|&(t0, h)| lambda(sample(t0, h), total)).collect();
        solve_gauge_path(h2, h1, &lams, &ansatz)?.into_iter().map(|s| (s.beta, s.singular)).collect()
    };
    let mut psi = problem.initial.clone();
    let mut trace = Vec::new();
    let record = |t: f64, psi: &[C64], trace: &mut Vec<DrivePoint>| {
        if cfg.record_trace {
            trace.push(DrivePoint {
                t,
                energy_ratio: problem.energy_ratio(psi),
                fidelity: problem.fidelity(psi),
                entropy_density: problem.entropy(psi).map_or(f64::NAN, |s| 2.0 * s / problem.n_sites() as f64),
            });
        }
    };
    record(0.0, &psi, &mut trace);
    let mut betas = Vec::new();
    let mut norms = Vec::new();
    let mut singular_steps = 0;
    for (&(t0, h), (beta, singular)) in grid.iter().zip(step_betas) {
        let ts = sample(t0, h);
        let lam = lambda(ts, total);
        let mut terms: Vec<(f64, &CsrMatrix)> = vec![(1.0, h2), (lam, h1)];
        if !ansatz.is_empty() {
            if singular {
                singular_steps += 1;
            }
            let ld = lambda_dot(ts, total);
            for (b, m) in beta.iter().zip(&ansatz) {
                terms.push((ld * b, m));
            }
            betas.push((ts, beta));
        }
        let hcd = CsrMatrix::linear_combination(&terms);
        norms.push((h, hcd.frobenius_norm()));
        psi = expmv(&hcd, h, &psi)?;
        record(t0 + h, &psi, &mut trace);
    }
    Ok(DriveResult {
        energy_ratio: problem.energy_ratio(&psi),
        fidelity: problem.fidelity(&psi),
        norm_density: norm_density(&NormSchedule::Piecewise(norms), total, problem.n_sites())?,
        trace,
        betas,
        singular_steps,
        state: psi,
    })
}

fn interpolate(pts: &[(f64, Vec<f64>, bool)], t: f64) -> (Vec<f64>, bool) {
    let k = pts.partition_point(|p| p.0 <= t).clamp(1, pts.len() - 1);
    let (t0, b0, s0) = &pts[k - 1];
    let (t1, b1, s1) = &pts[k];
    let w = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
    (b0.iter().zip(b1).map(|(a, b)| a + w * (b - a)).collect(), *s0 || *s1)
}

/// Plain adiabatic driving along the same schedule.
pub fn run_adiabatic(problem: &ControlProblem, cfg: &DriveConfig) -> Result<DriveResult> {
    run_cd_drive(problem, &[], cfg)
}
