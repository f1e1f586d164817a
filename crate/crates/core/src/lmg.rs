//! Lipkin-Meshkov-Glick model in the maximal total-spin multiplet, indexed by
//! the number of up spins `n = 0..=N`.

use serde::{Deserialize, Serialize};

use crate::contopt::{optimize_durations, SolverConfig};
use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, EigOptions, C64};
use crate::problem::{ControlProblem, ProblemOptions};
use crate::spin_ops::{ground_state, ModelKind, ModelSpec};

fn raise(n_sites: usize, n: usize) -> f64 {
    (((n + 1) * (n_sites - n)) as f64).sqrt()
}

/// `H1 = -(J/N) (S^x)^2` and `H2 = S^z + N/2`.
pub fn lmg_hamiltonian(n_sites: usize, j: f64) -> Result<(CsrMatrix, CsrMatrix)> {
    if n_sites == 0 {
        return Err(Error::Config("LMG model needs at least one spin".into()));
    }
    let dim = n_sites + 1;
    let c = -j / n_sites as f64 * 0.25;
    let mut h1 = Vec::new();
    for n in 0..dim {
        let up = if n < n_sites { raise(n_sites, n).powi(2) } else { 0.0 };
        let down = if n > 0 { raise(n_sites, n - 1).powi(2) } else { 0.0 };
        h1.push((n, n, C64::new(c * (up + down), 0.0)));
        if n + 2 < dim {
            let v = c * raise(n_sites, n) * raise(n_sites, n + 1);
            h1.push((n + 2, n, C64::new(v, 0.0)));
            h1.push((n, n + 2, C64::new(v, 0.0)));
        }
    }
    let h2 = (0..dim).map(|n| (n, n, C64::new(n as f64, 0.0))).collect();
    Ok((CsrMatrix::from_triplets(dim, h1, 0.0), CsrMatrix::from_triplets(dim, h2, 0.0)))
}

/// Matrices of `Y = sum S^y`, the all-to-all `hatXY` and `hatZY` terms.
pub fn lmg_gauge_matrices(n_sites: usize) -> Result<[CsrMatrix; 3]> {
    if n_sites == 0 {
        return Err(Error::Config("LMG model needs at least one spin".into()));
    }
    let dim = n_sites + 1;
    let nf = n_sites as f64;
    let mut y = Vec::new();
    let mut xy = Vec::new();
    let mut zy = Vec::new();
    for n in 0..n_sites {
        let r = raise(n_sites, n);
        y.push((n, n + 1, C64::new(0.0, 0.5 * r)));
        y.push((n + 1, n, C64::new(0.0, -0.5 * r)));
        let w = (2 * n + 1) as f64 / (2.0 * nf) * r;
        zy.push((n, n + 1, C64::new(0.0, w)));
        zy.push((n + 1, n, C64::new(0.0, -w)));
        if n + 2 <= n_sites {
            let v = r * raise(n_sites, n + 1) / (2.0 * nf);
            xy.push((n, n + 2, C64::new(0.0, v)));
            xy.push((n + 2, n, C64::new(0.0, -v)));
        }
    }
    Ok([
        CsrMatrix::from_triplets(dim, y, 0.0),
        CsrMatrix::from_triplets(dim, xy, 0.0),
        CsrMatrix::from_triplets(dim, zy, 0.0),
    ])
}

/// Ground-manifold population of the fully polarized initial state `n = 0`
/// for each field value.
pub fn overlap_scan(n_sites: usize, j: f64, fields: &[f64]) -> Result<Vec<(f64, f64)>> {
    let (h1, h2) = lmg_hamiltonian(n_sites, j)?;
    fields
        .iter()
        .map(|&h| {
            let hm = CsrMatrix::linear_combination(&[(1.0, &h1), (h, &h2)]);
            let gs = ground_state(&hm, EigOptions::default())?;
            Ok((h, gs.states.iter().map(|s| s[0].norm_sqr()).sum()))
        })
        .collect()
}

/// Criterion deciding whether a duration reaches the target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QslCriterion {
    /// `E / E_GS >= 1 - tol`.
    Energy { tol: f64 },
    /// Ground-manifold fidelity `>= 1 - tol`.
    Fidelity { tol: f64 },
}

impl Default for QslCriterion {
    fn default() -> Self {
        QslCriterion::Energy { tol: 1e-3 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QslScanConfig {
    pub n_sites: usize,
    pub j: f64,
    pub fields: Vec<f64>,
    /// Ascending durations to test.
    pub durations: Vec<f64>,
    /// Label sequences tried at every duration; the best one counts.
    pub candidates: Vec<Vec<String>>,
    pub criterion: QslCriterion,
    pub solver: SolverConfig,
}

impl QslScanConfig {
    pub fn new(n_sites: usize, fields: Vec<f64>, durations: Vec<f64>) -> Self {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        Self {
            n_sites,
            j: 1.0,
            fields,
            durations,
            candidates: vec![s(&["Y"]), s(&["Y", "H1"]), s(&["H1", "Y"]), s(&["Y", "H2"])],
            criterion: QslCriterion::default(),
            solver: SolverConfig { restarts: 4, ..SolverConfig::default() },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QslPoint {
    pub h: f64,
    /// First duration meeting the criterion, if any.
    pub t_qsl: Option<f64>,
    pub energy_ratio: f64,
    pub fidelity: f64,
}

/// Scans durations for every field and reports the smallest duration whose
/// best optimized candidate meets the criterion.
pub fn qsl_scan(cfg: &QslScanConfig, seed: u64) -> Result<Vec<QslPoint>> {
    if cfg.durations.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Config("QSL durations must be ascending".into()));
    }
    let mut out = Vec::new();
    for (hi, &h) in cfg.fields.iter().enumerate() {
        let model = ModelSpec::new(ModelKind::Lmg, cfg.n_sites).with("J", cfg.j).with("h", h);
        let labels: Vec<String> = {
            let mut l: Vec<String> = Vec::new();
            for c in &cfg.candidates {
                for x in c {
                    if !l.contains(x) {
                        l.push(x.clone());
                    }
                }
            }
            l
        };
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        let problem = ControlProblem::build(&model, &refs, &ProblemOptions::default())?;
        let mut point = QslPoint { h, t_qsl: None, energy_ratio: f64::NAN, fidelity: f64::NAN };
        for (ti, &t) in cfg.durations.iter().enumerate() {
            let mut best: Option<(f64, f64, f64)> = None;
            for (ci, cand) in cfg.candidates.iter().enumerate() {
                let idx: Vec<usize> = cand.iter().map(|l| problem.actions.index(l)).collect::<Result<_>>()?;
                let s = seed ^ ((hi as u64) << 40) ^ ((ti as u64) << 20) ^ ci as u64;
                let res = optimize_durations(&problem, &idx, t, &cfg.solver, s)?;
                let psi = problem.evolve(&idx, &res.alphas)?;
                let ratio = problem.energy_ratio(&psi);
                let fid = problem.fidelity(&psi);
                if best.is_none_or(|b| res.energy_density < b.0) {
                    best = Some((res.energy_density, ratio, fid));
                }
            }
            let (_, ratio, fid) = best.expect("at least one candidate");
            point.energy_ratio = ratio;
            point.fidelity = fid;
            let met = match cfg.criterion {
                QslCriterion::Energy { tol } => ratio >= 1.0 - tol,
                QslCriterion::Fidelity { tol } => fid >= 1.0 - tol,
            };
            if met {
                point.t_qsl = Some(t);
                break;
            }
        }
        out.push(point);
    }
    Ok(out)
}

/// Least-squares slope and intercept of `y` against `x`.
pub fn linear_fit(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 2 {
        return Err(Error::Config("a linear fit needs two points".into()));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Config("degenerate abscissae".into()));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}
