//! Applying protocols found at one system size to others, and scans over
//! system size or circuit depth.

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Method};
use super::methods::{qaoa_best, train_cdqaoa};
use crate::contopt::{evaluate_batch, EvalJob, SolverConfig};
use crate::error::{Error, Result};
use crate::problem::ControlProblem;
use crate::rl_policy::TrainConfig;
use crate::seeds::derive_seed;
use crate::spin_ops::ModelSpec;

/// Distinct sequences in order of first appearance.
pub fn unique_protocols(protocols: &[Vec<String>]) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = Vec::new();
    for p in protocols {
        if !out.contains(p) {
            out.push(p.clone());
        }
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransferResult {
    pub protocols: Vec<Vec<String>>,
    pub sizes: Vec<usize>,
    /// `energy_density[p][n]` for protocol `p` on size `sizes[n]`.
    pub energy_density: Vec<Vec<f64>>,
    /// Durations used, indexed like `energy_density`.
    pub durations: Vec<Vec<Vec<f64>>>,
    /// Per-size `(min, max)` over protocols.
    pub ranges: Vec<(f64, f64)>,
}

impl TransferResult {
    pub fn unique_count(&self) -> usize {
        self.protocols.len()
    }
}

/// How durations are chosen on each target size.
#[derive(Debug, Clone)]
pub enum DurationPolicy {
    /// Optimize the durations afresh for every (protocol, size).
    Reoptimize { restarts: usize },
    /// Reuse one fixed duration list per unique protocol.
    Fixed(Vec<Vec<f64>>),
}

/// Evaluates every unique protocol on every size at total duration `total`.
#[allow(clippy::too_many_arguments)]
pub fn transfer_eval(
    template: &ModelSpec,
    cfg: &ExperimentConfig,
    protocols: &[Vec<String>],
    sizes: &[usize],
    total: f64,
    policy: &DurationPolicy,
    pool: &rayon::ThreadPool,
) -> Result<TransferResult> {
    let unique = unique_protocols(protocols);
    if unique.is_empty() || sizes.is_empty() {
        return Err(Error::Config("transfer needs protocols and sizes".into()));
    }
    if let DurationPolicy::Fixed(d) = policy {
        if d.len() != unique.len() || d.iter().zip(&unique).any(|(a, p)| a.len() != p.len()) {
            return Err(Error::Config("one duration list per unique protocol is required".into()));
        }
        if let Some(a) = d.iter().find(|a| (a.iter().sum::<f64>() - total).abs() > 1e-9 * total.max(1.0)) {
            return Err(Error::Config(format!("durations {a:?} do not sum to {total}")));
        }
    }
    let mut labels: Vec<String> = Vec::new();
    for p in &unique {
        for l in p {
            if !labels.contains(l) {
                labels.push(l.clone());
            }
        }
    }
    let mut energy = vec![vec![f64::NAN; sizes.len()]; unique.len()];
    let mut durations = vec![vec![Vec::new(); sizes.len()]; unique.len()];
    for (ni, &n) in sizes.iter().enumerate() {
        let model = ModelSpec { n_sites: n, ..template.clone() };
        let problem = cfg.problem_for(&model, &labels)?;
        let idx: Vec<Vec<usize>> = unique
            .iter()
            .map(|p| p.iter().map(|l| problem.actions.index(l)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        match policy {
            DurationPolicy::Reoptimize { restarts } => {
                let jobs: Vec<EvalJob> = idx
                    .iter()
                    .enumerate()
                    .map(|(pi, s)| EvalJob { sequence: s.clone(), restarts: *restarts, seed: derive_seed(cfg.seed, &[20, pi as u64]) })
                    .collect();
                for (pi, rec) in evaluate_batch(pool, &problem, &jobs, total, &cfg.solver)?.into_iter().enumerate() {
                    energy[pi][ni] = rec.energy_density;
                    durations[pi][ni] = rec.alphas;
                }
            }
            DurationPolicy::Fixed(d) => {
                for (pi, s) in idx.iter().enumerate() {
                    energy[pi][ni] = problem.energy_density(&problem.evolve(s, &d[pi])?);
                    durations[pi][ni] = d[pi].clone();
                }
            }
        }
    }
    let ranges = (0..sizes.len())
        .map(|ni| {
            energy.iter().map(|row| row[ni]).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| (lo.min(e), hi.max(e)))
        })
        .collect();
    Ok(TransferResult { protocols: unique, sizes: sizes.to_vec(), energy_density: energy, durations, ranges })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanAxis {
    Sizes(Vec<usize>),
    Depths(Vec<usize>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanPoint {
    pub n_sites: usize,
    pub q: usize,
    pub total: f64,
    pub energy_density: f64,
    pub energy_ratio: f64,
    pub fidelity: f64,
    pub sequence: Vec<String>,
    pub durations: Vec<f64>,
}

/// Best result of the configured method (CD-QAOA or QAOA) at each point of
/// a system-size or depth scan, for every duration of the grid.
pub fn scaling_scan(cfg: &ExperimentConfig, axis: &ScanAxis, pool: &rayon::ThreadPool) -> Result<Vec<ScanPoint>> {
    let points: Vec<(usize, usize)> = match axis {
        ScanAxis::Sizes(ns) => ns.iter().map(|&n| (n, cfg.q)).collect(),
        ScanAxis::Depths(qs) => qs.iter().map(|&q| (cfg.model.n_sites, q)).collect(),
    };
    if points.is_empty() {
        return Err(Error::Config("empty scan".into()));
    }
    let labels = match cfg.method {
        Method::Cdqaoa => cfg.action_labels(),
        Method::Qaoa => vec!["H1".to_string(), "H2".to_string()],
        m => return Err(Error::Unsupported(format!("scans support cdqaoa and qaoa, not {}", m.name()))),
    };
    let mut out = Vec::new();
    for (pi, &(n, q)) in points.iter().enumerate() {
        let model = ModelSpec { n_sites: n, ..cfg.model.clone() };
        let problem = cfg.problem_for(&model, &labels)?;
        for (ti, &total) in cfg.totals()?.iter().enumerate() {
            let seed = derive_seed(cfg.seed, &[30, pi as u64, ti as u64]);
            let rec = match cfg.method {
                Method::Cdqaoa => {
                    let tc = TrainConfig { seed, ..cfg.train.clone() };
                    let st = train_cdqaoa(&problem, q, total, &tc, &cfg.solver, pool, |_, _| Ok(()))?;
                    st.best.expect("checked by train_cdqaoa")
                }
                _ => qaoa_best(&problem, (q / 2).max(1), total, cfg.qaoa_restarts, &cfg.solver, seed, pool)?.record,
            };
            out.push(scan_point(&problem, q, total, &rec.sequence, &rec.alphas)?);
        }
    }
    Ok(out)
}

fn scan_point(problem: &ControlProblem, q: usize, total: f64, idx: &[usize], alphas: &[f64]) -> Result<ScanPoint> {
    let psi = problem.evolve(idx, alphas)?;
    Ok(ScanPoint {
        n_sites: problem.n_sites(),
        q,
        total,
        energy_density: problem.energy_density(&psi),
        energy_ratio: problem.energy_ratio(&psi),
        fidelity: problem.fidelity(&psi),
        sequence: idx.iter().map(|&a| problem.actions.labels[a].clone()).collect(),
        durations: alphas.to_vec(),
    })
}

/// Solver settings used by `transfer_eval` when re-optimizing.
pub fn reoptimize_policy(solver: &SolverConfig) -> DurationPolicy {
    DurationPolicy::Reoptimize { restarts: solver.restarts.max(1) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unique_keeps_first_order() {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        let u = unique_protocols(&[s(&["Y", "X"]), s(&["X", "Y"]), s(&["Y", "X"])]);
        assert_eq!(u, vec![s(&["Y", "X"]), s(&["X", "Y"])]);
    }
}
