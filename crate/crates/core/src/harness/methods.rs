//! Conventional QAOA, CD-QAOA training and the four-method comparison.

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Method};
use crate::contopt::{evaluate_batch, EvalJob, EvalRecord, SolverConfig};
use crate::dynamics::{norm_density, NormSchedule};
use crate::error::{Error, Result};
use crate::gauge_cd::{run_adiabatic, run_cd_drive};
use crate::problem::ControlProblem;
use crate::rl_policy::{train, IterationLog, TrainConfig, TrainState};
use crate::seeds::derive_seed;

/// Alternating `H1, H2, ...` (or `H2, H1, ...`) sequence of `2p` steps.
pub fn qaoa_sequence(p: usize, h1: usize, h2: usize, h1_first: bool) -> Vec<usize> {
    let (a, b) = if h1_first { (h1, h2) } else { (h2, h1) };
    (0..2 * p).map(|j| if j % 2 == 0 { a } else { b }).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QaoaResult {
    pub h1_first: bool,
    pub record: EvalRecord,
    /// Best energy density per order, `[H1 first, H2 first]`.
    pub order_best: [f64; 2],
}

/// Best QAOA protocol of depth `p` over both alternation orders, with
/// `restarts` independent solver runs per order spread over `pool`.
pub fn qaoa_best(
    problem: &ControlProblem,
    p: usize,
    total: f64,
    restarts: usize,
    solver: &SolverConfig,
    seed: u64,
    pool: &rayon::ThreadPool,
) -> Result<QaoaResult> {
    if p == 0 {
        return Err(Error::Config("QAOA needs p >= 1".into()));
    }
    let h1 = problem.actions.index("H1")?;
    let h2 = problem.actions.index("H2")?;
    let restarts = restarts.max(1);
    let mut jobs = Vec::with_capacity(2 * restarts);
    for (o, first) in [true, false].into_iter().enumerate() {
        for r in 0..restarts {
            jobs.push(EvalJob {
                sequence: qaoa_sequence(p, h1, h2, first),
                restarts: 1,
                seed: derive_seed(seed, &[o as u64, r as u64]),
            });
        }
    }
    let records = evaluate_batch(pool, problem, &jobs, total, solver)?;
    let mut order_best = [f64::INFINITY; 2];
    let mut best: Option<(usize, &EvalRecord)> = None;
    for (k, rec) in records.iter().enumerate() {
        let o = k / restarts;
        order_best[o] = order_best[o].min(rec.energy_density);
        if best.is_none_or(|b| rec.energy_density < b.1.energy_density) {
            best = Some((k, rec));
        }
    }
    let (k, rec) = best.expect("at least one job");
    let mut record = rec.clone();
    record.restarts = restarts;
    Ok(QaoaResult { h1_first: k < restarts, record, order_best })
}

/// Time-averaged Hilbert-Schmidt norm per site of a piecewise protocol.
pub fn protocol_norm_density(problem: &ControlProblem, idx: &[usize], durations: &[f64]) -> Result<f64> {
    let total: f64 = durations.iter().sum();
    if total <= 0.0 {
        return Ok(0.0);
    }
    let steps: Vec<(f64, f64)> = idx
        .iter()
        .zip(durations)
        .map(|(&a, &d)| (d, problem.actions.matrices[a].frobenius_norm()))
        .collect();
    norm_density(&NormSchedule::Piecewise(steps), total, problem.n_sites())
}

/// History-best CD-QAOA protocol after training at duration `total`.
pub fn train_cdqaoa(
    problem: &ControlProblem,
    depth: usize,
    total: f64,
    train_cfg: &TrainConfig,
    solver: &SolverConfig,
    pool: &rayon::ThreadPool,
    on_iter: impl FnMut(&IterationLog, &TrainState) -> Result<()>,
) -> Result<TrainState> {
    let state = train(problem, total, train_cfg, solver, pool, depth, None, on_iter)?;
    if state.best.is_none() {
        return Err(Error::Config("training ran no iterations".into()));
    }
    Ok(state)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub total: f64,
    pub method: String,
    pub energy_ratio: f64,
    pub fidelity: f64,
    pub norm_density: f64,
    pub sequence: Vec<String>,
    pub durations: Vec<f64>,
    pub error: Option<String>,
}

impl ComparisonRow {
    fn failed(total: f64, method: Method, e: &Error) -> Self {
        Self {
            total,
            method: method.name().into(),
            energy_ratio: f64::NAN,
            fidelity: f64::NAN,
            norm_density: f64::NAN,
            sequence: Vec::new(),
            durations: Vec::new(),
            error: Some(e.to_string()),
        }
    }
}

fn protocol_row(problem: &ControlProblem, method: Method, total: f64, rec: &EvalRecord) -> Result<ComparisonRow> {
    let psi = problem.evolve(&rec.sequence, &rec.alphas)?;
    Ok(ComparisonRow {
        total,
        method: method.name().into(),
        energy_ratio: problem.energy_ratio(&psi),
        fidelity: problem.fidelity(&psi),
        norm_density: protocol_norm_density(problem, &rec.sequence, &rec.alphas)?,
        sequence: rec.sequence.iter().map(|&a| problem.actions.labels[a].clone()).collect(),
        durations: rec.alphas.clone(),
        error: None,
    })
}

/// Runs `methods` on every duration of the configured grid. Failing cells
/// are recorded with their error and the run continues.
pub fn run_comparison(
    cfg: &ExperimentConfig,
    methods: &[Method],
    pool: &rayon::ThreadPool,
    mut on_row: impl FnMut(&ComparisonRow) -> Result<()>,
) -> Result<Vec<ComparisonRow>> {
    let totals = cfg.totals()?;
    let qaoa_labels = vec!["H1".to_string(), "H2".to_string()];
    let mut cd_labels = qaoa_labels.clone();
    cd_labels.extend(cfg.ansatz_labels());
    let ansatz = cfg.ansatz_labels();
    let ansatz_refs: Vec<&str> = ansatz.iter().map(String::as_str).collect();

    let mut cdqaoa_problem = None;
    let mut qaoa_problem = None;
    let mut cd_problem = None;
    let mut rows = Vec::new();
    for (ti, &total) in totals.iter().enumerate() {
        for &method in methods {
            let cell = (|| -> Result<ComparisonRow> {
                match method {
                    Method::Cdqaoa => {
                        if cdqaoa_problem.is_none() {
                            cdqaoa_problem = Some(cfg.problem_for(&cfg.model, &cfg.action_labels())?);
                        }
                        let p = cdqaoa_problem.as_ref().expect("built above");
                        let tc = TrainConfig { seed: derive_seed(cfg.seed, &[10, ti as u64]), ..cfg.train.clone() };
                        let st = train_cdqaoa(p, cfg.q, total, &tc, &cfg.solver, pool, |_, _| Ok(()))?;
                        protocol_row(p, method, total, st.best.as_ref().expect("checked"))
                    }
                    Method::Qaoa => {
                        if qaoa_problem.is_none() {
                            qaoa_problem = Some(cfg.problem_for(&cfg.model, &qaoa_labels)?);
                        }
                        let p = qaoa_problem.as_ref().expect("built above");
                        let seed = derive_seed(cfg.seed, &[11, ti as u64]);
                        let r = qaoa_best(p, (cfg.q / 2).max(1), total, cfg.qaoa_restarts, &cfg.solver, seed, pool)?;
                        protocol_row(p, method, total, &r.record)
                    }
                    Method::CdDrive | Method::Adiabatic => {
                        if cd_problem.is_none() {
                            cd_problem = Some(cfg.problem_for(&cfg.model, &cd_labels)?);
                        }
                        let p = cd_problem.as_ref().expect("built above");
                        let dc = cfg.drive_config(total);
                        let r = if method == Method::CdDrive { run_cd_drive(p, &ansatz_refs, &dc)? } else { run_adiabatic(p, &dc)? };
                        Ok(ComparisonRow {
                            total,
                            method: method.name().into(),
                            energy_ratio: r.energy_ratio,
                            fidelity: r.fidelity,
                            norm_density: r.norm_density,
                            sequence: Vec::new(),
                            durations: Vec::new(),
                            error: None,
                        })
                    }
                }
            })();
            let row = cell.unwrap_or_else(|e| ComparisonRow::failed(total, method, &e));
            on_row(&row)?;
            rows.push(row);
        }
    }
    Ok(rows)
}
