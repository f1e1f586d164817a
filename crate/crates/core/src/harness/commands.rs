//! The command-line entry points. Each writes its outputs under `cfg.out`
//! and returns a one-line summary.

use std::path::PathBuf;

use serde::Serialize;
use serde_json::json;

use super::config::{ExperimentConfig, Method};
use super::io::{fmt_f64, write_table, JsonlWriter, ProtocolTable};
use super::methods::{protocol_norm_density, qaoa_best, run_comparison};
use super::transfer::{reoptimize_policy, transfer_eval, DurationPolicy};
use crate::contopt::{landscape_sample, worker_pool};
use crate::dynamics::trace_protocol;
use crate::error::{Error, Result};
use crate::gauge_cd::{run_adiabatic, run_cd_drive};
use crate::lmg::{linear_fit, overlap_scan, qsl_scan, QslScanConfig};
use crate::rl_policy::{train, TrainState};
use crate::seeds::derive_seed;
use crate::spin_ops::ModelKind;
use crate::symmetry::{basis_for, SymmetrySpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Basis,
    Evolve,
    Qaoa,
    CdqaoaTrain,
    CdDrive,
    Adiabatic,
    LmgQsl,
    LmgOverlap,
    Compare,
    Transfer,
    Landscape,
}

pub fn run(cmd: Command, cfg: &ExperimentConfig) -> Result<String> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.out)?;
    match cmd {
        Command::Basis => basis(cfg),
        Command::Evolve => evolve(cfg),
        Command::Qaoa => qaoa(cfg),
        Command::CdqaoaTrain => cdqaoa_train(cfg),
        Command::CdDrive => drive(cfg, Method::CdDrive),
        Command::Adiabatic => drive(cfg, Method::Adiabatic),
        Command::LmgQsl => lmg_qsl(cfg),
        Command::LmgOverlap => lmg_overlap(cfg),
        Command::Compare => compare(cfg),
        Command::Transfer => transfer(cfg),
        Command::Landscape => landscape(cfg),
    }
}

fn path(cfg: &ExperimentConfig, name: &str) -> PathBuf {
    cfg.out.join(name)
}

fn write_json<T: Serialize>(cfg: &ExperimentConfig, name: &str, value: &T) -> Result<()> {
    std::fs::write(path(cfg, name), serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn basis(cfg: &ExperimentConfig) -> Result<String> {
    let default = if cfg.model.kind == ModelKind::Lmg { SymmetrySpec::lmg() } else { SymmetrySpec::translation_parity() };
    let spec = cfg.sector_spec()?.unwrap_or(default);
    let b = basis_for(&cfg.model, spec)?;
    write_json(cfg, "basis.json", &json!({ "model": cfg.model, "sector": spec, "dim": b.dim(), "full_dim": b.full_dim() }))?;
    Ok(format!("{} N={} sector dimension {}", cfg.model.kind, cfg.model.n_sites, b.dim()))
}

fn evolve(cfg: &ExperimentConfig) -> Result<String> {
    let file = cfg.protocol.as_ref().ok_or_else(|| Error::Config("evolve needs `protocol`".into()))?;
    let table = ProtocolTable::read_csv(file)?;
    let seq = table.to_sequence()?;
    let mut labels: Vec<String> = Vec::new();
    for l in &seq.labels {
        if !labels.contains(l) {
            labels.push(l.clone());
        }
    }
    let problem = cfg.problem_for(&cfg.model, &labels)?;
    let mut trace: Vec<Vec<String>> = Vec::new();
    let psi = match cfg.trace_dt {
        Some(dt) => trace_protocol(&seq, &problem.initial, &problem.actions, dt, |t, psi| {
            trace.push(vec![
                fmt_f64(t),
                fmt_f64(problem.energy_ratio(psi)),
                fmt_f64(problem.fidelity(psi)),
                fmt_f64(problem.entropy(psi).map_or(f64::NAN, |s| 2.0 * s / problem.n_sites() as f64)),
            ])
        })?,
        None => {
            let idx = problem.actions.indices(&seq)?;
            problem.evolve(&idx, &seq.durations)?
        }
    };
    if cfg.trace_dt.is_some() {
        write_table(&path(cfg, "evolve_trace.csv"), &["t", "energy_ratio", "fidelity", "entropy_density"], &trace)?;
    }
    let idx = problem.actions.indices(&seq)?;
    let ratio = problem.energy_ratio(&psi);
    write_json(
        cfg,
        "evolve.json",
        &json!({
            "total": seq.total(),
            "energy_ratio": ratio,
            "energy_density": problem.energy_density(&psi),
            "fidelity": problem.fidelity(&psi),
            "entropy": problem.entropy(&psi),
            "norm_density": protocol_norm_density(&problem, &idx, &seq.durations)?,
        }),
    )?;
    Ok(format!("E/E_GS = {ratio:.9}"))
}

fn qaoa(cfg: &ExperimentConfig) -> Result<String> {
    let pool = worker_pool(cfg.workers())?;
    let problem = cfg.problem_for(&cfg.model, &["H1".to_string(), "H2".to_string()])?;
    let p = (cfg.q / 2).max(1);
    let mut rows = Vec::new();
    let mut best_ratio = f64::NEG_INFINITY;
    for (ti, &total) in cfg.totals()?.iter().enumerate() {
        let r = qaoa_best(&problem, p, total, cfg.qaoa_restarts, &cfg.solver, derive_seed(cfg.seed, &[ti as u64]), &pool)?;
        let psi = problem.evolve(&r.record.sequence, &r.record.alphas)?;
        let ratio = problem.energy_ratio(&psi);
        best_ratio = best_ratio.max(ratio);
        let seq = problem.actions.sequence(&r.record.sequence, r.record.alphas.clone())?;
        ProtocolTable::from_sequence(&seq, &[]).write_csv(&path(cfg, &format!("protocol_qaoa_T{total}.csv")))?;
        rows.push(vec![
            fmt_f64(total),
            r.h1_first.to_string(),
            fmt_f64(r.record.energy_density),
            fmt_f64(ratio),
            fmt_f64(problem.fidelity(&psi)),
            fmt_f64(protocol_norm_density(&problem, &r.record.sequence, &r.record.alphas)?),
            r.record.degraded.to_string(),
        ]);
    }
    write_table(
        &path(cfg, "qaoa.csv"),
        &["total", "h1_first", "energy_density", "energy_ratio", "fidelity", "norm_density", "degraded"],
        &rows,
    )?;
    Ok(format!("QAOA p={p}: best E/E_GS {best_ratio:.6} over {} durations", rows.len()))
}

fn cdqaoa_train(cfg: &ExperimentConfig) -> Result<String> {
    let totals = cfg.totals()?;
    if totals.len() != 1 {
        return Err(Error::Config("cdqaoa-train takes a single `total`".into()));
    }
    let total = totals[0];
    let labels = cfg.action_labels();
    let problem = cfg.problem_for(&cfg.model, &labels)?;
    let pool = worker_pool(cfg.workers())?;
    let ckpt = path(cfg, "checkpoint.json");
    let log_path = path(cfg, "train_log.jsonl");
    let resume = if cfg.resume && ckpt.exists() { Some(TrainState::load(&ckpt)?) } else { None };
    let mut log = if resume.is_some() { JsonlWriter::append(&log_path)? } else { JsonlWriter::create(&log_path)? };
    let train_cfg = crate::rl_policy::TrainConfig { seed: cfg.seed, ..cfg.train.clone() };
    let state = train(&problem, total, &train_cfg, &cfg.solver, &pool, cfg.q, resume, |entry, st| {
        log.write(entry)?;
        st.save(&ckpt)
    })?;
    state.save(&ckpt)?;
    let best = state.best.as_ref().ok_or_else(|| Error::Config("training ran no iterations".into()))?;
    let seq = problem.actions.sequence(&best.sequence, best.alphas.clone())?;
    let gauge: Vec<String> = labels.iter().filter(|l| !matches!(l.as_str(), "H1" | "H2")).cloned().collect();
    ProtocolTable::from_sequence(&seq, &gauge).write_csv(&path(cfg, "protocol.csv"))?;
    let psi = problem.evolve(&best.sequence, &best.alphas)?;
    let ratio = problem.energy_ratio(&psi);
    write_json(
        cfg,
        "summary.json",
        &json!({
            "total": total,
            "q": cfg.q,
            "sequence": seq.labels,
            "durations": seq.durations,
            "energy_density": best.energy_density,
            "energy_ratio": ratio,
            "fidelity": problem.fidelity(&psi),
            "iterations": state.iteration,
        }),
    )?;
    Ok(format!("history-best E/E_GS {ratio:.6} after {} iterations", state.iteration))
}

fn drive(cfg: &ExperimentConfig, method: Method) -> Result<String> {
    let ansatz = cfg.ansatz_labels();
    let mut labels = vec!["H1".to_string(), "H2".to_string()];
    if method == Method::CdDrive {
        labels.extend(ansatz.iter().cloned());
    }
    let problem = cfg.problem_for(&cfg.model, &labels)?;
    let refs: Vec<&str> = ansatz.iter().map(String::as_str).collect();
    let mut rows = Vec::new();
    let mut trace_rows = Vec::new();
    for &total in &cfg.totals()? {
        let dc = cfg.drive_config(total);
        let r = if method == Method::CdDrive { run_cd_drive(&problem, &refs, &dc)? } else { run_adiabatic(&problem, &dc)? };
        for p in &r.trace {
            trace_rows.push(vec![fmt_f64(total), fmt_f64(p.t), fmt_f64(p.energy_ratio), fmt_f64(p.fidelity), fmt_f64(p.entropy_density)]);
        }
        rows.push(vec![
            fmt_f64(total),
            fmt_f64(r.energy_ratio),
            fmt_f64(r.fidelity),
            fmt_f64(r.norm_density),
            r.singular_steps.to_string(),
        ]);
    }
    let name = method.name();
    write_table(
        &path(cfg, &format!("{name}.csv")),
        &["total", "energy_ratio", "fidelity", "norm_density", "singular_steps"],
        &rows,
    )?;
    if cfg.trace_dt.is_some() {
        write_table(
            &path(cfg, &format!("{name}_trace.csv")),
            &["total", "t", "energy_ratio", "fidelity", "entropy_density"],
            &trace_rows,
        )?;
    }
    let ratios: Vec<String> = rows.iter().map(|r| r[1].clone()).collect();
    Ok(format!("{name} E/E_GS: {}", ratios.join(", ")))
}

/// Durations for the QSL scan: fine steps of 0.02 around `pi/2 - h` for each
/// field, and 0.1 steps from 0.1 to 2.0.
pub fn qsl_duration_grid(fields: &[f64]) -> Vec<f64> {
    let mut grid: Vec<f64> = (1..=20).map(|k| 0.1 * k as f64).collect();
    for &h in fields {
        let centre = std::f64::consts::FRAC_PI_2 - h;
        for k in -10..=10 {
            let t = centre + 0.02 * k as f64;
            if t > 0.0 {
                grid.push(t);
            }
        }
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    grid
}

fn lmg_qsl(cfg: &ExperimentConfig) -> Result<String> {
    if cfg.model.kind != ModelKind::Lmg {
        return Err(Error::Config("lmg-qsl needs model.kind = \"lmg\"".into()));
    }
    let durations = if cfg.lmg.durations.is_empty() { qsl_duration_grid(&cfg.lmg.fields) } else { cfg.lmg.durations.clone() };
    let mut qc = QslScanConfig::new(cfg.model.n_sites, cfg.lmg.fields.clone(), durations);
    qc.j = cfg.model.coupling("J")?;
    qc.criterion = cfg.lmg.criterion;
    qc.solver = cfg.solver.clone();
    if let Some(c) = &cfg.lmg.candidates {
        qc.candidates = c.clone();
    }
    let pts = qsl_scan(&qc, cfg.seed)?;
    let rows: Vec<Vec<String>> = pts
        .iter()
        .map(|p| vec![fmt_f64(p.h), p.t_qsl.map(fmt_f64).unwrap_or_default(), fmt_f64(p.energy_ratio), fmt_f64(p.fidelity)])
        .collect();
    write_table(&path(cfg, "lmg_qsl.csv"), &["h", "t_qsl", "energy_ratio", "fidelity"], &rows)?;
    let reached: Vec<(f64, f64)> = pts.iter().filter_map(|p| p.t_qsl.map(|t| (p.h, t))).collect();
    match linear_fit(&reached) {
        Ok((slope, intercept)) => Ok(format!("T_QSL fit: slope {slope:.4}, intercept {intercept:.4}")),
        Err(_) => Ok(format!("{} of {} fields reached the target", reached.len(), pts.len())),
    }
}

fn lmg_overlap(cfg: &ExperimentConfig) -> Result<String> {
    if cfg.model.kind != ModelKind::Lmg {
        return Err(Error::Config("lmg-overlap needs model.kind = \"lmg\"".into()));
    }
    let pts = overlap_scan(cfg.model.n_sites, cfg.model.coupling("J")?, &cfg.lmg.fields)?;
    let rows: Vec<Vec<String>> = pts.iter().map(|(h, o)| vec![fmt_f64(*h), fmt_f64(*o)]).collect();
    write_table(&path(cfg, "lmg_overlap.csv"), &["h", "overlap"], &rows)?;
    Ok(format!("{} overlap points", rows.len()))
}

fn compare(cfg: &ExperimentConfig) -> Result<String> {
    let pool = worker_pool(cfg.workers())?;
    let mut log = JsonlWriter::create(&path(cfg, "compare.jsonl"))?;
    let rows = run_comparison(cfg, &Method::ALL, &pool, |row| log.write(row))?;
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                fmt_f64(r.total),
                r.method.clone(),
                fmt_f64(r.energy_ratio),
                fmt_f64(r.fidelity),
                fmt_f64(r.norm_density),
                r.error.clone().unwrap_or_default(),
            ]
        })
        .collect();
    write_table(&path(cfg, "compare.csv"), &["total", "method", "energy_ratio", "fidelity", "norm_density", "error"], &table)?;
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    Ok(format!("{} comparison cells, {failed} failed", rows.len()))
}

fn transfer(cfg: &ExperimentConfig) -> Result<String> {
    let totals = cfg.totals()?;
    if totals.len() != 1 {
        return Err(Error::Config("transfer takes a single `total`".into()));
    }
    let pool = worker_pool(cfg.workers())?;
    let policy = if cfg.transfer.reoptimize {
        reoptimize_policy(&cfg.solver)
    } else {
        DurationPolicy::Fixed(cfg.transfer.durations.clone())
    };
    let r = transfer_eval(&cfg.model, cfg, &cfg.transfer.protocols, &cfg.transfer.sizes, totals[0], &policy, &pool)?;
    let mut rows = Vec::new();
    for (pi, p) in r.protocols.iter().enumerate() {
        for (ni, &n) in r.sizes.iter().enumerate() {
            rows.push(vec![pi.to_string(), p.join(" "), n.to_string(), fmt_f64(r.energy_density[pi][ni])]);
        }
    }
    write_table(&path(cfg, "transfer.csv"), &["protocol", "sequence", "n_sites", "energy_density"], &rows)?;
    let ranges: Vec<Vec<String>> = r
        .sizes
        .iter()
        .zip(&r.ranges)
        .map(|(n, (lo, hi))| vec![n.to_string(), fmt_f64(*lo), fmt_f64(*hi)])
        .collect();
    write_table(&path(cfg, "transfer_ranges.csv"), &["n_sites", "min_energy_density", "max_energy_density"], &ranges)?;
    Ok(format!("{} unique protocols on {} sizes", r.unique_count(), r.sizes.len()))
}

fn landscape(cfg: &ExperimentConfig) -> Result<String> {
    let totals = cfg.totals()?;
    if totals.len() != 1 || cfg.landscape.sequence.is_empty() {
        return Err(Error::Config("landscape needs a single `total` and `landscape.sequence`".into()));
    }
    let mut labels: Vec<String> = Vec::new();
    for l in &cfg.landscape.sequence {
        if !labels.contains(l) {
            labels.push(l.clone());
        }
    }
    let problem = cfg.problem_for(&cfg.model, &labels)?;
    let idx: Vec<usize> = cfg.landscape.sequence.iter().map(|l| problem.actions.index(l)).collect::<Result<_>>()?;
    let pts = landscape_sample(&problem, &idx, totals[0], cfg.landscape.restarts.max(1), &cfg.solver, cfg.seed)?;
    let rows: Vec<Vec<String>> = pts
        .iter()
        .map(|p| vec![fmt_f64(p.neg_log_fidelity), fmt_f64(p.entropy), fmt_f64(p.energy_density)])
        .collect();
    write_table(&path(cfg, "landscape.csv"), &["neg_log_fidelity", "entropy", "energy_density"], &rows)?;
    Ok(format!("{} local optima sampled", rows.len()))
}
