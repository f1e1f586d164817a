//! Duration optimization for a fixed label sequence: minimize the final
//! energy density subject to `sum alpha = T`, `alpha >= 0`, from several
//! random starting points.

pub mod sqp;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::ControlProblem;
use crate::seeds::derive_seed;
pub use sqp::{minimize_simplex, project_simplex, SqpOptions, SqpResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientMode {
    /// Adjoint back-propagation through the sequence.
    Analytic,
    /// Forward differences with step `1e-7 max(1, |alpha|)`.
    ForwardDifference,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub restarts: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub gradient: GradientMode,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { restarts: 3, tol: 1e-6, max_iter: 500, gradient: GradientMode::Analytic }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DurationResult {
    pub alphas: Vec<f64>,
    pub energy_density: f64,
    /// True when the best restart did not reach the stationarity tolerance.
    pub degraded: bool,
    pub restart_energies: Vec<f64>,
    pub restart_alphas: Vec<Vec<f64>>,
}

fn objective(problem: &ControlProblem, idx: &[usize], mode: GradientMode, x: &[f64]) -> Result<(f64, Vec<f64>)> {
    match mode {
        GradientMode::Analytic => {
            let (f, g, _) = problem.energy_density_and_gradient(idx, x)?;
            Ok((f, g))
        }
        GradientMode::ForwardDifference => {
            let f = problem.energy_density(&problem.evolve(idx, x)?);
            let mut g = Vec::with_capacity(x.len());
            for j in 0..x.len() {
                let h = 1e-7 * x[j].abs().max(1.0);
                let mut xp = x.to_vec();
                xp[j] += h;
                g.push((problem.energy_density(&problem.evolve(idx, &xp)?) - f) / h);
            }
            Ok((f, g))
        }
    }
}

/// Random start: each coordinate uniform on `[0, T/q]`, projected onto the
/// simplex.
pub fn random_start(rng: &mut impl Rng, q: usize, total: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..q).map(|_| rng.gen::<f64>() * total / q as f64).collect();
    project_simplex(&raw, total)
}

/// Best durations over `cfg.restarts` random starts; ties go to the
/// earliest restart.
pub fn optimize_durations(
    problem: &ControlProblem,
    idx: &[usize],
    total: f64,
    cfg: &SolverConfig,
    seed: u64,
) -> Result<DurationResult> {
    validate(problem, idx, total)?;
    let q = idx.len();
    if total == 0.0 || q == 1 {
        let alphas = if total == 0.0 { vec![0.0; q] } else { vec![total] };
        let e = problem.energy_density(&problem.evolve(idx, &alphas)?);
        return Ok(DurationResult {
            alphas: alphas.clone(),
            energy_density: e,
            degraded: false,
            restart_energies: vec![e],
            restart_alphas: vec![alphas],
        });
    }
    let restarts = cfg.restarts.max(1);
    let mut best: Option<SqpResult> = None;
    let mut restart_energies = Vec::with_capacity(restarts);
    let mut restart_alphas = Vec::with_capacity(restarts);
    for r in 0..restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[r as u64]));
        let x0 = random_start(&mut rng, q, total);
        let res = minimize_simplex(
            |x| objective(problem, idx, cfg.gradient, x),
            &x0,
            total,
            SqpOptions { tol: cfg.tol, max_iter: cfg.max_iter },
        )?;
        restart_energies.push(res.f);
        restart_alphas.push(res.x.clone());
        if best.as_ref().is_none_or(|b| res.f < b.f) {
            best = Some(res);
        }
    }
    let best = best.expect("at least one restart");
    Ok(DurationResult {
        alphas: best.x,
        energy_density: best.f,
        degraded: !best.converged,
        restart_energies,
        restart_alphas,
    })
}

fn validate(problem: &ControlProblem, idx: &[usize], total: f64) -> Result<()> {
    if idx.is_empty() {
        return Err(Error::Config("empty label sequence".into()));
    }
    if !(total >= 0.0) || !total.is_finite() {
        return Err(Error::Config(format!("invalid total duration {total}")));
    }
    if let Some(&a) = idx.iter().find(|&&a| a >= problem.actions.len()) {
        return Err(Error::Config(format!("action index {a} out of range")));
    }
    Ok(())
}

/// Restart count at training iteration `k`: uniform on `1..=3 + k/30`.
pub fn restart_schedule(k: usize, rng: &mut impl Rng) -> usize {
    rng.gen_range(1..=3 + k / 30)
}

/// Final-state observables of one optimized restart.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LandscapePoint {
    pub neg_log_fidelity: f64,
    pub entropy: f64,
    pub energy_density: f64,
}

/// Optimizes `restarts` random starts independently and reports every local
/// optimum found.
pub fn landscape_sample(
    problem: &ControlProblem,
    idx: &[usize],
    total: f64,
    restarts: usize,
    cfg: &SolverConfig,
    seed: u64,
) -> Result<Vec<LandscapePoint>> {
    let single = SolverConfig { restarts, ..cfg.clone() };
    let res = optimize_durations(problem, idx, total, &single, seed)?;
    res.restart_alphas
        .iter()
        .map(|a| {
            let psi = problem.evolve(idx, a)?;
            Ok(LandscapePoint {
                neg_log_fidelity: -problem.fidelity(&psi).ln(),
                entropy: problem.entropy(&psi).unwrap_or(f64::NAN),
                energy_density: problem.energy_density(&psi),
            })
        })
        .collect()
}

/// Outcome of evaluating one label sequence.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalRecord {
    pub sequence: Vec<usize>,
    pub energy_density: f64,
    pub alphas: Vec<f64>,
    pub restarts: usize,
    pub degraded: bool,
    pub fidelity: Option<f64>,
    pub entropy: Option<f64>,
}

impl EvalRecord {
    pub fn reward(&self) -> f64 {
        -self.energy_density
    }

    /// Keeps the lower-energy record, accumulating restart counts.
    pub fn merge(self, other: EvalRecord) -> EvalRecord {
        let restarts = self.restarts + other.restarts;
        let mut best = if other.energy_density < self.energy_density { other } else { self };
        best.restarts = restarts;
        best
    }
}

pub fn evaluate_sequence(
    problem: &ControlProblem,
    idx: &[usize],
    total: f64,
    cfg: &SolverConfig,
    seed: u64,
    diagnostics: bool,
) -> Result<EvalRecord> {
    let res = optimize_durations(problem, idx, total, cfg, seed)?;
    let (fidelity, entropy) = if diagnostics {
        let psi = problem.evolve(idx, &res.alphas)?;
        (Some(problem.fidelity(&psi)), problem.entropy(&psi))
    } else {
        (None, None)
    };
    Ok(EvalRecord {
        sequence: idx.to_vec(),
        energy_density: res.energy_density,
        alphas: res.alphas,
        restarts: cfg.restarts.max(1),
        degraded: res.degraded,
        fidelity,
        entropy,
    })
}

/// One evaluation job: sequence, restart count and solver seed.
#[derive(Debug, Clone)]
pub struct EvalJob {
    pub sequence: Vec<usize>,
    pub restarts: usize,
    pub seed: u64,
}

/// Evaluates jobs on `pool`; results come back in job order.
pub fn evaluate_batch(
    pool: &rayon::ThreadPool,
    problem: &ControlProblem,
    jobs: &[EvalJob],
    total: f64,
    cfg: &SolverConfig,
) -> Result<Vec<EvalRecord>> {
    pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                let c = SolverConfig { restarts: job.restarts, ..cfg.clone() };
                evaluate_sequence(problem, &job.sequence, total, &c, job.seed, false)
            })
            .collect()
    })
}

/// Thread pool with `workers` threads (at least one).
pub fn worker_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::ProblemOptions;
    use crate::spin_ops::{ModelKind, ModelSpec};

    fn small() -> ControlProblem {
        let m = ModelSpec::new(ModelKind::IsingHalf, 6);
        ControlProblem::build(&m, &["H1", "H2", "Y"], &ProblemOptions::default()).unwrap()
    }

    #[test]
    fn zero_total_gives_zero_durations() {
        let p = small();
        let r = optimize_durations(&p, &[0, 1], 0.0, &SolverConfig::default(), 1).unwrap();
        assert_eq!(r.alphas, vec![0.0, 0.0]);
    }

    #[test]
    fn durations_stay_feasible() {
        let p = small();
        let r = optimize_durations(&p, &[2, 0, 1, 2], 3.0, &SolverConfig::default(), 5).unwrap();
        assert!((r.alphas.iter().sum::<f64>() - 3.0).abs() < 1e-9);
        assert!(r.alphas.iter().all(|&a| a >= 0.0));
    }

    #[test]
    fn batch_results_are_independent_of_workers() {
        let p = small();
        let jobs: Vec<EvalJob> = (0..4)
            .map(|i| EvalJob { sequence: vec![i % 3, (i + 1) % 3, 2], restarts: 2, seed: i as u64 })
            .collect();
        let cfg = SolverConfig::default();
        let a = evaluate_batch(&worker_pool(1).unwrap(), &p, &jobs, 2.0, &cfg).unwrap();
        let b = evaluate_batch(&worker_pool(3).unwrap(), &p, &jobs, 2.0, &cfg).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.energy_density.to_bits(), y.energy_density.to_bits());
        }
    }

    #[test]
    fn restart_schedule_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for k in [0, 29, 30, 95] {
            for _ in 0..200 {
                let p = restart_schedule(k, &mut rng);
                assert!(p >= 1 && p <= 3 + k / 30);
            }
        }
    }
}
