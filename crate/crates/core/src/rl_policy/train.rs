//! Policy-gradient search over label sequences with contopt rewards.

use std::collections::BTreeMap;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::net::PolicyNet;
use super::ppo::{mean_policy_entropy, ppo_gradient, Adam, PpoSample};
use crate::contopt::{evaluate_batch, restart_schedule, EvalJob, EvalRecord, SolverConfig};
use crate::error::{Error, Result};
use crate::problem::ControlProblem;
use crate::seeds::derive_seed;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub iterations: usize,
    pub batch_size: usize,
    pub ppo_steps: usize,
    pub clip: f64,
    pub learning_rate: f64,
    pub lr_decay: f64,
    pub lr_decay_steps: usize,
    pub entropy_coef: f64,
    pub entropy_decay: f64,
    pub entropy_decay_steps: f64,
    pub baseline_decay: f64,
    pub hidden: Vec<usize>,
    /// Fixed solver restarts per sequence; `None` follows `restart_schedule`.
    pub restarts: Option<usize>,
    /// Re-run the solver on sequences already in the reward cache.
    pub reevaluate_cached: bool,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            iterations: 500,
            batch_size: 128,
            ppo_steps: 4,
            clip: 0.1,
            learning_rate: 0.01,
            lr_decay: 0.96,
            lr_decay_steps: 50,
            entropy_coef: 0.1,
            entropy_decay: 0.9,
            entropy_decay_steps: 10.0,
            baseline_decay: 0.95,
            hidden: vec![112, 112],
            restarts: None,
            reevaluate_cached: true,
            seed: 0,
        }
    }
}

impl TrainConfig {
    /// Staircase decay `lr0 * decay^floor(k / steps)`.
    pub fn learning_rate_at(&self, k: usize) -> f64 {
        self.learning_rate * self.lr_decay.powi((k / self.lr_decay_steps.max(1)) as i32)
    }

    /// Smooth decay `c0 * decay^(k / steps)`.
    pub fn entropy_coef_at(&self, k: usize) -> f64 {
        self.entropy_coef * self.entropy_decay.powf(k as f64 / self.entropy_decay_steps)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.into()));
        if self.batch_size == 0 {
            return bad("batch_size must be positive");
        }
        if !(self.learning_rate > 0.0) || !(self.lr_decay > 0.0) {
            return bad("learning-rate schedule must stay positive");
        }
        if self.entropy_coef < 0.0 || !(self.entropy_decay > 0.0) || !(self.entropy_decay_steps > 0.0) {
            return bad("invalid entropy schedule");
        }
        if !(0.0..1.0).contains(&self.baseline_decay) {
            return bad("baseline_decay must lie in [0, 1)");
        }
        if !(self.clip > 0.0) {
            return bad("clip must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IterationLog {
    pub iteration: usize,
    pub mean_reward: f64,
    pub max_reward: f64,
    pub best_reward: f64,
    /// Mean summed per-step policy entropy over the sampled batch.
    pub entropy: f64,
    pub baseline: f64,
    pub learning_rate: f64,
    pub entropy_coef: f64,
    pub unique_sequences: usize,
    /// The update was dropped because of a non-finite gradient.
    pub update_skipped: bool,
}

/// Everything needed to resume training.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainState {
    pub net: PolicyNet,
    pub adam: Adam,
    pub baseline: f64,
    /// Next iteration to run.
    pub iteration: usize,
    pub cache: Vec<EvalRecord>,
    pub best: Option<EvalRecord>,
    pub log: Vec<IterationLog>,
}

impl TrainState {
    pub fn new(n_actions: usize, depth: usize, cfg: &TrainConfig) -> Result<Self> {
        let net = PolicyNet::new(n_actions, depth, &cfg.hidden, derive_seed(cfg.seed, &[0]))?;
        let adam = Adam::new(net.n_params());
        Ok(Self { net, adam, baseline: 0.0, iteration: 0, cache: Vec::new(), best: None, log: Vec::new() })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, serde_json::to_vec(self)?)?;
        std::fs::rename(tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_slice(&std::fs::read(path)?)?)
    }
}

/// Runs training iterations until `cfg.iterations` have been done in total,
/// calling `on_iter` after each one.
pub fn train(
    problem: &ControlProblem,
    total: f64,
    cfg: &TrainConfig,
    solver: &SolverConfig,
    pool: &rayon::ThreadPool,
    depth: usize,
    resume: Option<TrainState>,
    mut on_iter: impl FnMut(&IterationLog, &TrainState) -> Result<()>,
) -> Result<TrainState> {
    cfg.validate()?;
    let n_actions = problem.actions.len();
    let mut state = match resume {
        Some(s) => {
            if s.net.n_actions() != n_actions || s.net.depth() != depth {
                return Err(Error::Config("checkpoint does not match the action set or depth".into()));
            }
            s
        }
        None => TrainState::new(n_actions, depth, cfg)?,
    };
    let mut cache: BTreeMap<Vec<usize>, EvalRecord> =
        state.cache.drain(..).map(|r| (r.sequence.clone(), r)).collect();
    while state.iteration < cfg.iterations {
        let k = state.iteration;
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[1, k as u64]));
        let trajs = state.net.sample_batch(cfg.batch_size, &mut rng);

        let mut unique: Vec<Vec<usize>> = Vec::new();
        for t in &trajs {
            if !unique.contains(&t.actions) {
                unique.push(t.actions.clone());
            }
        }
        let jobs: Vec<EvalJob> = unique
            .iter()
            .enumerate()
            .filter(|(_, s)| cfg.reevaluate_cached || !cache.contains_key(*s))
            .map(|(i, s)| EvalJob {
                sequence: s.clone(),
                restarts: cfg.restarts.unwrap_or_else(|| restart_schedule(k, &mut rng)),
                seed: derive_seed(cfg.seed, &[2, k as u64, i as u64]),
            })
            .collect();
        for rec in evaluate_batch(pool, problem, &jobs, total, solver)? {
            let merged = match cache.remove(&rec.sequence) {
                Some(old) => old.merge(rec),
                None => rec,
            };
            cache.insert(merged.sequence.clone(), merged);
        }
        let rewards: Vec<f64> = trajs.iter().map(|t| cache[&t.actions].reward()).collect();
        for s in &unique {
            let rec = &cache[s];
            if state.best.as_ref().is_none_or(|b| rec.energy_density < b.energy_density) {
                state.best = Some(rec.clone());
            }
        }

        let mean = rewards.iter().sum::<f64>() / rewards.len() as f64;
        let max = rewards.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        state.baseline = cfg.baseline_decay * state.baseline + (1.0 - cfg.baseline_decay) * mean;
        let seqs: Vec<Vec<usize>> = trajs.iter().map(|t| t.actions.clone()).collect();
        let entropy = mean_policy_entropy(&state.net, &seqs);
        let batch: Vec<PpoSample> = trajs
            .iter()
            .zip(&rewards)
            .map(|(t, r)| PpoSample { actions: t.actions.clone(), old_logprob: t.logprob, advantage: r - state.baseline })
            .collect();

        let lr = cfg.learning_rate_at(k);
        let ent = cfg.entropy_coef_at(k);
        let saved = (state.net.params.clone(), state.adam.clone());
        let mut skipped = false;
        for _ in 0..cfg.ppo_steps {
            let (_, g) = ppo_gradient(&state.net, &batch, cfg.clip, ent);
            if !g.iter().all(|x| x.is_finite()) {
                skipped = true;
                break;
            }
            state.adam.ascend(&mut state.net.params, &g, lr);
        }
        if skipped {
            state.net.params = saved.0;
            state.adam = saved.1;
        }

        let entry = IterationLog {
            iteration: k,
            mean_reward: mean,
            max_reward: max,
            best_reward: state.best.as_ref().map_or(f64::NEG_INFINITY, |b| b.reward()),
            entropy,
            baseline: state.baseline,
            learning_rate: lr,
            entropy_coef: ent,
            unique_sequences: unique.len(),
            update_skipped: skipped,
        };
        state.log.push(entry.clone());
        state.iteration += 1;
        state.cache = cache.values().cloned().collect();
        on_iter(&entry, &state)?;
        state.cache.clear();
    }
    state.cache = cache.into_values().collect();
    Ok(state)
}
