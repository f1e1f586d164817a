//! Clipped PPO objective with an entropy bonus, its gradient, and Adam.

use serde::{Deserialize, Serialize};

use super::net::PolicyNet;

/// `min(rho A, clip(rho, 1 - eps, 1 + eps) A)`.
pub fn clipped_term(rho: f64, adv: f64, eps: f64) -> f64 {
    (rho * adv).min(rho.clamp(1.0 - eps, 1.0 + eps) * adv)
}

/// One batch entry: actions, log-probability under the sampling policy and
/// advantage.
#[derive(Debug, Clone)]
pub struct PpoSample {
    pub actions: Vec<usize>,
    pub old_logprob: f64,
    pub advantage: f64,
}

/// Natural-log entropy of a categorical distribution.
pub fn categorical_entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>()
}

/// Batch mean of the clipped surrogate plus `ent_coef` times the summed
/// per-step entropies.
pub fn ppo_objective(net: &PolicyNet, batch: &[PpoSample], eps: f64, ent_coef: f64) -> f64 {
    ppo_eval(net, batch, eps, ent_coef, false).0
}

/// Objective and its gradient with respect to `net.params`.
pub fn ppo_gradient(net: &PolicyNet, batch: &[PpoSample], eps: f64, ent_coef: f64) -> (f64, Vec<f64>) {
    ppo_eval(net, batch, eps, ent_coef, true)
}

fn ppo_eval(net: &PolicyNet, batch: &[PpoSample], eps: f64, ent_coef: f64, with_grad: bool) -> (f64, Vec<f64>) {
    let mut grad = if with_grad { vec![0.0; net.n_params()] } else { Vec::new() };
    if batch.is_empty() {
        return (0.0, grad);
    }
    let m = batch.len() as f64;
    let a_n = net.n_actions();
    let mut total = 0.0;
    for s in batch {
        let fwd = net.forward(net.encode(&s.actions));
        let logits = fwd.acts.last().expect("output layer");
        let probs: Vec<Vec<f64>> = (0..net.depth())
            .map(|j| net.step_probs(logits, j, if j == 0 { None } else { Some(s.actions[j - 1]) }))
            .collect();
        let logp: f64 = probs.iter().zip(&s.actions).map(|(p, &a)| p[a].ln()).sum();
        let rho = (logp - s.old_logprob).exp();
        let surrogate = clipped_term(rho, s.advantage, eps);
        let entropies: Vec<f64> = probs.iter().map(|p| categorical_entropy(p)).collect();
        total += surrogate + ent_coef * entropies.iter().sum::<f64>();
        if !with_grad {
            continue;
        }
        // d(surrogate)/d(log pi): rho A on the unclipped branch, else 0.
        let unclipped = rho * s.advantage <= rho.clamp(1.0 - eps, 1.0 + eps) * s.advantage;
        let inside = rho >= 1.0 - eps && rho <= 1.0 + eps;
        let w = if unclipped || inside { rho * s.advantage } else { 0.0 };
        let mut d_logits = vec![0.0; logits.len()];
        for (j, p) in probs.iter().enumerate() {
            let a = s.actions[j];
            for k in 0..a_n {
                if p[k] <= 0.0 {
                    continue;
                }
                let dlogp = if k == a { 1.0 - p[k] } else { -p[k] };
                let dent = -p[k] * (p[k].ln() + entropies[j]);
                d_logits[j * a_n + k] = (w * dlogp + ent_coef * dent) / m;
            }
        }
        net.backward(&fwd, &d_logits, &mut grad);
    }
    (total / m, grad)
}

/// Mean over the batch of the summed per-step policy entropies.
pub fn mean_policy_entropy(net: &PolicyNet, sequences: &[Vec<usize>]) -> f64 {
    if sequences.is_empty() {
        return 0.0;
    }
    let s: f64 = sequences
        .iter()
        .map(|t| net.conditionals(t).iter().map(|p| categorical_entropy(p)).sum::<f64>())
        .sum();
    s / sequences.len() as f64
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Adam {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
}

impl Adam {
    pub fn new(n: usize) -> Self {
        Self { beta1: 0.9, beta2: 0.999, eps: 1e-7, m: vec![0.0; n], v: vec![0.0; n], t: 0 }
    }

    /// Gradient-ascent step on `params`.
    pub fn ascend(&mut self, params: &mut [f64], grad: &[f64], lr: f64) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t as i32);
        let c2 = 1.0 - self.beta2.powi(self.t as i32);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grad[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grad[i] * grad[i];
            let mh = self.m[i] / c1;
            let vh = self.v[i] / c2;
            params[i] += lr * mh / (vh.sqrt() + self.eps);
        }
    }
}
