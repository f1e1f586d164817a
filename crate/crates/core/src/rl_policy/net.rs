//! Masked autoregressive categorical policy over label sequences.
//!
//! The input is the one-hot action history (`q` blocks of `|A|` entries,
//! zero for steps not yet taken). Output block `j` holds the logits of step
//! `j` and only sees input blocks `< j` through the degree masks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Layer {
    n_in: usize,
    n_out: usize,
    w_off: usize,
    b_off: usize,
    /// Row-major `n_out x n_in` connectivity, 1 or 0.
    mask: Vec<u8>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolicyNet {
    n_actions: usize,
    depth: usize,
    hidden: Vec<usize>,
    layers: Vec<Layer>,
    pub params: Vec<f64>,
}

/// Activations of one forward pass, kept for back-propagation.
pub(crate) struct Forward {
    /// `acts[0]` is the input; `acts[l + 1]` the output of layer `l`
    /// (post-ReLU for hidden layers, raw logits for the last).
    pub acts: Vec<Vec<f64>>,
}

/// A sampled action sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub actions: Vec<usize>,
    /// `log pi(tau)` under the policy that generated it.
    pub logprob: f64,
}

impl PolicyNet {
    /// Glorot-uniform weights and zero biases.
    pub fn new(n_actions: usize, depth: usize, hidden: &[usize], seed: u64) -> Result<Self> {
        let mut net = Self::uniform(n_actions, depth, hidden)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for l in &net.layers {
            let limit = (6.0 / (l.n_in + l.n_out) as f64).sqrt();
            for k in 0..l.n_in * l.n_out {
                let w = rng.gen_range(-limit..limit);
                if l.mask[k] == 1 {
                    net.params[l.w_off + k] = w;
                }
            }
        }
        Ok(net)
    }

    /// All parameters zero: every conditional is uniform over the legal actions.
    pub fn uniform(n_actions: usize, depth: usize, hidden: &[usize]) -> Result<Self> {
        if n_actions < 2 || depth == 0 {
            return Err(Error::Config(format!(
                "policy needs at least two actions and positive depth (got {n_actions}, {depth})"
            )));
        }
        if hidden.contains(&0) {
            return Err(Error::Config("hidden layers must be non-empty".into()));
        }
        let n_in = n_actions * depth;
        let in_deg: Vec<usize> = (0..n_in).map(|i| i / n_actions + 1).collect();
        let out_deg: Vec<usize> = (0..n_in).map(|i| i / n_actions + 1).collect();
        let mut degs = vec![in_deg];
        for &h in hidden {
            degs.push((0..h).map(|k| k % depth).collect());
        }
        let mut layers = Vec::new();
        let mut off = 0;
        for l in 0..=hidden.len() {
            let prev = &degs[l];
            let last = l == hidden.len();
            let cur: &[usize] = if last { &out_deg } else { &degs[l + 1] };
            let mut mask = Vec::with_capacity(prev.len() * cur.len());
            for &o in cur {
                for &i in prev {
                    let on = if last { i < o } else { o >= i };
                    mask.push(on as u8);
                }
            }
            let (n_in_l, n_out_l) = (prev.len(), cur.len());
            layers.push(Layer { n_in: n_in_l, n_out: n_out_l, w_off: off, b_off: off + n_in_l * n_out_l, mask });
            off += n_in_l * n_out_l + n_out_l;
        }
        Ok(Self { n_actions, depth, hidden: hidden.to_vec(), layers, params: vec![0.0; off] })
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn hidden(&self) -> &[usize] {
        &self.hidden
    }

    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    /// Number of parameters that are not masked out.
    pub fn n_free_params(&self) -> usize {
        self.layers.iter().map(|l| l.mask.iter().filter(|&&m| m == 1).count() + l.n_out).sum()
    }

    pub(crate) fn encode(&self, prefix: &[usize]) -> Vec<f64> {
        let mut x = vec![0.0; self.n_actions * self.depth];
        for (j, &a) in prefix.iter().enumerate().take(self.depth) {
            x[j * self.n_actions + a] = 1.0;
        }
        x
    }

    pub(crate) fn forward(&self, x: Vec<f64>) -> Forward {
        let mut acts = vec![x];
        for (li, l) in self.layers.iter().enumerate() {
            let input = &acts[li];
            let w = &self.params[l.w_off..l.w_off + l.n_in * l.n_out];
            let b = &self.params[l.b_off..l.b_off + l.n_out];
            let last = li + 1 == self.layers.len();
            let out: Vec<f64> = (0..l.n_out)
                .map(|o| {
                    let row = &w[o * l.n_in..(o + 1) * l.n_in];
                    let mask = &l.mask[o * l.n_in..(o + 1) * l.n_in];
                    let mut z = b[o];
                    for i in 0..l.n_in {
                        if mask[i] == 1 && input[i] != 0.0 {
                            z += row[i] * input[i];
                        }
                    }
                    if last {
                        z
                    } else {
                        z.max(0.0)
                    }
                })
                .collect();
            acts.push(out);
        }
        Forward { acts }
    }

    /// Back-propagates `d_logits` through a stored forward pass, accumulating
    /// into `grad`.
    pub(crate) fn backward(&self, fwd: &Forward, d_logits: &[f64], grad: &mut [f64]) {
        let mut delta = d_logits.to_vec();
        for li in (0..self.layers.len()).rev() {
            let l = &self.layers[li];
            let input = &fwd.acts[li];
            for o in 0..l.n_out {
                let d = delta[o];
                if d == 0.0 {
                    continue;
                }
                grad[l.b_off + o] += d;
                let base = l.w_off + o * l.n_in;
                for i in 0..l.n_in {
                    if l.mask[o * l.n_in + i] == 1 {
                        grad[base + i] += d * input[i];
                    }
                }
            }
            if li == 0 {
                break;
            }
            let mut prev = vec![0.0; l.n_in];
            for o in 0..l.n_out {
                let d = delta[o];
                if d == 0.0 {
                    continue;
                }
                let base = l.w_off + o * l.n_in;
                for i in 0..l.n_in {
                    if l.mask[o * l.n_in + i] == 1 {
                        prev[i] += d * self.params[base + i];
                    }
                }
            }
            for (p, &a) in prev.iter_mut().zip(&fwd.acts[li]) {
                if a <= 0.0 {
                    *p = 0.0;
                }
            }
            delta = prev;
        }
    }

    /// Conditional distribution of step `j` from the logits of a forward
    /// pass, with the previous action excluded.
    pub(crate) fn step_probs(&self, logits: &[f64], j: usize, prev: Option<usize>) -> Vec<f64> {
        let a = self.n_actions;
        let z = &logits[j * a..(j + 1) * a];
        let zmax = (0..a).filter(|&k| Some(k) != prev).map(|k| z[k]).fold(f64::NEG_INFINITY, f64::max);
        let mut p: Vec<f64> = (0..a).map(|k| if Some(k) == prev { 0.0 } else { (z[k] - zmax).exp() }).collect();
        let s: f64 = p.iter().sum();
        for v in &mut p {
            *v /= s;
        }
        p
    }

    /// Every conditional `pi(. | a_<j)` along `actions`, from one forward pass.
    pub fn conditionals(&self, actions: &[usize]) -> Vec<Vec<f64>> {
        let fwd = self.forward(self.encode(actions));
        let logits = fwd.acts.last().expect("output layer");
        (0..self.depth)
            .map(|j| self.step_probs(logits, j, if j == 0 { None } else { actions.get(j - 1).copied() }))
            .collect()
    }

    /// Raw logits of every step given the encoded history `actions`.
    pub fn logits(&self, actions: &[usize]) -> Vec<f64> {
        self.forward(self.encode(actions)).acts.pop().expect("output layer")
    }

    /// `true` when `tau` has the right length, valid labels and no
    /// consecutive repeat.
    pub fn is_legal(&self, tau: &[usize]) -> bool {
        tau.len() == self.depth && tau.iter().all(|&a| a < self.n_actions) && tau.windows(2).all(|w| w[0] != w[1])
    }

    /// `sum_j log pi(a_j | a_<j)`; `-inf` for an illegal sequence.
    pub fn evaluate_logprob(&self, tau: &[usize]) -> f64 {
        if !self.is_legal(tau) {
            return f64::NEG_INFINITY;
        }
        self.conditionals(tau).iter().zip(tau).map(|(p, &a)| p[a].ln()).sum()
    }

    /// Ancestral sampling of `m` sequences.
    pub fn sample_batch(&self, m: usize, rng: &mut impl Rng) -> Vec<Trajectory> {
        (0..m).map(|_| self.sample_one(rng)).collect()
    }

    fn sample_one(&self, rng: &mut impl Rng) -> Trajectory {
        let mut actions = Vec::with_capacity(self.depth);
        let mut logprob = 0.0;
        for j in 0..self.depth {
            let logits = self.logits(&actions);
            let p = self.step_probs(&logits, j, actions.last().copied());
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            let mut pick = None;
            for (k, &pk) in p.iter().enumerate() {
                if pk <= 0.0 {
                    continue;
                }
                acc += pk;
                pick = Some(k);
                if u < acc {
                    break;
                }
            }
            let a = pick.expect("at least one legal action");
            logprob += p[a].ln();
            actions.push(a);
        }
        Trajectory { actions, logprob }
    }

    /// Enumerates all legal sequences in lexicographic order.
    pub fn legal_sequences(n_actions: usize, depth: usize) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for _ in 0..depth {
            let mut next = Vec::new();
            for s in &out {
                for a in 0..n_actions {
                    if s.last() != Some(&a) {
                        let mut t: Vec<usize> = s.clone();
                        t.push(a);
                        next.push(t);
                    }
                }
            }
            out = next;
        }
        out
    }

    /// Entry `k` of the flat parameter vector may be nonzero.
    pub fn is_free(&self, k: usize) -> bool {
        for l in &self.layers {
            if k >= l.w_off && k < l.b_off {
                return l.mask[k - l.w_off] == 1;
            }
            if k >= l.b_off && k < l.b_off + l.n_out {
                return true;
            }
        }
        false
    }
}

/// Sequence-space size `|A| (|A| - 1)^(q - 1)`.
pub fn sequence_space_size(n_actions: usize, depth: usize) -> u128 {
    if depth == 0 {
        return 0;
    }
    n_actions as u128 * (n_actions as u128 - 1).pow(depth as u32 - 1)
}
