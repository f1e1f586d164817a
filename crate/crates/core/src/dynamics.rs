//! State propagation under piecewise-constant protocols and the figures of
//! merit evaluated on the final state.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, expmv_signed, CsrMatrix, ExpmvOptions, C64};
use crate::symmetry::{SectorBasis, SymmetrySpec};

/// Ordered labels with their durations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSequence {
    pub labels: Vec<String>,
    pub durations: Vec<f64>,
}

impl ProtocolSequence {
    pub fn new(labels: Vec<String>, durations: Vec<f64>) -> Result<Self> {
        let p = Self { labels, durations };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.labels.len() != self.durations.len() {
            return Err(Error::Config(format!(
                "{} labels but {} durations",
                self.labels.len(),
                self.durations.len()
            )));
        }
        if let Some(d) = self.durations.iter().find(|d| !d.is_finite() || **d < 0.0) {
            return Err(Error::Config(format!("invalid duration {d}")));
        }
        if let Some(w) = self.labels.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Config(format!("label '{}' repeats consecutively", w[0])));
        }
        Ok(())
    }

    pub fn total(&self) -> f64 {
        self.durations.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Generators addressable by label, all represented in one basis.
#[derive(Debug, Clone)]
pub struct ActionSet {
    pub labels: Vec<String>,
    pub matrices: Vec<CsrMatrix>,
}

impl ActionSet {
    pub fn new(labels: Vec<String>, matrices: Vec<CsrMatrix>) -> Result<Self> {
        if labels.len() != matrices.len() || labels.is_empty() {
            return Err(Error::Config("action set needs one matrix per label".into()));
        }
        let dim = matrices[0].dim();
        if matrices.iter().any(|m| m.dim() != dim) {
            return Err(Error::Dimension("action matrices differ in dimension".into()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::Config(format!("duplicate action label '{l}'")));
            }
        }
        Ok(Self { labels, matrices })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].dim()
    }

    pub fn index(&self, label: &str) -> Result<usize> {
        let l = crate::spin_ops::canonical_label(label);
        self.labels
            .iter()
            .position(|x| *x == l)
            .ok_or_else(|| Error::Config(format!("label '{label}' is not in the action set")))
    }

    pub fn indices(&self, seq: &ProtocolSequence) -> Result<Vec<usize>> {
        seq.labels.iter().map(|l| self.index(l)).collect()
    }

    pub fn sequence(&self, idx: &[usize], durations: Vec<f64>) -> Result<ProtocolSequence> {
        ProtocolSequence::new(idx.iter().map(|&i| self.labels[i].clone()).collect(), durations)
    }
}

/// `exp(-i t H) v` for `t >= 0`.
pub fn expmv(h: &CsrMatrix, t: f64, v: &[C64]) -> Result<Vec<C64>> {
    if t < 0.0 {
        return Err(Error::Config(format!("negative evolution time {t}")));
    }
    expmv_signed(h, t, v, ExpmvOptions::default())
}

/// Applies the unitaries of `seq` in order.
pub fn run_protocol(seq: &ProtocolSequence, psi0: &[C64], actions: &ActionSet) -> Result<Vec<C64>> {
    seq.validate()?;
    let idx = actions.indices(seq)?;
    run_indexed(&idx, &seq.durations, psi0, actions)
}

pub fn run_indexed(idx: &[usize], durations: &[f64], psi0: &[C64], actions: &ActionSet) -> Result<Vec<C64>> {
    if psi0.len() != actions.dim() {
        return Err(Error::Dimension(format!("state of length {} vs action dim {}", psi0.len(), actions.dim())));
    }
    let mut psi = psi0.to_vec();
    for (&a, &t) in idx.iter().zip(durations) {
        if t > 0.0 {
            psi = expmv(&actions.matrices[a], t, &psi)?;
        }
    }
    Ok(psi)
}

/// Propagates `seq`, calling `observe(t, psi)` at t = 0 and then at least every
/// `sample_dt` time units and at every step boundary.
pub fn trace_protocol(
    seq: &ProtocolSequence,
    psi0: &[C64],
    actions: &ActionSet,
    sample_dt: f64,
    mut observe: impl FnMut(f64, &[C64]),
) -> Result<Vec<C64>> {
    if sample_dt <= 0.0 {
        return Err(Error::Config("sample interval must be positive".into()));
    }
    let idx = actions.indices(seq)?;
    let mut psi = psi0.to_vec();
    let mut t = 0.0;
    observe(t, &psi);
    for (&a, &dur) in idx.iter().zip(&seq.durations) {
        if dur <= 0.0 {
            continue;
        }
        let pieces = (dur / sample_dt).ceil().max(1.0) as usize;
        let h = dur / pieces as f64;
        for _ in 0..pieces {
            psi = expmv(&actions.matrices[a], h, &psi)?;
            t += h;
            observe(t, &psi);
        }
    }
    Ok(psi)
}

/// `<psi|H|psi>` for a normalized state.
pub fn energy(psi: &[C64], h: &CsrMatrix) -> f64 {
    let e = dot(psi, &h.matvec(psi));
    debug_assert!(e.im.abs() <= 1e-10 * e.re.abs().max(1.0), "imaginary energy {}", e.im);
    e.re
}

/// Overlap with a (possibly degenerate) target manifold, `sum_k |<t_k|psi>|^2`.
pub fn fidelity(psi: &[C64], targets: &[Vec<C64>]) -> f64 {
    targets.iter().map(|t| dot(t, psi).norm_sqr()).sum()
}

/// Von Neumann entropy of the half chain of sites `0..N/2` for a state given
/// in `basis`.
pub fn entanglement_entropy(psi: &[C64], basis: &SectorBasis) -> Result<f64> {
    let n = basis.n_sites;
    if !n.is_multiple_of(2) {
        return Err(Error::Unsupported(format!("half-chain entropy needs an even chain, got N={n}")));
    }
    if psi.len() != basis.dim() {
        return Err(Error::Dimension(format!("state of length {} vs basis dim {}", psi.len(), basis.dim())));
    }
    let full = if basis.spec == SymmetrySpec::full() { psi.to_vec() } else { basis.lift(psi)? };
    let side = basis.spin.local_dim().pow((n / 2) as u32);
    Ok(half_chain_entropy(&full, side))
}

/// Entropy of the bipartition `index = a + side * b` of a full-space vector.
pub fn half_chain_entropy(full: &[C64], side: usize) -> f64 {
    let m = DMatrix::from_fn(side, full.len() / side, |a, b| full[a + side * b]);
    let sv = m.singular_values();
    let norm2: f64 = sv.iter().map(|s| s * s).sum();
    -sv.iter()
        .map(|s| s * s / norm2)
        .filter(|&p| p > 1e-300)
        .map(|p| p * p.ln())
        .sum::<f64>()
}

/// Generator norm along a protocol, either piecewise constant or sampled.
#[derive(Debug, Clone, PartialEq)]
pub enum NormSchedule {
    /// `(duration, norm)` per step.
    Piecewise(Vec<(f64, f64)>),
    /// `(time, norm)` samples from `0` to `T`, integrated by the trapezoid rule.
    Sampled(Vec<(f64, f64)>),
}

/// Time-averaged Hilbert-Schmidt norm of the generator per site.
pub fn norm_density(schedule: &NormSchedule, total: f64, n_sites: usize) -> Result<f64> {
    if total <= 0.0 {
        return Err(Error::Config("norm density needs a positive duration".into()));
    }
    let integral = match schedule {
        NormSchedule::Piecewise(steps) => {
            let span: f64 = steps.iter().map(|s| s.0).sum();
            if (span - total).abs() > 1e-9 * total.max(1.0) {
                return Err(Error::Config(format!("schedule spans {span}, expected {total}")));
            }
            steps.iter().map(|(d, h)| d * h).sum::<f64>()
        }
        NormSchedule::Sampled(pts) => {
            let ok = pts.len() >= 2
                && pts[0].0.abs() <= 1e-9
                && (pts[pts.len() - 1].0 - total).abs() <= 1e-9 * total.max(1.0)
                && pts.windows(2).all(|w| w[1].0 >= w[0].0);
            if !ok {
                return Err(Error::Config("sampled schedule must cover [0, T] in order".into()));
            }
            pts.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum()
        }
    };
    Ok(integral / (total * n_sites as f64))
}
