//! Symmetry-reduced bases (zero momentum, even parity; or the totally
//! symmetric multiplet of the LMG model) and gauge-potential term generation.

use std::collections::{BTreeSet, VecDeque};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::spin_ops::{build_matrix, ModelSpec, OperatorTerm, SiteOp, Spin, TermList};

/// Largest full Hilbert space that is enumerated explicitly.
pub const MAX_ENUMERATED: u64 = 1 << 25;
/// Largest LMG chain for which the spin configurations behind the
/// symmetric multiplet are enumerated.
pub const MAX_LMG_ENUMERATED: usize = 20;

/// Which symmetry group the basis is adapted to. All characters are trivial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymmetrySpec {
    pub translation: bool,
    pub reflection: bool,
    /// Full permutation symmetry (the maximal-spin multiplet).
    #[serde(default)]
    pub permutation: bool,
}

impl SymmetrySpec {
    pub fn full() -> Self {
        Self { translation: false, reflection: false, permutation: false }
    }

    pub fn translation_parity() -> Self {
        Self { translation: true, reflection: true, permutation: false }
    }

    pub fn lmg() -> Self {
        Self { translation: false, reflection: false, permutation: true }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "full" | "none" => Ok(Self::full()),
            "translation_parity" | "k0_parity" => Ok(Self::translation_parity()),
            "translation" => Ok(Self { translation: true, ..Self::full() }),
            "reflection" => Ok(Self { reflection: true, ..Self::full() }),
            "lmg" | "permutation" => Ok(Self::lmg()),
            _ => Err(Error::Config(format!("unknown symmetry sector '{s}'"))),
        }
    }
}

/// Orthonormal basis of symmetric states. State `r` is the normalized sum
/// over the orbit of its representative configuration.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    pub spec: SymmetrySpec,
    pub n_sites: usize,
    pub spin: Spin,
    /// Representative configuration per state (for the LMG multiplet: the
    /// number of up spins).
    pub reps: Vec<u64>,
    /// Square root of each orbit size.
    pub norms: Vec<f64>,
    orbit_ptr: Vec<usize>,
    orbit_cfg: Vec<u64>,
    rep_index: Vec<u32>,
}

impl SectorBasis {
    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    /// Whether the underlying spin configurations are enumerated.
    pub fn is_enumerated(&self) -> bool {
        !self.orbit_ptr.is_empty()
    }

    pub fn full_dim(&self) -> Option<u64> {
        (self.spin.local_dim() as u64).checked_pow(self.n_sites as u32)
    }

    pub fn orbit(&self, r: usize) -> Result<&[u64]> {
        if !self.is_enumerated() {
            return Err(Error::Unsupported(format!(
                "configurations of the N={} symmetric multiplet are not enumerated",
                self.n_sites
            )));
        }
        Ok(&self.orbit_cfg[self.orbit_ptr[r]..self.orbit_ptr[r + 1]])
    }

    /// Index of the basis state whose orbit contains `config`.
    pub fn index_of_config(&self, config: u64) -> usize {
        if self.spec.permutation && !self.is_enumerated() {
            return up_count(config, self.spin.local_dim() as u64, self.n_sites);
        }
        self.rep_index[config as usize] as usize
    }

    /// Normalized symmetric state containing the product configuration
    /// `digits` (digit 0 is spin up, one digit per site).
    pub fn product_state(&self, digits: &[usize]) -> Result<Vec<C64>> {
        let d = self.spin.local_dim();
        if digits.len() != self.n_sites || digits.iter().any(|&k| k >= d) {
            return Err(Error::Config("product state does not match the chain".into()));
        }
        if self.spec.permutation && !self.is_enumerated() {
            if d != 2 {
                return Err(Error::Unsupported("multiplet basis requires spin-1/2".into()));
            }
            let mut v = vec![C64::new(0.0, 0.0); self.dim()];
            v[digits.iter().filter(|&&k| k == 0).count()] = C64::new(1.0, 0.0);
            return Ok(v);
        }
        let c = digits.iter().rev().fold(0u64, |acc, &k| acc * d as u64 + k as u64);
        let mut v = vec![C64::new(0.0, 0.0); self.dim()];
        v[self.index_of_config(c)] = C64::new(1.0, 0.0);
        Ok(v)
    }

    /// Embeds a symmetric-basis vector into the full configuration space.
    pub fn lift(&self, v: &[C64]) -> Result<Vec<C64>> {
        let full = self.enumerated_full_dim()?;
        if v.len() != self.dim() {
            return Err(Error::Dimension(format!("vector of length {} vs basis dim {}", v.len(), self.dim())));
        }
        let mut out = vec![C64::new(0.0, 0.0); full];
        for r in 0..self.dim() {
            let a = v[r] / self.norms[r];
            for &c in self.orbit(r)? {
                out[c as usize] = a;
            }
        }
        Ok(out)
    }

    /// Orthogonal projection of a full-space vector onto the basis.
    pub fn project(&self, full: &[C64]) -> Result<Vec<C64>> {
        let n = self.enumerated_full_dim()?;
        if full.len() != n {
            return Err(Error::Dimension(format!("vector of length {} vs full dim {n}", full.len())));
        }
        (0..self.dim())
            .map(|r| Ok(self.orbit(r)?.iter().map(|&c| full[c as usize]).sum::<C64>() / self.norms[r]))
            .collect()
    }

    fn enumerated_full_dim(&self) -> Result<usize> {
        if !self.is_enumerated() {
            return Err(Error::Unsupported("basis configurations are not enumerated".into()));
        }
        Ok(self.full_dim().expect("enumerated basis has finite size") as usize)
    }
}

fn up_count(config: u64, d: u64, n: usize) -> usize {
    let mut c = config;
    let mut k = 0;
    for _ in 0..n {
        if c.is_multiple_of(d) {
            k += 1;
        }
        c /= d;
    }
    k
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

/// Enumerates the symmetric basis for a chain of `n` sites.
pub fn build_sector(n: usize, spin: Spin, spec: SymmetrySpec) -> Result<SectorBasis> {
    if n == 0 {
        return Err(Error::Config("chain must have at least one site".into()));
    }
    if spec.permutation && (spec.translation || spec.reflection) {
        return Err(Error::Config("permutation symmetry already contains translations and reflections".into()));
    }
    let d = spin.local_dim() as u64;
    if spec.permutation && n > MAX_LMG_ENUMERATED {
        if spin != Spin::Half {
            return Err(Error::Unsupported("multiplet basis requires spin-1/2".into()));
        }
        let reps: Vec<u64> = (0..=n as u64).collect();
        let norms = (0..=n).map(|k| (0.5 * ln_binomial(n, k)).exp()).collect();
        return Ok(SectorBasis {
            spec,
            n_sites: n,
            spin,
            reps,
            norms,
            orbit_ptr: Vec::new(),
            orbit_cfg: Vec::new(),
            rep_index: Vec::new(),
        });
    }
    let full = d
        .checked_pow(n as u32)
        .filter(|&f| f <= MAX_ENUMERATED)
        .ok_or_else(|| Error::Unsupported(format!("Hilbert space {d}^{n} exceeds the enumeration limit")))?;
    const UNSET: u32 = u32::MAX;
    let mut rep_index = vec![UNSET; full as usize];
    let mut reps = Vec::new();
    let mut norms = Vec::new();
    let mut orbit_ptr = vec![0usize];
    let mut orbit_cfg = Vec::with_capacity(full as usize);

    if spec.permutation {
        // Group configurations by their number of up spins.
        let mut groups: Vec<Vec<u64>> = vec![Vec::new(); n + 1];
        for c in 0..full {
            groups[up_count(c, d, n)].push(c);
        }
        for (k, g) in groups.into_iter().enumerate() {
            for &c in &g {
                rep_index[c as usize] = k as u32;
            }
            reps.push(k as u64);
            norms.push((g.len() as f64).sqrt());
            orbit_cfg.extend(g);
            orbit_ptr.push(orbit_cfg.len());
        }
        return Ok(SectorBasis { spec, n_sites: n, spin, reps, norms, orbit_ptr, orbit_cfg, rep_index });
    }

    let top = d.pow(n as u32 - 1);
    let translate = |c: u64| (c % top) * d + c / top;
    let reflect = |c: u64| {
        let mut x = c;
        let mut y = 0;
        for _ in 0..n {
            y = y * d + x % d;
            x /= d;
        }
        y
    };
    let mut images: Vec<u64> = Vec::with_capacity(2 * n);
    for c in 0..full {
        if rep_index[c as usize] != UNSET {
            continue;
        }
        images.clear();
        let starts: &[u64] = if spec.reflection { &[c, reflect(c)] } else { &[c] };
        for &s in starts {
            let mut x = s;
            let steps = if spec.translation { n } else { 1 };
            for _ in 0..steps {
                images.push(x);
                x = translate(x);
            }
        }
        images.sort_unstable();
        images.dedup();
        let idx = reps.len() as u32;
        for &x in &images {
            rep_index[x as usize] = idx;
        }
        reps.push(c);
        norms.push((images.len() as f64).sqrt());
        orbit_cfg.extend_from_slice(&images);
        orbit_ptr.push(orbit_cfg.len());
    }
    Ok(SectorBasis { spec, n_sites: n, spin, reps, norms, orbit_ptr, orbit_cfg, rep_index })
}

/// Basis appropriate for a model: the multiplet for LMG, otherwise the
/// requested chain sector.
pub fn basis_for(model: &ModelSpec, spec: SymmetrySpec) -> Result<SectorBasis> {
    build_sector(model.n_sites, model.spin(), spec)
}

/// Whether `a` and `b` coincide up to a real factor, compared as dense
/// matrices on their own chain with relative tolerance 1e-10.
pub fn equivalent(a: &TermList, b: &TermList) -> Result<bool> {
    let da = dense_full(a)?;
    let db = dense_full(b)?;
    if da.shape() != db.shape() {
        return Ok(false);
    }
    let na = da.norm();
    let nb = db.norm();
    if na < 1e-12 || nb < 1e-12 {
        return Ok(na < 1e-12 && nb < 1e-12);
    }
    let s = na / nb;
    let tol = 1e-10 * na;
    Ok((&da - &db * C64::new(s, 0.0)).norm() <= tol || (&da + &db * C64::new(s, 0.0)).norm() <= tol)
}

fn dense_full(t: &TermList) -> Result<DMatrix<C64>> {
    let d = t.spin.local_dim() as u64;
    if d.pow(t.n_sites as u32) > 4096 {
        return Err(Error::Unsupported("dense comparison limited to 4096-dimensional spaces".into()));
    }
    let basis = build_sector(t.n_sites, t.spin, SymmetrySpec::full())?;
    Ok(build_matrix(t, &basis)?.to_dense())
}

fn hs_inner(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

#[derive(Debug, Clone, Copy)]
pub struct GaugeGenOptions {
    /// Allow repeated sites within a term.
    pub onsite: bool,
    /// Maximum distance between consecutive sites of a term.
    pub range: usize,
}

impl Default for GaugeGenOptions {
    fn default() -> Self {
        Self { onsite: true, range: 1 }
    }
}

/// Seed of a generated term: operator string and site offsets from site 0.
type Seed = (Vec<SiteOp>, Vec<usize>);

/// Chain length used for orthogonalization and equivalence tests.
const REFERENCE_SITES: usize = 3;

fn term_key(t: &OperatorTerm) -> (Vec<usize>, Vec<SiteOp>, i64, i64) {
    let q = |x: f64| (x * 1e9).round() as i64;
    (t.sites.clone(), t.ops.clone(), q(t.coeff.re), q(t.coeff.im))
}

/// Closes `seed * i` under the chain symmetries and Hermitian conjugation.
fn symmetric_closure(seed: &Seed, n: usize, spin: Spin, spec: SymmetrySpec) -> TermList {
    let first = OperatorTerm {
        ops: seed.0.clone(),
        sites: seed.1.iter().map(|s| s % n).collect(),
        coeff: C64::new(0.0, 1.0),
    }
    .canonical();
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    let mut terms = Vec::new();
    seen.insert(term_key(&first));
    queue.push_back(first);
    while let Some(t) = queue.pop_front() {
        let mut images = vec![t.dagger()];
        if spec.translation {
            images.push(OperatorTerm { sites: t.sites.iter().map(|s| (s + 1) % n).collect(), ..t.clone() }.canonical());
        }
        if spec.reflection {
            images.push(OperatorTerm { sites: t.sites.iter().map(|s| (n - 1 - s) % n).collect(), ..t.clone() }.canonical());
        }
        for im in images {
            if seen.insert(term_key(&im)) {
                queue.push_back(im);
            }
        }
        terms.push(t);
    }
    TermList { name: String::new(), spin, n_sites: n, terms }.simplified(1e-12)
}

fn site_tuples(order: usize, opts: GaugeGenOptions) -> Vec<Vec<usize>> {
    let lo = if opts.onsite { 0 } else { 1 };
    let mut out = vec![vec![0usize]];
    for _ in 1..order {
        out = out
            .into_iter()
            .flat_map(|t| {
                let last = *t.last().unwrap();
                (lo..=opts.range).map(move |step| {
                    let mut u = t.clone();
                    u.push(last + step);
                    u
                })
            })
            .collect();
    }
    out
}

fn op_strings(order: usize, elementary: &[SiteOp]) -> Vec<Vec<SiteOp>> {
    let mut out = vec![Vec::new()];
    for _ in 0..order {
        out = out
            .into_iter()
            .flat_map(|s: Vec<SiteOp>| {
                elementary.iter().map(move |&o| {
                    let mut u = s.clone();
                    u.push(o);
                    u
                })
            })
            .collect();
    }
    out
}

/// An accepted gauge term as a linear combination of seed closures.
#[derive(Debug, Clone)]
struct Combination {
    parts: Vec<(f64, Seed)>,
}

impl Combination {
    fn materialize(&self, n: usize, spin: Spin, spec: SymmetrySpec) -> TermList {
        let mut tl = TermList::new("", spin, n);
        for (c, seed) in &self.parts {
            tl = tl.plus(*c, &symmetric_closure(seed, n, spin, spec));
        }
        tl.simplified(1e-12)
    }
}

fn accepted_terms(
    order: usize,
    elementary: &[SiteOp],
    spin: Spin,
    spec: SymmetrySpec,
    opts: GaugeGenOptions,
) -> Result<Vec<(usize, Combination)>> {
    let mut accepted: Vec<(usize, Combination)> =
        if order > 1 { accepted_terms(order - 1, elementary, spin, spec, opts)? } else { Vec::new() };
    let dense_of = |c: &Combination| -> Result<DMatrix<C64>> { dense_full(&c.materialize(REFERENCE_SITES, spin, spec)) };
    let mut dense: Vec<DMatrix<C64>> = accepted.iter().map(|(_, c)| dense_of(c)).collect::<Result<_>>()?;
    for ops in op_strings(order, elementary) {
        for sites in site_tuples(order, opts) {
            let seed: Seed = (ops.clone(), sites);
            let mut comb = Combination { parts: vec![(1.0, seed)] };
            let mut m = dense_of(&comb)?;
            let norm0 = m.norm();
            if norm0 < 1e-10 {
                continue;
            }
            for ((_, acc), dm) in accepted.iter().zip(&dense) {
                let w = hs_inner(dm, &m) / hs_inner(dm, dm);
                if w.abs() > 1e-13 {
                    m -= dm * C64::new(w, 0.0);
                    comb.parts.extend(acc.parts.iter().map(|(c, s)| (-w * c, s.clone())));
                }
            }
            if m.norm() < 1e-8 * norm0 {
                continue;
            }
            let candidate = comb.materialize(REFERENCE_SITES, spin, spec);
            let mut duplicate = false;
            for (_, acc) in &accepted {
                if equivalent(&candidate, &acc.materialize(REFERENCE_SITES, spin, spec))? {
                    duplicate = true;
                    break;
                }
            }
            if !duplicate {
                accepted.push((order, comb));
                dense.push(m);
            }
        }
    }
    Ok(accepted)
}

/// Generates the gauge-potential terms of a given order: seeds `i * O` for
/// every product `O` of `order` elementary operators, closes each under the
/// requested symmetries and Hermitian conjugation, removes components along
/// lower-order and previously accepted terms (Hilbert-Schmidt product on a
/// three-site reference chain) and discards equivalent or vanishing results.
/// Terms are returned for the model's chain length, scaled so that the
/// largest coefficient magnitude is one.
pub fn generate_gauge_terms(
    order: usize,
    elementary: &[SiteOp],
    spec: SymmetrySpec,
    model: &ModelSpec,
    opts: GaugeGenOptions,
) -> Result<Vec<TermList>> {
    if order == 0 {
        return Err(Error::Config("gauge term order must be at least 1".into()));
    }
    if spec.permutation {
        return Err(Error::Unsupported("gauge term generation works on chains".into()));
    }
    let spin = model.spin();
    let all = accepted_terms(order, elementary, spin, spec, opts)?;
    let mut out = Vec::new();
    for (k, (_, comb)) in all.into_iter().filter(|(o, _)| *o == order).enumerate() {
        let tl = comb.materialize(model.n_sites, spin, spec);
        let cmax = tl.terms.iter().map(|t| t.coeff.norm()).fold(0.0, f64::max);
        let mut tl = tl.scaled(1.0 / cmax);
        tl.name = format!("gauge{order}_{k}");
        out.push(tl);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin_ops::{catalog, ModelKind};

    #[test]
    fn bracelet_counts() {
        for (n, spin, dim) in [(12, Spin::Half, 224), (14, Spin::Half, 687), (8, Spin::One, 498), (6, Spin::One, 92)] {
            assert_eq!(build_sector(n, spin, SymmetrySpec::translation_parity()).unwrap().dim(), dim);
        }
    }

    #[test]
    fn multiplet_dim() {
        assert_eq!(build_sector(501, Spin::Half, SymmetrySpec::lmg()).unwrap().dim(), 502);
        assert_eq!(build_sector(6, Spin::Half, SymmetrySpec::lmg()).unwrap().dim(), 7);
    }

    #[test]
    fn lift_then_project_is_identity() {
        let b = build_sector(6, Spin::One, SymmetrySpec::translation_parity()).unwrap();
        let v: Vec<C64> = (0..b.dim()).map(|i| C64::new(i as f64 * 0.1, 1.0 / (1.0 + i as f64))).collect();
        let back = b.project(&b.lift(&v).unwrap()).unwrap();
        for (x, y) in v.iter().zip(&back) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    fn first_equivalent(t: &TermList, model: &ModelSpec, labels: &[&str]) -> Option<String> {
        labels
            .iter()
            .find(|l| equivalent(t, &catalog(l, model).unwrap()).unwrap())
            .map(|l| l.to_string())
    }

    #[test]
    fn spin_half_single_body_is_y() {
        let m = ModelSpec::new(ModelKind::IsingHalf, 4);
        let el = [SiteOp::Plus, SiteOp::Minus, SiteOp::Z];
        let g = generate_gauge_terms(1, &el, SymmetrySpec::translation_parity(), &m, GaugeGenOptions::default()).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(first_equivalent(&g[0], &m, &["Y"]).as_deref(), Some("Y"));
    }

    #[test]
    fn spin_half_two_body_terms() {
        let m = ModelSpec::new(ModelKind::IsingHalf, 4);
        let el = [SiteOp::Plus, SiteOp::Minus, SiteOp::Z];
        let opts = GaugeGenOptions { onsite: false, range: 1 };
        let g = generate_gauge_terms(2, &el, SymmetrySpec::translation_parity(), &m, opts).unwrap();
        let names: BTreeSet<String> = g.iter().filter_map(|t| first_equivalent(t, &m, &["X|Y", "Y|Z"])).collect();
        assert_eq!(g.len(), 2);
        assert_eq!(names.len(), 2);
    }

    #[test]
    fn spin_one_two_body_terms_include_onsite() {
        let m = ModelSpec::new(ModelKind::IsingOne, 4);
        let el = [SiteOp::Plus, SiteOp::Minus, SiteOp::Z];
        let g = generate_gauge_terms(2, &el, SymmetrySpec::translation_parity(), &m, GaugeGenOptions::default()).unwrap();
        let names: BTreeSet<String> =
            g.iter().filter_map(|t| first_equivalent(t, &m, &["XY", "YZ", "X|Y", "Y|Z"])).collect();
        assert_eq!(names, ["X|Y", "XY", "Y|Z", "YZ"].iter().map(|s| s.to_string()).collect());
        assert_eq!(g.len(), 4);
    }
}
