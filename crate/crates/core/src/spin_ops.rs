//! Spin operator algebra: coupling lists, the named-term catalog, sparse
//! matrix assembly in a (possibly symmetry-reduced) basis and ground states.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{lowest_eigenpairs, CsrMatrix, EigOptions, C64};
use crate::symmetry::{build_sector, SectorBasis, SymmetrySpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Spin {
    #[serde(rename = "1/2")]
    Half,
    #[serde(rename = "1")]
    One,
}

impl Spin {
    /// Local Hilbert-space dimension `2S + 1`.
    pub fn local_dim(self) -> usize {
        match self {
            Spin::Half => 2,
            Spin::One => 3,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Spin::Half => 0.5,
            Spin::One => 1.0,
        }
    }

    /// Magnetic quantum number of local digit `k` (digit 0 is fully up).
    pub fn m_of_digit(self, k: usize) -> f64 {
        self.value() - k as f64
    }
}

/// Single-site operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SiteOp {
    X,
    Y,
    Z,
    Plus,
    Minus,
    Id,
}

impl SiteOp {
    pub fn parse(c: char) -> Result<Self> {
        Ok(match c {
            'x' => SiteOp::X,
            'y' => SiteOp::Y,
            'z' => SiteOp::Z,
            '+' => SiteOp::Plus,
            '-' => SiteOp::Minus,
            'I' => SiteOp::Id,
            _ => return Err(Error::Config(format!("unknown site operator '{c}'"))),
        })
    }

    pub fn symbol(self) -> char {
        match self {
            SiteOp::X => 'x',
            SiteOp::Y => 'y',
            SiteOp::Z => 'z',
            SiteOp::Plus => '+',
            SiteOp::Minus => '-',
            SiteOp::Id => 'I',
        }
    }

    /// Hermitian conjugate.
    pub fn dagger(self) -> SiteOp {
        match self {
            SiteOp::Plus => SiteOp::Minus,
            SiteOp::Minus => SiteOp::Plus,
            o => o,
        }
    }
}

/// Product of single-site operators with a complex coefficient. Operators are
/// applied right to left; a site may appear more than once for on-site products.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorTerm {
    pub ops: Vec<SiteOp>,
    pub sites: Vec<usize>,
    pub coeff: C64,
}

impl OperatorTerm {
    pub fn new(opstr: &str, sites: &[usize], coeff: C64) -> Result<Self> {
        let ops = opstr.chars().map(SiteOp::parse).collect::<Result<Vec<_>>>()?;
        if ops.len() != sites.len() {
            return Err(Error::Config(format!("operator string '{opstr}' does not match {} sites", sites.len())));
        }
        Ok(Self { ops, sites: sites.to_vec(), coeff })
    }

    pub fn real(opstr: &str, sites: &[usize], c: f64) -> Self {
        Self::new(opstr, sites, C64::new(c, 0.0)).expect("valid operator string")
    }

    pub fn opstring(&self) -> String {
        self.ops.iter().map(|o| o.symbol()).collect()
    }

    /// Reorders factors by site (stable, so same-site order is preserved).
    pub fn canonical(&self) -> Self {
        let mut idx: Vec<usize> = (0..self.ops.len()).collect();
        idx.sort_by_key(|&i| self.sites[i]);
        Self {
            ops: idx.iter().map(|&i| self.ops[i]).collect(),
            sites: idx.iter().map(|&i| self.sites[i]).collect(),
            coeff: self.coeff,
        }
    }

    pub fn dagger(&self) -> Self {
        let ops = self.ops.iter().rev().map(|o| o.dagger()).collect();
        let sites = self.sites.iter().rev().copied().collect();
        Self { ops, sites, coeff: self.coeff.conj() }.canonical()
    }
}

/// Named sum of operator terms acting on a chain of `n_sites` spins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermList {
    pub name: String,
    pub spin: Spin,
    pub n_sites: usize,
    pub terms: Vec<OperatorTerm>,
}

impl TermList {
    pub fn new(name: impl Into<String>, spin: Spin, n_sites: usize) -> Self {
        Self { name: name.into(), spin, n_sites, terms: Vec::new() }
    }

    pub fn push(&mut self, t: OperatorTerm) {
        self.terms.push(t);
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.coeff *= s;
        }
        out
    }

    /// `self + s * other`.
    pub fn plus(&self, s: f64, other: &TermList) -> Self {
        let mut out = self.clone();
        out.terms.extend(other.scaled(s).terms);
        out
    }

    /// Merges terms with identical canonical operator strings and drops
    /// coefficients below `tol`.
    pub fn simplified(&self, tol: f64) -> Self {
        let mut acc: BTreeMap<(Vec<usize>, Vec<SiteOp>), C64> = BTreeMap::new();
        for t in &self.terms {
            let c = t.canonical();
            *acc.entry((c.sites, c.ops)).or_insert(C64::new(0.0, 0.0)) += c.coeff;
        }
        let terms = acc
            .into_iter()
            .filter(|(_, c)| c.norm() > tol)
            .map(|((sites, ops), coeff)| OperatorTerm { ops, sites, coeff })
            .collect();
        Self { name: self.name.clone(), spin: self.spin, n_sites: self.n_sites, terms }
    }

    pub fn max_site(&self) -> usize {
        self.terms.iter().flat_map(|t| t.sites.iter().copied()).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    IsingHalf,
    IsingOne,
    HeisenbergOne,
    Lmg,
}

impl ModelKind {
    pub fn spin(self) -> Spin {
        match self {
            ModelKind::IsingHalf | ModelKind::Lmg => Spin::Half,
            ModelKind::IsingOne | ModelKind::HeisenbergOne => Spin::One,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "ising_half" => Ok(ModelKind::IsingHalf),
            "ising_one" => Ok(ModelKind::IsingOne),
            "heisenberg_one" => Ok(ModelKind::HeisenbergOne),
            "lmg" => Ok(ModelKind::Lmg),
            _ => Err(Error::Config(format!("unknown model '{s}'"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::IsingHalf => "ising_half",
            ModelKind::IsingOne => "ising_one",
            ModelKind::HeisenbergOne => "heisenberg_one",
            ModelKind::Lmg => "lmg",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub n_sites: usize,
    #[serde(default)]
    pub couplings: BTreeMap<String, f64>,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, n_sites: usize) -> Self {
        Self { kind, n_sites, couplings: BTreeMap::new() }
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.couplings.insert(name.to_string(), value);
        self
    }

    pub fn spin(&self) -> Spin {
        self.kind.spin()
    }

    /// Coupling value, falling back to the model's standard parameters.
    pub fn coupling(&self, name: &str) -> Result<f64> {
        if let Some(v) = self.couplings.get(name) {
            return Ok(*v);
        }
        let default = match (self.kind, name) {
            (_, "J") => 1.0,
            (ModelKind::IsingHalf | ModelKind::IsingOne, "h_x") => 0.9045,
            (ModelKind::IsingHalf | ModelKind::IsingOne, "h_z") => 0.809,
            (ModelKind::HeisenbergOne, "Delta") => 0.5,
            (ModelKind::Lmg, "h") => 0.5,
            _ => return Err(Error::Config(format!("model {} has no coupling '{name}'", self.kind))),
        };
        Ok(default)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 1 {
            return Err(Error::Config("n_sites must be positive".into()));
        }
        for (k, v) in &self.couplings {
            if !v.is_finite() {
                return Err(Error::Config(format!("coupling {k} is not finite")));
            }
        }
        Ok(())
    }
}

/// Canonical spelling of a catalog label; accepts typographic variants.
pub fn canonical_label(label: &str) -> String {
    let l = label.trim().replace('\u{2212}', "-").replace(' ', "");
    match l.as_str() {
        "X\u{302}Y" | "XhatY" | "hat(XY)" => "hatXY".into(),
        "Z\u{302}Y" | "ZhatY" | "hat(ZY)" => "hatZY".into(),
        _ => l,
    }
}

fn bonds(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).map(move |i| (i, (i + 1) % n))
}

fn chain_sum(name: &str, spin: Spin, n: usize, opstr: &str, c: f64) -> TermList {
    let mut tl = TermList::new(name, spin, n);
    for i in 0..n {
        tl.push(OperatorTerm::real(opstr, &[i], c));
    }
    tl
}

fn bond_sum(name: &str, spin: Spin, n: usize, opstr: &str, c: f64) -> TermList {
    let mut tl = TermList::new(name, spin, n);
    for (i, j) in bonds(n) {
        tl.push(OperatorTerm::real(opstr, &[j, i], c));
    }
    tl
}

fn onsite_sum(name: &str, spin: Spin, n: usize, a: &str, b: &str) -> TermList {
    let mut tl = TermList::new(name, spin, n);
    for i in 0..n {
        tl.push(OperatorTerm::real(&format!("{a}{b}"), &[i, i], 1.0));
        tl.push(OperatorTerm::real(&format!("{b}{a}"), &[i, i], 1.0));
    }
    tl
}

fn require_spin_one(label: &str, spin: Spin) -> Result<()> {
    if spin != Spin::One {
        return Err(Error::Config(format!("label '{label}' is only defined for spin-1 chains")));
    }
    Ok(())
}

/// Plain operator sums independent of model couplings.
fn generic_term(label: &str, spin: Spin, n: usize) -> Result<Option<TermList>> {
    let tl = match label {
        "X" => chain_sum(label, spin, n, "x", 1.0),
        "Y" => chain_sum(label, spin, n, "y", 1.0),
        "Z" => chain_sum(label, spin, n, "z", 1.0),
        "Z|Z" => bond_sum(label, spin, n, "zz", 1.0),
        "X|X" => bond_sum(label, spin, n, "xx", 1.0),
        "Y|Y" => bond_sum(label, spin, n, "yy", 1.0),
        "X|Y" => bond_sum(label, spin, n, "xy", 1.0).plus(1.0, &bond_sum(label, spin, n, "yx", 1.0)),
        "Y|Z" => bond_sum(label, spin, n, "zy", 1.0).plus(1.0, &bond_sum(label, spin, n, "yz", 1.0)),
        "XY" => {
            require_spin_one(label, spin)?;
            onsite_sum(label, spin, n, "x", "y")
        }
        "YZ" => {
            require_spin_one(label, spin)?;
            onsite_sum(label, spin, n, "y", "z")
        }
        "X|Y-XY" => {
            require_spin_one(label, spin)?;
            let (a, _) = mixing_constants();
            generic_term("X|Y", spin, n)?.unwrap().plus(-a, &generic_term("XY", spin, n)?.unwrap())
        }
        "Y|Z-YZ" => {
            require_spin_one(label, spin)?;
            let (_, b) = mixing_constants();
            generic_term("Y|Z", spin, n)?.unwrap().plus(-b, &generic_term("YZ", spin, n)?.unwrap())
        }
        "hatXY" | "hatZY" => {
            if spin != Spin::Half {
                return Err(Error::Config(format!("label '{label}' is only defined for spin-1/2")));
            }
            let inv = 1.0 / n as f64;
            let mut tl = TermList::new(label, spin, n);
            for i in 0..n {
                for j in 0..n {
                    if label == "hatXY" {
                        tl.push(OperatorTerm::real("xy", &[i, j], inv));
                        tl.push(OperatorTerm::real("yx", &[i, j], inv));
                    } else {
                        tl.push(OperatorTerm::real("zy", &[i, j], inv));
                        tl.push(OperatorTerm::real("Iy", &[i, j], 0.5 * inv));
                        tl.push(OperatorTerm::real("yz", &[i, j], inv));
                        tl.push(OperatorTerm::real("yI", &[i, j], 0.5 * inv));
                    }
                }
            }
            tl
        }
        _ => return Ok(None),
    };
    Ok(Some(TermList { name: label.to_string(), ..tl }))
}

/// Resolves a named term (model Hamiltonian pieces, basis rotations and
/// gauge-potential terms) into its coupling list for the given model.
pub fn catalog(label: &str, model: &ModelSpec) -> Result<TermList> {
    model.validate()?;
    let label = canonical_label(label);
    let spin = model.spin();
    let n = model.n_sites;
    let j = model.coupling("J")?;
    let named = |tl: TermList| TermList { name: label.clone(), ..tl };
    let tl = match (model.kind, label.as_str()) {
        (_, "Z|Z+Z") => named(bond_sum("", spin, n, "zz", j).plus(model.coupling("h_z")?, &chain_sum("", spin, n, "z", 1.0))),
        (_, "Z|Z+X") => named(bond_sum("", spin, n, "zz", j).plus(model.coupling("h_x")?, &chain_sum("", spin, n, "x", 1.0))),
        (_, "X|X+Y|Y") => named(bond_sum("", spin, n, "xx", j).plus(j, &bond_sum("", spin, n, "yy", 1.0))),
        (ModelKind::IsingHalf, "H1") => catalog("Z|Z+Z", model)?,
        (ModelKind::IsingHalf, "H2") => chain_sum("", spin, n, "x", model.coupling("h_x")?),
        (ModelKind::IsingOne, "H1") => catalog("Z|Z+X", model)?,
        (ModelKind::IsingOne, "H2") => chain_sum("", spin, n, "z", model.coupling("h_z")?),
        (ModelKind::HeisenbergOne, "H1") => catalog("X|X+Y|Y", model)?,
        (ModelKind::HeisenbergOne, "H2") => bond_sum("", spin, n, "zz", model.coupling("Delta")?),
        (ModelKind::Lmg, "H1") => {
            let mut tl = TermList::new("", spin, n);
            let c = -j / n as f64;
            for a in 0..n {
                for b in 0..n {
                    tl.push(OperatorTerm::real("xx", &[a, b], c));
                }
            }
            tl
        }
        (ModelKind::Lmg, "H2") => chain_sum("", spin, n, "z", 1.0).plus(0.5, &chain_sum("", spin, n, "I", 1.0)),
        _ => match generic_term(&label, spin, n)? {
            Some(tl) => tl,
            None => return Err(Error::Config(format!("unknown operator label '{label}' for model {}", model.kind))),
        },
    };
    Ok(TermList { name: label.clone(), ..tl })
}

/// Target Hamiltonian `H1 + H2` for chains, `H1 + h H2` for the LMG model.
pub fn target_hamiltonian(model: &ModelSpec) -> Result<TermList> {
    let h1 = catalog("H1", model)?;
    let h2 = catalog("H2", model)?;
    let w = if model.kind == ModelKind::Lmg { model.coupling("h")? } else { 1.0 };
    Ok(TermList { name: "H".into(), ..h1.plus(w, &h2) })
}

/// Hilbert-Schmidt projection constants `(a, b)` that orthogonalize the
/// two-site `X|Y`, `Y|Z` terms against their on-site counterparts, evaluated
/// on a periodic spin-1 chain of three sites.
pub fn mixing_constants() -> (f64, f64) {
    static AB: OnceLock<(f64, f64)> = OnceLock::new();
    *AB.get_or_init(|| {
        let basis = build_sector(3, Spin::One, SymmetrySpec::full()).expect("full basis");
        let dense = |label: &str| {
            let tl = generic_term(label, Spin::One, 3).unwrap().unwrap();
            build_matrix(&tl, &basis).unwrap().to_dense()
        };
        let proj = |pair: &str, site: &str| {
            let p = dense(pair);
            let s = dense(site);
            let num = (s.adjoint() * &p).trace().re;
            let den = (s.adjoint() * &s).trace().re;
            num / den
        };
        (proj("X|Y", "XY"), proj("Y|Z", "YZ"))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ladder {
    Z,
    Plus,
    Minus,
}

/// Ladder-operator expansion of a term list: each entry maps a basis
/// configuration to at most one configuration.
#[derive(Debug, Clone)]
pub(crate) struct CompiledTerms {
    terms: Vec<(C64, Vec<(usize, Ladder)>)>,
    spin: Spin,
    pow: Vec<u64>,
}

impl CompiledTerms {
    pub(crate) fn new(tl: &TermList) -> Result<Self> {
        let d = tl.spin.local_dim() as u64;
        let n = tl.n_sites;
        if tl.terms.iter().any(|t| t.sites.iter().any(|&s| s >= n)) {
            return Err(Error::Config(format!("term list '{}' references a site outside 0..{n}", tl.name)));
        }
        let half = C64::new(0.5, 0.0);
        let mut out: Vec<(C64, Vec<(usize, Ladder)>)> = Vec::new();
        for t in &tl.terms {
            let mut partial: Vec<(C64, Vec<(usize, Ladder)>)> = vec![(t.coeff, Vec::new())];
            for (op, &site) in t.ops.iter().zip(&t.sites) {
                let choices: Vec<(C64, Ladder)> = match op {
                    SiteOp::Id => continue,
                    SiteOp::Z => vec![(C64::new(1.0, 0.0), Ladder::Z)],
                    SiteOp::Plus => vec![(C64::new(1.0, 0.0), Ladder::Plus)],
                    SiteOp::Minus => vec![(C64::new(1.0, 0.0), Ladder::Minus)],
                    SiteOp::X => vec![(half, Ladder::Plus), (half, Ladder::Minus)],
                    SiteOp::Y => vec![(C64::new(0.0, -0.5), Ladder::Plus), (C64::new(0.0, 0.5), Ladder::Minus)],
                };
                partial = partial
                    .into_iter()
                    .flat_map(|(c, ops)| {
                        choices.iter().map(move |(cc, l)| {
                            let mut o = ops.clone();
                            o.push((site, *l));
                            (c * cc, o)
                        })
                    })
                    .collect();
            }
            for (c, ops) in partial {
                if let Some(e) = out.iter_mut().find(|e| e.1 == ops) {
                    e.0 += c;
                } else {
                    out.push((c, ops));
                }
            }
        }
        out.retain(|e| e.0.norm() > 0.0);
        let pow = (0..n).map(|i| d.pow(i as u32)).collect();
        Ok(Self { terms: out, spin: tl.spin, pow })
    }

    /// Calls `f(config', amplitude)` for every nonzero image of `config`.
    pub(crate) fn apply(&self, config: u64, mut f: impl FnMut(u64, C64)) {
        let d = self.spin.local_dim() as u64;
        let s = self.spin.value();
        let ss1 = s * (s + 1.0);
        'term: for (coeff, ops) in &self.terms {
            let mut c = config;
            let mut amp = *coeff;
            for &(site, l) in ops.iter().rev() {
                let p = self.pow[site];
                let k = (c / p) % d;
                let m = s - k as f64;
                match l {
                    Ladder::Z => amp *= m,
                    Ladder::Plus => {
                        if k == 0 {
                            continue 'term;
                        }
                        amp *= (ss1 - m * (m + 1.0)).sqrt();
                        c -= p;
                    }
                    Ladder::Minus => {
                        if k + 1 == d {
                            continue 'term;
                        }
                        amp *= (ss1 - m * (m - 1.0)).sqrt();
                        c += p;
                    }
                }
                if amp.norm() == 0.0 {
                    continue 'term;
                }
            }
            f(c, amp);
        }
    }
}

/// Sparse matrix of `terms` in `basis`. Entries are projected onto the
/// symmetric basis states as `<r'|H|r>`, with `|r>` the normalized orbit sum.
pub fn build_matrix(terms: &TermList, basis: &SectorBasis) -> Result<CsrMatrix> {
    if terms.spin != basis.spin || terms.n_sites != basis.n_sites {
        return Err(Error::Dimension(format!(
            "term list '{}' (spin {:?}, N={}) does not fit basis (spin {:?}, N={})",
            terms.name, terms.spin, terms.n_sites, basis.spin, basis.n_sites
        )));
    }
    let compiled = CompiledTerms::new(terms)?;
    let dim = basis.dim();
    let mut acc = vec![C64::new(0.0, 0.0); dim];
    let mut seen = vec![false; dim];
    let mut touched: Vec<usize> = Vec::new();
    let mut trip = Vec::new();
    for r in 0..dim {
        let orbit = basis.orbit(r)?;
        let nr = basis.norms[r];
        for &c in orbit {
            compiled.apply(c, |c2, amp| {
                let r2 = basis.index_of_config(c2);
                if !seen[r2] {
                    seen[r2] = true;
                    touched.push(r2);
                }
                acc[r2] += amp / (nr * basis.norms[r2]);
            });
        }
        for &r2 in &touched {
            trip.push((r2, r, acc[r2]));
            acc[r2] = C64::new(0.0, 0.0);
            seen[r2] = false;
        }
        touched.clear();
    }
    Ok(CsrMatrix::from_triplets(dim, trip, 1e-14))
}

/// Lowest-energy eigenspace of a Hermitian operator.
#[derive(Debug, Clone)]
pub struct GroundManifold {
    pub energies: Vec<f64>,
    pub states: Vec<Vec<C64>>,
}

impl GroundManifold {
    pub fn energy(&self) -> f64 {
        self.energies[0]
    }

    pub fn degenerate(&self) -> bool {
        self.states.len() > 1
    }
}

/// Splitting below which eigenvalues count as one degenerate level.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// Ground state via restarted Lanczos; degenerate partners within
/// [`DEGENERACY_TOL`] are returned as an orthonormal manifold.
pub fn ground_state(h: &CsrMatrix, opts: EigOptions) -> Result<GroundManifold> {
    let dim = h.dim();
    if dim == 0 {
        return Err(Error::Dimension("empty operator".into()));
    }
    let mut k = 2.min(dim);
    loop {
        let pairs = lowest_eigenpairs(h, k, opts)?;
        let e0 = pairs[0].0;
        let inside = pairs.iter().filter(|p| p.0 - e0 < DEGENERACY_TOL).count();
        if inside < k || k == dim || k >= 8 {
            let (energies, states): (Vec<f64>, Vec<Vec<C64>>) =
                pairs.into_iter().take(inside).unzip();
            return Ok(GroundManifold { energies, states });
        }
        k += 1;
    }
}
