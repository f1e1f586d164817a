//! Dense reference constructions shared by the integration tests. Everything
//! here is built from explicit Kronecker products and textbook formulas,
//! independently of the sparse machinery under test.

#![allow(dead_code)]

use cdqaoa::linalg::{CsrMatrix, C64};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;

pub type CMat = DMatrix<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Local spin matrices `(S^x, S^y, S^z)` for local dimension 2 or 3, in the
/// basis ordered from the largest `S^z` eigenvalue down.
pub fn local_spin(d: usize) -> (CMat, CMat, CMat) {
    match d {
        2 => (
            CMat::from_row_slice(2, 2, &[c(0., 0.), c(0.5, 0.), c(0.5, 0.), c(0., 0.)]),
            CMat::from_row_slice(2, 2, &[c(0., 0.), c(0., -0.5), c(0., 0.5), c(0., 0.)]),
            CMat::from_row_slice(2, 2, &[c(0.5, 0.), c(0., 0.), c(0., 0.), c(-0.5, 0.)]),
        ),
        3 => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let z = c(0., 0.);
            (
                CMat::from_row_slice(3, 3, &[z, c(s, 0.), z, c(s, 0.), z, c(s, 0.), z, c(s, 0.), z]),
                CMat::from_row_slice(3, 3, &[z, c(0., -s), z, c(0., s), z, c(0., -s), z, c(0., s), z]),
                CMat::from_row_slice(3, 3, &[c(1., 0.), z, z, z, z, z, z, z, c(-1., 0.)]),
            )
        }
        _ => panic!("unsupported local dimension {d}"),
    }
}

pub fn local_op(d: usize, which: char) -> CMat {
    let (x, y, z) = local_spin(d);
    match which {
        'x' => x,
        'y' => y,
        'z' => z,
        'I' => CMat::identity(d, d),
        _ => panic!("unknown local operator {which}"),
    }
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Product of single-site operators on an `n`-site chain. Site 0 is the
/// least significant digit of the configuration index, so it is the
/// rightmost Kronecker factor. Repeated sites multiply in the given order.
pub fn site_product(d: usize, n: usize, ops: &[(char, usize)]) -> CMat {
    let mut factors: Vec<CMat> = vec![CMat::identity(d, d); n];
    for &(o, s) in ops {
        factors[s] = &factors[s] * local_op(d, o);
    }
    let mut m = CMat::identity(1, 1);
    for s in (0..n).rev() {
        m = kron(&m, &factors[s]);
    }
    m
}

pub fn zeros(dim: usize) -> CMat {
    CMat::zeros(dim, dim)
}

/// `sum_i O_i` over all sites.
pub fn field(d: usize, n: usize, o: char) -> CMat {
    let dim = d.pow(n as u32);
    (0..n).fold(zeros(dim), |acc, i| acc + site_product(d, n, &[(o, i)]))
}

/// `sum_i A_{i+1} B_i` over periodic bonds.
pub fn bond(d: usize, n: usize, a: char, b: char) -> CMat {
    let dim = d.pow(n as u32);
    (0..n).fold(zeros(dim), |acc, i| acc + site_product(d, n, &[(a, (i + 1) % n), (b, i)]))
}

/// `sum_i (A_i B_i + B_i A_i)`.
pub fn onsite_sym(d: usize, n: usize, a: char, b: char) -> CMat {
    let dim = d.pow(n as u32);
    (0..n).fold(zeros(dim), |acc, i| acc + site_product(d, n, &[(a, i), (b, i)]) + site_product(d, n, &[(b, i), (a, i)]))
}

pub fn scaled(m: &CMat, s: f64) -> CMat {
    m * c(s, 0.)
}

/// Matrix exponential `exp(A)` by scaling and squaring of a Taylor series.
pub fn expm(a: &CMat) -> CMat {
    let norm1 = (0..a.ncols()).map(|j| a.column(j).iter().map(|x| x.norm()).sum::<f64>()).fold(0.0, f64::max);
    let s = if norm1 > 0.25 { (norm1 / 0.25).log2().ceil() as i32 } else { 0 };
    let b = a * c(0.5f64.powi(s), 0.);
    let n = a.nrows();
    let mut result = CMat::identity(n, n);
    let mut term = CMat::identity(n, n);
    for k in 1..30 {
        term = &term * &b * c(1.0 / k as f64, 0.);
        result += &term;
    }
    for _ in 0..s {
        result = &result * &result;
    }
    result
}

/// `exp(-i t H)`.
pub fn unitary(h: &CMat, t: f64) -> CMat {
    expm(&(h * c(0., -t)))
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    (a - b).iter().map(|x| x.norm()).fold(0.0, f64::max)
}

pub fn vec_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn dvec(v: &[C64]) -> DVector<C64> {
    DVector::from_column_slice(v)
}

pub fn random_state(rng: &mut impl Rng, dim: usize) -> Vec<C64> {
    let mut v: Vec<C64> = (0..dim).map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
    let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= n);
    v
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn eigenvalues(h: &CMat) -> Vec<f64> {
    let mut e: Vec<f64> = SymmetricEigen::new(h.clone()).eigenvalues.iter().copied().collect();
    e.sort_by(|a, b| a.partial_cmp(b).unwrap());
    e
}

/// Von Neumann entropy of the subsystem made of the `side`-dimensional
/// least significant factor, from the explicitly traced density matrix.
pub fn partial_trace_entropy(psi: &[C64], side: usize) -> f64 {
    let rest = psi.len() / side;
    let mut rho = CMat::zeros(side, side);
    for a in 0..side {
        for a2 in 0..side {
            let mut s = c(0., 0.);
            for b in 0..rest {
                s += psi[a + side * b] * psi[a2 + side * b].conj();
            }
            rho[(a, a2)] = s;
        }
    }
    -eigenvalues(&rho).iter().filter(|&&p| p > 1e-300).map(|p| p * p.ln()).sum::<f64>()
}

/// Dense copy of a sparse matrix, entry by entry.
pub fn dense(m: &CsrMatrix) -> CMat {
    let mut out = zeros(m.dim());
    for (i, j, v) in m.iter() {
        out[(i, j)] += v;
    }
    out
}

pub fn sparse(m: &CMat) -> CsrMatrix {
    let mut trip = Vec::new();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if m[(i, j)].norm() > 0.0 {
                trip.push((i, j, m[(i, j)]));
            }
        }
    }
    CsrMatrix::from_triplets(m.nrows(), trip, 0.0)
}

/// Permutation matrix of the map `config -> f(config)` on `d^n` states.
pub fn permutation(dim: usize, f: impl Fn(usize) -> usize) -> CMat {
    let mut p = zeros(dim);
    for x in 0..dim {
        p[(f(x), x)] = c(1., 0.);
    }
    p
}

pub fn digits(x: usize, d: usize, n: usize) -> Vec<usize> {
    let mut v = Vec::with_capacity(n);
    let mut y = x;
    for _ in 0..n {
        v.push(y % d);
        y /= d;
    }
    v
}

pub fn from_digits(v: &[usize], d: usize) -> usize {
    v.iter().rev().fold(0, |acc, &k| acc * d + k)
}

/// Projector onto states invariant under all translations and the
/// reflection, built as the group average of permutation matrices.
pub fn symmetric_projector(d: usize, n: usize, translation: bool, reflection: bool) -> CMat {
    let dim = d.pow(n as u32);
    let shifts: Vec<usize> = if translation { (0..n).collect() } else { vec![0] };
    let flips: Vec<bool> = if reflection { vec![false, true] } else { vec![false] };
    let mut p = zeros(dim);
    let mut count = 0.0;
    for &s in &shifts {
        for &r in &flips {
            p += permutation(dim, |x| {
                let mut v = digits(x, d, n);
                if r {
                    v.reverse();
                }
                v.rotate_left(s);
                from_digits(&v, d)
            });
            count += 1.0;
        }
    }
    p * c(1.0 / count, 0.)
}

/// Symmetric (Dicke) states of `n` spin-1/2 sites, indexed by the number of
/// up spins, as columns of a `2^n x (n+1)` matrix.
pub fn dicke_basis(n: usize) -> CMat {
    let dim = 1usize << n;
    let mut m = CMat::zeros(dim, n + 1);
    for x in 0..dim {
        let ups = (0..n).filter(|&i| (x >> i) & 1 == 0).count();
        m[(x, ups)] = c(1., 0.);
    }
    for k in 0..=n {
        let norm = m.column(k).iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let mut col = m.column_mut(k);
        col /= c(norm, 0.);
    }
    m
}

/// `Var(G)` in the ground state of `h`, with `G = dh + i beta [S^y, h]`.
pub fn direct_action(h: &CMat, dh: &CMat, sy: &CMat, beta: f64) -> f64 {
    let eig = nalgebra::SymmetricEigen::new(h.clone());
    let k = eig.eigenvalues.imin();
    let v = eig.eigenvectors.column(k).into_owned();
    let g = dh + (sy * h - h * sy) * c(0., beta);
    let mean = (v.adjoint() * &g * &v)[(0, 0)].re;
    let sq = (v.adjoint() * &g * &g * &v)[(0, 0)].re;
    sq - mean * mean
}

/// Golden-section minimum of a unimodal function on `[a, b]`.
pub fn golden_minimum(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > 1e-10 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
    }
    0.5 * (a + b)
}

/// Gauge coefficient minimizing `direct_action`: a coarse scan on
/// `[-20, 20]` refined by golden section.
pub fn scalar_gauge_oracle(h: &CMat, dh: &CMat, sy: &CMat) -> f64 {
    let action = |b: f64| direct_action(h, dh, sy, b);
    let coarse = (0..801)
        .map(|k| -20.0 + 0.05 * k as f64)
        .min_by(|a, b| action(*a).total_cmp(&action(*b)))
        .unwrap();
    golden_minimum(action, coarse - 0.1, coarse + 0.1)
}

/// Relative 2-norm error of the analytic clipped-surrogate gradient against
/// central differences with step `1e-6`.
pub fn ppo_fd_error(net: &cdqaoa::rl_policy::PolicyNet, batch: &[cdqaoa::rl_policy::PpoSample], eps: f64, ent: f64) -> f64 {
    use cdqaoa::rl_policy::{ppo_gradient, ppo_objective};
    let (_, g) = ppo_gradient(net, batch, eps, ent);
    let h = 1e-6;
    let fd: Vec<f64> = (0..net.params.len())
        .map(|k| {
            let mut plus = net.clone();
            plus.params[k] += h;
            let mut minus = net.clone();
            minus.params[k] -= h;
            (ppo_objective(&plus, batch, eps, ent) - ppo_objective(&minus, batch, eps, ent)) / (2.0 * h)
        })
        .collect();
    let diff = g.iter().zip(&fd).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    diff / fd.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-3)
}

/// Adds alternating-sign offsets of size `0.05..0.5` to every free
/// parameter, moving idle hidden units off the ReLU kink.
pub fn jitter_params(net: &mut cdqaoa::rl_policy::PolicyNet, rng: &mut impl Rng) {
    for k in 0..net.params.len() {
        if net.is_free(k) {
            net.params[k] += rng.gen_range(0.05..0.5) * if k % 2 == 0 { 1.0 } else { -1.0 };
        }
    }
}
