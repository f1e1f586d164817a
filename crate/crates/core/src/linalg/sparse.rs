//! Compressed sparse row storage for complex Hermitian operators.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C64 = Complex64;

/// Square complex matrix in CSR layout.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl CsrMatrix {
    /// Builds from (row, col, value) triplets, summing duplicates and dropping
    /// entries whose magnitude is at most `drop_tol`.
    pub fn from_triplets(dim: usize, mut trip: Vec<(usize, usize, C64)>, drop_tol: f64) -> Self {
        trip.sort_unstable_by_key(|a| (a.0, a.1));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(trip.len());
        let mut vals: Vec<C64> = Vec::with_capacity(trip.len());
        let mut i = 0;
        while i < trip.len() {
            let (r, c, mut v) = trip[i];
            let mut j = i + 1;
            while j < trip.len() && trip[j].0 == r && trip[j].1 == c {
                v += trip[j].2;
                j += 1;
            }
            if v.norm() > drop_tol {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
            }
            i = j;
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self { dim, row_ptr, cols, vals }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, row_ptr: vec![0; dim + 1], cols: Vec::new(), vals: Vec::new() }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_triplets(dim, (0..dim).map(|i| (i, i, C64::new(1.0, 0.0))).collect(), 0.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Diagonal entries when the matrix has no off-diagonal entries.
    pub fn diagonal(&self) -> Option<Vec<C64>> {
        let mut d = vec![C64::new(0.0, 0.0); self.dim];
        for (r, c, v) in self.iter() {
            if r != c {
                return None;
            }
            d[r] = v;
        }
        Some(d)
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.cols[k], self.vals[k]))
        })
    }

    /// `y = A x`.
    pub fn matvec_into(&self, x: &[C64], y: &mut [C64]) {
        debug_assert_eq!(x.len(), self.dim);
        for r in 0..self.dim {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            y[r] = acc;
        }
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.dim];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        for v in &mut out.vals {
            *v *= s;
        }
        out
    }

    /// Sum of `coef_k * A_k`. All matrices must share a dimension.
    pub fn linear_combination(terms: &[(f64, &CsrMatrix)]) -> Self {
        let dim = terms.first().map(|t| t.1.dim).unwrap_or(0);
        let mut trip = Vec::with_capacity(terms.iter().map(|t| t.1.nnz()).sum());
        for (c, m) in terms {
            assert_eq!(m.dim, dim, "dimension mismatch in linear combination");
            if *c == 0.0 {
                continue;
            }
            trip.extend(m.iter().map(|(r, k, v)| (r, k, v * *c)));
        }
        Self::from_triplets(dim, trip, 0.0)
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut d = DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.iter() {
            d[(r, c)] += v;
        }
        d
    }

    /// Hilbert-Schmidt norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.vals.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest absolute row sum; an upper bound on the spectral norm.
    pub fn inf_norm(&self) -> f64 {
        (0..self.dim)
            .map(|r| (self.row_ptr[r]..self.row_ptr[r + 1]).map(|k| self.vals[k].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Max deviation `|A_ij - conj(A_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.to_dense_if_small();
        match d {
            Some(d) => {
                let mut m: f64 = 0.0;
                for i in 0..self.dim {
                    for j in 0..self.dim {
                        m = m.max((d[(i, j)] - d[(j, i)].conj()).norm());
                    }
                }
                m
            }
            None => {
                let t = self.adjoint();
                let diff = CsrMatrix::linear_combination(&[(1.0, self), (-1.0, &t)]);
                diff.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
            }
        }
    }

    fn to_dense_if_small(&self) -> Option<DMatrix<C64>> {
        (self.dim <= 64).then(|| self.to_dense())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.dim, self.iter().map(|(r, c, v)| (c, r, v.conj())).collect(), 0.0)
    }
}

pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn axpy(alpha: C64, x: &[C64], y: &mut [C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scale_in_place(s: f64, x: &mut [C64]) {
    for v in x {
        *v *= s;
    }
}

pub fn normalize(x: &mut [C64]) -> f64 {
    let n = norm(x);
    if n > 0.0 {
        scale_in_place(1.0 / n, x);
    }
    n
}
