//! Small dense linear algebra: row-major matrices, LU with partial
//! pivoting, a block-tridiagonal factorization, and closed-form symmetric
//! 2×2 eigenvalues.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// `y = self · x`
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.rows];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = dot(self.row(i), x);
        }
    }

    /// `self · other`
    pub fn mul(&self, other: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.rows, other.cols);
        self.mul_add_into(other, 1.0, &mut out);
        out
    }

    /// `out += alpha · self · other`
    pub fn mul_add_into(&self, other: &Matrix, alpha: f64, out: &mut Matrix) {
        debug_assert_eq!(self.cols, other.rows);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = alpha * self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let src = other.row(k);
                for (o, s) in out.row_mut(i).iter_mut().zip(src) {
                    *o += a * s;
                }
            }
        }
    }

    /// Scales row `i` by `s[i]`.
    pub fn scale_rows(&mut self, s: &[f64]) {
        for (i, &si) in s.iter().enumerate() {
            for v in self.row_mut(i) {
                *v *= si;
            }
        }
    }

    pub fn add_diag(&mut self, d: &[f64]) {
        for (i, &di) in d.iter().enumerate() {
            self[(i, i)] += di;
        }
    }

    pub fn add_scaled(&mut self, other: &Matrix, alpha: f64) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }
}

impl core::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// LU factorization with partial pivoting of a square matrix.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn factor(mut a: Matrix) -> Result<Self> {
        let n = a.rows;
        assert_eq!(n, a.cols, "LU needs a square matrix");
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = a[(k, k)].abs();
            for i in k + 1..n {
                let v = a[(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::Singular);
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
            }
            let pivot = a[(k, k)];
            let (upper, lower) = a.data.split_at_mut((k + 1) * n);
            let pivot_row = &upper[k * n + k + 1..k * n + n];
            for row in lower.chunks_exact_mut(n) {
                let l = row[k] / pivot;
                row[k] = l;
                if l != 0.0 {
                    for (x, &u) in row[k + 1..].iter_mut().zip(pivot_row) {
                        *x -= l * u;
                    }
                }
            }
        }
        Ok(Self { lu: a, perm })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let s = dot(&row[..i], &x[..i]);
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s = dot(&row[i + 1..], &x[i + 1..]);
            x[i] = (x[i] - s) / row[i];
        }
        x
    }

    /// Solves `A X = B` for a matrix right-hand side, operating on whole rows.
    pub fn solve_matrix(&self, b: &Matrix) -> Matrix {
        let n = self.dim();
        let m = b.cols;
        let mut x = Matrix::zeros(n, m);
        for (i, &p) in self.perm.iter().enumerate() {
            x.row_mut(i).copy_from_slice(b.row(p));
        }
        for i in 0..n {
            for k in 0..i {
                let l = self.lu[(i, k)];
                if l == 0.0 {
                    continue;
                }
                let (head, tail) = x.data.split_at_mut(i * m);
                let src = &head[k * m..(k + 1) * m];
                for (d, s) in tail[..m].iter_mut().zip(src) {
                    *d -= l * s;
                }
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let u = self.lu[(i, k)];
                if u == 0.0 {
                    continue;
                }
                let (head, tail) = x.data.split_at_mut(k * m);
                let src = &tail[..m];
                for (d, s) in head[i * m..(i + 1) * m].iter_mut().zip(src) {
                    *d -= u * s;
                }
            }
            let inv = 1.0 / self.lu[(i, i)];
            for v in x.row_mut(i) {
                *v *= inv;
            }
        }
        x
    }
}

/// Factorization of a block-tridiagonal matrix
///
/// ```text
/// D_0 U_0
/// L_1 D_1 U_1
///     ...
///         L_m D_m
/// ```
///
/// stored as the LU of the Schur complements and `X_j = D'_j^{-1} U_j`.
#[derive(Debug, Clone)]
pub struct BlockTridiagonal {
    lus: Vec<Lu>,
    lower: Vec<Matrix>,
    x: Vec<Matrix>,
}

impl BlockTridiagonal {
    /// `lower[0]` and `upper[m-1]` are ignored.
    pub fn factor(lower: Vec<Matrix>, diag: Vec<Matrix>, upper: Vec<Matrix>) -> Result<Self> {
        let m = diag.len();
        assert!(m > 0 && lower.len() == m && upper.len() == m);
        let mut lus = Vec::with_capacity(m);
        let mut xs: Vec<Matrix> = Vec::with_capacity(m);
        for (j, mut d) in diag.into_iter().enumerate() {
            if j > 0 {
                lower[j].mul_add_into(&xs[j - 1], -1.0, &mut d);
            }
            let lu = Lu::factor(d)?;
            if j + 1 < m {
                xs.push(lu.solve_matrix(&upper[j]));
            }
            lus.push(lu);
        }
        Ok(Self { lus, lower, x: xs })
    }

    pub fn blocks(&self) -> usize {
        self.lus.len()
    }

    /// Solves for a right-hand side laid out block after block.
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let m = self.lus.len();
        let n = self.lus[0].dim();
        assert_eq!(rhs.len(), m * n);
        let mut y: Vec<Vec<f64>> = Vec::with_capacity(m);
        for j in 0..m {
            let mut r = rhs[j * n..(j + 1) * n].to_vec();
            if j > 0 {
                let ly = self.lower[j].mul_vec(&y[j - 1]);
                for (a, b) in r.iter_mut().zip(ly) {
                    *a -= b;
                }
            }
            y.push(self.lus[j].solve(&r));
        }
        for j in (0..m - 1).rev() {
            let xy = self.x[j].mul_vec(&y[j + 1]);
            for (a, b) in y[j].iter_mut().zip(xy) {
                *a -= b;
            }
        }
        y.concat()
    }
}

/// Symmetric 2×2 matrix `[[a, b], [b, c]]`.
pub type Sym2 = [[f64; 2]; 2];

/// Eigenvalues of a symmetric 2×2 matrix in ascending order.
pub fn sym2_eigenvalues(m: &Sym2) -> [f64; 2] {
    let mean = 0.5 * (m[0][0] + m[1][1]);
    let half_diff = 0.5 * (m[0][0] - m[1][1]);
    let r = half_diff.hypot(m[0][1]);
    [mean - r, mean + r]
}

pub fn sym2_det(m: &Sym2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

pub fn sym2_inverse(m: &Sym2) -> Sym2 {
    let det = sym2_det(m);
    [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]]
}
