//! Differentiation stencils: Fornberg finite-difference weights, periodic
//! (spectral or 4th-order) differentiation matrices, and the one-dimensional
//! stencil tables used along the height direction.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::Matrix;

/// Finite-difference weights at `z` for nodes `xs`, for derivative orders
/// `0..=max_order` (Fornberg's recursion). Returns `w[k][i]`.
pub fn fornberg_weights(z: f64, xs: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - z;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// How derivatives are taken along a periodic angular direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PeriodicScheme {
    /// Differentiation of the trigonometric interpolant.
    #[default]
    Spectral,
    /// 4th-order central differences.
    Central4,
}

/// First and second derivative matrices on the uniform periodic grid
/// `θ_k = 2πk/n`.
#[derive(Debug, Clone)]
pub struct PeriodicDiff {
    scheme: PeriodicScheme,
    d1: Matrix,
    d2: Matrix,
}

impl PeriodicDiff {
    pub fn new(n: usize, scheme: PeriodicScheme) -> Self {
        let (d1, d2) = match scheme {
            PeriodicScheme::Spectral => spectral_matrices(n),
            PeriodicScheme::Central4 => central4_matrices(n),
        };
        Self { scheme, d1, d2 }
    }

    pub fn scheme(&self) -> PeriodicScheme {
        self.scheme
    }

    pub fn len(&self) -> usize {
        self.d1.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn d1(&self) -> &Matrix {
        &self.d1
    }

    pub fn d2(&self) -> &Matrix {
        &self.d2
    }

    pub fn first(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        apply_differences(&self.d1, v, &mut out);
        out
    }

    pub fn second(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        apply_differences(&self.d2, v, &mut out);
        out
    }
}

/// `out_i = Σ_j m_ij (v_j − v_i)` for a differentiation matrix, whose rows
/// sum to zero. Rounding then scales with the variation of `v` rather than
/// its size, and constants map to exactly zero.
pub fn apply_differences(m: &Matrix, v: &[f64], out: &mut [f64]) {
    for (i, o) in out.iter_mut().enumerate() {
        let vi = v[i];
        *o = m.row(i).iter().zip(v).map(|(w, x)| w * (x - vi)).sum();
    }
}

fn spectral_matrices(n: usize) -> (Matrix, Matrix) {
    let h = 2.0 * PI / n as f64;
    let sign = |k: usize| if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let offset = |i: usize, j: usize| (i + n - j) % n;
    if n.is_multiple_of(2) {
        let d1 = Matrix::from_fn(n, n, |i, j| {
            let k = offset(i, j);
            if k == 0 {
                0.0
            } else {
                0.5 * sign(k) / (0.5 * k as f64 * h).tan()
            }
        });
        let d2 = Matrix::from_fn(n, n, |i, j| {
            let k = offset(i, j);
            if k == 0 {
                -PI * PI / (3.0 * h * h) - 1.0 / 6.0
            } else {
                let s = (0.5 * k as f64 * h).sin();
                -0.5 * sign(k) / (s * s)
            }
        });
        (d1, d2)
    } else {
        let d1 = Matrix::from_fn(n, n, |i, j| {
            let k = offset(i, j);
            if k == 0 {
                0.0
            } else {
                0.5 * sign(k) / (0.5 * k as f64 * h).sin()
            }
        });
        let d2 = d1.mul(&d1);
        (d1, d2)
    }
}

fn central4_matrices(n: usize) -> (Matrix, Matrix) {
    let h = 2.0 * PI / n as f64;
    let w1 = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
    let w2 = [-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0];
    let mut d1 = Matrix::zeros(n, n);
    let mut d2 = Matrix::zeros(n, n);
    for i in 0..n {
        for (s, (a, b)) in w1.iter().zip(&w2).enumerate() {
            let j = (i + n + s - 2) % n;
            d1[(i, j)] += a / h;
            d2[(i, j)] += b / (h * h);
        }
    }
    (d1, d2)
}

/// A stencil evaluated at one node of a uniform 1-D grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RowStencil {
    /// Index of the first node the stencil touches.
    pub start: usize,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
}

impl RowStencil {
    pub fn end(&self) -> usize {
        self.start + self.d1.len()
    }
}

/// Accuracy order of the height-direction stencils.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StencilOrder {
    Second,
    Fourth,
    #[default]
    Sixth,
}

impl StencilOrder {
    pub fn order(self) -> usize {
        match self {
            StencilOrder::Second => 2,
            StencilOrder::Fourth => 4,
            StencilOrder::Sixth => 6,
        }
    }

    pub fn from_order(p: usize) -> Option<Self> {
        match p {
            2 => Some(StencilOrder::Second),
            4 => Some(StencilOrder::Fourth),
            6 => Some(StencilOrder::Sixth),
            _ => None,
        }
    }
}

/// Stencils for every node `0..=intervals` of a uniform grid with spacing
/// `dt`: centered where they fit, one-sided with one extra point otherwise.
#[derive(Debug, Clone)]
pub struct LineStencils {
    order: StencilOrder,
    dt: f64,
    rows: Vec<RowStencil>,
}

impl LineStencils {
    pub fn new(intervals: usize, dt: f64, order: StencilOrder) -> Self {
        let p = order.order();
        assert!(intervals > p + 1, "grid too short for the requested stencil order");
        let half = p / 2;
        let rows = (0..=intervals)
            .map(|j| {
                let (start, len) = if j >= half && j + half <= intervals {
                    (j - half, p + 1)
                } else if j < half {
                    (0, p + 2)
                } else {
                    (intervals - p - 1, p + 2)
                };
                let xs: Vec<f64> = (start..start + len).map(|k| k as f64 * dt).collect();
                let w = fornberg_weights(j as f64 * dt, &xs, 2);
                RowStencil { start, d1: w[1].clone(), d2: w[2].clone() }
            })
            .collect();
        Self { order, dt, rows }
    }

    pub fn order(&self) -> StencilOrder {
        self.order
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn row(&self, j: usize) -> &RowStencil {
        &self.rows[j]
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Derivatives are formed from differences `v_k − v_j`, as in
    /// [`apply_differences`].
    pub fn first(&self, v: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .enumerate()
            .map(|(j, r)| r.d1.iter().zip(&v[r.start..r.end()]).map(|(w, x)| w * (x - v[j])).sum())
            .collect()
    }

    pub fn second(&self, v: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .enumerate()
            .map(|(j, r)| r.d2.iter().zip(&v[r.start..r.end()]).map(|(w, x)| w * (x - v[j])).sum())
            .collect()
    }
}
