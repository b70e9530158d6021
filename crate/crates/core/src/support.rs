//! Convex bodies through their support functions on the unit sphere:
//! sphere grids, covariant derivatives, the second fundamental form of the
//! boundary, curvatures, and reconstruction of points and of the first and
//! second derivatives of a function whose level sets the slices describe.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{sym2_eigenvalues, sym2_inverse, Matrix, Sym2};
use crate::stencil::{PeriodicDiff, PeriodicScheme};

/// Smallest admissible ratio between the smallest and the largest eigenvalue
/// of `b_ij` over a slice.
pub const CONVEXITY_RATIO: f64 = 1e-10;

const MIN_RESOLUTION: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    /// `θ_k = 2πk/N` on the unit circle.
    Circle,
    /// Colatitude `ϑ_i = (i + ½)π/n_lat`, longitude `ψ_j = 2πj/n_lon`,
    /// with `n_lon = 2 n_lat`. Node index is `i * n_lon + j`.
    LatLong { n_lat: usize, n_lon: usize },
}

/// Discretization of `S^{n-1}` for `n = 2` or `n = 3`.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    dim_n: usize,
    resolution: usize,
    kind: GridKind,
    coords: Vec<[f64; 2]>,
    dirs: Vec<f64>,
    tangents: Vec<f64>,
    diff: Option<PeriodicDiff>,
}

impl SphereGrid {
    /// Builds the default grid: spectral differentiation on the circle, or
    /// the offset latitude-longitude grid on `S²`.
    pub fn new(dim_n: usize, resolution: usize) -> Result<Self> {
        Self::with_scheme(dim_n, resolution, PeriodicScheme::Spectral)
    }

    pub fn with_scheme(dim_n: usize, resolution: usize, scheme: PeriodicScheme) -> Result<Self> {
        if dim_n != 2 && dim_n != 3 {
            return Err(Error::UnsupportedDimension(dim_n));
        }
        if resolution < MIN_RESOLUTION {
            return Err(Error::ResolutionTooSmall(resolution));
        }
        if dim_n == 2 {
            let n = resolution;
            let mut coords = Vec::with_capacity(n);
            let mut dirs = Vec::with_capacity(2 * n);
            let mut tangents = Vec::with_capacity(2 * n);
            for k in 0..n {
                let th = 2.0 * PI * k as f64 / n as f64;
                let (s, c) = th.sin_cos();
                coords.push([th, 0.0]);
                dirs.extend_from_slice(&[c, s]);
                tangents.extend_from_slice(&[-s, c]);
            }
            Ok(Self {
                dim_n,
                resolution,
                kind: GridKind::Circle,
                coords,
                dirs,
                tangents,
                diff: Some(PeriodicDiff::new(n, scheme)),
            })
        } else {
            let n_lat = resolution;
            let n_lon = 2 * resolution;
            let mut coords = Vec::with_capacity(n_lat * n_lon);
            let mut dirs = Vec::with_capacity(3 * n_lat * n_lon);
            let mut tangents = Vec::with_capacity(6 * n_lat * n_lon);
            for i in 0..n_lat {
                let vt = (i as f64 + 0.5) * PI / n_lat as f64;
                let (st, ct) = vt.sin_cos();
                for j in 0..n_lon {
                    let ps = 2.0 * PI * j as f64 / n_lon as f64;
                    let (sp, cp) = ps.sin_cos();
                    coords.push([vt, ps]);
                    dirs.extend_from_slice(&[st * cp, st * sp, ct]);
                    tangents.extend_from_slice(&[ct * cp, ct * sp, -st, -st * sp, st * cp, 0.0]);
                }
            }
            Ok(Self {
                dim_n,
                resolution,
                kind: GridKind::LatLong { n_lat, n_lon },
                coords,
                dirs,
                tangents,
                diff: None,
            })
        }
    }

    pub fn dim_n(&self) -> usize {
        self.dim_n
    }

    /// Number of tangent directions, `n - 1`.
    pub fn rank(&self) -> usize {
        self.dim_n - 1
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Parameter coordinates: `[θ, 0]` on the circle, `[ϑ, ψ]` on `S²`.
    pub fn coords(&self, node: usize) -> [f64; 2] {
        self.coords[node]
    }

    /// Unit direction `Y` at a node.
    pub fn direction(&self, node: usize) -> &[f64] {
        &self.dirs[node * self.dim_n..(node + 1) * self.dim_n]
    }

    /// Coordinate tangent vector `T_i = ∂Y/∂θ_i`.
    pub fn tangent(&self, node: usize, i: usize) -> &[f64] {
        let n = self.dim_n;
        let base = node * (n - 1) * n + i * n;
        &self.tangents[base..base + n]
    }

    /// Diagonal of the round metric in the grid coordinates.
    pub fn metric(&self, node: usize) -> [f64; 2] {
        match self.kind {
            GridKind::Circle => [1.0, 0.0],
            GridKind::LatLong { .. } => {
                let s = self.coords[node][0].sin();
                [1.0, s * s]
            }
        }
    }

    /// Periodic differentiation matrices (circle grids only).
    pub fn periodic(&self) -> Option<&PeriodicDiff> {
        self.diff.as_ref()
    }

    /// Samples `f(Y)` at every node.
    pub fn sample(&self, mut f: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
        (0..self.len()).map(|k| f(self.direction(k))).collect()
    }
}

/// First and second covariant derivatives of a scalar field, in coordinate
/// components.
#[derive(Debug, Clone, PartialEq)]
pub struct CovariantDerivatives {
    pub first: Vec<[f64; 2]>,
    pub second: Vec<Sym2>,
}

/// Lat-long finite differences with the pole crossing: the ghost value
/// across a pole at `(ϑ, ψ)` is `parity * value(ϑ, ψ + π)`.
struct LatLongOps {
    n_lat: usize,
    n_lon: usize,
    d_theta: f64,
    d_psi: f64,
}

impl LatLongOps {
    fn new(n_lat: usize, n_lon: usize) -> Self {
        Self { n_lat, n_lon, d_theta: PI / n_lat as f64, d_psi: 2.0 * PI / n_lon as f64 }
    }

    fn at(&self, f: &[f64], parity: f64, i: isize, j: usize) -> f64 {
        let (n_lat, n_lon) = (self.n_lat as isize, self.n_lon);
        if i < 0 {
            parity * f[((-i - 1) as usize) * n_lon + (j + n_lon / 2) % n_lon]
        } else if i >= n_lat {
            let r = (2 * n_lat - 1 - i) as usize;
            parity * f[r * n_lon + (j + n_lon / 2) % n_lon]
        } else {
            f[i as usize * n_lon + j]
        }
    }

    fn d_theta(&self, f: &[f64], parity: f64) -> Vec<f64> {
        let mut out = vec![0.0; f.len()];
        for i in 0..self.n_lat {
            for j in 0..self.n_lon {
                let ii = i as isize;
                out[i * self.n_lon + j] =
                    (self.at(f, parity, ii + 1, j) - self.at(f, parity, ii - 1, j)) / (2.0 * self.d_theta);
            }
        }
        out
    }

    fn d_theta2(&self, f: &[f64], parity: f64) -> Vec<f64> {
        let mut out = vec![0.0; f.len()];
        let h2 = self.d_theta * self.d_theta;
        for i in 0..self.n_lat {
            for j in 0..self.n_lon {
                let ii = i as isize;
                out[i * self.n_lon + j] = (self.at(f, parity, ii + 1, j) - 2.0 * f[i * self.n_lon + j]
                    + self.at(f, parity, ii - 1, j))
                    / h2;
            }
        }
        out
    }

    fn d_psi(&self, f: &[f64]) -> Vec<f64> {
        let n = self.n_lon;
        let mut out = vec![0.0; f.len()];
        for i in 0..self.n_lat {
            let row = &f[i * n..(i + 1) * n];
            for j in 0..n {
                out[i * n + j] = (row[(j + 1) % n] - row[(j + n - 1) % n]) / (2.0 * self.d_psi);
            }
        }
        out
    }

    fn d_psi2(&self, f: &[f64]) -> Vec<f64> {
        let n = self.n_lon;
        let h2 = self.d_psi * self.d_psi;
        let mut out = vec![0.0; f.len()];
        for i in 0..self.n_lat {
            let row = &f[i * n..(i + 1) * n];
            for j in 0..n {
                out[i * n + j] = (row[(j + 1) % n] - 2.0 * row[j] + row[(j + n - 1) % n]) / h2;
            }
        }
        out
    }
}

fn compute_derivatives(grid: &SphereGrid, h: &[f64]) -> CovariantDerivatives {
    match grid.kind {
        GridKind::Circle => {
            let d = grid.diff.as_ref().expect("circle grids carry a differentiation operator");
            let h1 = d.first(h);
            let h11 = d.second(h);
            CovariantDerivatives {
                first: h1.iter().map(|&v| [v, 0.0]).collect(),
                second: h11.iter().map(|&v| [[v, 0.0], [0.0, 0.0]]).collect(),
            }
        }
        GridKind::LatLong { n_lat, n_lon } => {
            let ops = LatLongOps::new(n_lat, n_lon);
            let h_t = ops.d_theta(h, 1.0);
            let h_p = ops.d_psi(h);
            let h_tt = ops.d_theta2(h, 1.0);
            let h_pp = ops.d_psi2(h);
            // ∂ψ of a scalar keeps its sign across the pole.
            let h_tp = ops.d_theta(&h_p, 1.0);
            let mut first = Vec::with_capacity(h.len());
            let mut second = Vec::with_capacity(h.len());
            for k in 0..h.len() {
                let (s, c) = grid.coords[k][0].sin_cos();
                let m12 = h_tp[k] - c / s * h_p[k];
                let m22 = h_pp[k] + s * c * h_t[k];
                first.push([h_t[k], h_p[k]]);
                second.push([[h_tt[k], m12], [m12, m22]]);
            }
            CovariantDerivatives { first, second }
        }
    }
}

/// Support function of a convex body sampled on a sphere grid, at one
/// height level.
#[derive(Debug, Clone)]
pub struct SupportSlice {
    grid: Arc<SphereGrid>,
    h: Vec<f64>,
    level: f64,
    derivs: CovariantDerivatives,
}

impl SupportSlice {
    pub fn new(grid: Arc<SphereGrid>, h: Vec<f64>) -> Result<Self> {
        if h.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), found: h.len() });
        }
        if let Some(k) = h.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(k));
        }
        if let Some(k) = h.iter().position(|&v| v <= 0.0) {
            return Err(Error::NonPositiveSupport { node: k, value: h[k] });
        }
        let derivs = compute_derivatives(&grid, &h);
        Ok(Self { grid, h, level: 0.0, derivs })
    }

    pub fn from_fn(grid: Arc<SphereGrid>, f: impl FnMut(&[f64]) -> f64) -> Result<Self> {
        let h = grid.sample(f);
        Self::new(grid, h)
    }

    /// Tags the slice with the height level it represents.
    pub fn at_level(mut self, t: f64) -> Self {
        self.level = t;
        self
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.h
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    /// Support function of the body translated by `v`: `h + ⟨v, Y⟩`.
    pub fn translated(&self, v: &[f64]) -> Result<Self> {
        let h = (0..self.len())
            .map(|k| self.h[k] + self.grid.direction(k).iter().zip(v).map(|(a, b)| a * b).sum::<f64>())
            .collect();
        Ok(Self::new(self.grid.clone(), h)?.at_level(self.level))
    }

    pub fn covariant_derivatives(&self) -> &CovariantDerivatives {
        &self.derivs
    }

    /// `b_ij = h g_ij + h_;ij` in coordinate components.
    pub fn coordinate_form(&self) -> Vec<Sym2> {
        (0..self.len())
            .map(|k| {
                let g = self.grid.metric(k);
                let m = self.derivs.second[k];
                let h = self.h[k];
                [[h * g[0] + m[0][0], m[0][1]], [m[1][0], h * g[1] + m[1][1]]]
            })
            .collect()
    }
}

/// `b_ij` in an orthonormal tangent frame, after the strict convexity check.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondFundamentalForm {
    rank: usize,
    pub b: Vec<Sym2>,
    pub min_eig: f64,
    pub max_eig: f64,
}

impl SecondFundamentalForm {
    pub fn rank(&self) -> usize {
        self.rank
    }
}

fn orthonormal(grid: &SphereGrid, node: usize, b: &Sym2) -> Sym2 {
    match grid.kind {
        GridKind::Circle => [[b[0][0], 0.0], [0.0, 0.0]],
        GridKind::LatLong { .. } => {
            let s = grid.coords[node][0].sin();
            [[b[0][0], b[0][1] / s], [b[1][0] / s, b[1][1] / (s * s)]]
        }
    }
}

fn eigenvalues(rank: usize, b: &Sym2) -> [f64; 2] {
    if rank == 1 {
        [b[0][0], b[0][0]]
    } else {
        sym2_eigenvalues(b)
    }
}

/// `b_ij = h δ_ij + h_ij`; fails with `NonConvexSlice` when the smallest
/// eigenvalue is not above `CONVEXITY_RATIO` times the largest.
pub fn second_fundamental_form(slice: &SupportSlice) -> Result<SecondFundamentalForm> {
    let grid = &slice.grid;
    let rank = grid.rank();
    let coord = slice.coordinate_form();
    let b: Vec<Sym2> = coord.iter().enumerate().map(|(k, m)| orthonormal(grid, k, m)).collect();
    let mut min_eig = f64::INFINITY;
    let mut max_eig = f64::NEG_INFINITY;
    let mut worst = 0;
    for (k, m) in b.iter().enumerate() {
        let [lo, hi] = eigenvalues(rank, m);
        if lo < min_eig {
            min_eig = lo;
            worst = k;
        }
        max_eig = max_eig.max(hi);
    }
    if !(min_eig > CONVEXITY_RATIO * max_eig) || !(max_eig > 0.0) {
        return Err(Error::NonConvexSlice { node: worst, min_eig, max_eig });
    }
    Ok(SecondFundamentalForm { rank, b, min_eig, max_eig })
}

/// Curvature quantities at one node. For `n = 2` only the first entry of
/// each matrix and of `kappa` is meaningful.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureNode {
    pub b: Sym2,
    pub b_inv: Sym2,
    /// Gauss curvature `det(b^{ij})`.
    pub k: f64,
    /// Mean curvature `tr(b^{ij})`.
    pub sigma1: f64,
    /// Principal curvatures, ascending.
    pub kappa: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureField {
    rank: usize,
    pub nodes: Vec<CurvatureNode>,
}

impl CurvatureField {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn kappa(&self, node: usize) -> &[f64] {
        &self.nodes[node].kappa[..self.rank]
    }

    pub fn gauss(&self) -> Vec<f64> {
        self.nodes.iter().map(|c| c.k).collect()
    }
}

/// Completes `K`, `σ₁` and the principal curvatures from `b_ij`.
pub fn curvatures(form: &SecondFundamentalForm) -> Result<CurvatureField> {
    let rank = form.rank;
    let mut nodes = Vec::with_capacity(form.b.len());
    for (k, b) in form.b.iter().enumerate() {
        let [lo, hi] = eigenvalues(rank, b);
        if !(lo > 0.0) {
            return Err(Error::NonConvexSlice { node: k, min_eig: lo, max_eig: hi });
        }
        let node = if rank == 1 {
            let inv = 1.0 / b[0][0];
            CurvatureNode {
                b: *b,
                b_inv: [[inv, 0.0], [0.0, 0.0]],
                k: inv,
                sigma1: inv,
                kappa: [inv, 0.0],
            }
        } else {
            let b_inv = sym2_inverse(b);
            let ev = sym2_eigenvalues(&b_inv);
            CurvatureNode { b: *b, b_inv, k: ev[0] * ev[1], sigma1: ev[0] + ev[1], kappa: ev }
        };
        nodes.push(node);
    }
    Ok(CurvatureField { rank, nodes })
}

/// A point on the boundary of the body together with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfacePoint {
    pub x: Vec<f64>,
    pub theta: [f64; 2],
    pub t: f64,
}

/// `x = hY + Σ h^i T_i`, the boundary point with outer normal `Y`.
pub fn recover_point(slice: &SupportSlice, node: usize) -> SurfacePoint {
    let grid = &slice.grid;
    let n = grid.dim_n;
    let g = grid.metric(node);
    let d = slice.derivs.first[node];
    let y = grid.direction(node);
    let mut x: Vec<f64> = y.iter().map(|v| v * slice.h[node]).collect();
    for i in 0..n - 1 {
        let w = d[i] / g[i];
        for (xa, ta) in x.iter_mut().zip(grid.tangent(node, i)) {
            *xa += w * ta;
        }
    }
    SurfacePoint { x, theta: grid.coords[node], t: slice.level }
}

/// `Du = Y/h_t` at every node, with `|Du| = -1/h_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    dim_n: usize,
    du: Vec<f64>,
    pub norm: Vec<f64>,
}

impl GradientField {
    pub fn du(&self, node: usize) -> &[f64] {
        &self.du[node * self.dim_n..(node + 1) * self.dim_n]
    }
}

fn check_orientation(h_t: &[f64]) -> Result<()> {
    match h_t.iter().position(|&v| !(v < 0.0)) {
        Some(node) => Err(Error::Orientation { node, h_t: h_t[node] }),
        None => Ok(()),
    }
}

pub fn reconstruct_gradient(grid: &SphereGrid, h_t: &[f64]) -> Result<GradientField> {
    if h_t.len() != grid.len() {
        return Err(Error::LengthMismatch { expected: grid.len(), found: h_t.len() });
    }
    check_orientation(h_t)?;
    let mut du = Vec::with_capacity(grid.dirs.len());
    for (k, &ht) in h_t.iter().enumerate() {
        du.extend(grid.direction(k).iter().map(|y| y / ht));
    }
    Ok(GradientField { dim_n: grid.dim_n, du, norm: h_t.iter().map(|v| -1.0 / v).collect() })
}

/// Hessian of `u` at every node of a slice, from `h`, its height derivatives
/// `h_t`, `h_ti` (coordinate components) and `h_tt`:
///
/// `u_αβ = Σ [−h_t⁻² h_ti Y + h_t⁻¹ T_i] b^{ij} [T_j − h_t⁻¹ h_tj Y] − h_t⁻³ h_tt Y Y`,
/// symmetrized.
pub fn reconstruct_hessian(
    slice: &SupportSlice,
    h_t: &[f64],
    h_ti: &[[f64; 2]],
    h_tt: &[f64],
) -> Result<Vec<Matrix>> {
    let grid = &slice.grid;
    let len = grid.len();
    for l in [h_t.len(), h_ti.len(), h_tt.len()] {
        if l != len {
            return Err(Error::LengthMismatch { expected: len, found: l });
        }
    }
    check_orientation(h_t)?;
    second_fundamental_form(slice)?;
    let coord = slice.coordinate_form();
    let n = grid.dim_n;
    let rank = n - 1;
    let mut out = Vec::with_capacity(len);
    for k in 0..len {
        let binv = if rank == 1 { [[1.0 / coord[k][0][0], 0.0], [0.0, 0.0]] } else { sym2_inverse(&coord[k]) };
        let y = grid.direction(k);
        let ht = h_t[k];
        let p: Vec<Vec<f64>> = (0..rank)
            .map(|i| {
                let t = grid.tangent(k, i);
                (0..n).map(|a| -h_ti[k][i] / (ht * ht) * y[a] + t[a] / ht).collect()
            })
            .collect();
        let q: Vec<Vec<f64>> = (0..rank)
            .map(|j| {
                let t = grid.tangent(k, j);
                (0..n).map(|a| t[a] - h_ti[k][j] / ht * y[a]).collect()
            })
            .collect();
        let mut m = Matrix::zeros(n, n);
        for i in 0..rank {
            for j in 0..rank {
                let w = binv[i][j];
                for a in 0..n {
                    for b in 0..n {
                        m[(a, b)] += p[i][a] * w * q[j][b];
                    }
                }
            }
        }
        let radial = -h_tt[k] / (ht * ht * ht);
        for a in 0..n {
            for b in 0..n {
                m[(a, b)] += radial * y[a] * y[b];
            }
        }
        let sym = Matrix::from_fn(n, n, |a, b| 0.5 * (m[(a, b)] + m[(b, a)]));
        out.push(sym);
    }
    Ok(out)
}

/// Largest Codazzi defect `|b_{ij,k} − b_{ik,j}|` over nodes and index
/// triples. Since the metric is parallel, `b_{ij,k} = h_k g_ij + h_{;ijk}`,
/// so only the Hessian `h_;ij` is differenced (in coordinate components) and
/// the metric enters in closed form. The statement is vacuous on the
/// circle, where this returns 0.
pub fn codazzi_residual(slice: &SupportSlice) -> Result<f64> {
    let grid = &slice.grid;
    let (n_lat, n_lon) = match grid.kind {
        GridKind::Circle => return Ok(0.0),
        GridKind::LatLong { n_lat, n_lon } => (n_lat, n_lon),
    };
    second_fundamental_form(slice)?;
    let d = &slice.derivs;
    let m11: Vec<f64> = d.second.iter().map(|m| m[0][0]).collect();
    let m12: Vec<f64> = d.second.iter().map(|m| m[0][1]).collect();
    let m22: Vec<f64> = d.second.iter().map(|m| m[1][1]).collect();
    let ops = LatLongOps::new(n_lat, n_lon);
    let m12_t = ops.d_theta(&m12, -1.0);
    let m22_t = ops.d_theta(&m22, 1.0);
    let m11_p = ops.d_psi(&m11);
    let m12_p = ops.d_psi(&m12);
    let mut worst: f64 = 0.0;
    for k in 0..m11.len() {
        let (s, c) = grid.coords[k][0].sin_cos();
        let cot = c / s;
        let [h_t, h_p] = d.first[k];
        let d2_m11 = m11_p[k] - 2.0 * cot * m12[k];
        let d1_m12 = m12_t[k] - cot * m12[k];
        let d2_m21 = m12_p[k] + s * c * m11[k] - cot * m22[k];
        let d1_m22 = m22_t[k] - 2.0 * cot * m22[k];
        let first = h_p + d2_m11 - d1_m12;
        let second = h_t * s * s + d1_m22 - d2_m21;
        worst = worst.max(first.abs()).max(second.abs());
    }
    Ok(worst)
}
