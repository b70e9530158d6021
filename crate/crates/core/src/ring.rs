//! Minimal graphs over planar convex rings in support-function form.
//!
//! The unknown is `h(θ, t)`, the support function of the level curve
//! `{u = t}`, on `S¹ × [0, H]` with `u = 0` on the outer and `u = H` on the
//! inner boundary. It satisfies
//!
//! `h_tt = (1 + h_t² + h_tθ²) / b`, `b = h + h_θθ > 0`, `h_t < 0`,
//!
//! discretized spectrally (or by 4th-order differences) in θ and by
//! finite differences of order 2, 4 or 6 in t.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::Cell;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::interp::{CubicSpline, TrigSeries};
use crate::linalg::{BlockTridiagonal, Matrix};
use crate::roots::newton_bracketed;
use crate::stencil::{apply_differences, LineStencils, PeriodicDiff, StencilOrder};
use crate::support::{second_fundamental_form, SphereGrid, SupportSlice};

const MIN_T_INTERVALS: usize = 8;

/// Boundary-value problem for a minimal graph over the ring between two
/// nested convex curves.
#[derive(Debug, Clone)]
pub struct RingProblem {
    outer: SupportSlice,
    inner: SupportSlice,
    n_t: usize,
    height: f64,
}

impl RingProblem {
    /// Ring with boundary heights 0 (outer) and 1 (inner), discretized with
    /// `n_t` intervals in t.
    pub fn new(outer: SupportSlice, inner: SupportSlice, n_t: usize) -> Result<Self> {
        Self::with_height(outer, inner, n_t, 1.0)
    }

    pub fn with_height(outer: SupportSlice, inner: SupportSlice, n_t: usize, height: f64) -> Result<Self> {
        let (go, gi) = (outer.grid(), inner.grid());
        if go.dim_n() != 2 || gi.dim_n() != 2 {
            return Err(Error::UnsupportedDimension(go.dim_n().max(gi.dim_n())));
        }
        if go.len() != gi.len() || go.periodic().map(|d| d.scheme()) != gi.periodic().map(|d| d.scheme()) {
            return Err(Error::InvalidRing("boundary slices live on different grids".into()));
        }
        if n_t < MIN_T_INTERVALS {
            return Err(Error::ResolutionTooSmall(n_t));
        }
        if !(height > 0.0 && height.is_finite()) {
            return Err(Error::Domain(alloc::format!("height must be positive, got {height}")));
        }
        second_fundamental_form(&outer)?;
        second_fundamental_form(&inner)?;
        for (k, (&ho, &hi)) in outer.values().iter().zip(inner.values()).enumerate() {
            if !(hi < ho) {
                return Err(Error::NotContained { node: k, inner: hi, outer: ho });
            }
        }
        let inner = inner.at_level(height);
        let outer = outer.at_level(0.0);
        Ok(Self { outer, inner, n_t, height })
    }

    pub fn outer(&self) -> &SupportSlice {
        &self.outer
    }

    pub fn inner(&self) -> &SupportSlice {
        &self.inner
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn n_theta(&self) -> usize {
        self.outer.len()
    }

    pub fn height(&self) -> f64 {
        self.height
    }
}

/// Solver settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Target for the largest interior residual.
    pub tol: f64,
    pub max_iter: usize,
    pub t_order: StencilOrder,
    /// Smallest damping factor tried before giving up on a direction.
    pub min_step: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 200, t_order: StencilOrder::Sixth, min_step: 1.0 / 1024.0 }
    }
}

/// The (θ, t) grid with its differentiation operators. Fields are stored
/// row by row: index `j * n_theta + i` for `t_j`, `θ_i`.
#[derive(Debug, Clone)]
pub struct RingGrid {
    grid: Arc<SphereGrid>,
    n_t: usize,
    height: f64,
    stencils: LineStencils,
}

impl RingGrid {
    pub fn new(grid: Arc<SphereGrid>, n_t: usize, height: f64, t_order: StencilOrder) -> Self {
        let dt = height / n_t as f64;
        let stencils = LineStencils::new(n_t, dt, t_order);
        Self { grid, n_t, height, stencils }
    }

    pub fn sphere(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn n_theta(&self) -> usize {
        self.grid.len()
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn rows(&self) -> usize {
        self.n_t + 1
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn dt(&self) -> f64 {
        self.stencils.dt()
    }

    pub fn t_order(&self) -> StencilOrder {
        self.stencils.order()
    }

    /// Smallest residual that double precision can resolve for heights of
    /// size `scale`: one rounding error per node, amplified by the largest
    /// interior `∂tt` stencil.
    pub fn roundoff_floor(&self, scale: f64) -> f64 {
        let amp = (1..self.n_t)
            .map(|j| self.stencils.row(j).d2.iter().map(|w| w.abs()).sum::<f64>())
            .fold(0.0, f64::max);
        2.0 * f64::EPSILON * scale * amp
    }

    pub fn t(&self, j: usize) -> f64 {
        self.height * j as f64 / self.n_t as f64
    }

    pub fn theta(&self, i: usize) -> f64 {
        self.grid.coords(i)[0]
    }

    pub fn len(&self) -> usize {
        self.rows() * self.n_theta()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn diff(&self) -> &PeriodicDiff {
        self.grid.periodic().expect("ring grids live on the circle")
    }

    fn check_len(&self, f: &[f64]) -> Result<()> {
        if f.len() != self.len() {
            return Err(Error::LengthMismatch { expected: self.len(), found: f.len() });
        }
        Ok(())
    }

    fn per_row(&self, f: &[f64], m: &Matrix) -> Vec<f64> {
        let n = self.n_theta();
        let mut out = vec![0.0; f.len()];
        for (src, dst) in f.chunks_exact(n).zip(out.chunks_exact_mut(n)) {
            apply_differences(m, src, dst);
        }
        out
    }

    fn along_t(&self, f: &[f64], second: bool) -> Vec<f64> {
        let n = self.n_theta();
        let mut out = vec![0.0; f.len()];
        for j in 0..self.rows() {
            let row = self.stencils.row(j);
            let w = if second { &row.d2 } else { &row.d1 };
            let (center, dst) = (&f[j * n..(j + 1) * n], &mut out[j * n..(j + 1) * n]);
            for (k, &wk) in w.iter().enumerate() {
                let src = &f[(row.start + k) * n..(row.start + k + 1) * n];
                for ((d, s), c) in dst.iter_mut().zip(src).zip(center) {
                    *d += wk * (s - c);
                }
            }
        }
        out
    }

    pub fn d_theta(&self, f: &[f64]) -> Vec<f64> {
        self.per_row(f, self.diff().d1())
    }

    pub fn d_theta2(&self, f: &[f64]) -> Vec<f64> {
        self.per_row(f, self.diff().d2())
    }

    pub fn d_t(&self, f: &[f64]) -> Vec<f64> {
        self.along_t(f, false)
    }

    pub fn d_tt(&self, f: &[f64]) -> Vec<f64> {
        self.along_t(f, true)
    }

    /// Mixed derivative, the θ-derivative of the t-derivative.
    pub fn d_ttheta(&self, f: &[f64]) -> Vec<f64> {
        self.d_theta(&self.d_t(f))
    }

    /// Samples `f(θ, t)` on the grid.
    pub fn sample(&self, mut f: impl FnMut(f64, f64) -> f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for j in 0..self.rows() {
            let t = self.t(j);
            for i in 0..self.n_theta() {
                out.push(f(self.theta(i), t));
            }
        }
        out
    }
}

/// Derivative fields of `h` on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFields {
    pub h_theta: Vec<f64>,
    pub h_thetatheta: Vec<f64>,
    pub h_t: Vec<f64>,
    pub h_ttheta: Vec<f64>,
    pub h_tt: Vec<f64>,
    /// `b = h + h_θθ`.
    pub b: Vec<f64>,
}

impl GridFields {
    fn compute(g: &RingGrid, h: &[f64]) -> Self {
        let h_theta = g.d_theta(h);
        let h_thetatheta = g.d_theta2(h);
        let h_t = g.d_t(h);
        let h_ttheta = g.d_theta(&h_t);
        let h_tt = g.d_tt(h);
        let b = h.iter().zip(&h_thetatheta).map(|(a, c)| a + c).collect();
        Self { h_theta, h_thetatheta, h_t, h_ttheta, h_tt, b }
    }

    /// `1 + h_t² + h_tθ²` at node `k`.
    pub fn a(&self, k: usize) -> f64 {
        1.0 + self.h_t[k] * self.h_t[k] + self.h_ttheta[k] * self.h_ttheta[k]
    }
}

/// Interior residual of the transformed equation,
/// `F = h_tt − (1 + h_t² + h_tθ²)/b`. Boundary rows are set to zero.
pub fn discrete_residual(grid: &RingGrid, h: &[f64]) -> Result<Vec<f64>> {
    grid.check_len(h)?;
    let f = GridFields::compute(grid, h);
    residual_from_fields(grid, &f)
}

fn residual_from_fields(grid: &RingGrid, f: &GridFields) -> Result<Vec<f64>> {
    let n = grid.n_theta();
    let mut r = vec![0.0; grid.len()];
    for k in n..grid.len() - n {
        let b = f.b[k];
        if !(b > 0.0) {
            return Err(Error::ConvexityLoss { node: k, value: b });
        }
        r[k] = f.h_tt[k] - f.a(k) / b;
    }
    Ok(r)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Converged solution `h(θ_i, t_j)` with its derivative fields.
#[derive(Debug, Clone)]
pub struct GridSolution {
    pub grid: RingGrid,
    pub h: Vec<f64>,
    pub fields: GridFields,
    /// `min (h + h_θθ)` over all nodes.
    pub convexity_margin: f64,
    /// `max h_t` over all nodes (negative on valid solutions).
    pub orientation_margin: f64,
}

impl GridSolution {
    /// Wraps a sampled field, computing derivatives with the grid's stencils.
    pub fn from_values(grid: RingGrid, h: Vec<f64>) -> Result<Self> {
        grid.check_len(&h)?;
        let fields = GridFields::compute(&grid, &h);
        let convexity_margin = fields.b.iter().copied().fold(f64::INFINITY, f64::min);
        let orientation_margin = fields.h_t.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(Self { grid, h, fields, convexity_margin, orientation_margin })
    }

    pub fn n_theta(&self) -> usize {
        self.grid.n_theta()
    }

    pub fn rows(&self) -> usize {
        self.grid.rows()
    }

    pub fn row<'a>(&self, f: &'a [f64], j: usize) -> &'a [f64] {
        let n = self.n_theta();
        &f[j * n..(j + 1) * n]
    }

    /// The level curve at row `j` as a support slice.
    pub fn slice(&self, j: usize) -> Result<SupportSlice> {
        Ok(SupportSlice::new(self.grid.grid.clone(), self.row(&self.h, j).to_vec())?.at_level(self.grid.t(j)))
    }

    pub fn residual(&self) -> Result<Vec<f64>> {
        residual_from_fields(&self.grid, &self.fields)
    }
}

/// Newton iteration summary.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport {
    pub iterations: usize,
    pub factorizations: usize,
    pub residual: f64,
    /// Tolerance actually enforced: the requested one, raised to the
    /// roundoff floor of the grid when that is larger.
    pub tolerance: f64,
    /// Step length accepted at each iteration.
    pub damping: Vec<f64>,
    pub convexity_margin: f64,
    pub orientation_margin: f64,
    /// Divergence residual of the reconstructed graph in the plane, when
    /// it has been evaluated.
    pub physical_residual: Option<f64>,
}

fn admissible(grid: &RingGrid, f: &GridFields) -> bool {
    let n = grid.n_theta();
    f.b.iter().all(|&b| b > 0.0) && f.h_t.iter().all(|&v| v < 0.0) && f.h_tt.len() == grid.rows() * n
}

/// Block-tridiagonal Jacobian of the residual for second-order t-stencils,
/// over the interior rows.
fn jacobian(grid: &RingGrid, f: &GridFields) -> Result<BlockTridiagonal> {
    let n = grid.n_theta();
    let dt = grid.dt();
    let m = grid.n_t - 1;
    let d = grid.diff();
    let mut lower = Vec::with_capacity(m);
    let mut diag = Vec::with_capacity(m);
    let mut upper = Vec::with_capacity(m);
    for j in 1..grid.n_t {
        let range = j * n..(j + 1) * n;
        let a: Vec<f64> = range.clone().map(|k| f.a(k) / (f.b[k] * f.b[k])).collect();
        let p: Vec<f64> = range.clone().map(|k| f.h_t[k] / f.b[k]).collect();
        let q: Vec<f64> = range.clone().map(|k| f.h_ttheta[k] / f.b[k]).collect();

        let mut dj = d.d2().clone();
        dj.scale_rows(&a);
        let dd: Vec<f64> = a.iter().map(|ai| ai - 2.0 / (dt * dt)).collect();
        dj.add_diag(&dd);

        let mut qd1 = d.d1().clone();
        qd1.scale_rows(&q);
        let mut uj = qd1.clone();
        uj.scale_rows(&vec![-1.0 / dt; n]);
        uj.add_diag(&p.iter().map(|pi| 1.0 / (dt * dt) - pi / dt).collect::<Vec<_>>());
        let mut lj = qd1;
        lj.scale_rows(&vec![1.0 / dt; n]);
        lj.add_diag(&p.iter().map(|pi| 1.0 / (dt * dt) + pi / dt).collect::<Vec<_>>());

        lower.push(lj);
        diag.push(dj);
        upper.push(uj);
    }
    BlockTridiagonal::factor(lower, diag, upper)
}

/// Damped Newton iteration from the Minkowski interpolation of the boundary
/// curves. The Jacobian is the second-order one; with higher-order
/// t-stencils the iteration is a defect correction, and the Jacobian is
/// refreshed whenever the residual stops contracting.
pub fn solve(problem: &RingProblem, options: &SolverOptions) -> Result<(GridSolution, SolverReport)> {
    let grid = RingGrid::new(problem.outer.grid().clone(), problem.n_t, problem.height, options.t_order);
    let n = grid.n_theta();
    let rows = grid.rows();
    let mut h = Vec::with_capacity(grid.len());
    let (ho, hi) = (problem.outer.values(), problem.inner.values());
    for j in 0..rows {
        let s = j as f64 / problem.n_t as f64;
        h.extend(ho.iter().zip(hi).map(|(a, b)| (1.0 - s) * a + s * b));
    }
    let mut fields = GridFields::compute(&grid, &h);
    if !admissible(&grid, &fields) {
        let k = fields.b.iter().position(|&b| !(b > 0.0));
        return match k {
            Some(node) => Err(Error::ConvexityLoss { node, value: fields.b[node] }),
            None => {
                let node = fields.h_t.iter().position(|&v| !(v < 0.0)).unwrap_or(0);
                Err(Error::OrientationLoss { node, h_t: fields.h_t[node] })
            }
        };
    }
    let mut res = residual_from_fields(&grid, &fields)?;
    let mut norm = max_abs(&res);
    let tolerance = options.tol.max(grid.roundoff_floor(max_abs(&h)));
    let mut jac: Option<BlockTridiagonal> = None;
    let mut fresh = false;
    let mut report = SolverReport {
        iterations: 0,
        factorizations: 0,
        residual: norm,
        tolerance,
        damping: Vec::new(),
        convexity_margin: 0.0,
        orientation_margin: 0.0,
        physical_residual: None,
    };
    let mut last_bad = (0usize, 0.0f64);
    while norm > tolerance {
        if report.iterations >= options.max_iter {
            return Err(Error::NoConvergence { iterations: report.iterations, residual: norm });
        }
        if jac.is_none() {
            jac = Some(jacobian(&grid, &fields)?);
            report.factorizations += 1;
            fresh = true;
        }
        let rhs: Vec<f64> = res[n..(rows - 1) * n].iter().map(|v| -v).collect();
        let step = jac.as_ref().expect("factored above").solve(&rhs);
        let mut alpha = 1.0;
        let accepted = loop {
            let mut trial = h.clone();
            for (x, s) in trial[n..(rows - 1) * n].iter_mut().zip(&step) {
                *x += alpha * s;
            }
            let tf = GridFields::compute(&grid, &trial);
            if admissible(&grid, &tf) {
                let tr = residual_from_fields(&grid, &tf)?;
                let tn = max_abs(&tr);
                if tn < norm {
                    break Some((trial, tf, tr, tn));
                }
            } else if let Some(node) = tf.b.iter().position(|&b| !(b > 0.0)) {
                last_bad = (node, tf.b[node]);
            }
            alpha *= 0.5;
            if alpha < options.min_step {
                break None;
            }
        };
        match accepted {
            Some((trial, tf, tr, tn)) => {
                let contraction = tn / norm;
                h = trial;
                fields = tf;
                res = tr;
                norm = tn;
                report.iterations += 1;
                report.damping.push(alpha);
                if contraction > 0.5 || alpha < 1.0 {
                    jac = None;
                }
            }
            None if !fresh => {
                jac = None;
            }
            None => {
                return if last_bad.1 != 0.0 {
                    Err(Error::ConvexityLoss { node: last_bad.0, value: last_bad.1 })
                } else {
                    Err(Error::NoConvergence { iterations: report.iterations, residual: norm })
                };
            }
        }
        if jac.is_some() {
            fresh = false;
        }
    }
    let solution = GridSolution::from_values(grid, h)?;
    if let Some(node) = solution.fields.h_t.iter().position(|&v| !(v < 0.0)) {
        return Err(Error::OrientationLoss { node, h_t: solution.fields.h_t[node] });
    }
    report.residual = norm;
    report.convexity_margin = solution.convexity_margin;
    report.orientation_margin = solution.orientation_margin;
    Ok((solution, report))
}

/// Linearized operator `L = A b⁻² ∂θθ − 2 h_tθ b⁻¹ ∂θt + ∂tt` with
/// `A = 1 + h_t² + h_tθ²`, applied with the solver's stencils. Boundary rows
/// use the one-sided t-stencils.
pub fn apply_l(solution: &GridSolution, g: &[f64]) -> Result<Vec<f64>> {
    let grid = &solution.grid;
    grid.check_len(g)?;
    let f = &solution.fields;
    let g_tt = grid.d_tt(g);
    let g_thth = grid.d_theta2(g);
    let g_tth = grid.d_ttheta(g);
    Ok((0..g.len())
        .map(|k| {
            let b = f.b[k];
            f.a(k) / (b * b) * g_thth[k] - 2.0 * f.h_ttheta[k] / b * g_tth[k] + g_tt[k]
        })
        .collect())
}

/// Continuous extension of a grid solution: trigonometric in θ, clamped
/// cubic splines in t for each Fourier coefficient.
#[derive(Debug, Clone)]
pub struct SolutionInterpolant {
    height: f64,
    cos: Vec<CubicSpline>,
    sin: Vec<CubicSpline>,
}

impl SolutionInterpolant {
    pub fn new(solution: &GridSolution) -> Result<Self> {
        let grid = &solution.grid;
        let rows = grid.rows();
        let series: Vec<TrigSeries> =
            (0..rows).map(|j| TrigSeries::from_samples(solution.row(&solution.h, j))).collect();
        let first = TrigSeries::from_samples(solution.row(&solution.fields.h_t, 0));
        let last = TrigSeries::from_samples(solution.row(&solution.fields.h_t, rows - 1));
        let ts: Vec<f64> = (0..rows).map(|j| grid.t(j)).collect();
        let modes = series[0].modes();
        let mut cos = Vec::with_capacity(modes);
        let mut sin = Vec::with_capacity(modes);
        for k in 0..modes {
            let yc: Vec<f64> = series.iter().map(|s| s.cos[k]).collect();
            let ys: Vec<f64> = series.iter().map(|s| s.sin[k]).collect();
            cos.push(CubicSpline::clamped(ts.clone(), yc, first.cos[k], last.cos[k])?);
            sin.push(CubicSpline::clamped(ts.clone(), ys, first.sin[k], last.sin[k])?);
        }
        Ok(Self { height: grid.height(), cos, sin })
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    /// Fourier series of `h(·, t)` and of `h_t(·, t)`.
    pub fn series_at(&self, t: f64) -> (TrigSeries, TrigSeries) {
        let mut h = TrigSeries { cos: Vec::with_capacity(self.cos.len()), sin: Vec::with_capacity(self.cos.len()) };
        let mut ht = h.clone();
        for (c, s) in self.cos.iter().zip(&self.sin) {
            let (cv, cd) = c.eval_with_slope(t);
            let (sv, sd) = s.eval_with_slope(t);
            h.cos.push(cv);
            h.sin.push(sv);
            ht.cos.push(cd);
            ht.sin.push(sd);
        }
        (h, ht)
    }

    /// `max_θ (⟨p, Y(θ)⟩ − h(θ, t))` with its maximizer, starting the local
    /// search at `theta0` (or from a coarse scan when `None`).
    fn envelope(h: &TrigSeries, p: [f64; 2], theta0: Option<f64>) -> (f64, f64) {
        let objective = |th: f64| {
            let (s, c) = th.sin_cos();
            let [v, d1, d2] = h.eval(th);
            (p[0] * c + p[1] * s - v, -p[0] * s + p[1] * c - d1, -p[0] * c - p[1] * s - d2)
        };
        let mut th = match theta0 {
            Some(t) => t,
            None => {
                let scan = 64;
                let mut best = (f64::NEG_INFINITY, 0.0);
                for k in 0..scan {
                    let t = 2.0 * PI * k as f64 / scan as f64;
                    let v = objective(t).0;
                    if v > best.0 {
                        best = (v, t);
                    }
                }
                best.1
            }
        };
        for _ in 0..50 {
            let (_, d1, d2) = objective(th);
            let step = if d2 < -1e-12 { -d1 / d2 } else { d1.signum() * d1.abs().min(0.1) };
            let step = step.clamp(-0.5, 0.5);
            th += step;
            if step.abs() < 1e-14 {
                break;
            }
        }
        (objective(th).0, th)
    }

    /// Height `u(p)` of the graph at a point of the plane, `None` outside
    /// the closed ring.
    pub fn u_at(&self, p: [f64; 2]) -> Option<f64> {
        let theta = Cell::new(None::<f64>);
        let g = |t: f64| {
            let (h, ht) = self.series_at(t);
            let (v, th) = Self::envelope(&h, p, theta.get());
            theta.set(Some(th));
            (v, -ht.eval(th)[0])
        };
        let g0 = g(0.0).0;
        if g0 > 0.0 {
            return None;
        }
        let gh = g(self.height).0;
        if gh < 0.0 {
            return None;
        }
        if g0 == 0.0 {
            return Some(0.0);
        }
        let guess = self.height * (-g0 / (gh - g0));
        newton_bracketed(g, 0.0, self.height, guess, 1e-14 * self.height, 100).ok()
    }
}

/// Values of `u` on a square Cartesian lattice; `None` marks nodes outside
/// the ring.
#[derive(Debug, Clone, PartialEq)]
pub struct CartesianField {
    pub x0: f64,
    pub y0: f64,
    pub dx: f64,
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<Option<f64>>,
}

impl CartesianField {
    pub fn point(&self, i: usize, j: usize) -> [f64; 2] {
        [self.x0 + i as f64 * self.dx, self.y0 + j as f64 * self.dx]
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.values[j * self.nx + i]
    }

    fn neighborhood_inside(&self, i: usize, j: usize, r: usize) -> bool {
        if i < r || j < r || i + r >= self.nx || j + r >= self.ny {
            return false;
        }
        (j - r..=j + r).all(|jj| (i - r..=i + r).all(|ii| self.get(ii, jj).is_some()))
    }

    /// Conservative second-order discretization of
    /// `div(∇u / √(1 + |∇u|²))` at node `(i, j)`; needs the 3×3 block.
    pub fn divergence(&self, i: usize, j: usize) -> Option<f64> {
        if !self.neighborhood_inside(i, j, 1) {
            return None;
        }
        let u = |a: usize, b: usize| self.get(a, b).expect("checked inside");
        let h = self.dx;
        let flux_x = |a: usize| {
            // Face between columns a and a + 1.
            let gx = (u(a + 1, j) - u(a, j)) / h;
            let gy = (u(a, j + 1) + u(a + 1, j + 1) - u(a, j - 1) - u(a + 1, j - 1)) / (4.0 * h);
            gx / (1.0 + gx * gx + gy * gy).sqrt()
        };
        let flux_y = |b: usize| {
            let gy = (u(i, b + 1) - u(i, b)) / h;
            let gx = (u(i + 1, b) + u(i + 1, b + 1) - u(i - 1, b) - u(i - 1, b + 1)) / (4.0 * h);
            gy / (1.0 + gx * gx + gy * gy).sqrt()
        };
        Some((flux_x(i) - flux_x(i - 1) + flux_y(j) - flux_y(j - 1)) / h)
    }
}

/// Result of checking a Cartesian field against the minimal surface
/// equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalResidual {
    /// Largest divergence residual over nodes two cells away from the
    /// boundary with heights inside the trimmed range.
    pub max_residual: f64,
    /// Largest difference between the field and the located level over
    /// nodes next to the boundary.
    pub boundary_mismatch: f64,
    pub interior_points: usize,
    pub spacing: f64,
}

/// Samples `u` on the lattice of spacing `dx` covering the outer body.
pub fn sample_cartesian(interp: &SolutionInterpolant, outer: &SupportSlice, dx: f64) -> CartesianField {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for k in 0..outer.len() {
        let p = crate::support::recover_point(outer, k).x;
        for a in 0..2 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let nx = ((hi[0] - lo[0]) / dx).ceil() as usize + 3;
    let ny = ((hi[1] - lo[1]) / dx).ceil() as usize + 3;
    let x0 = 0.5 * (lo[0] + hi[0]) - 0.5 * (nx - 1) as f64 * dx;
    let y0 = 0.5 * (lo[1] + hi[1]) - 0.5 * (ny - 1) as f64 * dx;
    let mut values = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            values.push(interp.u_at([x0 + i as f64 * dx, y0 + j as f64 * dx]));
        }
    }
    CartesianField { x0, y0, dx, nx, ny, values }
}

/// Fraction of the height cut off at both ends when measuring the
/// divergence residual, so that the measured region does not creep toward
/// the boundary as the lattice is refined.
pub const INTERIOR_MARGIN: f64 = 0.3;

/// Divergence residual of `field` over nodes whose height lies in the
/// middle part of the range, and its agreement with the level map of
/// `reference` next to the boundary.
pub fn check_cartesian_field(field: &CartesianField, reference: &SolutionInterpolant) -> PhysicalResidual {
    let mut max_residual: f64 = 0.0;
    let mut boundary_mismatch: f64 = 0.0;
    let mut interior_points = 0;
    let height = reference.height();
    let margin = INTERIOR_MARGIN * height;
    for j in 0..field.ny {
        for i in 0..field.nx {
            let Some(v) = field.get(i, j) else { continue };
            let deep = v >= margin && v <= height - margin;
            if deep && field.neighborhood_inside(i, j, 2) {
                if let Some(d) = field.divergence(i, j) {
                    max_residual = max_residual.max(d.abs());
                    interior_points += 1;
                }
            } else if !field.neighborhood_inside(i, j, 1) {
                if let Some(expected) = reference.u_at(field.point(i, j)) {
                    boundary_mismatch = boundary_mismatch.max((v - expected).abs());
                }
            }
        }
    }
    PhysicalResidual { max_residual, boundary_mismatch, interior_points, spacing: field.dx }
}

/// Divergence residual of the reconstructed graph on a lattice whose
/// spacing is the outer diameter over `n_theta`.
pub fn physical_residual(solution: &GridSolution) -> Result<PhysicalResidual> {
    let interp = SolutionInterpolant::new(solution)?;
    let outer = solution.slice(0)?;
    let diameter = 2.0 * outer.values().iter().copied().fold(0.0, f64::max);
    let dx = diameter / solution.n_theta() as f64;
    let field = sample_cartesian(&interp, &outer, dx);
    Ok(check_cartesian_field(&field, &interp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stencil::PeriodicScheme;

    fn circle_slice(grid: &Arc<SphereGrid>, cx: f64, cy: f64, r: f64) -> SupportSlice {
        SupportSlice::from_fn(grid.clone(), |y| r + cx * y[0] + cy * y[1]).unwrap()
    }

    #[test]
    fn problem_rejects_touching_or_swapped_boundaries() {
        let g = Arc::new(SphereGrid::new(2, 16).unwrap());
        let outer = circle_slice(&g, 0.0, 0.0, 1.0);
        let inner = circle_slice(&g, 0.0, 0.0, 2.0);
        assert!(matches!(RingProblem::new(outer.clone(), inner, 16), Err(Error::NotContained { .. })));
        let inner = circle_slice(&g, 0.0, 0.0, 0.5);
        assert!(matches!(RingProblem::new(outer, inner, 4), Err(Error::ResolutionTooSmall(4))));
    }

    #[test]
    fn linear_interpolation_is_not_a_solution() {
        let g = Arc::new(SphereGrid::with_scheme(2, 16, PeriodicScheme::Spectral).unwrap());
        let grid = RingGrid::new(g, 16, 1.0, StencilOrder::Second);
        let (r0, r1) = (2.0, 1.0);
        let h = grid.sample(|_, t| (1.0 - t) * r0 + t * r1);
        let res = discrete_residual(&grid, &h).unwrap();
        let n = grid.n_theta();
        for j in 1..grid.n_t() {
            let t = grid.t(j);
            let hv = (1.0 - t) * r0 + t * r1;
            let expect = -(1.0 + (r1 - r0) * (r1 - r0)) / hv;
            assert!((res[j * n] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn operator_on_polynomials_in_t() {
        let g = Arc::new(SphereGrid::new(2, 16).unwrap());
        let grid = RingGrid::new(g, 16, 1.0, StencilOrder::Fourth);
        let h = grid.sample(|_, t| 2.0 - t + 0.1 * t * t);
        let sol = GridSolution::from_values(grid.clone(), h).unwrap();
        let lt = apply_l(&sol, &grid.sample(|_, t| t)).unwrap();
        let lt2 = apply_l(&sol, &grid.sample(|_, t| t * t)).unwrap();
        assert!(lt.iter().all(|v| v.abs() < 1e-10));
        assert!(lt2.iter().all(|v| (v - 2.0).abs() < 1e-9));
    }
}
