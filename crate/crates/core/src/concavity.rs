//! Level-set curvature functionals and the numerical checks built on them:
//! concavity of `f(t) = min_{Γ_t} φ`, the chordal lower bound it implies,
//! convexity of maxima of subsolutions, the differential inequality for
//! `e^{βφ}` at critical points, the two-dimensional sum-of-squares
//! identity, and the quadratic bound used in the maximum principle argument.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::interp::TrigSeries;
use crate::jet::Jet;
use crate::radial::RadialSolution;
use crate::ring::{apply_l, GridSolution};

/// Relative size of `|∂_θ φ|` below which a node counts as critical.
pub const CRITICAL_RATIO: f64 = 1e-6;

/// `β = −1/(n−1)`.
pub fn beta(dim_n: usize) -> f64 {
    -1.0 / (dim_n as f64 - 1.0)
}

/// `ρ(s) = (n−3)/2 · log(1 + s)`.
pub fn rho(dim_n: usize, s: f64) -> f64 {
    0.5 * (dim_n as f64 - 3.0) * s.ln_1p()
}

/// The curvature quantity of the level sets in two equivalent forms:
/// `level = [(1 + h_t²)^{−(n−3)/2} K]^{1/(n−1)}` and
/// `aux = ρ(h_t²) − log K`, related by `level = e^{β aux}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiField {
    pub dim_n: usize,
    pub beta: f64,
    pub level: Vec<f64>,
    pub aux: Vec<f64>,
}

impl PhiField {
    pub fn from_parts(dim_n: usize, h_t: &[f64], k: &[f64]) -> Result<Self> {
        if dim_n < 2 {
            return Err(Error::UnsupportedDimension(dim_n));
        }
        if h_t.len() != k.len() {
            return Err(Error::LengthMismatch { expected: h_t.len(), found: k.len() });
        }
        let n = dim_n as f64;
        let mut level = Vec::with_capacity(k.len());
        let mut aux = Vec::with_capacity(k.len());
        for (node, (&ht, &kk)) in h_t.iter().zip(k).enumerate() {
            if !(ht < 0.0) {
                return Err(Error::Orientation { node, h_t: ht });
            }
            if !(kk > 0.0) || !kk.is_finite() {
                return Err(Error::NonConvexSlice { node, min_eig: kk, max_eig: kk });
            }
            let s = ht * ht;
            level.push(((1.0 + s).powf(-0.5 * (n - 3.0)) * kk).powf(1.0 / (n - 1.0)));
            aux.push(rho(dim_n, s) - kk.ln());
        }
        Ok(Self { dim_n, beta: beta(dim_n), level, aux })
    }

    /// `e^{β aux}` node by node.
    pub fn exp_beta_aux(&self) -> Vec<f64> {
        self.aux.iter().map(|a| (self.beta * a).exp()).collect()
    }
}

/// `φ` on a planar ring solution, where `K = 1/(h + h_θθ)`.
pub fn phi_field(solution: &GridSolution) -> Result<PhiField> {
    let k: Vec<f64> = solution.fields.b.iter().map(|b| 1.0 / b).collect();
    PhiField::from_parts(2, &solution.fields.h_t, &k)
}

/// Centered second differences `(f_{j+1} − 2 f_j + f_{j−1}) / Δt²` at the
/// interior samples.
pub fn generalized_second_derivative(f: &[f64], dt: f64) -> Result<Vec<f64>> {
    if f.len() < 3 {
        return Err(Error::TooFewSamples { needed: 3, got: f.len() });
    }
    Ok(f.windows(3).map(|w| (w[2] - 2.0 * w[1] + w[0]) / (dt * dt)).collect())
}

/// Samples of `f(t)` with their second differences and concavity verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct HeightProfile {
    pub t: Vec<f64>,
    pub f: Vec<f64>,
    /// Location of the minimum over the level set, `NaN` when not tracked.
    pub argmin: Vec<f64>,
    /// Second differences at `t[1..len-1]`.
    pub d2f: Vec<f64>,
    pub max_d2f: f64,
    pub tolerance: f64,
    /// `max_d2f ≤ tolerance`.
    pub concave: bool,
}

impl HeightProfile {
    pub fn new(t: Vec<f64>, f: Vec<f64>, argmin: Vec<f64>, tolerance: f64) -> Result<Self> {
        if t.len() != f.len() || argmin.len() != f.len() {
            return Err(Error::LengthMismatch { expected: t.len(), found: f.len().min(argmin.len()) });
        }
        if t.len() < 3 {
            return Err(Error::TooFewSamples { needed: 3, got: t.len() });
        }
        let dt = (t[t.len() - 1] - t[0]) / (t.len() - 1) as f64;
        for (j, w) in t.windows(2).enumerate() {
            if !(((w[1] - w[0]) - dt).abs() <= 1e-9 * dt) || !(dt > 0.0) {
                return Err(Error::Domain(alloc::format!("t samples are not uniform at index {}", j + 1)));
            }
        }
        if let Some(j) = f.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(j));
        }
        let d2f = generalized_second_derivative(&f, dt)?;
        let max_d2f = d2f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(Self { t, f, argmin, d2f, max_d2f, tolerance, concave: max_d2f <= tolerance })
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.concave = self.max_d2f <= tolerance;
        self
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.t[1] - self.t[0]
    }
}

/// Periodic discrete extremum of `sign * v` refined by a 3-point parabola.
/// Ties go to the smallest index. Returns `(value, location)` with the
/// location in units of the grid spacing.
fn periodic_extremum(v: &[f64], sign: f64) -> (f64, f64) {
    let n = v.len();
    let mut best = 0;
    for k in 1..n {
        if sign * v[k] < sign * v[best] {
            best = k;
        }
    }
    let (fm, f0, fp) = (v[(best + n - 1) % n], v[best], v[(best + 1) % n]);
    let denom = sign * (fm - 2.0 * f0 + fp);
    if denom > 0.0 {
        let offset = 0.5 * (fm - fp) / (fm - 2.0 * f0 + fp);
        let value = f0 - 0.125 * (fp - fm) * (fp - fm) / (fm - 2.0 * f0 + fp);
        (value, best as f64 + offset)
    } else {
        (f0, best as f64)
    }
}

/// Extremum of the trigonometric interpolant of `sign * v`, found by Newton's
/// method from the discrete extremum. Falls back to the parabola when the
/// iteration leaves the neighboring cells. Returns `(value, θ)`.
fn spectral_extremum(v: &[f64], sign: f64) -> (f64, f64) {
    let n = v.len();
    let h = 2.0 * core::f64::consts::PI / n as f64;
    let (coarse_value, coarse_loc) = periodic_extremum(v, sign);
    let series = TrigSeries::from_samples(v);
    let start = coarse_loc * h;
    let mut theta = start;
    for _ in 0..30 {
        let [_, d1, d2] = series.eval(theta);
        if !(sign * d2 > 0.0) {
            return (coarse_value, start);
        }
        let step = d1 / d2;
        theta -= step;
        if (theta - start).abs() > h {
            return (coarse_value, start);
        }
        if step.abs() <= 1e-14 {
            break;
        }
    }
    let tau = 2.0 * core::f64::consts::PI;
    let wrapped = theta % tau;
    (series.eval(theta)[0], if wrapped < 0.0 { wrapped + tau } else { wrapped })
}

/// `f(t)`: minimum of `φ_level` over each level curve.
pub fn f_profile(phi: &PhiField, solution: &GridSolution, tolerance: f64) -> Result<HeightProfile> {
    let grid = &solution.grid;
    if phi.level.len() != grid.len() {
        return Err(Error::LengthMismatch { expected: grid.len(), found: phi.level.len() });
    }
    let n = grid.n_theta();
    let mut f = Vec::with_capacity(grid.rows());
    let mut argmin = Vec::with_capacity(grid.rows());
    for j in 0..grid.rows() {
        let (v, loc) = spectral_extremum(&phi.level[j * n..(j + 1) * n], 1.0);
        f.push(v);
        argmin.push(loc);
    }
    let t = (0..grid.rows()).map(|j| grid.t(j)).collect();
    HeightProfile::new(t, f, argmin, tolerance)
}

/// Which form of the chordal estimate applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorollaryCase {
    /// `n = 3`: the estimate is on `√K`.
    NEquals3,
    /// Any other `n`: the gradient factor enters.
    General,
}

/// Margins `f(t) − [(1 − s) f(0) + s f(T)]`, `s = t/T`.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    pub margins: Vec<f64>,
    pub min_margin: f64,
    pub case: CorollaryCase,
}

pub fn corollary_margin(profile: &HeightProfile, dim_n: usize) -> InequalityReport {
    let last = profile.len() - 1;
    let (t0, t1) = (profile.t[0], profile.t[last]);
    let (f0, f1) = (profile.f[0], profile.f[last]);
    let margins: Vec<f64> = profile
        .t
        .iter()
        .zip(&profile.f)
        .map(|(&t, &f)| {
            let s = (t - t0) / (t1 - t0);
            f - ((1.0 - s) * f0 + s * f1)
        })
        .collect();
    let min_margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
    let case = if dim_n == 3 { CorollaryCase::NEquals3 } else { CorollaryCase::General };
    InequalityReport { margins, min_margin, case }
}

/// Tolerance for second differences of `f` from a coarse and a fine run on
/// nested t-grids: `4 max |D²f_fine − D²f_coarse| + 1e−9` at common heights.
pub fn calibrate_tolerance(coarse: &HeightProfile, fine: &HeightProfile) -> Result<f64> {
    let nc = coarse.len() - 1;
    let nf = fine.len() - 1;
    if nf != 2 * nc {
        return Err(Error::Domain(alloc::format!(
            "fine profile must have twice the intervals of the coarse one ({nf} vs {nc})"
        )));
    }
    let mut worst: f64 = 0.0;
    for j in 1..nc {
        if (coarse.t[j] - fine.t[2 * j]).abs() > 1e-12 * coarse.t[nc].abs().max(1.0) {
            return Err(Error::Domain("profiles are not on nested grids".into()));
        }
        worst = worst.max((fine.d2f[2 * j - 1] - coarse.d2f[j - 1]).abs());
    }
    Ok(4.0 * worst + 1e-9)
}

/// How the first-order θ-terms of a subsolution inequality are treated.
#[derive(Debug, Clone, Copy)]
pub enum FirstOrder<'a> {
    /// `L(G) ≥ 0` is required as is.
    None,
    /// `L(G) + c · G_θ ≥ 0` with the given coefficients.
    Given(&'a [f64]),
    /// Any bounded coefficient: away from θ-critical nodes a suitable `c`
    /// always exists, so only critical nodes are checked.
    Absorb,
}

/// Outcome of the convexity check on `max_θ G`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityVerdict {
    pub pass: bool,
    /// `max_θ G` per row.
    pub max_values: Vec<f64>,
    /// Second differences of `max_values` at interior rows.
    pub d2: Vec<f64>,
    /// Row of the smallest second difference and its value.
    pub worst_row: usize,
    pub worst_value: f64,
}

fn critical_threshold(values: &[f64], derivative: &[f64]) -> f64 {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs())) + derivative.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    CRITICAL_RATIO * scale
}

/// Checks that `max_θ G(θ, t)` is convex in t when `G` is a subsolution
/// (`L(G) ≥ −precondition_tol`, modulo first-order θ-terms).
pub fn max_convexity_check(
    solution: &GridSolution,
    g: &[f64],
    first_order: FirstOrder<'_>,
    precondition_tol: f64,
    tolerance: f64,
) -> Result<ConvexityVerdict> {
    let grid = &solution.grid;
    let lg = apply_l(solution, g)?;
    let g_th = grid.d_theta(g);
    let n = grid.n_theta();
    let interior = n..grid.len() - n;
    let eps_crit = critical_threshold(&g[interior.clone()], &g_th[interior.clone()]);
    for k in interior {
        let value = match first_order {
            FirstOrder::None => lg[k],
            FirstOrder::Given(c) => {
                if c.len() != g.len() {
                    return Err(Error::LengthMismatch { expected: g.len(), found: c.len() });
                }
                lg[k] + c[k] * g_th[k]
            }
            FirstOrder::Absorb => {
                if g_th[k].abs() > eps_crit {
                    continue;
                }
                lg[k]
            }
        };
        if value < -precondition_tol {
            return Err(Error::Precondition { node: k, value });
        }
    }
    let max_values: Vec<f64> = (0..grid.rows()).map(|j| spectral_extremum(&g[j * n..(j + 1) * n], -1.0).0).collect();
    let d2 = generalized_second_derivative(&max_values, grid.dt())?;
    let (worst_row, worst_value) = d2
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (j, &v)| if v < acc.1 { (j + 1, v) } else { acc });
    Ok(ConvexityVerdict { pass: worst_value >= -tolerance, max_values, d2, worst_row, worst_value })
}

/// Both sides of the planar identity for `φ = log b` at every node:
/// `L(φ) = ((b_t − h_t)/b)² + (h_tθ/b)² + 1/b²` where `∂_θ φ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RemarkFields {
    pub phi: Vec<f64>,
    pub phi_theta: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
}

pub fn remark_identity_fields(solution: &GridSolution) -> Result<RemarkFields> {
    let grid = &solution.grid;
    let f = &solution.fields;
    let phi: Vec<f64> = f.b.iter().map(|b| b.ln()).collect();
    let phi_theta = grid.d_theta(&phi);
    let lhs = apply_l(solution, &phi)?;
    let b_t = grid.d_t(&f.b);
    let rhs = (0..phi.len())
        .map(|k| {
            let b = f.b[k];
            let x = (b_t[k] - f.h_t[k]) / b;
            let y = f.h_ttheta[k] / b;
            x * x + y * y + 1.0 / (b * b)
        })
        .collect();
    Ok(RemarkFields { phi, phi_theta, lhs, rhs })
}

/// Residual of the identity at θ-critical interior nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct RemarkReport {
    /// Largest residual per interior row, `None` when the row has no
    /// critical node.
    pub per_row: Vec<Option<f64>>,
    pub max_residual: f64,
    pub critical_nodes: usize,
    /// Interior rows without a critical node.
    pub missing_rows: Vec<usize>,
}

pub fn remark_identity_residual(solution: &GridSolution) -> Result<RemarkReport> {
    let fields = remark_identity_fields(solution)?;
    let grid = &solution.grid;
    let n = grid.n_theta();
    let interior = n..grid.len() - n;
    let eps = critical_threshold(&fields.phi[interior.clone()], &fields.phi_theta[interior]);
    let mut per_row = Vec::with_capacity(grid.n_t() - 1);
    let mut missing_rows = Vec::new();
    let mut critical_nodes = 0;
    let mut max_residual: f64 = 0.0;
    for j in 1..grid.n_t() {
        let mut row_max: Option<f64> = None;
        for k in j * n..(j + 1) * n {
            if fields.phi_theta[k].abs() <= eps {
                let r = (fields.lhs[k] - fields.rhs[k]).abs();
                row_max = Some(row_max.map_or(r, |m: f64| m.max(r)));
                critical_nodes += 1;
            }
        }
        match row_max {
            Some(r) => max_residual = max_residual.max(r),
            None => missing_rows.push(j),
        }
        per_row.push(row_max);
    }
    Ok(RemarkReport { per_row, max_residual, critical_nodes, missing_rows })
}

/// Exponent used in the differential inequality check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaChoice {
    /// `β = −1/(n−1)`.
    Standard,
    /// `β = +1/(n−1)`, a control that must fail.
    WrongSign,
}

impl BetaChoice {
    pub fn value(self, dim_n: usize) -> f64 {
        match self {
            BetaChoice::Standard => beta(dim_n),
            BetaChoice::WrongSign => -beta(dim_n),
        }
    }
}

/// Largest `L(e^{βφ_aux})` over θ-critical interior nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityCheck {
    pub worst_value: f64,
    pub worst_node: usize,
    pub critical_nodes: usize,
    pub missing_rows: Vec<usize>,
}

pub fn differential_inequality_check(solution: &GridSolution, choice: BetaChoice) -> Result<InequalityCheck> {
    let phi = phi_field(solution)?;
    let b = choice.value(2);
    let g: Vec<f64> = phi.aux.iter().map(|a| (b * a).exp()).collect();
    let lg = apply_l(solution, &g)?;
    let grid = &solution.grid;
    let dphi = grid.d_theta(&phi.aux);
    let n = grid.n_theta();
    let interior = n..grid.len() - n;
    let eps = critical_threshold(&phi.aux[interior.clone()], &dphi[interior]);
    let mut worst_value = f64::NEG_INFINITY;
    let mut worst_node = 0;
    let mut critical_nodes = 0;
    let mut missing_rows = Vec::new();
    for j in 1..grid.n_t() {
        let mut any = false;
        for k in j * n..(j + 1) * n {
            if dphi[k].abs() <= eps {
                any = true;
                critical_nodes += 1;
                if lg[k] > worst_value {
                    worst_value = lg[k];
                    worst_node = k;
                }
            }
        }
        if !any {
            missing_rows.push(j);
        }
    }
    Ok(InequalityCheck { worst_value, worst_node, critical_nodes, missing_rows })
}

/// `L(e^{βφ_aux})` along a radial solution, where `L` reduces to `∂_tt`.
/// Derivatives of `r(t)` come from the ordinary differential equation
/// `r_tt = (n−1)(1 + r_t²)/r`, carried through `φ_aux` by jets.
pub fn radial_inequality(solution: &RadialSolution, t_grid: &[f64], choice: BetaChoice) -> Vec<f64> {
    let n = solution.dim_n();
    let m = (n - 1) as f64;
    let b = choice.value(n);
    t_grid
        .iter()
        .map(|&t| {
            let r = solution.r_of_t(t);
            let (rt, rtt) = solution.r_derivatives(r);
            let rttt = m * (2.0 * rt * rtt / r - (1.0 + rt * rt) * rt / (r * r));
            let rj = Jet::new(r, rt, rtt);
            let pj = Jet::new(rt, rtt, rttt);
            let s = pj * pj;
            let rho = (s + Jet::constant(1.0)).ln().scale(0.5 * (n as f64 - 3.0));
            let log_k = rj.ln().scale(1.0 - n as f64);
            let aux = rho - log_k;
            aux.scale(b).exp().d2
        })
        .collect()
}

/// `Γ = Σ c_k²/b_k − λ (1 + λ Σ 1/b_k)⁻¹ (Σ c_k/b_k)²` and the bound `4μ²Γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticBound {
    pub gamma: f64,
    pub bound: f64,
}

fn check_quadratic(lambda: f64, b: &[f64], c: &[f64]) -> Result<()> {
    if b.len() != c.len() {
        return Err(Error::LengthMismatch { expected: b.len(), found: c.len() });
    }
    if b.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(alloc::format!("lambda must be non-negative, got {lambda}")));
    }
    if let Some(k) = b.iter().position(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::Domain(alloc::format!("b[{k}] = {} is not positive", b[k])));
    }
    if let Some(k) = c.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(k));
    }
    Ok(())
}

pub fn quadratic_bound(lambda: f64, mu: f64, b: &[f64], c: &[f64]) -> Result<QuadraticBound> {
    check_quadratic(lambda, b, c)?;
    let sum_c2b: f64 = c.iter().zip(b).map(|(c, b)| c * c / b).sum();
    let sum_inv: f64 = b.iter().map(|b| 1.0 / b).sum();
    let sum_cb: f64 = c.iter().zip(b).map(|(c, b)| c / b).sum();
    let gamma = sum_c2b - lambda / (1.0 + lambda * sum_inv) * sum_cb * sum_cb;
    Ok(QuadraticBound { gamma, bound: 4.0 * mu * mu * gamma })
}

/// `Q(X) = −Σ b_k X_k² − λ (Σ X_k)² + 4μ Σ c_k X_k`.
pub fn quadratic_form(lambda: f64, mu: f64, b: &[f64], c: &[f64], x: &[f64]) -> f64 {
    let sum: f64 = x.iter().sum();
    let mut q = -lambda * sum * sum;
    for k in 0..x.len() {
        q += -b[k] * x[k] * x[k] + 4.0 * mu * c[k] * x[k];
    }
    q
}

/// Maximizer of `Q` over one coordinate with the others fixed.
pub fn quadratic_coordinate_max(lambda: f64, mu: f64, b: &[f64], c: &[f64], x: &[f64], k: usize) -> f64 {
    let others: f64 = x.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, v)| v).sum();
    (4.0 * mu * c[k] - 2.0 * lambda * others) / (2.0 * (b[k] + lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn second_differences_of_quadratics_are_exact() {
        let f: Vec<f64> = (0..7).map(|j| (0.1 * j as f64).powi(2)).collect();
        for v in generalized_second_derivative(&f, 0.1).unwrap() {
            assert!((v - 2.0).abs() < 1e-10);
        }
        let g: Vec<f64> = f.iter().map(|v| -v).collect();
        for v in generalized_second_derivative(&g, 0.1).unwrap() {
            assert!((v + 2.0).abs() < 1e-10);
        }
        assert!(generalized_second_derivative(&[1.0, 2.0], 0.1).is_err());
    }

    #[test]
    fn constant_profile_is_flat() {
        let t: Vec<f64> = (0..5).map(|j| j as f64 / 4.0).collect();
        let p = HeightProfile::new(t, vec![1.0; 5], vec![f64::NAN; 5], 0.0).unwrap();
        assert!(p.concave);
        assert!(p.d2f.iter().all(|&v| v == 0.0));
        let rep = corollary_margin(&p, 2);
        assert!(rep.margins.iter().all(|&m| m == 0.0));
        assert_eq!(rep.case, CorollaryCase::General);
    }

    #[test]
    fn parabolic_refinement_finds_vertex() {
        let n = 16;
        let v: Vec<f64> = (0..n).map(|k| (k as f64 - 5.3).powi(2) + 1.0).collect();
        let (val, loc) = periodic_extremum(&v, 1.0);
        assert!((val - 1.0).abs() < 1e-12);
        assert!((loc - 5.3).abs() < 1e-12);
        let w: Vec<f64> = v.iter().map(|x| -x).collect();
        let (val, loc) = periodic_extremum(&w, -1.0);
        assert!((val + 1.0).abs() < 1e-12 && (loc - 5.3).abs() < 1e-12);
    }

    #[test]
    fn single_variable_bound_is_attained() {
        let (b, c, mu) = (2.0, 0.7, 1.3);
        let qb = quadratic_bound(0.0, mu, &[b], &[c]).unwrap();
        let x = 2.0 * mu * c / b;
        let q = quadratic_form(0.0, mu, &[b], &[c], &[x]);
        assert!((q - qb.bound).abs() < 1e-12);
        assert!((qb.bound - 4.0 * mu * mu * c * c / b).abs() < 1e-12);
        assert!(quadratic_bound(-1.0, 1.0, &[1.0], &[1.0]).is_err());
        assert!(quadratic_bound(1.0, 1.0, &[0.0], &[1.0]).is_err());
    }

    #[test]
    fn phi_forms_agree() {
        let ht = [-0.3, -2.0, -7.5];
        let k = [0.5, 1.7, 0.01];
        for n in 2..6 {
            let p = PhiField::from_parts(n, &ht, &k).unwrap();
            for (a, b) in p.exp_beta_aux().iter().zip(&p.level) {
                assert!((a / b - 1.0).abs() < 1e-12);
            }
        }
    }
}
