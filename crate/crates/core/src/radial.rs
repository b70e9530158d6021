//! Rotationally symmetric minimal graphs between concentric spheres, for any
//! dimension `n ≥ 2`, and the `n`-dimensional catenoid.
//!
//! With `m = n − 1`, a radial minimal graph has the first integral
//! `r^m |u'| / √(1 + u'²) = c`, so `|u'(r)| = c / √(r^{2m} − c²)` and the
//! level radius `r(t)` satisfies `r_t = −√(r^{2m} − c²)/c`,
//! `r_tt = m (1 + r_t²)/r`.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::concavity::HeightProfile;
use crate::error::{Error, Result};
use crate::interp::Pchip;
use crate::quadrature::{integrate, integrate_log};
use crate::roots::{bisect, newton_bracketed};

const QUAD_TOL: f64 = 1e-13;
const INVERSION_SAMPLES: usize = 2048;
/// Cutoff beyond which the catenoid integrand is integrated analytically.
pub const TAIL_CUTOFF: f64 = 1e4;

/// `(s^{2m} − s0^{2m}) / (s − s0)`, exactly factored so that the flux
/// integrand stays accurate next to its singular point.
fn gap_factor(m: usize, s: f64, s0: f64) -> f64 {
    let mut sum = 0.0;
    let mut sp = 1.0;
    let mut s0p = s0.powi(2 * m as i32 - 1);
    for _ in 0..2 * m {
        sum += sp * s0p;
        sp *= s;
        s0p /= s0;
    }
    sum
}

/// `r^{2m} − c²` with `c = s0^m`, without cancellation near `r = s0`.
fn gap(m: usize, r: f64, s0: f64) -> f64 {
    (r - s0) * gap_factor(m, r, s0)
}

/// `∫_a^b c / √(s^{2m} − c²) ds` for `s0 = c^{1/m} ≤ a`, with `s = s0 + w²`.
fn flux_integral(m: usize, c: f64, s0: f64, a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let wa = (a - s0).max(0.0).sqrt();
    let wb = (b - s0).max(0.0).sqrt();
    integrate(|w| 2.0 * c / gap_factor(m, s0 + w * w, s0).sqrt(), wa, wb, QUAD_TOL).value
}

fn check_dim(dim_n: usize) -> Result<usize> {
    if dim_n < 2 {
        return Err(Error::UnsupportedDimension(dim_n));
    }
    Ok(dim_n - 1)
}

/// Concentric boundary spheres with `u = 0` on the outer and `u = height`
/// on the inner one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialConfig {
    pub dim_n: usize,
    pub r_outer: f64,
    pub r_inner: f64,
    pub height: f64,
}

impl RadialConfig {
    pub fn new(dim_n: usize, r_outer: f64, r_inner: f64) -> Result<Self> {
        Self::with_height(dim_n, r_outer, r_inner, 1.0)
    }

    pub fn with_height(dim_n: usize, r_outer: f64, r_inner: f64, height: f64) -> Result<Self> {
        check_dim(dim_n)?;
        if !(r_inner > 0.0 && r_outer > r_inner && r_outer.is_finite()) {
            return Err(Error::InvalidRing(alloc::format!(
                "need r_outer > r_inner > 0, got r_outer = {r_outer}, r_inner = {r_inner}"
            )));
        }
        if !(height > 0.0 && height.is_finite()) {
            return Err(Error::Domain(alloc::format!("height must be positive, got {height}")));
        }
        Ok(Self { dim_n, r_outer, r_inner, height })
    }

    fn m(&self) -> usize {
        self.dim_n - 1
    }

    /// Height drop `∫_{r_inner}^{r_outer} c / √(s^{2m} − c²) ds` for a flux
    /// `0 < c ≤ r_inner^m`.
    pub fn height_drop(&self, c: f64) -> f64 {
        let m = self.m();
        let s0 = c.powf(1.0 / m as f64).min(self.r_inner);
        flux_integral(m, c, s0, self.r_inner, self.r_outer)
    }

    /// The largest drop a graph over the ring can realize (`c = r_inner^m`,
    /// vertical tangent at the inner sphere).
    pub fn max_height_drop(&self) -> f64 {
        flux_integral(self.m(), self.r_inner.powi(self.m() as i32), self.r_inner, self.r_inner, self.r_outer)
    }
}

/// Solution of the radial problem: the flux constant and the maps between
/// radius and height.
#[derive(Debug, Clone)]
pub struct RadialSolution {
    pub config: RadialConfig,
    pub c: f64,
    s0: f64,
    inverse: Pchip,
}

/// Per-level quantities of a radial solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialSample {
    pub t: f64,
    pub r: f64,
    pub u: f64,
    pub grad_norm: f64,
    pub k: f64,
    pub sigma1: f64,
    pub phi: f64,
}

/// Finds the flux `c` with `height_drop(c) = height`.
pub fn solve_flux(config: RadialConfig) -> Result<RadialSolution> {
    let m = config.m();
    let c_max = config.r_inner.powi(m as i32);
    let max_drop = config.max_height_drop();
    if max_drop < config.height {
        return Err(Error::NoGraphSolution { requested: config.height, max_drop });
    }
    let eps = 1e-9 * c_max;
    let c = bisect(|c| config.height_drop(c) - config.height, eps, c_max, 1e-12 * c_max.max(1.0))?;
    let s0 = c.powf(1.0 / m as f64).min(config.r_inner);
    let mut sol = RadialSolution {
        config,
        c,
        s0,
        inverse: Pchip::new(alloc::vec![0.0, 1.0], alloc::vec![0.0, 1.0])?,
    };
    // u on log-spaced radii, accumulated outward-in.
    let (lo, hi) = (config.r_inner.ln(), config.r_outer.ln());
    let radii: Vec<f64> = (0..INVERSION_SAMPLES)
        .map(|k| {
            let x = hi - (hi - lo) * k as f64 / (INVERSION_SAMPLES - 1) as f64;
            if k == 0 {
                config.r_outer
            } else if k == INVERSION_SAMPLES - 1 {
                config.r_inner
            } else {
                x.exp()
            }
        })
        .collect();
    let mut ts = Vec::with_capacity(INVERSION_SAMPLES);
    let mut acc = 0.0;
    ts.push(0.0);
    for w in radii.windows(2) {
        acc += flux_integral(m, c, s0, w[1], w[0]);
        ts.push(acc);
    }
    sol.inverse = Pchip::new(ts, radii)?;
    Ok(sol)
}

impl RadialSolution {
    pub fn dim_n(&self) -> usize {
        self.config.dim_n
    }

    fn m(&self) -> usize {
        self.config.dim_n - 1
    }

    /// Height `u(r) = ∫_r^{r_outer} c/√(s^{2m} − c²) ds`.
    pub fn u(&self, r: f64) -> f64 {
        flux_integral(self.m(), self.c, self.s0, r, self.config.r_outer)
    }

    /// `u'(r) = −c / √(r^{2m} − c²)`.
    pub fn du_dr(&self, r: f64) -> f64 {
        -self.c / gap(self.m(), r, self.s0).sqrt()
    }

    pub fn grad_norm(&self, r: f64) -> f64 {
        -self.du_dr(r)
    }

    /// `r^m |u'| / √(1 + u'²)`, constant and equal to `c` along a solution.
    pub fn first_integral(&self, r: f64) -> f64 {
        let du = self.du_dr(r);
        r.powi(self.m() as i32) * du.abs() / (1.0 + du * du).sqrt()
    }

    /// Level radius `r(t)` for `t ∈ [0, height]`: monotone cubic guess from
    /// the sample table, polished by Newton's method on `u(r) = t`.
    pub fn r_of_t(&self, t: f64) -> f64 {
        let cfg = &self.config;
        if t <= 0.0 {
            return cfg.r_outer;
        }
        if t >= cfg.height {
            return cfg.r_inner;
        }
        let guess = self.inverse.eval(t).clamp(cfg.r_inner, cfg.r_outer);
        let m = self.m();
        newton_bracketed(
            |r| (t - self.u(r), self.c / gap(m, r, self.s0).sqrt()),
            cfg.r_inner,
            cfg.r_outer,
            guess,
            1e-15 * cfg.r_outer,
            60,
        )
        .unwrap_or(guess)
    }

    /// `(r_t, r_tt)` at radius `r`.
    pub fn r_derivatives(&self, r: f64) -> (f64, f64) {
        let m = self.m();
        let c = self.c;
        let rt = -gap(m, r, self.s0).sqrt() / c;
        let rtt = m as f64 * (1.0 + rt * rt) / r;
        (rt, rtt)
    }

    /// `φ = c^{(n−3)/(n−1)} r^{2−n}`.
    pub fn phi(&self, r: f64) -> f64 {
        let n = self.config.dim_n as f64;
        self.c.powf((n - 3.0) / (n - 1.0)) * r.powf(2.0 - n)
    }

    pub fn sample(&self, t: f64) -> RadialSample {
        let r = self.r_of_t(t);
        let n = self.config.dim_n;
        RadialSample {
            t,
            r,
            u: t,
            grad_norm: self.grad_norm(r),
            k: r.powi(1 - n as i32),
            sigma1: (n - 1) as f64 / r,
            phi: self.phi(r),
        }
    }

    /// Uniform grid of `intervals + 1` heights on `[0, height]`.
    pub fn t_grid(&self, intervals: usize) -> Vec<f64> {
        (0..=intervals).map(|j| self.config.height * j as f64 / intervals as f64).collect()
    }
}

/// Restriction of the `f(t)` profile to a radial solution, where the
/// minimum over each level sphere is the common value
/// `c^{(n−3)/(n−1)} r(t)^{2−n}`.
pub fn radial_phi_profile(solution: &RadialSolution, t_grid: &[f64], tolerance: f64) -> Result<HeightProfile> {
    let f: Vec<f64> = t_grid.iter().map(|&t| solution.phi(solution.r_of_t(t))).collect();
    HeightProfile::new(t_grid.to_vec(), f, alloc::vec![f64::NAN; t_grid.len()], tolerance)
}

/// Closed-form quantities on the catenoid at radius `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatenoidInvariants {
    pub grad_norm: f64,
    pub k: f64,
    pub phi: f64,
}

fn check_catenoid_radius(r: f64) -> Result<()> {
    if !(r >= 2.0) || !r.is_finite() {
        return Err(Error::Domain(alloc::format!("catenoid radius must be at least 2, got {r}")));
    }
    Ok(())
}

/// Height of the catenoid over the sphere of radius 2:
/// `u(r) = ∫_2^r ds / √(s^{2(n−1)} − 1)`.
pub fn catenoid_u(r: f64, dim_n: usize) -> Result<f64> {
    let m = check_dim(dim_n)?;
    check_catenoid_radius(r)?;
    Ok(flux_integral(m, 1.0, 1.0, 2.0, r))
}

/// `|∇u| = 1/√(r^{2(n−1)} − 1)`, `K = r^{1−n}`, `φ = r^{2−n}`.
pub fn catenoid_invariants(r: f64, dim_n: usize) -> Result<CatenoidInvariants> {
    let m = check_dim(dim_n)?;
    check_catenoid_radius(r)?;
    let n = dim_n as i32;
    Ok(CatenoidInvariants {
        grad_norm: 1.0 / gap(m, r, 1.0).sqrt(),
        k: r.powi(1 - n),
        phi: r.powi(2 - n),
    })
}

/// Total height `R = ∫_2^∞ ds / √(s^{2(n−1)} − 1)` (finite for `n ≥ 3`).
pub fn catenoid_r(dim_n: usize) -> Result<f64> {
    let m = check_dim(dim_n)?;
    if dim_n == 2 {
        return Err(Error::Divergent("the catenoid height grows like arccosh r for n = 2".into()));
    }
    let s = TAIL_CUTOFF;
    let n = dim_n as f64;
    let body = flux_integral(m, 1.0, 1.0, 2.0, s);
    let tail = s.powf(2.0 - n) / (n - 2.0) + excess_tail(dim_n, s);
    Ok(body + tail)
}

/// `1/√(s^{2m} − 1) − s^{−m}`, computed without cancellation.
fn excess(m: usize, s: f64) -> f64 {
    let sm = s.powi(-(m as i32));
    let x = sm * sm;
    let q = (1.0 - x).sqrt();
    sm * x / (q * (1.0 + q))
}

/// `∫_S^∞ [1/√(s^{2m} − 1) − s^{−m}] ds` from the first two series terms.
fn excess_tail(dim_n: usize, s: f64) -> f64 {
    let m = (dim_n - 1) as f64;
    0.5 * s.powf(1.0 - 3.0 * m) / (3.0 * m - 1.0) + 0.375 * s.powf(1.0 - 5.0 * m) / (5.0 * m - 1.0)
}

/// `∫_r^∞ [1/√(s^{2m} − 1) − s^{−m}] ds`.
fn excess_integral(dim_n: usize, r: f64) -> f64 {
    let m = dim_n - 1;
    let cut = TAIL_CUTOFF.max(100.0 * r);
    let scale = 0.5 * r.powf(1.0 - 3.0 * m as f64) / (3.0 * m as f64 - 1.0);
    let body = integrate_log(|s| excess(m, s), r, cut, 1e-13 * scale).value;
    body + excess_tail(dim_n, cut)
}

/// The height deficit `−u(r) + R` against the leading term of its
/// asymptotic expansion as written, `(−1)^n r^{2−n} / (2−n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticResidual {
    /// `R − u(r) = ∫_r^∞ ds/√(s^{2(n−1)} − 1)`, always positive.
    pub deficit: f64,
    /// `(−1)^n r^{2−n} / (2−n)`.
    pub leading: f64,
    /// `deficit − leading`.
    pub residual: f64,
    /// `residual / r^{4−3n}`.
    pub scaled: f64,
    /// The leading term has the opposite sign of the deficit. This happens
    /// for every even `n`, where the true leading term is `r^{2−n}/(n−2)`.
    pub sign_disagreement: bool,
}

pub fn asymptotic_residual(r: f64, dim_n: usize) -> Result<AsymptoticResidual> {
    check_dim(dim_n)?;
    if dim_n < 3 {
        return Err(Error::Divergent("R is infinite for n = 2".into()));
    }
    check_catenoid_radius(r)?;
    let n = dim_n as f64;
    let power = r.powf(2.0 - n);
    let sign = if dim_n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let leading = sign * power / (2.0 - n);
    let exact_leading = power / (n - 2.0);
    let excess = excess_integral(dim_n, r);
    let deficit = exact_leading + excess;
    // For odd n the two leading terms cancel exactly.
    let residual = (exact_leading - leading) + excess;
    if !(deficit > 0.0) {
        return Err(Error::Domain(alloc::format!("catenoid deficit {deficit} is not positive at r = {r}")));
    }
    Ok(AsymptoticResidual {
        deficit,
        leading,
        residual,
        scaled: residual / r.powf(4.0 - 3.0 * n),
        sign_disagreement: leading.signum() != deficit.signum(),
    })
}
