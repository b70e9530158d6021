//! One-dimensional interpolants: monotone piecewise cubic Hermite (PCHIP),
//! clamped cubic splines, and trigonometric interpolation of periodic
//! samples.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

fn locate(xs: &[f64], x: f64) -> usize {
    // Index k with xs[k] <= x < xs[k+1], clamped to valid intervals. Works for
    // increasing and decreasing knots.
    let n = xs.len();
    let increasing = xs[n - 1] > xs[0];
    let mut lo = 0;
    let mut hi = n - 1;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        let right = if increasing { xs[mid] <= x } else { xs[mid] >= x };
        if right {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn check_knots(xs: &[f64], ys: &[f64], needed: usize) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch { expected: xs.len(), found: ys.len() });
    }
    if xs.len() < needed {
        return Err(Error::TooFewSamples { needed, got: xs.len() });
    }
    let increasing = xs[1] > xs[0];
    for (i, w) in xs.windows(2).enumerate() {
        if (w[1] > w[0]) != increasing || w[1] == w[0] {
            return Err(Error::Domain(alloc::format!("knots not strictly monotone at index {}", i + 1)));
        }
    }
    Ok(())
}

fn hermite(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> (f64, f64) {
    let h = x1 - x0;
    let s = (x - x0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let value = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
    let dh00 = (6.0 * s2 - 6.0 * s) / h;
    let dh10 = 3.0 * s2 - 4.0 * s + 1.0;
    let dh01 = (-6.0 * s2 + 6.0 * s) / h;
    let dh11 = 3.0 * s2 - 2.0 * s;
    let slope = dh00 * y0 + dh10 * d0 + dh01 * y1 + dh11 * d1;
    (value, slope)
}

/// Shape-preserving piecewise cubic Hermite interpolant (Fritsch–Carlson
/// slopes with the harmonic-mean rule).
#[derive(Debug, Clone)]
pub struct Pchip {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ds: Vec<f64>,
}

impl Pchip {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        check_knots(&xs, &ys, 2)?;
        let n = xs.len();
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|k| (ys[k + 1] - ys[k]) / h[k]).collect();
        let mut ds = vec![0.0; n];
        if n == 2 {
            ds[0] = delta[0];
            ds[1] = delta[0];
            return Ok(Self { xs, ys, ds });
        }
        for k in 1..n - 1 {
            if delta[k - 1] * delta[k] > 0.0 {
                let w1 = 2.0 * h[k] + h[k - 1];
                let w2 = h[k] + 2.0 * h[k - 1];
                ds[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
            }
        }
        ds[0] = end_slope(h[0], h[1], delta[0], delta[1]);
        ds[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        Ok(Self { xs, ys, ds })
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_with_slope(x).0
    }

    pub fn eval_with_slope(&self, x: f64) -> (f64, f64) {
        let k = locate(&self.xs, x);
        hermite(self.xs[k], self.xs[k + 1], self.ys[k], self.ys[k + 1], self.ds[k], self.ds[k + 1], x)
    }
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d.signum() != d0.signum() {
        0.0
    } else if d0.signum() != d1.signum() && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

/// Cubic spline with prescribed end slopes.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ds: Vec<f64>,
}

impl CubicSpline {
    pub fn clamped(xs: Vec<f64>, ys: Vec<f64>, slope_start: f64, slope_end: f64) -> Result<Self> {
        check_knots(&xs, &ys, 2)?;
        let n = xs.len();
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        // Tridiagonal system for the knot slopes.
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        diag[0] = 1.0;
        rhs[0] = slope_start;
        diag[n - 1] = 1.0;
        rhs[n - 1] = slope_end;
        for k in 1..n - 1 {
            sub[k] = h[k];
            diag[k] = 2.0 * (h[k - 1] + h[k]);
            sup[k] = h[k - 1];
            rhs[k] = 3.0
                * (h[k] * (ys[k] - ys[k - 1]) / h[k - 1] + h[k - 1] * (ys[k + 1] - ys[k]) / h[k]);
        }
        for k in 1..n {
            let m = sub[k] / diag[k - 1];
            diag[k] -= m * sup[k - 1];
            rhs[k] -= m * rhs[k - 1];
        }
        let mut ds = vec![0.0; n];
        ds[n - 1] = rhs[n - 1] / diag[n - 1];
        for k in (0..n - 1).rev() {
            ds[k] = (rhs[k] - sup[k] * ds[k + 1]) / diag[k];
        }
        Ok(Self { xs, ys, ds })
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_with_slope(x).0
    }

    pub fn eval_with_slope(&self, x: f64) -> (f64, f64) {
        let k = locate(&self.xs, x);
        hermite(self.xs[k], self.xs[k + 1], self.ys[k], self.ys[k + 1], self.ds[k], self.ds[k + 1], x)
    }
}

/// Trigonometric interpolant of samples on `θ_k = 2πk/N`.
///
/// Coefficients are stored as `a_0, (a_k, b_k)` with
/// `f(θ) = a_0 + Σ_k a_k cos kθ + b_k sin kθ`; for even `N` the Nyquist
/// cosine term is halved so the interpolant is real and exact at the nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigSeries {
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl TrigSeries {
    pub fn from_samples(f: &[f64]) -> Self {
        let n = f.len();
        let kmax = n / 2;
        let mut cos = vec![0.0; kmax + 1];
        let mut sin = vec![0.0; kmax + 1];
        for k in 0..=kmax {
            let (mut a, mut b) = (0.0, 0.0);
            for (j, &v) in f.iter().enumerate() {
                // Reduce k*j mod n before scaling to keep the angle small.
                let ang = 2.0 * PI * ((k * j) % n) as f64 / n as f64;
                a += v * ang.cos();
                b += v * ang.sin();
            }
            let scale = if k == 0 || (n.is_multiple_of(2) && k == kmax) { 1.0 } else { 2.0 };
            cos[k] = scale * a / n as f64;
            sin[k] = scale * b / n as f64;
        }
        if n.is_multiple_of(2) {
            sin[kmax] = 0.0;
        }
        Self { cos, sin }
    }

    pub fn modes(&self) -> usize {
        self.cos.len()
    }

    /// Value and first two derivatives at `theta`.
    pub fn eval(&self, theta: f64) -> [f64; 3] {
        let (mut v, mut d1, mut d2) = (0.0, 0.0, 0.0);
        let (s1, c1) = theta.sin_cos();
        let (mut s, mut c) = (0.0, 1.0);
        for k in 0..self.cos.len() {
            if k > 0 {
                let cn = c * c1 - s * s1;
                s = s * c1 + c * s1;
                c = cn;
            }
            let kf = k as f64;
            let (a, b) = (self.cos[k], self.sin[k]);
            v += a * c + b * s;
            d1 += kf * (b * c - a * s);
            d2 -= kf * kf * (a * c + b * s);
        }
        [v, d1, d2]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pchip_preserves_monotonicity_and_reproduces_lines() {
        let xs: Vec<f64> = (0..10).map(|k| k as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x - 1.0).collect();
        let p = Pchip::new(xs, ys).unwrap();
        assert!((p.eval(3.3) - 5.6).abs() < 1e-13);
        let xs = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let ys = vec![0.0, 0.1, 0.2, 5.0, 5.1];
        let p = Pchip::new(xs, ys).unwrap();
        let mut prev = -1.0;
        for k in 0..=400 {
            let v = p.eval(k as f64 * 0.01);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn pchip_handles_decreasing_knots() {
        let xs = vec![4.0, 3.0, 2.0, 1.0];
        let ys = vec![1.0, 2.0, 3.0, 4.0];
        let p = Pchip::new(xs, ys).unwrap();
        assert!((p.eval(2.5) - 2.5).abs() < 1e-14);
    }

    #[test]
    fn clamped_spline_is_exact_on_cubics() {
        let f = |x: f64| x * x * x - 2.0 * x;
        let xs: Vec<f64> = (0..7).map(|k| 0.3 * k as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        let s = CubicSpline::clamped(xs, ys, -2.0, 3.0 * 1.8 * 1.8 - 2.0).unwrap();
        for x in [0.05, 0.7, 1.11, 1.79] {
            let (v, d) = s.eval_with_slope(x);
            assert!((v - f(x)).abs() < 1e-13);
            assert!((d - (3.0 * x * x - 2.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn trig_series_interpolates_and_differentiates() {
        for n in [8usize, 9, 16] {
            let f = |t: f64| 1.0 + (2.0 * t).sin() - 0.5 * (3.0 * t).cos();
            let samples: Vec<f64> = (0..n).map(|k| f(2.0 * PI * k as f64 / n as f64)).collect();
            let s = TrigSeries::from_samples(&samples);
            let t = 0.7;
            let [v, d1, d2] = s.eval(t);
            assert!((v - f(t)).abs() < 1e-13, "n={n}");
            assert!((d1 - (2.0 * (2.0 * t).cos() + 1.5 * (3.0 * t).sin())).abs() < 1e-12);
            assert!((d2 - (-4.0 * (2.0 * t).sin() + 4.5 * (3.0 * t).cos())).abs() < 1e-12);
        }
    }
}
