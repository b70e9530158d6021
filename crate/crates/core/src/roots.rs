//! Scalar root finding.

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Bisection on a sign-changing bracket. Stops when the bracket is narrower
/// than `x_tol` or after 200 halvings.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, x_tol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.signum() != fb.signum()) || fa.is_nan() || fb.is_nan() {
        return Err(Error::NotBracketed { lo, hi, f_lo: fa, f_hi: fb });
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= x_tol || m == a || m == b {
            return Ok(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Safeguarded Newton iteration for an increasing function on `[lo, hi]`
/// with `f(lo) < 0 < f(hi)`. `f` returns the value and the derivative.
/// Falls back to bisection whenever a Newton step leaves the bracket.
pub fn newton_bracketed<F: FnMut(f64) -> (f64, f64)>(
    mut f: F,
    lo: f64,
    hi: f64,
    x0: f64,
    x_tol: f64,
    max_iter: usize,
) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let mut x = x0.clamp(lo, hi);
    for _ in 0..max_iter {
        let (v, d) = f(x);
        if v == 0.0 {
            return Ok(x);
        }
        if v < 0.0 {
            a = x;
        } else {
            b = x;
        }
        let mut next = x - v / d;
        if !(next > a && next < b) || !next.is_finite() {
            next = 0.5 * (a + b);
        }
        if (next - x).abs() <= x_tol || b - a <= x_tol {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::NoConvergence { iterations: max_iter, residual: b - a })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisection_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn bisection_rejects_bad_bracket() {
        assert!(matches!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12), Err(Error::NotBracketed { .. })));
    }

    #[test]
    fn newton_converges_quadratically_inside_bracket() {
        let r = newton_bracketed(|x| (x.exp() - 3.0, x.exp()), 0.0, 5.0, 4.9, 1e-15, 60).unwrap();
        assert!((r - 3f64.ln()).abs() < 1e-14);
    }
}
