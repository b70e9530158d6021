//! Second-order jets: values carried together with their first and second
//! derivatives along one variable, propagated by the chain rule.

use core::ops::{Add, Mul, Neg, Sub};
#[allow(unused_imports)]
use num_traits::Float;

/// `(f, f', f'')` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub const fn new(v: f64, d1: f64, d2: f64) -> Self {
        Self { v, d1, d2 }
    }

    pub const fn constant(v: f64) -> Self {
        Self { v, d1: 0.0, d2: 0.0 }
    }

    /// Composition with a scalar function given its value and two derivatives
    /// at `self.v`.
    pub fn compose(self, g: f64, g1: f64, g2: f64) -> Self {
        Self { v: g, d1: g1 * self.d1, d2: g2 * self.d1 * self.d1 + g1 * self.d2 }
    }

    pub fn ln(self) -> Self {
        let x = self.v;
        self.compose(x.ln(), 1.0 / x, -1.0 / (x * x))
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.compose(e, e, e)
    }

    pub fn recip(self) -> Self {
        let x = self.v;
        self.compose(1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x))
    }

    pub fn powf(self, p: f64) -> Self {
        let x = self.v;
        self.compose(x.powf(p), p * x.powf(p - 1.0), p * (p - 1.0) * x.powf(p - 2.0))
    }

    pub fn scale(self, s: f64) -> Self {
        Self { v: s * self.v, d1: s * self.d1, d2: s * self.d2 }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet::new(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet::new(self.v - o.v, self.d1 - o.d1, self.d2 - o.d2)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet::new(-self.v, -self.d1, -self.d2)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet::new(
            self.v * o.v,
            self.d1 * o.v + self.v * o.d1,
            self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_rule_matches_closed_forms() {
        // x(t) = t² at t = 1.5: jet (2.25, 3, 2)
        let t = 1.5;
        let x = Jet::new(t * t, 2.0 * t, 2.0);
        let y = (x.ln() * x).exp(); // x^x
        let f = |t: f64| (t * t).powf(t * t);
        let h = 1e-4;
        let d1 = (f(t + h) - f(t - h)) / (2.0 * h);
        let d2 = (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
        assert!((y.v - f(t)).abs() < 1e-12);
        assert!((y.d1 - d1).abs() / d1.abs() < 1e-7);
        assert!((y.d2 - d2).abs() / d2.abs() < 1e-5);
        let p = x.powf(-0.5);
        assert!((p.d2 - (-0.5f64) * (-1.5) * x.v.powf(-2.5) * 9.0 - (-0.5) * x.v.powf(-1.5) * 2.0).abs() < 1e-12);
        assert!((x.recip().v - 1.0 / x.v).abs() < 1e-15);
    }
}
