//! Brute-force check of the quadratic bound: a lattice search followed by
//! coordinate ascent, over seeded random instances.

use mslab_core::concavity::{quadratic_bound, quadratic_coordinate_max, quadratic_form};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::LemmaConfig;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Instance {
    pub lambda: f64,
    pub mu: f64,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub vars: usize,
    pub bound: f64,
    pub brute: f64,
    /// `brute − bound`.
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub instances: usize,
    pub worst_excess: f64,
    pub worst_instance: usize,
    /// Largest relative gap `(bound − brute)/max(|bound|, 1)`; small means
    /// the search actually reaches the maximum.
    pub worst_gap: f64,
    pub outcomes: Vec<Outcome>,
}

/// Coefficients are O(1) so that the values, and their rounding, stay
/// far below the absolute slack.
pub fn sample(rng: &mut ChaCha8Rng, vars: usize) -> Instance {
    Instance {
        lambda: rng.gen_range(0.0..2.0),
        mu: rng.gen_range(-1.0..1.0),
        b: (0..vars).map(|_| rng.gen_range(0.5..2.0)).collect(),
        c: (0..vars).map(|_| rng.gen_range(-1.0..1.0)).collect(),
    }
}

/// Points per axis so that the full lattice has at most `budget` points.
pub fn lattice_side(vars: usize, budget: usize) -> usize {
    let mut side = 1usize;
    while (side + 1).checked_pow(vars as u32).is_some_and(|p| p <= budget) {
        side += 1;
    }
    side
}

/// Largest `Q` found by the search.
pub fn brute_max(inst: &Instance, budget: usize, sweeps: usize) -> f64 {
    let k = inst.b.len();
    let q = |x: &[f64]| quadratic_form(inst.lambda, inst.mu, &inst.b, &inst.c, x);
    // The maximizer solves (B + λ11ᵀ) x = 2μc, so |x| ≤ 2|μ||c|/min b.
    let b_min = inst.b.iter().copied().fold(f64::INFINITY, f64::min);
    let c_norm = inst.c.iter().map(|c| c * c).sum::<f64>().sqrt();
    let radius = 2.0 * inst.mu.abs() * c_norm / b_min + 1e-3;
    let side = lattice_side(k, budget).max(2);
    let coord = |i: usize| -radius + 2.0 * radius * i as f64 / (side - 1) as f64;
    let mut idx = vec![0usize; k];
    let mut x = vec![0.0; k];
    let mut best = f64::NEG_INFINITY;
    let mut start = vec![0.0; k];
    loop {
        for (xi, &i) in x.iter_mut().zip(&idx) {
            *xi = coord(i);
        }
        let v = q(&x);
        if v > best {
            best = v;
            start.copy_from_slice(&x);
        }
        let mut d = 0;
        while d < k {
            idx[d] += 1;
            if idx[d] < side {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
        if d == k {
            break;
        }
    }
    let mut x = start;
    for _ in 0..sweeps {
        for i in 0..k {
            x[i] = quadratic_coordinate_max(inst.lambda, inst.mu, &inst.b, &inst.c, &x, i);
        }
    }
    best.max(q(&x))
}

pub fn run(config: &LemmaConfig, seed: u64) -> mslab_core::Result<Summary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut outcomes = Vec::with_capacity(config.instances);
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_instance = 0;
    let mut worst_gap: f64 = 0.0;
    for index in 0..config.instances {
        let vars = rng.gen_range(config.min_vars..=config.max_vars);
        let inst = sample(&mut rng, vars);
        let bound = quadratic_bound(inst.lambda, inst.mu, &inst.b, &inst.c)?.bound;
        let brute = brute_max(&inst, config.lattice_points, config.ascent_sweeps);
        let excess = brute - bound;
        if excess > worst_excess {
            worst_excess = excess;
            worst_instance = index;
        }
        worst_gap = worst_gap.max(-excess / bound.abs().max(1.0));
        outcomes.push(Outcome { vars, bound, brute, excess });
    }
    Ok(Summary { instances: config.instances, worst_excess, worst_instance, worst_gap, outcomes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_respects_the_budget() {
        assert_eq!(lattice_side(2, 729), 27);
        assert_eq!(lattice_side(6, 729), 3);
        assert_eq!(lattice_side(5, 729), 3);
        assert_eq!(lattice_side(3, 729), 9);
    }

    #[test]
    fn search_finds_a_known_maximum() {
        // λ = 0: separable, max Σ (2μ c_k)²/b_k at x_k = 2μ c_k / b_k.
        let inst = Instance { lambda: 0.0, mu: 0.5, b: vec![1.0, 2.0], c: vec![1.0, -1.0] };
        let exact = 1.0 + 0.5;
        assert!((brute_max(&inst, 729, 50) - exact).abs() < 1e-12);
    }

    #[test]
    fn runs_are_reproducible() {
        let cfg = LemmaConfig { instances: 50, ..Default::default() };
        assert_eq!(run(&cfg, 3).unwrap(), run(&cfg, 3).unwrap());
        assert_ne!(run(&cfg, 3).unwrap(), run(&cfg, 4).unwrap());
    }
}
