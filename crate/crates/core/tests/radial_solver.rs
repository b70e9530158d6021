use std::sync::Arc;

use mslab_core::radial::*;
use mslab_core::support::{reconstruct_gradient, SphereGrid};
use mslab_core::Error;
use proptest::prelude::*;

/// Composite Simpson rule with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + k as f64 * h);
    }
    sum * h / 3.0
}

/// Trapezoid rule with `n` panels.
fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut sum = 0.5 * (f(a) + f(b));
    for k in 1..n {
        sum += f(a + k as f64 * h);
    }
    sum * h
}

fn catenoid_integrand(n: usize) -> impl Fn(f64) -> f64 {
    move |s: f64| 1.0 / (s.powi(2 * (n as i32 - 1)) - 1.0).sqrt()
}

#[test]
fn catenoid_height_in_three_dimensions_matches_simpson() {
    let brute = simpson(catenoid_integrand(3), 2.0, 5.0, 10_000_000);
    let u = catenoid_u(5.0, 3).unwrap();
    assert!((u - brute).abs() < 1e-10, "{u} vs {brute}");
}

#[test]
fn catenoid_height_constant_matches_split_quadrature() {
    for n in [3usize, 4] {
        let cut: f64 = 1e4;
        // Simpson on a logarithmic variable, then the leading tail in closed
        // form (the next term is below 1e-19 at the cut).
        let body = simpson(|x: f64| x.exp() * catenoid_integrand(n)(x.exp()), 2f64.ln(), cut.ln(), 2_000_000);
        let tail = cut.powf(2.0 - n as f64) / (n as f64 - 2.0);
        let brute = body + tail;
        let r = catenoid_r(n).unwrap();
        assert!((r - brute).abs() < 1e-8, "n = {n}: {r} vs {brute}");
    }
    assert!(matches!(catenoid_r(2), Err(Error::Divergent(_))));
}

#[test]
fn catenoid_closed_forms() {
    let inv = catenoid_invariants(2.0, 3).unwrap();
    assert!((inv.k - 0.25).abs() < 1e-15);
    assert!((inv.phi - 0.5).abs() < 1e-15);
    assert!((inv.grad_norm - 1.0 / 15f64.sqrt()).abs() < 1e-15);
    for r in [2.0, 3.0, 7.5] {
        assert_eq!(catenoid_invariants(r, 2).unwrap().phi, 1.0);
    }
    assert!(catenoid_invariants(1.9, 3).is_err());
    assert!(catenoid_u(1.0, 3).is_err());
}

#[test]
fn two_dimensional_flux_recovers_unit_constant() {
    let ri: f64 = 1.2;
    let ro = (ri.acosh() + 1.0).cosh();
    let sol = solve_flux(RadialConfig::new(2, ro, ri).unwrap()).unwrap();
    assert!((sol.c - 1.0).abs() < 1e-10, "c = {}", sol.c);
    assert!((sol.config.height_drop(sol.c) - 1.0).abs() < 1e-10);
}

#[test]
fn degenerate_configs_are_rejected() {
    assert!(RadialConfig::new(3, 2.0, 2.0).is_err());
    assert!(RadialConfig::new(3, 1.0, 2.0).is_err());
    assert!(RadialConfig::new(1, 3.0, 2.0).is_err());
}

/// Height drop by trapezoid rule after `s = s0 + w²`, `s0 = √c`, where
/// `s² − c = w²(s + s0)` cancels the `2w` from `ds`.
fn brute_drop(c: f64) -> f64 {
    let s0 = c.sqrt();
    let f = |w: f64| {
        let s = s0 + w * w;
        2.0 * c / ((s + s0) * (s * s + c)).sqrt()
    };
    trapezoid(f, (2.0 - s0).sqrt(), (10.0 - s0).sqrt(), 1_000_000)
}

#[test]
fn three_dimensional_flux_agrees_with_brute_force_bisection() {
    let cfg = RadialConfig::new(3, 10.0, 2.0).unwrap();
    let top = 4.0;
    let brute_max = brute_drop(top);
    assert!((cfg.max_height_drop() - brute_max).abs() < 1e-9, "{} vs {brute_max}", cfg.max_height_drop());
    match solve_flux(cfg) {
        Ok(sol) => {
            let (mut lo, mut hi) = (1e-9, top);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if brute_drop(mid) < 1.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            assert!((sol.c - 0.5 * (lo + hi)).abs() < 1e-6, "c = {} vs {}", sol.c, 0.5 * (lo + hi));
            assert!((cfg.height_drop(sol.c) - 1.0).abs() < 1e-10);
        }
        Err(Error::NoGraphSolution { max_drop, .. }) => {
            assert!(brute_max < 1.0);
            assert!((max_drop - brute_max).abs() < 1e-9);
        }
        Err(e) => panic!("unexpected error {e}"),
    }
}

#[test]
fn too_steep_data_has_no_graph_solution() {
    let cfg = RadialConfig::with_height(3, 10.0, 2.0, 5.0).unwrap();
    match solve_flux(cfg) {
        Err(Error::NoGraphSolution { requested, max_drop }) => {
            assert_eq!(requested, 5.0);
            assert!(max_drop < 5.0);
        }
        other => panic!("expected NoGraphSolution, got {other:?}"),
    }
}

#[test]
fn catenoid_band_is_the_unit_flux_member() {
    for n in [2usize, 3, 4] {
        let height = catenoid_u(10.0, n).unwrap();
        let sol = solve_flux(RadialConfig::with_height(n, 10.0, 2.0, height).unwrap()).unwrap();
        assert!((sol.c - 1.0).abs() < 1e-9, "n = {n}: c = {}", sol.c);
        for r in [2.0, 3.3, 6.0, 10.0] {
            let expected = height - catenoid_u(r, n).unwrap();
            assert!((sol.u(r) - expected).abs() < 1e-9);
        }
    }
}

#[test]
fn solution_invariants() {
    for n in [2usize, 3, 4, 5] {
        let cfg = RadialConfig::with_height(n, 3.0, 1.5, 0.3).unwrap();
        let sol = solve_flux(cfg).unwrap();
        assert!(sol.c > 0.0 && sol.c < 1.5f64.powi(n as i32 - 1));
        assert!(sol.u(3.0).abs() < 1e-12);
        assert!((sol.u(1.5) - 0.3).abs() < 1e-10);
        let mut last_u = f64::INFINITY;
        for k in 0..=100 {
            let r = 1.5 + 1.5 * k as f64 / 100.0;
            assert!((sol.first_integral(r) - sol.c).abs() < 1e-10 * sol.c.max(1.0));
            let u = sol.u(r);
            assert!(u < last_u);
            last_u = u;
        }
        let ts = sol.t_grid(64);
        let rs: Vec<f64> = ts.iter().map(|&t| sol.r_of_t(t)).collect();
        assert!(rs.windows(2).all(|w| w[1] < w[0]));
        for (&t, &r) in ts.iter().zip(&rs) {
            assert!((sol.u(r) - t).abs() < 1e-10);
        }
    }
}

#[test]
fn height_drop_is_increasing_in_the_flux() {
    let cfg = RadialConfig::new(3, 4.0, 2.0).unwrap();
    let c_max = 4.0;
    let drops: Vec<f64> = (1..=100).map(|k| cfg.height_drop(c_max * k as f64 / 101.0)).collect();
    assert!(drops.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn gradient_matches_exported_support_function() {
    let sol = solve_flux(RadialConfig::new(3, 3.0, 1.4).unwrap()).unwrap();
    let grid = Arc::new(SphereGrid::new(3, 8).unwrap());
    for t in [0.1, 0.5, 0.9] {
        let r = sol.r_of_t(t);
        let (rt, _) = sol.r_derivatives(r);
        let field = reconstruct_gradient(&grid, &vec![rt; grid.len()]).unwrap();
        for &g in &field.norm {
            assert!((g / sol.grad_norm(r) - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn asymptotic_residual_is_bounded_for_odd_dimension() {
    let ladder = [10.0, 20.0, 40.0, 80.0];
    let scaled: Vec<f64> = ladder.iter().map(|&r| asymptotic_residual(r, 3).unwrap().scaled).collect();
    let hi = scaled.iter().copied().fold(f64::MIN, f64::max);
    let lo = scaled.iter().copied().fold(f64::MAX, f64::min);
    assert!(lo > 0.0 && hi / lo < 3.0, "{scaled:?}");
    // The leading term r^{-1} carries the sign of the deficit.
    let a = asymptotic_residual(10.0, 3).unwrap();
    assert!(a.leading > 0.0 && a.deficit > 0.0 && !a.sign_disagreement);
}

#[test]
fn even_dimension_leading_term_has_the_wrong_sign() {
    let ladder = [10.0, 20.0, 40.0, 80.0];
    let res: Vec<AsymptoticResidual> = ladder.iter().map(|&r| asymptotic_residual(r, 4).unwrap()).collect();
    assert!(res.iter().all(|a| a.sign_disagreement && a.deficit > 0.0 && a.leading < 0.0));
    // The residual is then twice the leading term and the scaled ratio
    // grows like r^6.
    for a in &res {
        assert!((a.residual - 2.0 * a.deficit).abs() < 1e-6 * a.deficit);
    }
    assert!(res[3].scaled / res[0].scaled > 1e5);
}

#[test]
fn asymptotic_residual_matches_direct_quadrature() {
    // R − u(r) directly as an integral over [r, ∞) on a log variable.
    for (n, r) in [(3usize, 10.0), (4, 20.0)] {
        let cut: f64 = 1e4;
        let body = simpson(|x: f64| x.exp() * catenoid_integrand(n)(x.exp()), f64::ln(r), cut.ln(), 2_000_000);
        let brute = body + cut.powf(2.0 - n as f64) / (n as f64 - 2.0);
        let a = asymptotic_residual(r, n).unwrap();
        assert!((a.deficit - brute).abs() < 1e-12 * brute.max(1e-3), "{} vs {brute}", a.deficit);
    }
}

proptest! {
    #[test]
    fn random_rings_satisfy_the_first_integral(
        n in 2usize..6,
        ri in 0.5f64..2.0,
        gap in 0.2f64..2.0,
        frac in 0.05f64..0.9,
    ) {
        let ro = ri + gap;
        let probe = RadialConfig::new(n, ro, ri).unwrap();
        let height = frac * probe.max_height_drop();
        let sol = solve_flux(RadialConfig::with_height(n, ro, ri, height).unwrap()).unwrap();
        prop_assert!((sol.config.height_drop(sol.c) - height).abs() <= 1e-10 * height.max(1.0));
        for k in 0..=10 {
            let r = ri + gap * k as f64 / 10.0;
            prop_assert!((sol.first_integral(r) - sol.c).abs() <= 1e-10 * sol.c.max(1.0));
        }
    }
}
