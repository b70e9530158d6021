use std::sync::Arc;

use mslab_core::concavity::*;
use mslab_core::radial::{catenoid_u, radial_phi_profile, solve_flux, RadialConfig, RadialSolution};
use mslab_core::ring::{solve, GridSolution, RingProblem, SolverOptions};
use mslab_core::support::{SphereGrid, SupportSlice};
use mslab_core::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn disc(g: &Arc<SphereGrid>, cx: f64, cy: f64, r: f64) -> SupportSlice {
    SupportSlice::from_fn(g.clone(), |y| r + cx * y[0] + cy * y[1]).unwrap()
}

fn ring_at(n_theta: usize, n_t: usize, offset: f64) -> GridSolution {
    let g = Arc::new(SphereGrid::new(2, n_theta).unwrap());
    let problem = RingProblem::with_height(disc(&g, 0.0, 0.0, 1.0), disc(&g, offset, 0.0, 0.3), n_t, 0.25).unwrap();
    solve(&problem, &SolverOptions::default()).unwrap().0
}

fn ring(n: usize, offset: f64) -> GridSolution {
    ring_at(n, n, offset)
}

fn catenoid_band(n: usize) -> RadialSolution {
    let height = catenoid_u(10.0, n).unwrap();
    solve_flux(RadialConfig::with_height(n, 10.0, 2.0, height).unwrap()).unwrap()
}

proptest! {
    #[test]
    fn phi_level_is_the_exponential_of_phi_aux(
        n in 2usize..7,
        ht in prop::collection::vec(-20.0f64..-1e-3, 8),
        k in prop::collection::vec(1e-3f64..50.0, 8),
    ) {
        let p = PhiField::from_parts(n, &ht, &k).unwrap();
        for (a, b) in p.exp_beta_aux().iter().zip(&p.level) {
            prop_assert!((a - b).abs() <= 1e-12 * b);
        }
    }
}

#[test]
fn phi_rejects_bad_orientation_and_curvature() {
    assert!(matches!(PhiField::from_parts(3, &[0.1], &[1.0]), Err(Error::Orientation { .. })));
    assert!(matches!(PhiField::from_parts(3, &[-0.1], &[0.0]), Err(Error::NonConvexSlice { .. })));
    assert!(PhiField::from_parts(1, &[-0.1], &[1.0]).is_err());
}

#[test]
fn catenoid_phi_at_radius_two() {
    // |∇u| = 1/√15 and K = 1/4 on the n = 3 catenoid at r = 2.
    let ht = -(15f64.sqrt());
    let p = PhiField::from_parts(3, &[ht], &[0.25]).unwrap();
    assert!((p.level[0] - 0.5).abs() < 1e-15);
    // h_t = −1/|∇u| for a graph over the level set.
    let sol = catenoid_band(3);
    let (rt, _) = sol.r_derivatives(2.0);
    assert!((rt - ht).abs() < 1e-9);
}

#[test]
fn radial_profile_matches_closed_form_and_is_concave() {
    let sol = catenoid_band(3);
    let t = sol.t_grid(128);
    let profile = radial_phi_profile(&sol, &t, 1e-8).unwrap();
    // φ = 1/r(t) and ∂tt(1/r) = −2/r³ on the catenoid.
    for (j, &tj) in t.iter().enumerate() {
        assert!((profile.f[j] - 1.0 / sol.r_of_t(tj)).abs() < 1e-12);
    }
    let dt = profile.dt();
    for (j, d2) in profile.d2f.iter().enumerate() {
        let r = sol.r_of_t(t[j + 1]);
        let exact = -2.0 / r.powi(3);
        // Second differences carry an O(dt²) error and roundoff of size ε/dt².
        assert!((d2 - exact).abs() < 1e-3 * exact.abs() + 1e-13 / (dt * dt), "row {j}: {d2} vs {exact}");
    }
    assert!(profile.concave && profile.max_d2f < 0.0);
}

#[test]
fn profile_far_out_on_the_catenoid_is_nearly_affine() {
    // On [20, 40] the curvature −2/r³ is tiny compared with the variation of f.
    let height = catenoid_u(40.0, 3).unwrap() - catenoid_u(20.0, 3).unwrap();
    let sol = solve_flux(RadialConfig::with_height(3, 40.0, 20.0, height).unwrap()).unwrap();
    let t = sol.t_grid(64);
    let profile = radial_phi_profile(&sol, &t, 1e-8).unwrap();
    let rep = corollary_margin(&profile, 3);
    let range = profile.f.iter().copied().fold(f64::MIN, f64::max) - profile.f.iter().copied().fold(f64::MAX, f64::min);
    assert!(rep.min_margin >= -1e-12);
    assert!(rep.margins.iter().all(|m| m.abs() <= 0.01 * range), "{range}");
    assert_eq!(rep.case, CorollaryCase::NEquals3);
}

#[test]
fn chordal_margins_on_radial_bands() {
    let sol = catenoid_band(3);
    let profile = radial_phi_profile(&sol, &sol.t_grid(128), 1e-8).unwrap();
    assert!(corollary_margin(&profile, 3).min_margin >= -1e-8);
    // A different band with r0 = 3, r1 = 2 at half the available height.
    let cfg = RadialConfig::new(3, 3.0, 2.0).unwrap();
    let sol = solve_flux(RadialConfig::with_height(3, 3.0, 2.0, 0.5 * cfg.max_height_drop()).unwrap()).unwrap();
    let profile = radial_phi_profile(&sol, &sol.t_grid(64), 1e-8).unwrap();
    assert!(corollary_margin(&profile, 3).min_margin >= -1e-8);
    // In the plane φ ≡ 1 on the catenoid: the sharp case.
    let sol = catenoid_band(2);
    let profile = radial_phi_profile(&sol, &sol.t_grid(64), 1e-8).unwrap();
    let rep = corollary_margin(&profile, 2);
    assert!(rep.margins.iter().all(|m| m.abs() <= 1e-10));
    assert_eq!(rep.case, CorollaryCase::General);
}

#[test]
fn ring_profiles_are_concave() {
    for offset in [0.0, 0.2] {
        let sol = ring(64, offset);
        let phi = phi_field(&sol).unwrap();
        let profile = f_profile(&phi, &sol, 1e-5).unwrap();
        assert!(profile.concave, "offset {offset}: max d2f {:e}", profile.max_d2f);
        assert!(corollary_margin(&profile, 2).min_margin >= -1e-6);
        if offset == 0.0 {
            continue;
        }
        // The minimum location moves continuously in θ.
        let mut last = profile.argmin[0];
        for &a in &profile.argmin[1..] {
            let step = (a - last).abs();
            let step = step.min(2.0 * std::f64::consts::PI - step);
            assert!(step < 0.2, "offset {offset}: jump {step}");
            last = a;
        }
    }
}

#[test]
fn calibrated_tolerance_shrinks_at_second_order() {
    let profiles: Vec<HeightProfile> = [32, 64, 128]
        .iter()
        .map(|&n| {
            let sol = ring(n, 0.2);
            f_profile(&phi_field(&sol).unwrap(), &sol, 0.0).unwrap()
        })
        .collect();
    let a = calibrate_tolerance(&profiles[0], &profiles[1]).unwrap();
    let b = calibrate_tolerance(&profiles[1], &profiles[2]).unwrap();
    // Centered second differences carry an O(dt²) truncation error.
    assert!(a / b > 3.0 && a / b < 5.5, "{a:e} {b:e}");
    assert!(profiles[2].clone().with_tolerance(b).concave);
    assert!(calibrate_tolerance(&profiles[0], &profiles[0]).is_err());
}

#[test]
fn maximum_of_a_subsolution_is_convex() {
    let sol = ring(32, 0.2);
    let h = sol.grid.height();
    let t2 = sol.grid.sample(|_, t| (t - 0.3 * h).powi(2));
    let v = max_convexity_check(&sol, &t2, FirstOrder::None, 1e-10, 1e-8).unwrap();
    assert!(v.pass);
    for d in &v.d2 {
        assert!((d - 2.0).abs() < 1e-8);
    }
    let neg: Vec<f64> = t2.iter().map(|v| -v).collect();
    assert!(matches!(
        max_convexity_check(&sol, &neg, FirstOrder::None, 1e-10, 1e-8),
        Err(Error::Precondition { .. })
    ));
    let zeros = vec![0.0; t2.len()];
    assert!(max_convexity_check(&sol, &t2, FirstOrder::Given(&zeros), 1e-10, 1e-8).unwrap().pass);
    assert!(max_convexity_check(&sol, &t2, FirstOrder::Given(&zeros[1..]), 1e-10, 1e-8).is_err());
}

#[test]
fn maximum_of_minus_exp_beta_phi_is_convex_on_the_eccentric_ring() {
    // min_θ e^{βφ} concave ⇔ max_θ (−e^{βφ}) convex.
    // L(G) ≥ 0 holds at critical nodes up to the discretization error of
    // the differential inequality, estimated by doubling.
    let coarse = differential_inequality_check(&ring(32, 0.2), BetaChoice::Standard).unwrap();
    let sol = ring(64, 0.2);
    let fine = differential_inequality_check(&sol, BetaChoice::Standard).unwrap();
    let precondition = 4.0 * (coarse.worst_value - fine.worst_value).abs() + 1e-9;
    let phi = phi_field(&sol).unwrap();
    let g: Vec<f64> = phi.exp_beta_aux().iter().map(|v| -v).collect();
    let v = max_convexity_check(&sol, &g, FirstOrder::Absorb, precondition, 1e-5).unwrap();
    assert!(v.pass, "worst {:e} at row {}", v.worst_value, v.worst_row);
}

#[test]
fn remark_identity_holds_on_concentric_rings() {
    // θ-derivatives of rounding noise grow like N_θ⁴, so keep N_θ small;
    // rotational symmetry makes it irrelevant to the accuracy.
    let sol = ring_at(16, 64, 0.0);
    let rep = remark_identity_residual(&sol).unwrap();
    assert!(rep.missing_rows.is_empty());
    assert_eq!(rep.critical_nodes, (sol.grid.n_t() - 1) * sol.n_theta());
    assert!(rep.max_residual <= 1e-8, "{:e}", rep.max_residual);
}

#[test]
fn remark_identity_converges_on_the_eccentric_ring() {
    let a = remark_identity_residual(&ring(32, 0.2)).unwrap();
    let b = remark_identity_residual(&ring(64, 0.2)).unwrap();
    assert!(a.critical_nodes > 0 && b.critical_nodes > 0);
    assert!(a.max_residual / b.max_residual >= 3.0, "{:e} {:e}", a.max_residual, b.max_residual);
}

#[test]
fn remark_identity_fields_differ_away_from_critical_points() {
    // On a skewed ring the two sides must disagree somewhere off the
    // critical set, otherwise the restriction would be vacuous.
    let g = Arc::new(SphereGrid::new(2, 32).unwrap());
    let outer = SupportSlice::from_fn(g.clone(), |y| (1.69 * y[0] * y[0] + y[1] * y[1]).sqrt()).unwrap();
    let problem = RingProblem::with_height(outer, disc(&g, 0.1, 0.05, 0.3), 32, 0.25).unwrap();
    let (sol, _) = solve(&problem, &SolverOptions::default()).unwrap();
    let f = remark_identity_fields(&sol).unwrap();
    let n = sol.n_theta();
    let worst = (n..f.lhs.len() - n).map(|k| (f.lhs[k] - f.rhs[k]).abs()).fold(0.0, f64::max);
    assert!(worst > 1e-3, "{worst:e}");
}

#[test]
fn radial_differential_inequality_and_its_control() {
    for n in [2usize, 3, 4] {
        let sol = catenoid_band(n);
        let t = sol.t_grid(200);
        let vals = radial_inequality(&sol, &t, BetaChoice::Standard);
        let worst = vals.iter().copied().fold(f64::MIN, f64::max);
        assert!(worst <= 1e-8, "n = {n}: {worst:e}");
        if n > 2 {
            let wrong = radial_inequality(&sol, &t, BetaChoice::WrongSign);
            assert!(wrong.iter().any(|&v| v > 0.0), "n = {n}");
        }
    }
    // Away from the catenoid as well.
    for n in [2usize, 3, 4] {
        let cfg = RadialConfig::new(n, 3.0, 1.5).unwrap();
        let sol = solve_flux(RadialConfig::with_height(n, 3.0, 1.5, 0.6 * cfg.max_height_drop()).unwrap()).unwrap();
        let t = sol.t_grid(100);
        assert!(radial_inequality(&sol, &t, BetaChoice::Standard).iter().all(|&v| v <= 1e-8));
        assert!(radial_inequality(&sol, &t, BetaChoice::WrongSign).iter().any(|&v| v > 0.0));
    }
}

#[test]
fn differential_inequality_on_the_eccentric_ring() {
    let ca = differential_inequality_check(&ring(32, 0.2), BetaChoice::Standard).unwrap();
    let fine = ring(64, 0.2);
    let cb = differential_inequality_check(&fine, BetaChoice::Standard).unwrap();
    assert!(cb.critical_nodes > 0 && cb.missing_rows.is_empty());
    assert!(cb.worst_value.abs() < ca.worst_value.abs() || cb.worst_value <= 0.0);
    let eps = 4.0 * (ca.worst_value - cb.worst_value).abs() + 1e-9;
    assert!(cb.worst_value <= eps, "{:e} vs {eps:e}", cb.worst_value);
    let wrong = differential_inequality_check(&fine, BetaChoice::WrongSign).unwrap();
    assert!(wrong.worst_value > 0.0);
}

/// Brute-force maximum of `Q` over a lattice, then coordinate ascent.
fn brute_max(lambda: f64, mu: f64, b: &[f64], c: &[f64], rng: &mut ChaCha8Rng) -> f64 {
    let k = b.len();
    let radius: f64 = (0..k).map(|i| 4.0 * mu.abs() * c[i].abs() / b[i]).sum::<f64>() + 1.0;
    let mut best = f64::NEG_INFINITY;
    let mut start = vec![0.0; k];
    for _ in 0..64 {
        let x: Vec<f64> = (0..k).map(|_| rng.gen_range(-radius..radius)).collect();
        let q = quadratic_form(lambda, mu, b, c, &x);
        if q > best {
            best = q;
            start = x;
        }
    }
    let mut x = start;
    for _ in 0..200 {
        for i in 0..k {
            x[i] = quadratic_coordinate_max(lambda, mu, b, c, &x, i);
        }
    }
    best.max(quadratic_form(lambda, mu, b, c, &x))
}

#[test]
fn quadratic_form_never_exceeds_the_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut closest = f64::NEG_INFINITY;
    for _ in 0..2000 {
        let k = rng.gen_range(2..=6);
        let b: Vec<f64> = (0..k).map(|_| rng.gen_range(0.1..5.0)).collect();
        let c: Vec<f64> = (0..k).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let lambda = rng.gen_range(0.0..3.0);
        let mu = rng.gen_range(-2.0..2.0);
        let bound = quadratic_bound(lambda, mu, &b, &c).unwrap().bound;
        let q = brute_max(lambda, mu, &b, &c, &mut rng);
        assert!(q <= bound + 1e-12 * bound.abs().max(1.0), "{q} > {bound}");
        closest = closest.max(q - bound);
    }
    // Coordinate ascent on a strictly concave form reaches the maximum.
    assert!(closest > -1e-9, "{closest:e}");
}
