//! Standard instances and the analysis pipelines shared by the commands and
//! the acceptance criteria.

use std::sync::Arc;

use anyhow::{ensure, Context, Result};
use mslab_core::concavity::{calibrate_tolerance, f_profile, phi_field, HeightProfile, PhiField};
use mslab_core::radial::{catenoid_u, radial_phi_profile, solve_flux, RadialConfig, RadialSolution};
use mslab_core::ring::{solve, GridSolution, RingProblem, SolverOptions, SolverReport};
use mslab_core::stencil::StencilOrder;
use mslab_core::support::{SphereGrid, SupportSlice};

use crate::boundary::Boundary;
use crate::config::Ring2dConfig;

/// Inner radius of every catenoid band.
pub const CATENOID_INNER: f64 = 2.0;

/// Outer unit circle, inner circle of radius 0.3 shifted by `offset`,
/// height drop 0.25.
pub const DISC_RING_INNER: f64 = 0.3;
pub const DISC_RING_HEIGHT: f64 = 0.25;
pub const ECCENTRIC_OFFSET: f64 = 0.2;

pub fn circle_grid(n_theta: usize) -> Result<Arc<SphereGrid>> {
    Ok(Arc::new(SphereGrid::new(2, n_theta)?))
}

/// The graph of `R_n − catenoid` over `2 ≤ r ≤ r_max`: the radial solution
/// whose height drop is that of the catenoid, hence flux 1.
pub fn catenoid_band(n: usize, r_max: f64) -> Result<RadialSolution> {
    let height = catenoid_u(r_max, n)?;
    Ok(solve_flux(RadialConfig::with_height(n, r_max, CATENOID_INNER, height)?)?)
}

pub fn disc(grid: &Arc<SphereGrid>, center: [f64; 2], radius: f64) -> Result<SupportSlice> {
    Ok(SupportSlice::from_fn(grid.clone(), |y| radius + center[0] * y[0] + center[1] * y[1])?)
}

pub fn disc_ring(n_theta: usize, n_t: usize, offset: f64) -> Result<RingProblem> {
    let g = circle_grid(n_theta)?;
    Ok(RingProblem::with_height(
        disc(&g, [0.0, 0.0], 1.0)?,
        disc(&g, [offset, 0.0], DISC_RING_INNER)?,
        n_t,
        DISC_RING_HEIGHT,
    )?)
}

/// Radial solution matching a concentric [`disc_ring`].
pub fn disc_ring_oracle() -> Result<RadialSolution> {
    Ok(solve_flux(RadialConfig::with_height(2, 1.0, DISC_RING_INNER, DISC_RING_HEIGHT)?)?)
}

pub fn stencil_order(order: usize) -> Result<StencilOrder> {
    StencilOrder::from_order(order).with_context(|| format!("t_order must be 2, 4 or 6, got {order}"))
}

pub fn solver_options(cfg: &Ring2dConfig) -> Result<SolverOptions> {
    Ok(SolverOptions {
        tol: cfg.solver_tol,
        max_iter: cfg.max_iter,
        t_order: stencil_order(cfg.t_order)?,
        ..SolverOptions::default()
    })
}

/// Every second value of a slice, on the grid with half the directions.
pub fn coarsen(slice: &SupportSlice) -> Result<SupportSlice> {
    let n = slice.len();
    ensure!(n.is_multiple_of(2), "cannot halve a grid of {n} directions");
    let g = circle_grid(n / 2)?;
    let h = slice.values().iter().step_by(2).copied().collect();
    Ok(SupportSlice::new(g, h)?)
}

/// The problem described by a config section.
pub fn ring_problem(cfg: &Ring2dConfig) -> Result<RingProblem> {
    let g = circle_grid(cfg.n_theta)?;
    let outer = Boundary::parse(&cfg.outer)?.slice(&g).context("outer boundary")?;
    let inner = Boundary::parse(&cfg.inner)?.slice(&g).context("inner boundary")?;
    Ok(RingProblem::with_height(outer, inner, cfg.n_t, cfg.height)?)
}

/// The same problem with half the resolution in both directions.
pub fn halved(problem: &RingProblem) -> Result<RingProblem> {
    ensure!(problem.n_t().is_multiple_of(2), "n_t = {} cannot be halved", problem.n_t());
    Ok(RingProblem::with_height(
        coarsen(problem.outer())?,
        coarsen(problem.inner())?,
        problem.n_t() / 2,
        problem.height(),
    )?)
}

/// A solved ring with its curvature quantity and height profile.
#[derive(Debug, Clone)]
pub struct RingRun {
    pub solution: GridSolution,
    pub report: SolverReport,
    pub phi: PhiField,
    pub profile: HeightProfile,
}

pub fn run_ring(problem: &RingProblem, options: &SolverOptions) -> Result<RingRun> {
    let (solution, report) = solve(problem, options)?;
    let phi = phi_field(&solution)?;
    let profile = f_profile(&phi, &solution, 0.0)?;
    Ok(RingRun { solution, report, phi, profile })
}

/// Concavity of a profile against a coarse run on the nested half grid:
/// the largest second difference must stay below both the calibrated
/// tolerance and the absolute cap.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ConcavityVerdict {
    pub max_d2f: f64,
    pub coarse_max_d2f: f64,
    pub eps_grid: f64,
    pub cap: f64,
    pub eps_within_cap: bool,
    pub pass: bool,
}

pub fn concavity_verdict(coarse: &HeightProfile, fine: &HeightProfile, cap: f64) -> Result<ConcavityVerdict> {
    let eps_grid = calibrate_tolerance(coarse, fine)?;
    let max_d2f = fine.max_d2f;
    Ok(ConcavityVerdict {
        max_d2f,
        coarse_max_d2f: coarse.max_d2f,
        eps_grid,
        cap,
        eps_within_cap: eps_grid <= cap,
        pass: max_d2f <= eps_grid && max_d2f <= cap,
    })
}

/// `f(t)` of a radial solution at `intervals` and `intervals / 2`.
pub fn radial_profiles(sol: &RadialSolution, intervals: usize) -> Result<(HeightProfile, HeightProfile)> {
    ensure!(intervals >= 4 && intervals.is_multiple_of(2), "t_grid must be even and at least 4");
    let coarse = radial_phi_profile(sol, &sol.t_grid(intervals / 2), 0.0)?;
    let fine = radial_phi_profile(sol, &sol.t_grid(intervals), 0.0)?;
    Ok((coarse, fine))
}

/// Support function of the ellipsoid with the given semi-axes.
pub fn ellipsoid(axes: [f64; 3]) -> impl Fn(&[f64]) -> f64 {
    move |y| (0..3).map(|a| axes[a] * axes[a] * y[a] * y[a]).sum::<f64>().sqrt()
}

/// Observed orders `log2(e_k / e_{k+1})` of a sequence of errors on grids
/// refined by factors of two.
pub fn observed_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coarsening_keeps_the_even_directions() {
        let g = circle_grid(16).unwrap();
        let s = disc(&g, [0.1, 0.0], 1.0).unwrap();
        let c = coarsen(&s).unwrap();
        let gc = circle_grid(8).unwrap();
        let direct = disc(&gc, [0.1, 0.0], 1.0).unwrap();
        for (a, b) in c.values().iter().zip(direct.values()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn orders_of_a_geometric_sequence() {
        let o = observed_orders(&[1.0, 0.25, 0.0625]);
        assert!(o.iter().all(|p| (p - 2.0).abs() < 1e-12));
    }

    #[test]
    fn catenoid_band_has_unit_flux() {
        for n in [2, 3, 4] {
            assert!((catenoid_band(n, 10.0).unwrap().c - 1.0).abs() < 1e-9);
        }
    }
}
