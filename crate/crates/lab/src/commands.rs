//! The experiment pipelines behind each subcommand. Every pipeline writes
//! its artifacts, returns its checks, and leaves the manifest to [`execute`].

use std::path::Path;
use std::time::Instant;

use anyhow::{bail, ensure, Result};
use mslab_core::concavity::{
    corollary_margin, differential_inequality_check, radial_inequality, remark_identity_residual, BetaChoice,
    HeightProfile,
};
use mslab_core::radial::{asymptotic_residual, catenoid_invariants, catenoid_r, solve_flux, RadialConfig, RadialSolution};
use mslab_core::ring::{physical_residual, solve, SolverOptions};
use mslab_core::support::{codazzi_residual, SphereGrid, SupportSlice};
use serde::Serialize;
use serde_json::json;

use crate::boundary::Boundary;
use crate::config::{ExperimentConfig, Study};
use crate::criteria;
use crate::instances::*;
use crate::lemma;
use crate::manifest::{Check, RunManifest, MANIFEST_NAME};
use crate::output::{Cell, OutputDir, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Catenoid,
    Radial,
    Ring2d,
    Verify,
    Convergence,
    Lemma32,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Catenoid => "catenoid",
            Command::Radial => "radial",
            Command::Ring2d => "ring2d",
            Command::Verify => "verify",
            Command::Convergence => "convergence",
            Command::Lemma32 => "lemma32",
        }
    }
}

/// Runs a command into `out_dir` and writes its manifest.
pub fn execute(command: Command, config: &ExperimentConfig, out_dir: &Path) -> Result<RunManifest> {
    let start = Instant::now();
    let mut out = OutputDir::create(out_dir)?;
    let checks = match command {
        Command::Catenoid => run_catenoid(config, &mut out)?,
        Command::Radial => run_radial(config, &mut out)?,
        Command::Ring2d => run_ring2d(config, &mut out)?,
        Command::Verify => run_verify(&mut out)?,
        Command::Convergence => run_convergence(config, &mut out)?,
        Command::Lemma32 => run_lemma32(config, &mut out)?,
    };
    let mut echo = config.clone();
    echo.output_dir = None;
    let mut artifacts = out.artifacts().to_vec();
    artifacts.push(MANIFEST_NAME.to_string());
    let manifest = RunManifest {
        command: command.name().to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        core_version: mslab_core::VERSION.to_string(),
        seed: config.seed,
        config: echo,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        pass: checks.iter().all(|c| c.pass),
        checks,
        artifacts,
    };
    out.write_json(MANIFEST_NAME, &manifest)?;
    Ok(manifest)
}

fn max_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn profile_table(profile: &HeightProfile, margins: &[f64]) -> Table {
    let mut t = Table::new(&["t", "f", "argmin", "d2f", "margin"]);
    let last = profile.len() - 1;
    for (j, &margin) in margins.iter().enumerate().take(profile.len()) {
        let d2 = if j == 0 || j == last { f64::NAN } else { profile.d2f[j - 1] };
        t.push(vec![profile.t[j].into(), profile.f[j].into(), profile.argmin[j].into(), d2.into(), margin.into()]);
    }
    t
}

fn concavity_check(v: &ConcavityVerdict) -> Check {
    Check::new(
        "concavity",
        v.pass,
        format!(
            "max D2f {:e}, eps_grid {:e}, cap {:e}; eps_grid within cap: {}",
            v.max_d2f, v.eps_grid, v.cap, v.eps_within_cap
        ),
    )
}

fn radial_table(sol: &RadialSolution, ts: &[f64]) -> Table {
    let mut table = Table::new(&["t", "r", "u", "grad_norm", "K", "sigma1", "phi"]);
    for &t in ts {
        let s = sol.sample(t);
        table.push(vec![s.t.into(), s.r.into(), s.u.into(), s.grad_norm.into(), s.k.into(), s.sigma1.into(), s.phi.into()]);
    }
    table
}

fn run_catenoid(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<Vec<Check>> {
    let c = &cfg.catenoid;
    let tol = &cfg.tolerances;
    ensure!(c.n >= 2, "catenoid.n must be at least 2, got {}", c.n);
    ensure!(c.r_max > CATENOID_INNER, "catenoid.r_max must exceed {CATENOID_INNER}, got {}", c.r_max);
    ensure!(c.t_grid >= 4 && c.t_grid.is_multiple_of(2), "catenoid.t_grid must be even and at least 4");
    let sol = catenoid_band(c.n, c.r_max)?;
    let ts = sol.t_grid(c.t_grid);
    out.write_table("profile.csv", &radial_table(&sol, &ts))?;

    let mut checks = Vec::new();
    let mut worst: f64 = 0.0;
    for &t in &ts {
        let s = sol.sample(t);
        let e = catenoid_invariants(s.r, c.n)?;
        for (a, b) in [(s.grad_norm, e.grad_norm), (s.k, e.k), (s.phi, e.phi)] {
            worst = worst.max((a - b).abs() / b.abs());
        }
    }
    checks.push(Check::new(
        "closed_forms",
        worst <= tol.closed_form,
        format!("max relative error {worst:e} (tol {:e})", tol.closed_form),
    ));

    let (coarse, fine) = radial_profiles(&sol, c.t_grid)?;
    let verdict = concavity_verdict(&coarse, &fine, tol.concavity)?;
    checks.push(concavity_check(&verdict));
    let margins = corollary_margin(&fine, c.n);
    checks.push(Check::new(
        "corollary",
        margins.min_margin >= -tol.margin,
        format!("min margin {:e} (bound {:e})", margins.min_margin, -tol.margin),
    ));
    out.write_table("concavity.csv", &profile_table(&fine, &margins.margins))?;

    let mut sharp = None;
    if c.n == 2 {
        let dev = max_of(fine.f.iter().map(|f| (f - 1.0).abs()));
        let m = max_of(margins.margins.iter().map(|m| m.abs()));
        checks.push(Check::new(
            "sharp_case",
            dev <= tol.sharp && m <= tol.sharp,
            format!("max |f - 1| {dev:e}, max |margin| {m:e} (tol {:e})", tol.sharp),
        ));
        sharp = Some(json!({ "max_f_deviation": dev, "max_margin": m }));
    }

    let mut asym = None;
    if c.n >= 3 {
        ensure!(!c.ladder.is_empty(), "catenoid.ladder is empty");
        let mut table = Table::new(&["r", "deficit", "leading", "residual", "scaled", "sign_disagreement"]);
        let mut scaled = Vec::new();
        for &r in &c.ladder {
            let a = asymptotic_residual(r, c.n)?;
            table.push(vec![r.into(), a.deficit.into(), a.leading.into(), a.residual.into(), a.scaled.into(), a.sign_disagreement.into()]);
            scaled.push(a.scaled);
        }
        out.write_table("asymptotics.csv", &table)?;
        let lo = scaled.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = max_of(scaled.iter().copied());
        let spread = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        checks.push(Check::new(
            "asymptotics",
            spread < tol.asymptotic_ratio,
            format!("scaled residual spread {spread:e} (limit {})", tol.asymptotic_ratio),
        ));
        asym = Some(json!({ "ladder": c.ladder, "scaled": scaled, "spread": spread }));
    }

    let mut affine = None;
    if c.r_max >= 20.0 {
        // The far band r ∈ [r_max/2, r_max] is t ∈ [0, u(r_max/2)].
        let t_end = sol.u(0.5 * c.r_max);
        let k = 64;
        let phis: Vec<f64> = (0..=k).map(|j| sol.phi(sol.r_of_t(t_end * j as f64 / k as f64))).collect();
        let range = (phis[k] - phis[0]).abs();
        let dev = max_of((0..=k).map(|j| {
            let s = j as f64 / k as f64;
            (phis[j] - ((1.0 - s) * phis[0] + s * phis[k])).abs()
        }));
        let relative = if range > 0.0 { dev / range } else { dev };
        checks.push(Check::new(
            "affine_far_band",
            relative <= tol.affine,
            format!("deviation from the chord {relative:e} of the range over r in [{}, {}] (tol {:e})", 0.5 * c.r_max, c.r_max, tol.affine),
        ));
        affine = Some(json!({ "t_end": t_end, "relative_deviation": relative }));
    }

    let pass = checks.iter().all(|c| c.pass);
    out.write_json(
        "summary.json",
        &json!({
            "n": c.n,
            "r_inner": CATENOID_INNER,
            "r_max": c.r_max,
            "c": sol.c,
            "R": catenoid_r(c.n).ok(),
            "height": sol.config.height,
            "max_d2f": verdict.max_d2f,
            "eps_grid": verdict.eps_grid,
            "min_margin": margins.min_margin,
            "closed_form_error": worst,
            "sharp": sharp,
            "asymptotics": asym,
            "affine": affine,
            "tolerances": tol,
            "verdict": if pass { "pass" } else { "fail" },
        }),
    )?;
    Ok(checks)
}

fn run_radial(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<Vec<Check>> {
    let r = &cfg.radial;
    let tol = &cfg.tolerances;
    ensure!(r.t_grid >= 4 && r.t_grid.is_multiple_of(2), "radial.t_grid must be even and at least 4");
    let sol = solve_flux(RadialConfig::with_height(r.n, r.r_outer, r.r_inner, r.height.unwrap_or(1.0))?)?;
    let ts = sol.t_grid(r.t_grid);
    out.write_table("profile.csv", &radial_table(&sol, &ts))?;
    let mut checks = Vec::new();
    let (coarse, fine) = radial_profiles(&sol, r.t_grid)?;
    let verdict = concavity_verdict(&coarse, &fine, tol.concavity)?;
    checks.push(concavity_check(&verdict));
    let margins = corollary_margin(&fine, r.n);
    checks.push(Check::new(
        "corollary",
        margins.min_margin >= -tol.margin,
        format!("min margin {:e} (bound {:e})", margins.min_margin, -tol.margin),
    ));
    out.write_table("concavity.csv", &profile_table(&fine, &margins.margins))?;
    let standard = radial_inequality(&sol, &ts, BetaChoice::Standard);
    let wrong = radial_inequality(&sol, &ts, BetaChoice::WrongSign);
    let mut table = Table::new(&["t", "standard", "wrong_sign"]);
    for ((&t, &a), &b) in ts.iter().zip(&standard).zip(&wrong) {
        table.push(vec![t.into(), a.into(), b.into()]);
    }
    out.write_table("inequality.csv", &table)?;
    let worst = max_of(standard.iter().copied());
    let control = max_of(wrong.iter().copied());
    checks.push(Check::new(
        "inequality",
        worst <= tol.inequality,
        format!("max L(e^(beta phi)) {worst:e} (tol {:e})", tol.inequality),
    ));
    if r.n > 2 {
        checks.push(Check::new("wrong_sign_control", control > 0.0, format!("max with beta > 0: {control:e}, must be positive")));
    }
    out.write_json(
        "summary.json",
        &json!({
            "n": r.n,
            "c": sol.c,
            "max_d2f": verdict.max_d2f,
            "eps_grid": verdict.eps_grid,
            "min_margin": margins.min_margin,
            "inequality_max": worst,
            "wrong_sign_max": control,
            "tolerances": tol,
        }),
    )?;
    Ok(checks)
}

#[derive(Debug, Serialize)]
struct Ring2dReport {
    n_theta: usize,
    n_t: usize,
    t_order: usize,
    solver: SolverSummary,
    concavity: ConcavityVerdict,
    min_margin: f64,
    oracle_error: Option<f64>,
    remark: RemarkSummary,
    inequality: InequalitySummary,
}

#[derive(Debug, Serialize)]
struct SolverSummary {
    iterations: usize,
    factorizations: usize,
    residual: f64,
    tolerance: f64,
    convexity_margin: f64,
    orientation_margin: f64,
}

#[derive(Debug, Serialize)]
struct RemarkSummary {
    max_residual: f64,
    critical_nodes: usize,
    missing_rows: usize,
    tolerance: f64,
    roundoff_floor: f64,
    effective_tolerance: f64,
}

#[derive(Debug, Serialize)]
struct InequalitySummary {
    worst: f64,
    coarse_worst: f64,
    eps_grid: f64,
    critical_nodes: usize,
}

fn run_ring2d(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<Vec<Check>> {
    let rc = &cfg.ring2d;
    let tol = &cfg.tolerances;
    ensure!(rc.n_theta.is_multiple_of(2) && rc.n_t.is_multiple_of(2), "ring2d.n_theta and ring2d.n_t must be even");
    let options = solver_options(rc)?;
    let problem = ring_problem(rc)?;
    let coarse_problem = halved(&problem)?;
    let fine = run_ring(&problem, &options)?;
    let coarse = run_ring(&coarse_problem, &options)?;
    let sol = &fine.solution;
    let n = sol.n_theta();
    let mut checks = Vec::new();

    let verdict = concavity_verdict(&coarse.profile, &fine.profile, tol.concavity)?;
    checks.push(concavity_check(&verdict));
    let margins = corollary_margin(&fine.profile, 2);
    checks.push(Check::new(
        "corollary",
        margins.min_margin >= -tol.margin,
        format!("min margin {:e} (bound {:e})", margins.min_margin, -tol.margin),
    ));

    let oracle_error = match (Boundary::parse(&rc.outer)?, Boundary::parse(&rc.inner)?) {
        (Boundary::Circle { center: co, radius: ro }, Boundary::Circle { center: ci, radius: ri }) if co == ci => {
            let radial = solve_flux(RadialConfig::with_height(2, ro, ri, rc.height)?)?;
            let sphere = sol.grid.sphere();
            let mut err: f64 = 0.0;
            for j in 0..sol.rows() {
                let r = radial.r_of_t(sol.grid.t(j));
                for i in 0..n {
                    let y = sphere.direction(i);
                    err = err.max((sol.h[j * n + i] - (r + co[0] * y[0] + co[1] * y[1])).abs());
                }
            }
            checks.push(Check::new("radial_oracle", err <= tol.oracle, format!("max |h - h_radial| {err:e} (tol {:e})", tol.oracle)));
            Some(err)
        }
        _ => None,
    };

    // Differentiating the identity amplifies solver noise by about
    // (N_θ/2)²/min b; that floor is added to the configured tolerance.
    let remark = remark_identity_residual(sol)?;
    let b_min = sol.fields.b.iter().copied().fold(f64::INFINITY, f64::min);
    let half = (n / 2) as f64;
    let floor = fine.report.tolerance * (1.0 + half * half) / b_min;
    let effective = tol.remark + floor;
    if remark.critical_nodes > 0 {
        checks.push(Check::new(
            "remark_identity",
            remark.max_residual <= effective,
            format!(
                "max residual {:e} at {} critical nodes (tol {:e} + roundoff floor {floor:e})",
                remark.max_residual, remark.critical_nodes, tol.remark
            ),
        ));
    }

    let ic = differential_inequality_check(&coarse.solution, BetaChoice::Standard)?;
    let inf = differential_inequality_check(sol, BetaChoice::Standard)?;
    let eps_ineq = 4.0 * (inf.worst_value - ic.worst_value).abs() + 1e-9;
    if inf.critical_nodes > 0 && ic.critical_nodes > 0 {
        checks.push(Check::new(
            "inequality",
            inf.worst_value <= eps_ineq,
            format!("max L(e^(beta phi)) at critical nodes {:e} (eps_grid {eps_ineq:e})", inf.worst_value),
        ));
    }

    let mut table = Table::new(&["t", "theta", "h", "b", "phi"]);
    for j in 0..sol.rows() {
        for i in 0..n {
            let k = j * n + i;
            table.push(vec![sol.grid.t(j).into(), sol.grid.theta(i).into(), sol.h[k].into(), sol.fields.b[k].into(), fine.phi.level[k].into()]);
        }
    }
    out.write_table("solution.csv", &table)?;
    out.write_table("profile.csv", &profile_table(&fine.profile, &margins.margins))?;
    let report = Ring2dReport {
        n_theta: n,
        n_t: rc.n_t,
        t_order: rc.t_order,
        solver: SolverSummary {
            iterations: fine.report.iterations,
            factorizations: fine.report.factorizations,
            residual: fine.report.residual,
            tolerance: fine.report.tolerance,
            convexity_margin: fine.report.convexity_margin,
            orientation_margin: fine.report.orientation_margin,
        },
        concavity: verdict,
        min_margin: margins.min_margin,
        oracle_error,
        remark: RemarkSummary {
            max_residual: remark.max_residual,
            critical_nodes: remark.critical_nodes,
            missing_rows: remark.missing_rows.len(),
            tolerance: tol.remark,
            roundoff_floor: floor,
            effective_tolerance: effective,
        },
        inequality: InequalitySummary {
            worst: inf.worst_value,
            coarse_worst: ic.worst_value,
            eps_grid: eps_ineq,
            critical_nodes: inf.critical_nodes,
        },
    };
    out.write_json("report.json", &json!({ "report": report, "tolerances": tol }))?;
    Ok(checks)
}

fn run_verify(out: &mut OutputDir) -> Result<Vec<Check>> {
    let verdicts = criteria::run_all();
    out.write_json("verify.json", &verdicts)?;
    Ok(verdicts
        .iter()
        .map(|v| Check::new(format!("criterion_{}", v.id), v.pass, format!("{}: {} ({:.2} s)", v.title, v.summary, v.seconds)))
        .collect())
}

fn run_convergence(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<Vec<Check>> {
    let c = &cfg.convergence;
    let (base, doublings, declared) = c.resolved();
    if doublings == 0 {
        bail!("convergence needs at least one doubling to estimate an order");
    }
    ensure!(base >= 8, "convergence.base must be at least 8");
    let resolutions: Vec<usize> = (0..=doublings).map(|k| base << k).collect();
    let mut errors = Vec::with_capacity(resolutions.len());
    let quantity = match c.study {
        Study::Ring2d => {
            let options = SolverOptions { t_order: stencil_order(c.t_order)?, ..SolverOptions::default() };
            let radial = solve_flux(RadialConfig::with_height(2, c.r_outer, c.r_inner, c.height)?)?;
            let g = circle_grid(c.n_theta)?;
            for &n_t in &resolutions {
                let problem = mslab_core::ring::RingProblem::with_height(
                    disc(&g, [0.0, 0.0], c.r_outer)?,
                    disc(&g, [0.0, 0.0], c.r_inner)?,
                    n_t,
                    c.height,
                )?;
                let (sol, _) = solve(&problem, &options)?;
                let mut err: f64 = 0.0;
                for j in 0..sol.rows() {
                    let r = radial.r_of_t(sol.grid.t(j));
                    err = max_of(sol.h[j * c.n_theta..(j + 1) * c.n_theta].iter().map(|h| (h - r).abs())).max(err);
                }
                errors.push(err);
            }
            "max |h - h_radial| over n_t"
        }
        Study::Codazzi => {
            for &res in &resolutions {
                let g = std::sync::Arc::new(SphereGrid::new(3, res)?);
                errors.push(codazzi_residual(&SupportSlice::from_fn(g, ellipsoid(c.axes))?)?);
            }
            "Codazzi defect over lat-long resolution"
        }
        Study::Physical => {
            let options = solver_options(&cfg.ring2d)?;
            for &n in &resolutions {
                let mut rc = cfg.ring2d.clone();
                rc.n_theta = n;
                rc.n_t = n;
                let (sol, _) = solve(&ring_problem(&rc)?, &options)?;
                errors.push(physical_residual(&sol)?.max_residual);
            }
            "physical-space residual over N_theta = N_t"
        }
    };
    let orders = observed_orders(&errors);
    let mut table = Table::new(&["resolution", "error", "order"]);
    for (k, (&res, &e)) in resolutions.iter().zip(&errors).enumerate() {
        let order = if k == 0 { f64::NAN } else { orders[k - 1] };
        table.push(vec![Cell::from(res), e.into(), order.into()]);
    }
    out.write_table("convergence.csv", &table)?;
    let min_order = orders.iter().copied().fold(f64::INFINITY, f64::min);
    let pass = min_order >= declared - cfg.tolerances.order_slack;
    out.write_json(
        "report.json",
        &json!({
            "study": c.study,
            "quantity": quantity,
            "resolutions": resolutions,
            "errors": errors,
            "orders": orders,
            "declared": declared,
            "order_slack": cfg.tolerances.order_slack,
        }),
    )?;
    Ok(vec![Check::new(
        "observed_order",
        pass,
        format!("min observed order {min_order:.3} (declared {declared} - {})", cfg.tolerances.order_slack),
    )])
}

fn run_lemma32(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<Vec<Check>> {
    let summary = lemma::run(&cfg.lemma32, cfg.seed)?;
    let mut table = Table::new(&["instance", "vars", "bound", "brute", "excess"]);
    for (k, o) in summary.outcomes.iter().enumerate() {
        table.push(vec![Cell::from(k), Cell::from(o.vars), o.bound.into(), o.brute.into(), o.excess.into()]);
    }
    out.write_table("lemma32.csv", &table)?;
    out.write_json(
        "report.json",
        &json!({
            "seed": cfg.seed,
            "instances": summary.instances,
            "worst_excess": summary.worst_excess,
            "worst_instance": summary.worst_instance,
            "worst_gap": summary.worst_gap,
            "slack": cfg.tolerances.lemma,
            "config": cfg.lemma32,
        }),
    )?;
    Ok(vec![Check::new(
        "quadratic_bound",
        summary.worst_excess <= cfg.tolerances.lemma,
        format!("max excess over 4 mu^2 Gamma: {:e} (slack {:e})", summary.worst_excess, cfg.tolerances.lemma),
    )])
}
