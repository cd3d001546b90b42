//! Heat equation to Burgers through the transform, checked against the
//! travelling front and against a direct Burgers solver.

use semigroup_lab::cole_hopf::exact::{shock_heat_mu, shock_psi_mu};
use semigroup_lab::cole_hopf::{
    burgers_residual_field, burgers_residual_with, cole_hopf_transform, cole_hopf_via_log, gauge_check,
    inverse_cole_hopf, solve_burgers_direct, solve_heat_with_boundary, BurgersLimits, FieldSeries, GaugeFunction,
    Grid1D, GridFunction1D, HeatParams,
};
use semigroup_lab::{ReportBuilder, VerificationReport};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{Outcome, Table};

/// Required reduction of the residual when both steps are halved.
pub const MIN_HALVING_RATIO: f64 = 3.5;
pub const TOL_CROSS_SOLVER: f64 = 0.05;
/// Fraction of the stability limit used by the direct solver.
const DIRECT_CFL: f64 = 0.5;
const MAX_CSV_SLICES: usize = 11;

/// Uniform step count covering `[0, t_end]` with steps no larger than `dt`.
pub fn time_steps(dt: f64, t_end: f64) -> (usize, f64) {
    let steps = ((t_end / dt) - 1e-9).ceil().max(1.0) as usize;
    (steps, t_end / steps as f64)
}

/// The front `1 + exp(x + t/mu^{1/2})` on the grid, and its grid transform.
pub fn transformed_front(grid: Grid1D, mu: f64, dt: f64, t_end: f64) -> Result<(FieldSeries, FieldSeries), CliError> {
    let (steps, dt) = time_steps(dt, t_end);
    let u = FieldSeries::sample(grid, 0.0, dt, steps, |t, x| shock_heat_mu(mu, t, x))?;
    let slices = u
        .slices
        .iter()
        .map(|s| cole_hopf_transform(s, mu))
        .collect::<Result<Vec<_>, _>>()?;
    let psi = FieldSeries {
        dt: u.dt,
        times: u.times.clone(),
        slices,
    };
    Ok((u, psi))
}

/// Residual of the transformed front, and its reduction when `n -> 2n+1`
/// (which halves the spacing) and `dt -> dt/2`.
pub fn burgers_checks(
    mu: f64,
    half_width: f64,
    n: usize,
    dt: Option<f64>,
    t_end: f64,
    c: f64,
) -> Result<(VerificationReport, VerificationReport), CliError> {
    let coarse_grid = Grid1D::new(half_width, n)?;
    let dt = dt.unwrap_or(coarse_grid.dx());
    let (_, psi) = transformed_front(coarse_grid, mu, dt, t_end)?;
    let coarse = burgers_residual_with(&psi, mu, psi.dt, c)?;
    let fine_grid = Grid1D::new(half_width, 2 * n + 1)?;
    let (_, psi_fine) = transformed_front(fine_grid, mu, 0.5 * dt, t_end)?;
    let fine = burgers_residual_with(&psi_fine, mu, psi_fine.dt, c)?;
    let ratio = fine.residual("max_abs").unwrap_or(f64::NAN) / coarse.residual("max_abs").unwrap_or(f64::NAN);
    let canonical = format!("mu={mu:e};L={half_width:e};n={n};dt={dt:e};t_end={t_end:e}");
    let convergence = ReportBuilder::new("burgers_convergence", &canonical)
        .check("fine_over_coarse", ratio, 1.0 / MIN_HALVING_RATIO)
        .finish();
    Ok((coarse, convergence))
}

/// Crank-Nicolson run of the front with exact boundary traces.
pub fn heat_front(grid: Grid1D, mu: f64, dt: f64, t_end: f64) -> Result<FieldSeries, CliError> {
    let u0 = GridFunction1D::from_fn(grid, |x| shock_heat_mu(mu, 0.0, x))?;
    let l = grid.half_width();
    let p = HeatParams { mu, dt, t_end };
    Ok(solve_heat_with_boundary(
        &u0,
        &p,
        |t| shock_heat_mu(mu, t, -l),
        |t| shock_heat_mu(mu, t, l),
    )?)
}

pub fn heat_check(grid: Grid1D, mu: f64, dt: f64, t_end: f64) -> Result<VerificationReport, CliError> {
    let u = heat_front(grid, mu, dt, t_end)?;
    let last = u.last().expect("at least one step");
    let t = *u.times.last().expect("at least one step");
    let exact = GridFunction1D::from_fn(grid, |x| shock_heat_mu(mu, t, x))?;
    let rel = last.max_abs_diff(&exact) / exact.max_abs();
    let bound = 5.0 * (grid.dx().powi(2) + u.dt.powi(2));
    Ok(ReportBuilder::new(
        "heat_solver",
        &format!("mu={mu:e};grid={grid:?};dt={dt:e};t_end={t_end:e}"),
    )
    .check("max_rel_error", rel, bound)
    .finish())
}

/// Final slices of the transform pipeline, the direct solver and the exact
/// front, with their interior L1 gaps.
pub struct CrossSolver {
    pub grid: Grid1D,
    pub t: f64,
    pub pipeline: GridFunction1D,
    pub direct: GridFunction1D,
    pub exact: GridFunction1D,
    pub report: VerificationReport,
}

pub fn cross_solver(mu: f64, half_width: f64, n: usize, dt: f64, t_end: f64) -> Result<CrossSolver, CliError> {
    let grid = Grid1D::new(half_width, n)?;
    let u = heat_front(grid, mu, dt, t_end)?;
    let pipeline = cole_hopf_transform(u.last().expect("at least one step"), mu)?;
    let psi0 = cole_hopf_transform(&u.slices[0], mu)?;
    let direct_dt = DIRECT_CFL * BurgersLimits::of(&psi0, mu).max_dt();
    let direct = solve_burgers_direct(&psi0, mu, direct_dt, t_end)?;
    let direct = direct.last().expect("at least one slice").clone();
    let exact = GridFunction1D::from_fn(grid, |x| shock_psi_mu(mu, t_end, x))?;
    let window = 0.5 * half_width;
    let report = ReportBuilder::new(
        "cross_solver",
        &format!("mu={mu:e};L={half_width:e};n={n};dt={dt:e};t_end={t_end:e}"),
    )
    .check(
        "pipeline_vs_direct",
        pipeline.l1_diff_within(&direct, window),
        TOL_CROSS_SOLVER,
    )
    .check(
        "pipeline_vs_exact",
        pipeline.l1_diff_within(&exact, window),
        TOL_CROSS_SOLVER,
    )
    .check(
        "direct_vs_exact",
        direct.l1_diff_within(&exact, window),
        TOL_CROSS_SOLVER,
    )
    .finish();
    Ok(CrossSolver {
        grid,
        t: t_end,
        pipeline,
        direct,
        exact,
        report,
    })
}

/// `forward(inverse(psi))` against `psi`, and the two forward routes
/// against each other.
pub fn round_trip(grid: Grid1D, mu: f64) -> Result<VerificationReport, CliError> {
    let psi = GridFunction1D::from_fn(grid, |x| shock_psi_mu(mu, 0.0, x))?;
    let anchor = shock_heat_mu(mu, 0.0, -grid.half_width());
    let u = inverse_cole_hopf(&psi, mu, anchor)?;
    let back = cole_hopf_transform(&u, mu)?;
    let exact_u = GridFunction1D::from_fn(grid, |x| shock_heat_mu(mu, 0.0, x))?;
    let routes = cole_hopf_transform(&exact_u, mu)?.max_abs_diff(&cole_hopf_via_log(&exact_u, mu)?);
    let dx = grid.dx();
    Ok(ReportBuilder::new("round_trip", &format!("mu={mu:e};grid={grid:?}"))
        .check("forward_after_inverse", back.max_abs_diff(&psi), 10.0 * dx * dx)
        .check("log_route_gap", routes, 100.0 * dx.powi(4) / mu.sqrt())
        .finish())
}

pub fn gauge_report(
    name: &str,
    grid: Grid1D,
    mu: f64,
    dt: f64,
    t_end: f64,
    gauge: GaugeFunction,
) -> Result<VerificationReport, CliError> {
    let (u, _) = transformed_front(grid, mu, dt, t_end)?;
    Ok(VerificationReport {
        name: name.to_string(),
        ..gauge_check(&u, gauge, mu)?
    })
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (mu, half_width, n, t_end) = (cfg.f64("mu"), cfg.f64("L"), cfg.usize("n"), cfg.f64("t_end"));
    let grid = Grid1D::new(half_width, n)?;
    let dt = cfg.auto_f64("dt").unwrap_or(grid.dx());

    let mut out = Outcome::default();
    let (residual, convergence) = burgers_checks(mu, half_width, n, Some(dt), t_end, cfg.f64("residual_c"))?;
    out.reports.push(residual);
    out.reports.push(convergence);
    out.reports
        .push(gauge_report("gauge", grid, mu, dt, t_end, cfg.gauge())?);
    out.reports.push(heat_check(grid, mu, dt, t_end)?);
    out.reports.push(round_trip(grid, mu)?);
    let cross = cross_solver(mu, half_width, n, dt, t_end)?;
    out.reports.push(cross.report.clone());

    // psi of the transformed front at a handful of times
    let (_, psi) = transformed_front(grid, mu, dt, t_end)?;
    let stride = (psi.len() - 1).div_ceil(MAX_CSV_SLICES - 1).max(1);
    let mut series = Table::new("psi_series", &["t", "x", "value"]);
    for (j, (t, slice)) in psi.times.iter().zip(&psi.slices).enumerate() {
        if j % stride != 0 && j + 1 != psi.len() {
            continue;
        }
        for (x, v) in grid.nodes().zip(slice.values()) {
            series.push_floats(&[*t, x, *v]);
        }
    }
    out.tables.push(series);

    let mut fin = Table::new("colehopf_final", &["x", "pipeline", "direct", "exact"]);
    for (k, x) in cross.grid.nodes().enumerate() {
        fin.push_floats(&[
            x,
            cross.pipeline.values()[k],
            cross.direct.values()[k],
            cross.exact.values()[k],
        ]);
    }
    out.plots.push(fin);

    let field = burgers_residual_field(&psi, mu, psi.dt)?;
    let mid = field.times.len() / 2;
    let mut res = Table::new("burgers_residual", &["t", "x", "residual"]);
    if let Some(row) = field.values.get(mid) {
        for (x, r) in field.x.iter().zip(row) {
            res.push_floats(&[field.times[mid], *x, *r]);
        }
    }
    out.plots.push(res);
    Ok(out)
}
