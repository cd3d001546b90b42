//! Every check at its reference parameters.

use rand::Rng;

use semigroup_lab::cole_hopf::{GaugeFunction, Grid1D};
use semigroup_lab::evolution::Coefficient;
use semigroup_lab::logrep::{log_representation, KappaShift};
use semigroup_lab::operator_core::C64;
use semigroup_lab::spectral_x::{
    boundary_reproduction_check, multiplier_check, resolvent_bound_check, semigroup_law_check,
    subordination_density_check, FrequencyGrid, ResolventProbe,
};
use semigroup_lab::{ReportBuilder, VerificationReport};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{fmt_f64, Outcome, Table};

use super::{colehopf, identities, logrep, rng, subordinate, xevolve};

pub const FAMILIES: usize = 20;
pub const MAX_DIM: usize = 6;
pub const MAX_NORM: f64 = 2.0;
pub const RECOVERY_STEP: f64 = 1e-4;
pub const FAMILY_HALF_WIDTH: f64 = 2.0;
pub const PROBES: usize = 100;
pub const REAL_PROBES: usize = 10;
pub const SUBORDINATION_XS: [f64; 3] = [0.5, 1.0, 2.0];
pub const LAPLACE_KS: [f64; 3] = [0.25, 1.0, 4.0];

/// Collects several reports under one name, prefixing their keys.
pub fn combine(name: &str, canonical: &str, parts: &[(String, VerificationReport)]) -> VerificationReport {
    let mut b = ReportBuilder::new(name, canonical);
    for (prefix, r) in parts {
        for (k, v) in &r.residuals {
            b.check(format!("{prefix}{k}"), *v, r.tolerances[k]);
        }
    }
    b.finish()
}

/// Recovery, kappa-independence and group laws over random constant
/// generators of dimension at most 6 and norm at most 2.
pub fn generator_panel(seed: u64) -> Result<Vec<VerificationReport>, CliError> {
    let mut rng = rng(seed);
    let (mut recovery, mut spread): (f64, f64) = (0.0, 0.0);
    let mut axioms = Vec::new();
    for i in 0..FAMILIES {
        let dim = rng.random_range(1..=MAX_DIM);
        let norm = MAX_NORM * rng.random_range(0.05..=1.0);
        let family = logrep::family_from(
            "random",
            dim,
            norm,
            Coefficient::Const(1.0),
            FAMILY_HALF_WIDTH,
            &mut rng,
        )?;
        let t = rng.random_range(-1.0..=1.0);
        let s = rng.random_range(-1.0..=1.0);
        let r = log_representation(
            &family,
            &family.point(t),
            &family.point(s),
            KappaShift::real(1.0)?,
            RECOVERY_STEP,
        )?;
        recovery = recovery.max(r.residual_vs_true.unwrap_or(f64::NAN));
        spread = spread.max(logrep::kappa_spread(&family, t, s, None)?.0);
        let triples = logrep::random_triples(logrep::GROUP_TRIPLES, FAMILY_HALF_WIDTH, &mut rng);
        axioms.push((format!("family{i:02}."), logrep::group_axioms(&family, &triples)));
    }
    let canonical = format!("seed={seed};families={FAMILIES};h={RECOVERY_STEP:e}");
    Ok(vec![
        ReportBuilder::new("generator_recovery", &canonical)
            .check("max_error", recovery, logrep::TOL_RECOVERY)
            .finish(),
        ReportBuilder::new("kappa_independence", &canonical)
            .check("max_pairwise", spread, logrep::TOL_KAPPA)
            .finish(),
        combine("group_axioms", &canonical, &axioms),
    ])
}

/// Largest excess of each resolvent residual over its own tolerance across
/// random probes, plus the gap to equality at real `lambda`.
pub fn resolvent_panel(seed: u64) -> Result<VerificationReport, CliError> {
    let mut rng = rng(seed ^ 0x5eed);
    let grid = FrequencyGrid::new(512, 0.1)?;
    let mut excess = std::collections::BTreeMap::<String, f64>::new();
    let mut tight: f64 = 0.0;
    let mut probes: Vec<C64> = (0..PROBES)
        .map(|_| C64::new(rng.random_range(0.1..=10.0), rng.random_range(-10.0..=10.0)))
        .collect();
    probes.extend((0..REAL_PROBES).map(|_| C64::new(rng.random_range(0.1..=10.0), 0.0)));
    for lambda in probes {
        let r = resolvent_bound_check(&ResolventProbe::new(lambda, 1.0)?, &grid);
        for (k, v) in &r.residuals {
            if k == "tightness_gap" {
                tight = tight.max(*v);
            } else {
                let e = excess.entry(format!("{k}_excess")).or_insert(0.0);
                *e = e.max((v - r.tolerances[k]).max(0.0));
            }
        }
    }
    let mut b = ReportBuilder::new("resolvent_bound", &format!("seed={seed};probes={PROBES}+{REAL_PROBES}"));
    for (k, v) in excess {
        b.check(k, v, 0.0);
    }
    b.check("tightness_gap", tight, semigroup_lab::spectral_x::TOL_RESOLVENT);
    Ok(b.finish())
}

pub fn subordination_panel() -> Result<Vec<VerificationReport>, CliError> {
    let grid = FrequencyGrid::for_samples(128, 0.05)?;
    let mut density = Vec::new();
    let mut multiplier = Vec::new();
    for x in SUBORDINATION_XS {
        density.push((format!("x{x}."), subordination_density_check(x, &LAPLACE_KS)?));
        multiplier.push((format!("x{x}."), multiplier_check(x, 1.0, &grid)?));
    }
    Ok(vec![
        combine("subordination_density", "xs=0.5,1,2;ks=0.25,1,4", &density),
        combine("subordination_multiplier", "xs=0.5,1,2;m=128;dt=0.05", &multiplier),
        semigroup_law_check(1.0, 0.7, 1.0, &subordinate::test_signal(128, 0.05)?)?,
    ])
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let seed = cfg.seed;
    let mut out = Outcome::default();
    out.reports.extend(generator_panel(seed)?);

    let (mu, half_width, n, t_end) = (1.0, 4.0, 256, 0.5);
    let grid = Grid1D::new(half_width, n)?;
    let dx = grid.dx();
    let (residual, convergence) = colehopf::burgers_checks(
        mu,
        half_width,
        n,
        None,
        t_end,
        semigroup_lab::cole_hopf::DEFAULT_RESIDUAL_CONSTANT,
    )?;
    out.reports.push(residual);
    out.reports.push(convergence);
    for (name, g) in [
        ("gauge_zero", GaugeFunction::Const(0.0)),
        ("gauge_const5", GaugeFunction::Const(5.0)),
        ("gauge_sin", GaugeFunction::Sin(1.0)),
    ] {
        out.reports.push(colehopf::gauge_report(name, grid, mu, dx, t_end, g)?);
    }
    out.reports.push(colehopf::heat_check(grid, mu, dx, t_end)?);
    out.reports.push(colehopf::round_trip(grid, mu)?);
    let wide = Grid1D::new(8.0, 512)?;
    let cross = colehopf::cross_solver(mu, 8.0, 512, wide.dx(), t_end)?;
    out.reports.push(cross.report.clone());

    out.reports.push(resolvent_panel(seed)?);
    let probe = ResolventProbe::new(C64::new(1.0, 0.5), 1.0)?;
    out.reports.push(xevolve::resolvent_apply_check(&probe, 64, 0.1)?);
    out.reports.extend(subordination_panel()?);
    out.reports.push(boundary_reproduction_check(
        &xevolve::synthetic_traces(64, 0.1)?,
        1.0,
        1.0,
    )?);

    let (reports, table) = identities::identity_reports()?;
    out.reports.extend(reports);
    out.tables.push(table);

    let mut summary = Table::new("suite_summary", &["report", "key", "residual", "tolerance", "pass"]);
    for r in &out.reports {
        for (k, v) in &r.residuals {
            let tol = r.tolerances[k];
            summary.push(vec![
                r.name.clone(),
                k.clone(),
                fmt_f64(*v),
                fmt_f64(tol),
                (*v <= tol).to_string(),
            ]);
        }
    }
    out.tables.push(summary);

    let mut fin = Table::new("cross_solver_final", &["x", "pipeline", "direct", "exact"]);
    for (k, x) in cross.grid.nodes().enumerate() {
        fin.push_floats(&[
            x,
            cross.pipeline.values()[k],
            cross.direct.values()[k],
            cross.exact.values()[k],
        ]);
    }
    out.plots.push(fin);
    Ok(out)
}
