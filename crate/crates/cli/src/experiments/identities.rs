//! Closed-form checks of the identities behind the emergence of the
//! nonlinear term, with negative controls.

use semigroup_lab::cole_hopf::Grid1D;
use semigroup_lab::nonlinear_emergence::{
    cole_hopf_consistency, conforming_pairs, identity_residual, negative_controls, Identity, IdentityResidual,
    SmoothPair, NEGATIVE_CONTROL_MARGIN, TOL_IDENTITY,
};
use semigroup_lab::{ReportBuilder, VerificationReport};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{fmt_f64, Outcome, Table};

pub const TOL_CONSISTENCY: f64 = 1e-6;
/// Grid used for the comparison with the grid transform.
pub const CONSISTENCY_GRID: (f64, usize) = (4.0, 512);
pub const CONSISTENCY_TIME: f64 = 0.5;
/// Pairs compared with the grid transform.
const CONSISTENCY_PAIRS: [&str; 2] = ["shock", "single_exp"];

fn ratio_is_constant(pair: &SmoothPair) -> bool {
    let w: Vec<f64> = pair
        .window
        .points()
        .into_iter()
        .map(|(t, x)| -pair.u.eval(t, x) / pair.v.eval(t, x))
        .collect();
    let size = w.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    w.iter().all(|v| (v - w[0]).abs() <= TOL_IDENTITY * size)
}

pub fn identity_reports() -> Result<(Vec<VerificationReport>, Table), CliError> {
    let mut table = Table::new("identities", &["name", "max_abs", "scale", "pass"]);
    let mut row = |label: String, r: &IdentityResidual, pass: bool| {
        table.push(vec![label, fmt_f64(r.max_abs), fmt_f64(r.scale), pass.to_string()]);
    };

    let mut conforming = ReportBuilder::new("identities", "conforming catalogue");
    let mut advection = ReportBuilder::new("advection_term", "conforming catalogue");
    let mut consistency = ReportBuilder::new("cole_hopf_consistency", &format!("{CONSISTENCY_GRID:?}"));
    for pair in conforming_pairs() {
        for id in Identity::ALL.iter().filter(|id| id.applies_to(&pair)) {
            let r = identity_residual(*id, &pair, &pair.window)?;
            let key = format!("{}.{}", id.name(), pair.name);
            conforming.check(key.clone(), r.max_abs, TOL_IDENTITY * r.scale);
            if let (Some(term), false) = (r.advection_term, ratio_is_constant(&pair)) {
                // Content check: the nonlinear term must not vanish identically
                // (it does, trivially, when -u/v is constant).
                let missing = if term > TOL_IDENTITY * r.scale { 0.0 } else { 1.0 };
                advection.check(format!("vanishes.{}", pair.name), missing, 0.0);
            }
            row(key, &r, r.holds());
        }
        if CONSISTENCY_PAIRS.contains(&pair.name.as_str()) {
            let grid = Grid1D::new(CONSISTENCY_GRID.0, CONSISTENCY_GRID.1)?;
            let gap = cole_hopf_consistency(&pair, CONSISTENCY_TIME, grid)?;
            consistency.check(pair.name.clone(), gap, TOL_CONSISTENCY);
        }
    }

    // A control passes when the residual clears the margin: margin * scale / max_abs <= 1.
    let mut controls = ReportBuilder::new("negative_controls", "violating catalogue");
    for (id, pair) in negative_controls() {
        let r = identity_residual(id, &pair, &pair.window)?;
        let key = format!("{}.{}", id.name(), pair.name);
        controls.check(key.clone(), NEGATIVE_CONTROL_MARGIN * r.scale / r.max_abs, 1.0);
        row(format!("negative.{key}"), &r, r.clearly_fails());
    }

    let reports = vec![
        conforming.finish(),
        advection.finish(),
        controls.finish(),
        consistency.finish(),
    ];
    Ok((reports, table))
}

pub fn run(_cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (reports, table) = identity_reports()?;
    Ok(Outcome {
        reports,
        tables: vec![table],
        ..Outcome::default()
    })
}
