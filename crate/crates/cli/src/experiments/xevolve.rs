//! Evolution in x of the heat equation, frequency by frequency, plus the
//! resolvent estimate of the half-order generator.

use std::f64::consts::PI;
use std::path::Path;

use semigroup_lab::operator_core::C64;
use semigroup_lab::spectral_x::{
    boundary_reproduction_check, diagonalized_symbols, resolvent_apply, resolvent_bound_check, solve_x_direction,
    FrequencyGrid, ResolventProbe, TimeSamples, XBoundaryData,
};
use semigroup_lab::{ReportBuilder, VerificationReport};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{Outcome, Table};

/// Smooth periodic traces on `m` samples of spacing `dt`.
pub fn synthetic_traces(m: usize, dt: f64) -> Result<XBoundaryData, CliError> {
    let w = 2.0 * PI / (m as f64 * dt);
    let v0 = TimeSamples::from_fn(0.0, dt, m, |t| {
        C64::new(1.0 + (w * t).cos() + 0.5 * (2.0 * w * t).sin(), 0.0)
    })?;
    let v1 = TimeSamples::from_fn(0.0, dt, m, |t| {
        C64::new(-0.3 * (3.0 * w * t).sin(), 0.2 * (w * t).cos())
    })?;
    Ok(XBoundaryData::new(v0, v1)?)
}

/// Columns `t, v0_re, v0_im, v1_re, v1_im`; times must be uniform.
pub fn read_traces(path: &Path) -> Result<XBoundaryData, CliError> {
    let bad = |detail: String| CliError::Data {
        path: path.to_path_buf(),
        detail,
    };
    let mut reader = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let header = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    let want = ["t", "v0_re", "v0_im", "v1_re", "v1_im"];
    let cols: Vec<usize> = want
        .iter()
        .map(|w| {
            header
                .iter()
                .position(|h| h.trim() == *w)
                .ok_or_else(|| bad(format!("missing column `{w}`")))
        })
        .collect::<Result<_, _>>()?;
    let mut rows: Vec<[f64; 5]> = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let mut row = [0.0; 5];
        for (slot, &c) in row.iter_mut().zip(&cols) {
            let field = rec.get(c).unwrap_or("");
            *slot = field
                .trim()
                .parse()
                .map_err(|_| bad(format!("row {}: `{field}` is not a number", line + 2)))?;
        }
        rows.push(row);
    }
    if rows.len() < 2 {
        return Err(bad("need at least two rows".into()));
    }
    let dt = rows[1][0] - rows[0][0];
    if dt.is_nan()
        || dt <= 0.0
        || rows
            .windows(2)
            .any(|w| ((w[1][0] - w[0][0]) - dt).abs() > 1e-9 * dt.max(w[1][0].abs()))
    {
        return Err(bad("times must be increasing and uniformly spaced".into()));
    }
    let v0 = rows.iter().map(|r| C64::new(r[1], r[2])).collect();
    let v1 = rows.iter().map(|r| C64::new(r[3], r[4])).collect();
    let t0 = rows[0][0];
    Ok(XBoundaryData::new(
        TimeSamples::new(t0, dt, v0)?,
        TimeSamples::new(t0, dt, v1)?,
    )?)
}

/// Applies the resolvent to the lowest nonzero grid mode, whose image is
/// known in closed form, and checks the contraction `||R f|| <= ||f|| / Re lambda`.
pub fn resolvent_apply_check(p: &ResolventProbe, m: usize, dt: f64) -> Result<VerificationReport, CliError> {
    let g = FrequencyGrid::for_samples(m, dt)?;
    let omega = g.d_omega();
    let f = TimeSamples::from_fn(0.0, dt, m, |t| C64::new(0.0, omega * t).exp())?;
    let u = resolvent_apply(p, &f)?;
    let symbol = p.lambda() - C64::new(0.0, p.mu().sqrt() * omega);
    let mode_error = u
        .values
        .iter()
        .zip(&f.values)
        .map(|(&got, &fv)| (got - fv / symbol).norm() * symbol.norm())
        .fold(0.0, f64::max);
    let growth = u.l2_norm() * p.lambda().re / f.l2_norm();
    Ok(ReportBuilder::new(
        "resolvent_apply",
        &format!("lambda={};mu={:e};m={m};dt={dt:e}", p.lambda(), p.mu()),
    )
    .check("mode_relative_error", mode_error, (omega * dt).powi(2))
    .check("contraction", growth, 1.0 + 1e-12)
    .finish())
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (mu, half_width, m) = (cfg.f64("mu"), cfg.f64("L"), cfg.usize("m"));
    let dt = cfg.auto_f64("dt").unwrap_or(0.1);
    let data = match cfg.path("traces") {
        Some(path) => read_traces(&path)?,
        None => synthetic_traces(m, dt)?,
    };
    let grid = data.value().frequency_grid()?;
    let probe = ResolventProbe::new(C64::new(cfg.f64("lambda_re"), cfg.f64("lambda_im")), mu)?;

    let mut out = Outcome::default();
    out.reports.push(boundary_reproduction_check(&data, mu, half_width)?);
    out.reports.push(resolvent_bound_check(&probe, &grid));
    out.reports
        .push(resolvent_apply_check(&probe, data.value().len(), data.value().dt)?);

    let targets = cfg.list("targets");
    let sols = solve_x_direction(&data, mu, half_width, &targets)?;
    let mut table = Table::new("xevolve", &["x", "t", "re", "im"]);
    for s in &sols {
        for (k, v) in s.trace.values.iter().enumerate() {
            table.push_floats(&[s.x, s.trace.time(k), v.re, v.im]);
        }
    }
    out.tables.push(table);

    let (plus, minus) = diagonalized_symbols(mu, &grid);
    let mut symbols = Table::new(
        "xevolve_symbols",
        &["omega", "plus_re", "plus_im", "minus_re", "minus_im"],
    );
    for ((w, p), (_, q)) in plus.iter().zip(minus.iter()) {
        symbols.push_floats(&[w, p.re, p.im, q.re, q.im]);
    }
    out.plots.push(symbols);

    let mut spectrum = Table::new("xevolve_spectrum", &["x", "omega", "abs"]);
    for s in &sols {
        for (w, c) in s.field.iter() {
            spectrum.push_floats(&[s.x, w, c.norm()]);
        }
    }
    out.plots.push(spectrum);
    Ok(out)
}
