//! The half-order semigroup through the one-sided stable law.

use std::f64::consts::PI;

use semigroup_lab::operator_core::C64;
use semigroup_lab::spectral_x::{
    multiplier_check, semigroup_law_check, subordinated_multiplier, subordination_density_check, FrequencyGrid,
    SubordinationMeasure, TimeSamples,
};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{Outcome, Table};

/// A band-limited periodic signal: a few low modes on `m` samples.
pub fn test_signal(m: usize, dt: f64) -> Result<TimeSamples, CliError> {
    let w = 2.0 * PI / (m as f64 * dt);
    Ok(TimeSamples::from_fn(0.0, dt, m, |t| {
        C64::new((w * t).cos() + 0.3 * (3.0 * w * t).sin(), 0.5 * (2.0 * w * t).cos()) + 0.2
    })?)
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (x, x2, mu, m) = (cfg.f64("x"), cfg.f64("x2"), cfg.f64("mu"), cfg.usize("m"));
    let dt = cfg.auto_f64("dt").unwrap_or(0.05);
    let grid = FrequencyGrid::for_samples(m, dt)?;

    let mut out = Outcome::default();
    out.reports.push(subordination_density_check(x, &cfg.list("ks"))?);
    out.reports.push(multiplier_check(x, mu, &grid)?);
    out.reports.push(semigroup_law_check(x, x2, mu, &test_signal(m, dt)?)?);

    let measure = SubordinationMeasure::new(x)?;
    let mut mult = Table::new(
        "subordinate",
        &["omega", "quad_re", "quad_im", "closed_re", "closed_im", "abs_error"],
    );
    for w in grid.omegas() {
        let q = measure.fourier_multiplier(mu, w)?;
        let c = subordinated_multiplier(x, mu, w);
        mult.push_floats(&[w, q.re, q.im, c.re, c.im, (q - c).norm()]);
    }
    out.tables.push(mult);

    // density on a log-spaced lambda grid
    let mut density = Table::new("subordination_density", &["lambda", "density"]);
    for k in 0..=200 {
        let lambda = 10f64.powf(-3.0 + 5.0 * k as f64 / 200.0);
        density.push_floats(&[lambda, measure.density(lambda)]);
    }
    out.plots.push(density);
    Ok(out)
}
