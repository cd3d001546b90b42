use super::transform::{check_mu, cole_hopf_transform};
use super::{FieldSeries, GaugeFunction, GridFunction1D};
use crate::error::Result;
use crate::quadrature::{integrate, QuadOptions};
use crate::report::{ReportBuilder, VerificationReport};

pub const TOL_GAUGE: f64 = 1e-12;

/// Multiply every slice of `u` by `exp(int_0^t f)` and measure how far the
/// transform moves. The factor is x-independent, so it should not move at
/// all beyond rounding.
pub fn gauge_check(u: &FieldSeries, g: GaugeFunction, mu: f64) -> Result<VerificationReport> {
    const OP: &str = "gauge_check";
    check_mu(OP, mu)?;
    let mut worst = 0.0f64;
    for (&t, slice) in u.times.iter().zip(&u.slices) {
        let weight = integrate(|s| g.value(s), 0.0, t, QuadOptions::default())?.exp();
        let gauged = GridFunction1D::new(*slice.grid(), slice.values().iter().map(|v| v * weight).collect())?;
        let a = cole_hopf_transform(slice, mu)?;
        let b = cole_hopf_transform(&gauged, mu)?;
        worst = worst.max(a.max_abs_diff(&b));
    }
    let n = u.grid().map_or(0, |g| g.len());
    let canonical = format!("gauge={g};mu={mu:e};n={n};slices={}", u.len());
    Ok(ReportBuilder::new("gauge", &canonical)
        .check("max_transform_shift", worst, TOL_GAUGE)
        .finish())
}
