use std::f64::consts::{FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use super::fourier::{fourier_forward, fourier_inverse};
use super::{FrequencyGrid, TimeSamples};
use crate::error::{LabError, Result};
use crate::operator_core::C64;
use crate::quadrature::{integrate_complex_to_infinity, integrate_to_infinity, QuadOptions};
use crate::report::{ReportBuilder, VerificationReport};

pub const TOL_LAPLACE: f64 = 1e-8;
pub const TOL_MULTIPLIER: f64 = 1e-6;
pub const TOL_SEMIGROUP_LAW: f64 = 2e-6;
pub const TOL_CONTRACTION: f64 = 1e-8;

const QUAD_TOL: f64 = 1e-12;

/// The one-sided 1/2-stable law with density
/// `x / (2 sqrt(pi)) lambda^{-3/2} exp(-x^2 / (4 lambda))` on `lambda > 0`,
/// whose Laplace transform is `exp(-x sqrt(k))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubordinationMeasure {
    x: f64,
}

impl SubordinationMeasure {
    pub fn new(x: f64) -> Result<Self> {
        if !(x.is_finite() && x > 0.0) {
            return Err(LabError::InvalidParameter {
                op: "SubordinationMeasure::new",
                param: "x",
                detail: format!("must be positive, got {x}"),
            });
        }
        Ok(Self { x })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn density(&self, lambda: f64) -> f64 {
        if lambda <= 0.0 {
            return 0.0;
        }
        self.x / (2.0 * PI.sqrt()) * lambda.powf(-1.5) * (-self.x * self.x / (4.0 * lambda)).exp()
    }

    /// `int_0^inf exp(-lambda k) density(lambda) d lambda`.
    ///
    /// Under `lambda = x^2 / (4 s^2)` the measure becomes
    /// `(2/sqrt(pi)) exp(-s^2) ds`, which removes the endpoint singularity.
    pub fn laplace(&self, k: f64) -> Result<f64> {
        let q = k * self.x * self.x / 4.0;
        let v = integrate_to_infinity(
            |s| {
                if s == 0.0 {
                    return 0.0;
                }
                (-s * s - q / (s * s)).exp()
            },
            0.0,
            QuadOptions::abs(QUAD_TOL),
        )?;
        Ok(2.0 / PI.sqrt() * v)
    }

    pub fn mass(&self) -> Result<f64> {
        self.laplace(0.0)
    }

    /// `int_0^inf exp(i omega mu^{1/2} lambda) d gamma(lambda)`: the Fourier
    /// multiplier of the averaged translation group.
    ///
    /// The path is turned to `arg lambda = sign(omega) pi/4`, where both the
    /// oscillating factor and the density decay, then mapped as in
    /// [`Self::laplace`].
    pub fn fourier_multiplier(&self, mu: f64, omega: f64) -> Result<C64> {
        let phi = if omega == 0.0 { 0.0 } else { omega.signum() * FRAC_PI_4 };
        let rot = C64::from_polar(1.0, phi);
        let a = C64::new(0.0, omega * mu.sqrt()) * rot * (self.x * self.x / 4.0);
        let b = rot.conj();
        let front = 2.0 / PI.sqrt() * C64::from_polar(1.0, -phi / 2.0);
        let r = integrate_complex_to_infinity(
            |s| {
                if s == 0.0 {
                    return C64::new(0.0, 0.0);
                }
                (-b * s * s + a / (s * s)).exp()
            },
            0.0,
            QuadOptions::abs(QUAD_TOL),
        )?;
        Ok(front * r.value)
    }
}

/// `exp(-x (-i mu^{1/2} omega)^{1/2})` with the principal root.
pub fn subordinated_multiplier(x: f64, mu: f64, omega: f64) -> C64 {
    (-x * C64::new(0.0, -mu.sqrt() * omega).sqrt()).exp()
}

/// Laplace identity for each `k` and the unit mass.
pub fn subordination_density_check(x: f64, ks: &[f64]) -> Result<VerificationReport> {
    const OP: &str = "subordination_density_check";
    let m = SubordinationMeasure::new(x)?;
    if let Some(&k) = ks.iter().find(|k| !(k.is_finite() && **k > 0.0)) {
        return Err(LabError::InvalidParameter {
            op: OP,
            param: "k",
            detail: format!("must be positive, got {k}"),
        });
    }
    let canonical = format!(
        "x={x:e};ks={}",
        ks.iter().map(|k| format!("{k:e}")).collect::<Vec<_>>().join(",")
    );
    let mut rb = ReportBuilder::new("subordination_density", &canonical);
    rb.check("mass", (m.mass()? - 1.0).abs(), TOL_LAPLACE);
    for &k in ks {
        let err = (m.laplace(k)? - (-x * k.sqrt()).exp()).abs();
        rb.check(format!("laplace_k{k}"), err, TOL_LAPLACE);
    }
    Ok(rb.finish())
}

/// `W(x) w0`: each Fourier coefficient of `w0` multiplied by the quadrature
/// multiplier. The samples are one period, so off-grid shifts are exact
/// band-limited interpolation and no shift ever leaves the domain.
pub fn subordinated_semigroup_apply(x: f64, mu: f64, w0: &TimeSamples) -> Result<TimeSamples> {
    let m = SubordinationMeasure::new(x)?;
    check_mu(mu)?;
    let mut spec = fourier_forward(w0)?;
    for j in 0..spec.coeffs.len() {
        let w = spec.grid.omega(j);
        spec.coeffs[j] *= m.fourier_multiplier(mu, w)?;
    }
    fourier_inverse(&spec, w0.t0, w0.dt)
}

fn check_mu(mu: f64) -> Result<()> {
    if mu.is_finite() && mu > 0.0 {
        Ok(())
    } else {
        Err(LabError::InvalidParameter {
            op: "subordination",
            param: "mu",
            detail: format!("must be positive, got {mu}"),
        })
    }
}

/// Quadrature multiplier against the closed form on `|omega| <= max/2`.
/// Also reports the largest multiplier modulus (contractivity).
pub fn multiplier_check(x: f64, mu: f64, g: &FrequencyGrid) -> Result<VerificationReport> {
    let m = SubordinationMeasure::new(x)?;
    check_mu(mu)?;
    let mut worst = 0.0f64;
    let mut largest = 0.0f64;
    for w in g.omegas() {
        let q = m.fourier_multiplier(mu, w)?;
        largest = largest.max(q.norm());
        if w.abs() <= 0.5 * g.max_abs() {
            worst = worst.max((q - subordinated_multiplier(x, mu, w)).norm());
        }
    }
    let canonical = format!("x={x:e};mu={mu:e};m={};d_omega={:e}", g.len(), g.d_omega());
    Ok(ReportBuilder::new("subordination_multiplier", &canonical)
        .check("max_error", worst, TOL_MULTIPLIER)
        .check("max_modulus_excess", (largest - 1.0).max(0.0), TOL_CONTRACTION)
        .finish())
}

/// `W(x1) W(x2) w0` against `W(x1 + x2) w0`, and `||W(x) w0|| <= ||w0||`.
pub fn semigroup_law_check(x1: f64, x2: f64, mu: f64, w0: &TimeSamples) -> Result<VerificationReport> {
    let two_step = subordinated_semigroup_apply(x1, mu, &subordinated_semigroup_apply(x2, mu, w0)?)?;
    let one_step = subordinated_semigroup_apply(x1 + x2, mu, w0)?;
    let growth = [x1, x2, x1 + x2]
        .iter()
        .map(|&x| subordinated_semigroup_apply(x, mu, w0).map(|w| w.l2_norm() - w0.l2_norm()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let canonical = format!("x1={x1:e};x2={x2:e};mu={mu:e};m={};dt={:e}", w0.len(), w0.dt);
    Ok(ReportBuilder::new("subordination_semigroup", &canonical)
        .check("law", two_step.max_abs_diff(&one_step), TOL_SEMIGROUP_LAW)
        .check("l2_growth", growth, TOL_CONTRACTION)
        .finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn density_is_nonnegative() {
        let m = SubordinationMeasure::new(1.3).unwrap();
        for l in [0.0, 1e-6, 0.1, 1.0, 10.0, 1e6] {
            assert!(m.density(l) >= 0.0);
        }
        assert!(SubordinationMeasure::new(0.0).is_err());
    }

    #[test]
    fn laplace_identity_examples() {
        let m = SubordinationMeasure::new(1.0).unwrap();
        assert!((m.laplace(1.0).unwrap() - (-1.0f64).exp()).abs() < 1e-8);
        let m = SubordinationMeasure::new(2.0).unwrap();
        assert!((m.laplace(4.0).unwrap() - (-4.0f64).exp()).abs() < 1e-8);
        assert!((m.mass().unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn laplace_against_raw_density() {
        // Independent route: integrate the density directly in lambda.
        let m = SubordinationMeasure::new(0.7).unwrap();
        let k = 2.0;
        let direct = integrate_to_infinity(|l| (-l * k).exp() * m.density(l), 0.0, QuadOptions::abs(1e-12)).unwrap();
        assert!((direct - m.laplace(k).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn density_report_passes() {
        for x in [0.5, 1.0, 2.0] {
            let r = subordination_density_check(x, &[0.25, 1.0, 4.0]).unwrap();
            assert!(r.pass, "x={x}: {:?}", r.residuals);
        }
        assert!(subordination_density_check(1.0, &[0.0]).is_err());
    }

    #[test]
    fn multiplier_matches_closed_form() {
        for (x, mu) in [(1.0, 1.0), (0.5, 4.0), (2.0, 0.25)] {
            for w in [-20.0, -3.0, -0.1, 0.0, 0.1, 3.0, 20.0] {
                let q = SubordinationMeasure::new(x).unwrap().fourier_multiplier(mu, w).unwrap();
                let e = subordinated_multiplier(x, mu, w);
                assert!((q - e).norm() < 1e-9, "x={x} mu={mu} w={w}: {q} vs {e}");
                assert!(q.norm() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn constants_are_invariant() {
        let w0 = TimeSamples::new(0.0, 0.1, vec![c(2.0, -1.0); 32]).unwrap();
        let w = subordinated_semigroup_apply(0.8, 1.0, &w0).unwrap();
        assert!(w.max_abs_diff(&w0) < 1e-11);
    }

    #[test]
    fn grid_mode_gets_the_multiplier() {
        let (m, dt) = (64usize, 0.1);
        let g = FrequencyGrid::for_samples(m, dt).unwrap();
        let w0 = g.omega(m / 2 + 5);
        let f = TimeSamples::from_fn(0.0, dt, m, |t| C64::from_polar(1.0, w0 * t)).unwrap();
        let w = subordinated_semigroup_apply(1.0, 1.0, &f).unwrap();
        let factor = (-c(0.0, -w0).sqrt()).exp();
        for k in 0..m {
            assert!((w.values[k] - f.values[k] * factor).norm() < 1e-6);
        }
    }

    #[test]
    fn semigroup_law_and_contraction() {
        let (m, dt) = (64usize, 0.1);
        let period = m as f64 * dt;
        let w0 = TimeSamples::from_fn(0.0, dt, m, |t| {
            let a = 2.0 * PI * t / period;
            c(a.cos() + 0.5 * (3.0 * a).sin(), 0.25 * (2.0 * a).cos())
        })
        .unwrap();
        let r = semigroup_law_check(0.4, 0.7, 1.0, &w0).unwrap();
        assert!(r.pass, "{:?}", r.residuals);
    }

    #[test]
    fn multiplier_report_passes() {
        let g = FrequencyGrid::for_samples(128, 0.05).unwrap();
        let r = multiplier_check(1.0, 1.0, &g).unwrap();
        assert!(r.pass, "{:?}", r.residuals);
    }
}
