use serde::{Deserialize, Serialize};

use super::{FrequencyGrid, TimeSamples};
use crate::error::{LabError, Result};
use crate::operator_core::C64;
use crate::report::{ReportBuilder, VerificationReport};

/// Slack on the first-power bound.
pub const TOL_RESOLVENT: f64 = 1e-14;
const MAX_POWER: i32 = 4;

/// A point `lambda` in the right half-plane together with `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolventProbe {
    lambda: C64,
    mu: f64,
}

impl ResolventProbe {
    pub fn new(lambda: C64, mu: f64) -> Result<Self> {
        const OP: &str = "ResolventProbe::new";
        if !(lambda.re.is_finite() && lambda.im.is_finite()) || lambda.re <= 0.0 {
            return Err(LabError::Precondition {
                op: OP,
                detail: format!("need Re lambda > 0, got {lambda}"),
            });
        }
        if !(mu.is_finite() && mu > 0.0) {
            return Err(LabError::InvalidParameter {
                op: OP,
                param: "mu",
                detail: format!("must be positive, got {mu}"),
            });
        }
        Ok(Self { lambda, mu })
    }

    pub fn lambda(&self) -> C64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// `|lambda - i mu^{1/2} omega|^{-1}`, the resolvent norm of the symbol.
    pub fn inverse_distance(&self, omega: f64) -> f64 {
        1.0 / self.lambda.re.hypot(self.lambda.im - self.mu.sqrt() * omega)
    }
}

/// Grid supremum of `|lambda - i mu^{1/2} omega|^{-n}`, `n = 1..4`, against
/// `(Re lambda)^{-n}`; for real `lambda` also the gap to equality at
/// `omega = 0`.
pub fn resolvent_bound_check(p: &ResolventProbe, g: &FrequencyGrid) -> VerificationReport {
    let sup = g
        .omegas()
        .into_iter()
        .map(|w| p.inverse_distance(w))
        .fold(0.0, f64::max);
    let bound = 1.0 / p.lambda.re;
    let canonical = format!(
        "lambda=({:e},{:e});mu={:e};m={};d_omega={:e}",
        p.lambda.re,
        p.lambda.im,
        p.mu,
        g.len(),
        g.d_omega()
    );
    let mut rb = ReportBuilder::new("resolvent_bound", &canonical);
    rb.check("sup_n1", sup, bound + TOL_RESOLVENT);
    for n in 2..=MAX_POWER {
        rb.check(format!("sup_n{n}"), sup.powi(n), bound.powi(n));
    }
    if p.lambda.im == 0.0 {
        rb.check("tightness_gap", (bound - sup).abs(), TOL_RESOLVENT);
    }
    rb.finish()
}

// (1 - e^{-z}) / z and (1 - e^{-z}(1 + z)) / z^2, i.e. the integrals of
// e^{-z s} and s e^{-z s} over [0, 1].
fn phi(z: C64) -> (C64, C64) {
    if z.norm() < 0.5 {
        let mut term = C64::new(1.0, 0.0);
        let (mut p1, mut p2) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for k in 0..30 {
            p1 += term / (k + 1) as f64;
            p2 += term / (k + 2) as f64;
            term *= -z / (k + 1) as f64;
        }
        (p1, p2)
    } else {
        let e = (-z).exp();
        ((1.0 - e) / z, (1.0 - e * (1.0 + z)) / (z * z))
    }
}

/// `u(t) = mu^{-1/2} int_t^inf exp(-lambda (s - t) / mu^{1/2}) f(s) ds`, the
/// solution of `(lambda - mu^{1/2} d/dt) u = f`.
///
/// The samples are one period of a periodic `f`, linear between samples;
/// the integral over each panel is exact and the infinite tail is summed
/// as a geometric series.
pub fn resolvent_apply(p: &ResolventProbe, f: &TimeSamples) -> Result<TimeSamples> {
    const OP: &str = "resolvent_apply";
    let m = f.len();
    let dt = f.dt;
    let root_mu = p.mu.sqrt();
    let z = p.lambda / root_mu * dt;
    let (p1, p2) = phi(z);
    let decay = (-z).exp();
    let panel: Vec<C64> = (0..m)
        .map(|k| {
            let (a, b) = (f.values[k], f.values[(k + 1) % m]);
            dt * (a * p1 + (b - a) * p2)
        })
        .collect();

    // u_0 = sum_j decay^j S_j / (1 - decay^m); then u_k = S_k + decay u_{k+1}.
    let wrap = 1.0 - decay.powu(m as u32);
    if wrap.norm() < f64::EPSILON {
        return Err(LabError::Quadrature {
            op: OP,
            detail: format!("periodic tail does not converge (|1 - e^(-m z)| = {:.3e})", wrap.norm()),
        });
    }
    let mut head = C64::new(0.0, 0.0);
    let mut weight = C64::new(1.0, 0.0);
    for s in &panel {
        head += weight * s;
        weight *= decay;
    }
    let mut u = vec![C64::new(0.0, 0.0); m];
    u[0] = head / wrap;
    let mut next = u[0];
    for k in (1..m).rev() {
        u[k] = panel[k] + decay * next;
        next = u[k];
    }
    TimeSamples::new(f.t0, dt, u.into_iter().map(|v| v / root_mu).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_x::FrequencyGrid;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn real_lambda_is_tight_at_zero() {
        let g = FrequencyGrid::new(64, 0.25).unwrap();
        let r = resolvent_bound_check(&ResolventProbe::new(c(1.0, 0.0), 1.0).unwrap(), &g);
        assert!(r.pass, "{:?}", r.residuals);
        assert_eq!(r.residual("sup_n1"), Some(1.0));
        let r = resolvent_bound_check(&ResolventProbe::new(c(2.0, 0.0), 4.0).unwrap(), &g);
        assert_eq!(r.residual("sup_n1"), Some(0.5));
    }

    #[test]
    fn shifted_lambda_peaks_near_its_imaginary_part() {
        let g = FrequencyGrid::new(128, 0.1).unwrap();
        let p = ResolventProbe::new(c(1.0, 3.0), 1.0).unwrap();
        let r = resolvent_bound_check(&p, &g);
        assert!(r.pass);
        assert!((r.residual("sup_n1").unwrap() - 1.0).abs() < 1e-12);
        assert!(r.residual("tightness_gap").is_none());
    }

    #[test]
    fn left_half_plane_is_refused() {
        assert!(matches!(
            ResolventProbe::new(c(0.0, 1.0), 1.0),
            Err(LabError::Precondition { .. })
        ));
        assert!(ResolventProbe::new(c(-1.0, 0.0), 1.0).is_err());
        assert!(ResolventProbe::new(c(1.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn zero_maps_to_zero() {
        let p = ResolventProbe::new(c(1.0, 0.5), 2.0).unwrap();
        let f = TimeSamples::new(0.0, 0.1, vec![c(0.0, 0.0); 32]).unwrap();
        let u = resolvent_apply(&p, &f).unwrap();
        assert!(u.values.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn fourier_mode_divides_by_symbol() {
        let (m, dt) = (512usize, 0.02);
        let g = FrequencyGrid::for_samples(m, dt).unwrap();
        let w0 = g.omega(m / 2 + 3);
        for (lambda, mu) in [(c(1.0, 0.0), 1.0), (c(0.5, -2.0), 4.0), (c(3.0, 1.0), 0.25)] {
            let p = ResolventProbe::new(lambda, mu).unwrap();
            let f = TimeSamples::from_fn(0.0, dt, m, |t| C64::from_polar(1.0, w0 * t)).unwrap();
            let u = resolvent_apply(&p, &f).unwrap();
            let factor = 1.0 / (lambda - c(0.0, mu.sqrt() * w0));
            let err = (0..m)
                .map(|k| (u.values[k] - f.values[k] * factor).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-3 * factor.norm(), "lambda={lambda}: {err}");
        }
    }

    #[test]
    fn satisfies_the_resolvent_equation() {
        let (m, dt) = (400usize, 0.025);
        let p = ResolventProbe::new(c(0.8, 0.4), 1.0).unwrap();
        let f = TimeSamples::from_fn(0.0, dt, m, |t| {
            let period = m as f64 * dt;
            c((2.0 * std::f64::consts::PI * t / period).sin(), 0.0)
        })
        .unwrap();
        let u = resolvent_apply(&p, &f).unwrap();
        let worst = (0..m)
            .map(|k| {
                let du = (u.values[(k + 1) % m] - u.values[(k + m - 1) % m]) / (2.0 * dt);
                (p.lambda() * u.values[k] - du - f.values[k]).norm()
            })
            .fold(0.0, f64::max);
        assert!(worst < 10.0 * dt * dt, "{worst}");
    }

    #[test]
    fn gaussian_bump_obeys_l2_bound() {
        for (lambda, mu) in [(c(0.1, 0.0), 1.0), (c(1.0, 5.0), 2.0), (c(10.0, -1.0), 0.5)] {
            let p = ResolventProbe::new(lambda, mu).unwrap();
            let f = TimeSamples::from_fn(-5.0, 0.05, 200, |t| c((-t * t).exp(), 0.0)).unwrap();
            let u = resolvent_apply(&p, &f).unwrap();
            assert!(u.l2_norm() <= f.l2_norm() / lambda.re, "lambda={lambda}");
        }
    }
}
