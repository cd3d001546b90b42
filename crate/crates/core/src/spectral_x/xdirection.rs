use serde::{Deserialize, Serialize};

use super::fourier::{fourier_forward, fourier_inverse};
use super::{FrequencyGrid, SpectralField, TimeSamples};
use crate::error::{LabError, Result};
use crate::operator_core::C64;
use crate::report::{ReportBuilder, VerificationReport};

// Largest tolerated modulus of the growing exponential.
const GROWTH_LIMIT: f64 = 1e300;

pub const TOL_BOUNDARY: f64 = 1e-10;
pub const TOL_ZERO_ROW: f64 = 1e-12;

/// Value and normal-derivative traces at `x = -L`, sampled in `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XBoundaryData {
    v0: TimeSamples,
    v1: TimeSamples,
}

impl XBoundaryData {
    pub fn new(v0: TimeSamples, v1: TimeSamples) -> Result<Self> {
        if !v0.same_sampling(&v1) {
            return Err(LabError::Shape {
                op: "XBoundaryData::new",
                detail: format!(
                    "traces sampled differently: ({}, {}, {}) vs ({}, {}, {})",
                    v0.t0,
                    v0.dt,
                    v0.len(),
                    v1.t0,
                    v1.dt,
                    v1.len()
                ),
            });
        }
        Ok(Self { v0, v1 })
    }

    pub fn value(&self) -> &TimeSamples {
        &self.v0
    }

    pub fn derivative(&self) -> &TimeSamples {
        &self.v1
    }
}

/// The solution at one target `x`: per-frequency value and x-derivative,
/// and the value transformed back to `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XSolution {
    pub x: f64,
    pub field: SpectralField,
    pub derivative: SpectralField,
    pub trace: TimeSamples,
}

fn check_positive(op: &'static str, param: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(LabError::InvalidParameter {
            op,
            param,
            detail: format!("must be positive and finite, got {v}"),
        })
    }
}

/// Principal `(i mu^{1/2} omega)^{1/2}`.
fn symbol(mu: f64, omega: f64) -> C64 {
    C64::new(0.0, mu.sqrt() * omega).sqrt()
}

/// Value and derivative of one frequency row at distance `y = x + L` from
/// the boundary.
///
/// With `s` the principal root, the row is
/// `A e^{s y} + B e^{-s y}`, `A, B = (v0 +- v1 / s) / 2`. Writing `1/s` for
/// `-i (-i mu^{1/2} omega)^{-1/2}` pairs the two roots consistently; taking
/// both principal would flip the derivative trace for `omega < 0`.
fn mode(op: &'static str, mu: f64, omega: f64, v0: C64, v1: C64, y: f64) -> Result<(C64, C64)> {
    if omega == 0.0 {
        // double root
        return Ok((v0 + v1 * y, v1));
    }
    let s = symbol(mu, omega);
    if s.re * y.abs() > GROWTH_LIMIT.ln() {
        return Err(LabError::Overflow {
            op,
            detail: format!("|exp(s (x+L))| exceeds {GROWTH_LIMIT:e} at omega = {omega}"),
        });
    }
    let a = 0.5 * (v0 + v1 / s);
    let b = 0.5 * (v0 - v1 / s);
    let grow = (s * y).exp();
    let decay = (-s * y).exp();
    Ok((a * grow + b * decay, s * (a * grow - b * decay)))
}

/// Solve `u_xx = mu^{1/2} u_t` from `u(-L) = v0`, `u_x(-L) = v1` per
/// frequency and evaluate at each target in `[-L, L]`.
pub fn solve_x_direction(b: &XBoundaryData, mu: f64, half_width: f64, targets: &[f64]) -> Result<Vec<XSolution>> {
    const OP: &str = "solve_x_direction";
    check_positive(OP, "mu", mu)?;
    check_positive(OP, "L", half_width)?;
    if let Some(&x) = targets.iter().find(|x| x.is_nan() || x.abs() > half_width) {
        return Err(LabError::Domain {
            op: OP,
            value: x,
            lo: -half_width,
            hi: half_width,
        });
    }
    let v0 = fourier_forward(&b.v0)?;
    let v1 = fourier_forward(&b.v1)?;
    targets
        .iter()
        .map(|&x| {
            let y = x + half_width;
            let mut vals = Vec::with_capacity(v0.coeffs.len());
            let mut ders = Vec::with_capacity(v0.coeffs.len());
            for (j, (&a, &d)) in v0.coeffs.iter().zip(&v1.coeffs).enumerate() {
                let (v, dv) = mode(OP, mu, v0.grid.omega(j), a, d, y)?;
                vals.push(v);
                ders.push(dv);
            }
            let field = SpectralField::new(v0.grid, vals)?;
            let derivative = SpectralField::new(v0.grid, ders)?;
            let trace = fourier_inverse(&field, b.v0.t0, b.v0.dt)?;
            Ok(XSolution {
                x,
                field,
                derivative,
                trace,
            })
        })
        .collect()
}

/// The two symbols `+-(i mu^{1/2} omega)^{1/2}` of the diagonalised system.
pub fn diagonalized_symbols(mu: f64, g: &FrequencyGrid) -> (SpectralField, SpectralField) {
    let plus: Vec<C64> = g.omegas().into_iter().map(|w| symbol(mu, w)).collect();
    let minus = plus.iter().map(|s| -s).collect();
    (
        SpectralField { grid: *g, coeffs: plus },
        SpectralField {
            grid: *g,
            coeffs: minus,
        },
    )
}

/// Recover the boundary traces from the solution at `x = -L`, and compare
/// the `omega = 0` row with the linear profile at a few interior points.
pub fn boundary_reproduction_check(b: &XBoundaryData, mu: f64, half_width: f64) -> Result<VerificationReport> {
    let targets = [-half_width, -0.5 * half_width, 0.0, 0.5 * half_width, half_width];
    let sols = solve_x_direction(b, mu, half_width, &targets)?;
    let v0 = fourier_forward(&b.v0)?;
    let v1 = fourier_forward(&b.v1)?;
    let at_boundary = &sols[0];

    let rel = |got: C64, want: C64| (got - want).norm() / want.norm().max(1.0);
    let value = at_boundary
        .field
        .coeffs
        .iter()
        .zip(&v0.coeffs)
        .map(|(&g, &w)| rel(g, w))
        .fold(0.0, f64::max);
    let derivative = at_boundary
        .derivative
        .coeffs
        .iter()
        .zip(&v1.coeffs)
        .map(|(&g, &w)| rel(g, w))
        .fold(0.0, f64::max);

    let z = v0.grid.zero_index();
    let zero_row = sols
        .iter()
        .map(|s| rel(s.field.coeffs[z], v0.coeffs[z] + v1.coeffs[z] * (s.x + half_width)))
        .fold(0.0, f64::max);

    let canonical = format!(
        "mu={mu:e};L={half_width:e};m={};t0={:e};dt={:e}",
        b.v0.len(),
        b.v0.t0,
        b.v0.dt
    );
    Ok(ReportBuilder::new("x_boundary", &canonical)
        .check("value_trace", value, TOL_BOUNDARY)
        .check("derivative_trace", derivative, TOL_BOUNDARY)
        .check("zero_row", zero_row, TOL_ZERO_ROW)
        .finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn data(m: usize, dt: f64) -> XBoundaryData {
        let period = m as f64 * dt;
        let w = 2.0 * PI / period;
        let v0 = TimeSamples::from_fn(0.0, dt, m, |t| c((w * t).cos() + 0.3, 0.2 * (2.0 * w * t).sin())).unwrap();
        let v1 = TimeSamples::from_fn(0.0, dt, m, |t| c(-0.5 * (3.0 * w * t).sin(), 0.1)).unwrap();
        XBoundaryData::new(v0, v1).unwrap()
    }

    #[test]
    fn symbols_at_unit_frequency() {
        let g = FrequencyGrid::new(4, 1.0).unwrap();
        let (plus, minus) = diagonalized_symbols(1.0, &g);
        let e = c(FRAC_1_SQRT_2, FRAC_1_SQRT_2);
        assert!((plus.coeffs[3] - e).norm() < 1e-15);
        assert!((minus.coeffs[3] + e).norm() < 1e-15);
        assert!((plus.coeffs[1] - e.conj()).norm() < 1e-15);
        assert_eq!(plus.coeffs[2], c(0.0, 0.0));
        assert_eq!(minus.coeffs[2].norm(), 0.0);
        // conjugate symmetry
        assert_eq!(plus.coeffs[1], plus.coeffs[3].conj());
    }

    #[test]
    fn boundary_traces_are_recovered() {
        for mu in [0.25, 1.0, 9.0] {
            let r = boundary_reproduction_check(&data(64, 0.1), mu, 1.5).unwrap();
            assert!(r.pass, "mu={mu}: {:?}", r.residuals);
        }
    }

    #[test]
    fn zero_derivative_trace_gives_cosh() {
        let (mu, w, l, x) = (2.0f64, -1.7, 1.0, 0.3);
        let (v, _) = mode("test", mu, w, c(1.5, -0.5), c(0.0, 0.0), x + l).unwrap();
        let s = C64::new(0.0, mu.sqrt() * w).sqrt();
        let want = c(1.5, -0.5) * (s * (x + l)).cosh();
        assert!((v - want).norm() < 1e-14);
    }

    #[test]
    fn derivative_reproduced_for_both_signs() {
        for w in [-3.0, -0.2, 0.2, 3.0] {
            let (v, d) = mode("test", 1.0, w, c(0.4, 0.1), c(-1.0, 2.0), 0.0).unwrap();
            assert!((v - c(0.4, 0.1)).norm() < 1e-15);
            assert!((d - c(-1.0, 2.0)).norm() < 1e-14, "w={w}: {d}");
        }
    }

    #[test]
    fn degenerate_row_is_linear() {
        let (v, d) = mode("test", 1.0, 0.0, c(1.0, 0.0), c(2.0, -1.0), 1.5).unwrap();
        assert_eq!(v, c(4.0, -1.5));
        assert_eq!(d, c(2.0, -1.0));
    }

    #[test]
    fn reconstructed_field_solves_heat_equation() {
        let (m, dt, mu, l) = (64usize, 0.1, 1.0f64, 0.5);
        let b = data(m, dt);
        let (x, dx) = (0.1, 1e-3);
        let sols = solve_x_direction(&b, mu, l, &[x - dx, x, x + dx]).unwrap();
        let uxx: Vec<C64> = (0..m)
            .map(|k| (sols[2].trace.values[k] - 2.0 * sols[1].trace.values[k] + sols[0].trace.values[k]) / (dx * dx))
            .collect();
        // spectral time derivative
        let mid = &sols[1].field;
        let dt_field = SpectralField::new(mid.grid, mid.iter().map(|(w, u)| C64::new(0.0, w) * u).collect()).unwrap();
        let ut = fourier_inverse(&dt_field, 0.0, dt).unwrap();
        let scale = uxx.iter().map(|v| v.norm()).fold(1.0, f64::max);
        let worst = (0..m)
            .map(|k| (uxx[k] - mu.sqrt() * ut.values[k]).norm())
            .fold(0.0, f64::max);
        assert!(worst < 1e-4 * scale, "{worst} vs {scale}");
    }

    #[test]
    fn targets_outside_are_refused() {
        let b = data(16, 0.1);
        assert!(matches!(
            solve_x_direction(&b, 1.0, 1.0, &[1.5]),
            Err(LabError::Domain { .. })
        ));
        assert!(solve_x_direction(&b, -1.0, 1.0, &[0.0]).is_err());
    }

    #[test]
    fn growth_overflow_is_reported() {
        let r = mode("test", 1.0, 1e6, c(1.0, 0.0), c(0.0, 0.0), 2.0);
        assert!(matches!(r, Err(LabError::Overflow { .. })));
    }

    #[test]
    fn mismatched_traces_are_refused() {
        let a = TimeSamples::from_fn(0.0, 0.1, 16, |_| c(1.0, 0.0)).unwrap();
        let b = TimeSamples::from_fn(0.0, 0.2, 16, |_| c(1.0, 0.0)).unwrap();
        assert!(XBoundaryData::new(a, b).is_err());
    }
}
