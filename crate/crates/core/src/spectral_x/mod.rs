//! Evolution of the heat equation in the x direction.
//!
//! With `t` as the transverse variable, `u_xx = mu^{1/2} u_t` becomes, after
//! a Fourier transform in `t`, the ODE `u_xx = i mu^{1/2} omega u` per
//! frequency. Its generators are `+-(i mu^{1/2} omega)^{1/2}`; the decaying
//! half-line semigroup is realised here by subordinating the translation
//! group `w(t) -> w(t + mu^{1/2} lambda)` with the one-sided 1/2-stable law.
//!
//! Fourier convention: `u~(omega) = dt sum_k u_k exp(-i omega t_k)` with the
//! inverse carrying `d_omega / (2 pi)`; time samples are treated as one period.

mod fourier;
mod resolvent;
mod subordination;
mod xdirection;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::operator_core::C64;

pub use fourier::{fourier_forward, fourier_inverse};
pub use resolvent::{resolvent_apply, resolvent_bound_check, ResolventProbe, TOL_RESOLVENT};
pub use subordination::{
    multiplier_check, semigroup_law_check, subordinated_multiplier, subordinated_semigroup_apply,
    subordination_density_check, SubordinationMeasure, TOL_LAPLACE, TOL_MULTIPLIER, TOL_SEMIGROUP_LAW,
};
pub use xdirection::{boundary_reproduction_check, diagonalized_symbols, solve_x_direction, XBoundaryData, XSolution};

/// Uniform samples `values[k]` at `t0 + k dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSamples {
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<C64>,
}

impl TimeSamples {
    pub fn new(t0: f64, dt: f64, values: Vec<C64>) -> Result<Self> {
        const OP: &str = "TimeSamples::new";
        if !(t0.is_finite() && dt.is_finite() && dt > 0.0) {
            return Err(LabError::InvalidParameter {
                op: OP,
                param: "dt",
                detail: format!("need finite t0 and positive dt, got t0={t0}, dt={dt}"),
            });
        }
        if values.is_empty() {
            return Err(LabError::Shape {
                op: OP,
                detail: "no samples".into(),
            });
        }
        if let Some(k) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(LabError::NonFinite {
                op: OP,
                what: format!("sample {k}"),
            });
        }
        Ok(Self { t0, dt, values })
    }

    pub fn from_fn(t0: f64, dt: f64, m: usize, f: impl Fn(f64) -> C64) -> Result<Self> {
        Self::new(t0, dt, (0..m).map(|k| f(t0 + k as f64 * dt)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    /// Frequency grid dual to these samples.
    pub fn frequency_grid(&self) -> Result<FrequencyGrid> {
        FrequencyGrid::for_samples(self.len(), self.dt)
    }

    /// Discrete `l2` norm `(dt sum |v|^2)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.dt * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn same_sampling(&self, other: &Self) -> bool {
        self.t0 == other.t0 && self.dt == other.dt && self.len() == other.len()
    }
}

/// Frequencies `omega_j = (j - m/2) d_omega`, `j = 0..m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    m: usize,
    d_omega: f64,
}

impl FrequencyGrid {
    pub fn new(m: usize, d_omega: f64) -> Result<Self> {
        const OP: &str = "FrequencyGrid::new";
        if m < 2 || !m.is_multiple_of(2) {
            return Err(LabError::InvalidParameter {
                op: OP,
                param: "m",
                detail: format!("frequency count must be even and >= 2, got {m}"),
            });
        }
        if !(d_omega.is_finite() && d_omega > 0.0) {
            return Err(LabError::InvalidParameter {
                op: OP,
                param: "d_omega",
                detail: format!("spacing must be positive, got {d_omega}"),
            });
        }
        Ok(Self { m, d_omega })
    }

    /// The grid whose DFT matches `m` samples spaced by `dt`.
    pub fn for_samples(m: usize, dt: f64) -> Result<Self> {
        Self::new(m, 2.0 * std::f64::consts::PI / (m as f64 * dt))
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn d_omega(&self) -> f64 {
        self.d_omega
    }

    pub fn omega(&self, j: usize) -> f64 {
        (j as f64 - (self.m / 2) as f64) * self.d_omega
    }

    pub fn omegas(&self) -> Vec<f64> {
        (0..self.m).map(|j| self.omega(j)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        (self.m / 2) as f64 * self.d_omega
    }

    /// Index of `omega = 0`.
    pub fn zero_index(&self) -> usize {
        self.m / 2
    }
}

/// Coefficients on a [`FrequencyGrid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralField {
    pub grid: FrequencyGrid,
    pub coeffs: Vec<C64>,
}

impl SpectralField {
    pub fn new(grid: FrequencyGrid, coeffs: Vec<C64>) -> Result<Self> {
        const OP: &str = "SpectralField::new";
        if coeffs.len() != grid.len() {
            return Err(LabError::Shape {
                op: OP,
                detail: format!("{} coefficients for {} frequencies", coeffs.len(), grid.len()),
            });
        }
        if let Some(j) = coeffs.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(LabError::NonFinite {
                op: OP,
                what: format!("coefficient {j}"),
            });
        }
        Ok(Self { grid, coeffs })
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, C64)> + '_ {
        self.coeffs.iter().enumerate().map(|(j, &c)| (self.grid.omega(j), c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_symmetric() {
        let g = FrequencyGrid::new(8, 0.5).unwrap();
        assert_eq!(g.omega(0), -2.0);
        assert_eq!(g.omega(g.zero_index()), 0.0);
        assert_eq!(g.max_abs(), 2.0);
        assert!(FrequencyGrid::new(7, 0.5).is_err());
        assert!(FrequencyGrid::new(8, 0.0).is_err());
    }

    #[test]
    fn samples_reject_non_finite() {
        assert!(TimeSamples::new(0.0, 0.1, vec![C64::new(f64::NAN, 0.0)]).is_err());
        assert!(TimeSamples::new(0.0, 0.0, vec![C64::new(1.0, 0.0)]).is_err());
        assert!(TimeSamples::new(0.0, 0.1, vec![]).is_err());
    }
}
