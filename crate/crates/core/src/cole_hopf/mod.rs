//! The classical Cole-Hopf pipeline on a uniform 1-D grid.
//!
//! A positive solution `u` of `u_t = mu^{-1/2} u_xx` is mapped to
//! `psi = -2 mu^{-1/2} u_x / u`, which solves the viscous Burgers equation
//! `psi_t + psi psi_x = mu^{-1/2} psi_xx`. The pieces here are a
//! Crank-Nicolson heat solver, the forward and inverse transform, a Burgers
//! residual, the gauge-invariance check and an independent finite-volume
//! Burgers solver for cross-checking.

mod burgers;
pub mod exact;
mod gauge;
mod heat;
pub mod stencil;
mod transform;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

pub use burgers::{
    burgers_residual, burgers_residual_field, burgers_residual_with, solve_burgers_direct, BurgersLimits,
    ResidualField, DEFAULT_RESIDUAL_CONSTANT,
};
pub use gauge::{gauge_check, TOL_GAUGE};
pub use heat::{solve_heat_dirichlet, solve_heat_with_boundary};
pub use transform::{cole_hopf_transform, cole_hopf_via_log, inverse_cole_hopf, EPS_POSITIVE};

/// Nodes `x_k = -L + (k+1) dx`, `k = 0..n`, with `dx = 2L / (n+1)`; the
/// endpoints `+-L` are not nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    half_width: f64,
    n: usize,
}

impl Grid1D {
    pub const MIN_POINTS: usize = 8;

    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        const OP: &str = "Grid1D::new";
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(LabError::InvalidParameter {
                op: OP,
                param: "L",
                detail: format!("half-width must be positive, got {half_width}"),
            });
        }
        if n < Self::MIN_POINTS {
            return Err(LabError::InvalidParameter {
                op: OP,
                param: "n",
                detail: format!("need at least {} interior points, got {n}", Self::MIN_POINTS),
            });
        }
        Ok(Self { half_width, n })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / (self.n + 1) as f64
    }

    pub fn x(&self, k: usize) -> f64 {
        -self.half_width + (k + 1) as f64 * self.dx()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|k| self.x(k))
    }
}

/// Real field sampled on a [`Grid1D`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction1D {
    grid: Grid1D,
    values: Vec<f64>,
}

impl GridFunction1D {
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        const OP: &str = "GridFunction1D::new";
        if values.len() != grid.len() {
            return Err(LabError::Shape {
                op: OP,
                detail: format!("{} values for {} nodes", values.len(), grid.len()),
            });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(LabError::NonFinite {
                op: OP,
                what: format!("value at node {k}"),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.nodes().map(f).collect())
    }

    pub fn constant(grid: Grid1D, c: f64) -> Result<Self> {
        Self::new(grid, vec![c; grid.len()])
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `sum |a - b| dx` over nodes with `|x| <= window`.
    pub fn l1_diff_within(&self, other: &Self, window: f64) -> f64 {
        let dx = self.grid.dx();
        self.grid
            .nodes()
            .zip(self.values.iter().zip(&other.values))
            .filter(|(x, _)| x.abs() <= window)
            .map(|(_, (a, b))| (a - b).abs() * dx)
            .sum()
    }
}

/// Slices of a field at uniformly spaced times `t_0, t_0 + dt, ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSeries {
    pub dt: f64,
    pub times: Vec<f64>,
    pub slices: Vec<GridFunction1D>,
}

impl FieldSeries {
    /// Sample `f(t, x)` at `steps + 1` times `t0 + j dt`.
    pub fn sample(grid: Grid1D, t0: f64, dt: f64, steps: usize, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let times: Vec<f64> = (0..=steps).map(|j| t0 + j as f64 * dt).collect();
        let slices = times
            .iter()
            .map(|&t| GridFunction1D::from_fn(grid, |x| f(t, x)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { dt, times, slices })
    }

    pub fn grid(&self) -> Option<&Grid1D> {
        self.slices.first().map(|s| s.grid())
    }

    pub fn last(&self) -> Option<&GridFunction1D> {
        self.slices.last()
    }

    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }
}

/// Physical parameters of a heat solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatParams {
    pub mu: f64,
    pub dt: f64,
    pub t_end: f64,
}

impl HeatParams {
    pub fn validate(&self) -> Result<()> {
        const OP: &str = "HeatParams";
        for (name, v) in [("mu", self.mu), ("dt", self.dt), ("t_end", self.t_end)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(LabError::InvalidParameter {
                    op: OP,
                    param: name,
                    detail: format!("must be positive and finite, got {v}"),
                });
            }
        }
        Ok(())
    }

    /// Diffusivity `mu^{-1/2}`.
    pub fn diffusivity(&self) -> f64 {
        1.0 / self.mu.sqrt()
    }

    /// Number of uniform steps and the step actually used (`<= dt`) so that
    /// the last step lands on `t_end`.
    pub fn steps(&self) -> (usize, f64) {
        let steps = ((self.t_end / self.dt) - 1e-9).ceil().max(1.0) as usize;
        (steps, self.t_end / steps as f64)
    }
}

/// An x-independent gauge `f(t)`: `const:c` is `c`, `sin:c` is `c sin t`,
/// `poly:c` is `c t^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GaugeFunction {
    Const(f64),
    Sin(f64),
    Poly(f64),
}

impl GaugeFunction {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            GaugeFunction::Const(c) => c,
            GaugeFunction::Sin(c) => c * t.sin(),
            GaugeFunction::Poly(c) => c * t * t,
        }
    }
}

impl fmt::Display for GaugeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GaugeFunction::Const(c) => write!(f, "const:{c}"),
            GaugeFunction::Sin(c) => write!(f, "sin:{c}"),
            GaugeFunction::Poly(c) => write!(f, "poly:{c}"),
        }
    }
}

impl FromStr for GaugeFunction {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        let bad = |detail: String| LabError::InvalidParameter {
            op: "GaugeFunction::parse",
            param: "gauge",
            detail,
        };
        let (kind, c) = s.split_once(':').ok_or_else(|| bad(format!("`{s}` is not kind:c")))?;
        let c: f64 = c.trim().parse().map_err(|_| bad(format!("`{c}` is not a number")))?;
        if !c.is_finite() {
            return Err(bad("coefficient must be finite".into()));
        }
        match kind.trim() {
            "const" => Ok(GaugeFunction::Const(c)),
            "sin" => Ok(GaugeFunction::Sin(c)),
            "poly" => Ok(GaugeFunction::Poly(c)),
            other => Err(bad(format!("unknown gauge kind `{other}`"))),
        }
    }
}
