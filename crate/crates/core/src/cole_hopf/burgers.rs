use serde::{Deserialize, Serialize};

use super::stencil::{d1, d2};
use super::transform::check_mu;
use super::{FieldSeries, Grid1D, GridFunction1D};
use crate::error::{LabError, Result};
use crate::report::{ReportBuilder, VerificationReport};

/// Default constant in the residual tolerance `C (dx^2 + dt^2)`.
pub const DEFAULT_RESIDUAL_CONSTANT: f64 = 10.0;

// Nodes at each end excluded from the residual (the one-sided stencils).
const EDGE: usize = 2;

/// `R = D_t psi + psi D1 psi - mu^{-1/2} D2 psi` on interior nodes and
/// interior times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualField {
    pub times: Vec<f64>,
    pub x: Vec<f64>,
    /// One row per entry of `times`.
    pub values: Vec<Vec<f64>>,
}

impl ResidualField {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

fn check_series(op: &'static str, psi: &FieldSeries, dt: f64) -> Result<Grid1D> {
    if psi.len() < 3 {
        return Err(LabError::Precondition {
            op,
            detail: format!("need at least 3 time slices, got {}", psi.len()),
        });
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(LabError::InvalidParameter {
            op,
            param: "dt",
            detail: format!("must be positive, got {dt}"),
        });
    }
    let grid = *psi.slices[0].grid();
    if let Some(bad) = psi.slices.iter().find(|s| *s.grid() != grid) {
        return Err(LabError::Shape {
            op,
            detail: format!("slice grid {:?} differs from {:?}", bad.grid(), grid),
        });
    }
    if psi.times.len() != psi.slices.len() {
        return Err(LabError::Shape {
            op,
            detail: format!("{} times for {} slices", psi.times.len(), psi.slices.len()),
        });
    }
    let uniform = psi
        .times
        .windows(2)
        .all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt.max(w[1].abs()));
    if !uniform {
        return Err(LabError::Precondition {
            op,
            detail: format!("time slices are not uniformly spaced by dt = {dt}"),
        });
    }
    Ok(grid)
}

pub fn burgers_residual_field(psi: &FieldSeries, mu: f64, dt: f64) -> Result<ResidualField> {
    const OP: &str = "burgers_residual";
    check_mu(OP, mu)?;
    let grid = check_series(OP, psi, dt)?;
    let nu = 1.0 / mu.sqrt();
    let dx = grid.dx();
    let n = grid.len();
    let mut values = Vec::with_capacity(psi.len() - 2);
    for j in 1..psi.len() - 1 {
        let now = psi.slices[j].values();
        let (prev, next) = (psi.slices[j - 1].values(), psi.slices[j + 1].values());
        let px = d1(now, dx);
        let pxx = d2(now, dx);
        let row = (EDGE..n - EDGE)
            .map(|k| (next[k] - prev[k]) / (2.0 * dt) + now[k] * px[k] - nu * pxx[k])
            .collect();
        values.push(row);
    }
    Ok(ResidualField {
        times: psi.times[1..psi.len() - 1].to_vec(),
        x: (EDGE..n - EDGE).map(|k| grid.x(k)).collect(),
        values,
    })
}

pub fn burgers_residual(psi: &FieldSeries, mu: f64, dt: f64) -> Result<VerificationReport> {
    burgers_residual_with(psi, mu, dt, DEFAULT_RESIDUAL_CONSTANT)
}

/// Residual report with tolerance `c (dx^2 + dt^2)` on the max norm; the L2
/// tolerance is the same bound times the square root of the space-time area.
pub fn burgers_residual_with(psi: &FieldSeries, mu: f64, dt: f64, c: f64) -> Result<VerificationReport> {
    let field = burgers_residual_field(psi, mu, dt)?;
    let grid = *psi.slices[0].grid();
    let dx = grid.dx();
    let tol = c * (dx * dx + dt * dt);
    let sum_sq: f64 = field.values.iter().flatten().map(|v| v * v).sum();
    let l2 = (sum_sq * dx * dt).sqrt();
    let area = field.x.len() as f64 * dx * field.times.len() as f64 * dt;
    let canonical = format!(
        "mu={mu:e};dt={dt:e};L={:e};n={};slices={};C={c:e}",
        grid.half_width(),
        grid.len(),
        psi.len()
    );
    Ok(ReportBuilder::new("burgers_residual", &canonical)
        .check("max_abs", field.max_abs(), tol)
        .check("l2", l2, tol * area.sqrt())
        .finish())
}

/// Step limits of the explicit solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BurgersLimits {
    pub advective: f64,
    pub diffusive: f64,
}

impl BurgersLimits {
    pub fn of(psi0: &GridFunction1D, mu: f64) -> Self {
        let dx = psi0.grid().dx();
        let nu = 1.0 / mu.sqrt();
        Self {
            advective: dx / (2.0 * psi0.max_abs() + 1.0),
            diffusive: dx * dx / (2.0 * nu),
        }
    }

    pub fn max_dt(&self) -> f64 {
        self.advective.min(self.diffusive)
    }
}

// Upper bound on recorded slices.
const MAX_SLICES: usize = 100;

fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

/// Explicit finite-volume solver for `psi_t + (psi^2/2)_x = mu^{-1/2} psi_xx`:
/// minmod-limited linear reconstruction, Rusanov flux, centred diffusion,
/// forward Euler in time, zero-gradient ghost cells.
///
/// Records about a hundred uniformly spaced slices including both ends; the
/// step actually used is at most `dt`.
pub fn solve_burgers_direct(psi0: &GridFunction1D, mu: f64, dt: f64, t_end: f64) -> Result<FieldSeries> {
    const OP: &str = "solve_burgers_direct";
    check_mu(OP, mu)?;
    for (param, v) in [("dt", dt), ("t_end", t_end)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(LabError::InvalidParameter {
                op: OP,
                param,
                detail: format!("must be positive, got {v}"),
            });
        }
    }
    let limits = BurgersLimits::of(psi0, mu);
    if dt > limits.max_dt() {
        return Err(LabError::Cfl {
            op: OP,
            dt,
            limit: limits.max_dt(),
        });
    }

    let grid = *psi0.grid();
    let n = grid.len();
    let dx = grid.dx();
    let nu = 1.0 / mu.sqrt();
    let raw_steps = (t_end / dt - 1e-9).ceil().max(1.0) as usize;
    let stride = raw_steps.div_ceil(MAX_SLICES);
    let steps = raw_steps.div_ceil(stride) * stride;
    let step = t_end / steps as f64;

    // Two ghost cells each side.
    let mut q = vec![0.0; n + 4];
    q[2..n + 2].copy_from_slice(psi0.values());
    let mut flux = vec![0.0; n + 1];
    let mut times = vec![0.0];
    let mut slices = vec![psi0.clone()];
    for s in 1..=steps {
        q[0] = q[2];
        q[1] = q[2];
        q[n + 2] = q[n + 1];
        q[n + 3] = q[n + 1];
        // flux[i] sits between cells i+1 and i+2 of q.
        for (i, f) in flux.iter_mut().enumerate() {
            let (a, b, c, d) = (q[i], q[i + 1], q[i + 2], q[i + 3]);
            let left = b + 0.5 * minmod(b - a, c - b);
            let right = c - 0.5 * minmod(c - b, d - c);
            let speed = left.abs().max(right.abs());
            *f = 0.25 * (left * left + right * right) - 0.5 * speed * (right - left) - nu * (c - b) / dx;
        }
        for k in 0..n {
            q[k + 2] -= step / dx * (flux[k + 1] - flux[k]);
        }
        let cells = &q[2..n + 2];
        if cells.iter().any(|v| !v.is_finite()) {
            return Err(LabError::Stability { op: OP, step: s });
        }
        if s % stride == 0 {
            times.push(s as f64 * step);
            slices.push(GridFunction1D::new(grid, cells.to_vec())?);
        }
    }
    Ok(FieldSeries {
        dt: step * stride as f64,
        times,
        slices,
    })
}
