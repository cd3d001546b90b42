use super::stencil::d1;
use super::GridFunction1D;
use crate::error::{LabError, Result};
use crate::logrep::cole_hopf_factor;

/// Values at or below this are refused as arguments of the logarithm.
pub const EPS_POSITIVE: f64 = 1e-300;

// Largest exponent whose exponential is still finite.
const EXP_LIMIT: f64 = 709.0;

pub(crate) fn check_mu(op: &'static str, mu: f64) -> Result<()> {
    if mu.is_finite() && mu > 0.0 {
        Ok(())
    } else {
        Err(LabError::InvalidParameter {
            op,
            param: "mu",
            detail: format!("must be positive and finite, got {mu}"),
        })
    }
}

fn check_positive(op: &'static str, u: &GridFunction1D) -> Result<()> {
    match u.values().iter().position(|&v| v <= EPS_POSITIVE) {
        Some(index) => Err(LabError::Positivity {
            op,
            index,
            value: u.values()[index],
        }),
        None => Ok(()),
    }
}

/// `psi = -2 mu^{-1/2} (D1 u) / u`.
pub fn cole_hopf_transform(u: &GridFunction1D, mu: f64) -> Result<GridFunction1D> {
    const OP: &str = "cole_hopf_transform";
    check_mu(OP, mu)?;
    check_positive(OP, u)?;
    let factor = cole_hopf_factor(mu);
    let du = d1(u.values(), u.grid().dx());
    let psi = du.iter().zip(u.values()).map(|(d, v)| factor * (d / v)).collect();
    GridFunction1D::new(*u.grid(), psi)
}

/// `psi = -2 mu^{-1/2} D1(log u)`, the same map differenced after the log.
pub fn cole_hopf_via_log(u: &GridFunction1D, mu: f64) -> Result<GridFunction1D> {
    const OP: &str = "cole_hopf_via_log";
    check_mu(OP, mu)?;
    check_positive(OP, u)?;
    let factor = cole_hopf_factor(mu);
    let logs: Vec<f64> = u.values().iter().map(|v| v.ln()).collect();
    let psi = d1(&logs, u.grid().dx()).into_iter().map(|d| factor * d).collect();
    GridFunction1D::new(*u.grid(), psi)
}

/// `u(x) = anchor * exp(-(mu^{1/2}/2) * int_{-L}^{x} psi)`.
///
/// The value at `-L` is extrapolated with a cubic; the running integral is
/// composite Simpson on even panels, with a third-order start on the first.
pub fn inverse_cole_hopf(psi: &GridFunction1D, mu: f64, anchor: f64) -> Result<GridFunction1D> {
    const OP: &str = "inverse_cole_hopf";
    check_mu(OP, mu)?;
    if !(anchor.is_finite() && anchor > 0.0) {
        return Err(LabError::InvalidParameter {
            op: OP,
            param: "anchor",
            detail: format!("must be positive and finite, got {anchor}"),
        });
    }
    let p = psi.values();
    let h = psi.grid().dx();
    // g[0] sits at -L, g[j + 1] at node j.
    let mut g = Vec::with_capacity(p.len() + 1);
    g.push(4.0 * p[0] - 6.0 * p[1] + 4.0 * p[2] - p[3]);
    g.extend_from_slice(p);

    let mut acc = vec![0.0; g.len()];
    acc[1] = h / 24.0 * (9.0 * g[0] + 19.0 * g[1] - 5.0 * g[2] + g[3]);
    acc[2] = h / 3.0 * (g[0] + 4.0 * g[1] + g[2]);
    acc[3] = 3.0 * h / 8.0 * (g[0] + 3.0 * g[1] + 3.0 * g[2] + g[3]);
    for j in 4..g.len() {
        acc[j] = acc[j - 2] + h / 3.0 * (g[j - 2] + 4.0 * g[j - 1] + g[j]);
    }

    let scale = -0.5 * mu.sqrt();
    let ln_anchor = anchor.ln();
    let mut out = Vec::with_capacity(p.len());
    for &integral in &acc[1..] {
        let exponent = ln_anchor + scale * integral;
        if exponent.abs() > EXP_LIMIT || !exponent.is_finite() {
            return Err(LabError::Overflow {
                op: OP,
                detail: format!("exponent {exponent:.3e} outside the double range"),
            });
        }
        out.push(exponent.exp());
    }
    GridFunction1D::new(*psi.grid(), out)
}
