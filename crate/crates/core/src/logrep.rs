//! Logarithmic representation of the generator of an evolution family,
//!
//! ```text
//! A(t) = (I + k U(s,t)) d/dt Log(U(t,s) + k I),
//! ```
//!
//! its normalised form along an arbitrary coordinate, and the generalised
//! Cole-Hopf operator `-2 mu^{-1/2} A(x)`. `Log` is the principal branch; the
//! shift `k` moves the spectrum of `U + kI` off the branch cut.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::evolution::{CoordinatePoint, DifferenceScheme, EvolutionFamily};
use crate::operator_core::{
    branch_cut_distance, mat_inv_with, mat_log_principal_with, spectrum_of, DenseOperator, MatFnConfig,
};

/// The complex shift `k` in `Log(U + k I)`.
///
/// Zero is representable: it is accepted whenever `U` itself is clear of the
/// branch cut, and otherwise the logarithm reports the cut.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaShift(pub Complex64);

impl KappaShift {
    pub fn new(kappa: Complex64) -> Result<Self> {
        if !(kappa.re.is_finite() && kappa.im.is_finite()) {
            return Err(LabError::InvalidParameter {
                op: "KappaShift::new",
                param: "kappa",
                detail: format!("{kappa} is not finite"),
            });
        }
        Ok(Self(kappa))
    }

    pub fn real(kappa: f64) -> Result<Self> {
        Self::new(Complex64::new(kappa, 0.0))
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0 == Complex64::new(0.0, 0.0)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LogRepConfig {
    /// Difference step; `None` selects `1e-4 * max(1, |t|)`.
    pub h: Option<f64>,
    pub scheme: DifferenceScheme,
    pub matfn: MatFnConfig,
}

impl Default for LogRepConfig {
    fn default() -> Self {
        Self {
            h: None,
            scheme: DifferenceScheme::Central,
            matfn: MatFnConfig::default(),
        }
    }
}

impl LogRepConfig {
    pub fn with_step(h: f64) -> Self {
        Self {
            h: Some(h),
            ..Self::default()
        }
    }

    pub fn step_at(&self, t: f64) -> f64 {
        self.h.unwrap_or_else(|| default_step(t))
    }
}

pub fn default_step(t: f64) -> f64 {
    1e-4 * t.abs().max(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRepResult {
    pub generator_estimate: DenseOperator,
    pub kappa: KappaShift,
    pub t: CoordinatePoint,
    pub s: CoordinatePoint,
    pub fd_step: f64,
    /// Max-entry distance to the exact generator, when it is known.
    pub residual_vs_true: Option<f64>,
}

/// True iff every eigenvalue of `U(t,s) + k I` is farther than the branch
/// tolerance from `(-inf, 0]`.
pub fn kappa_admissible(
    family: &EvolutionFamily,
    t: &CoordinatePoint,
    s: &CoordinatePoint,
    kappa: KappaShift,
) -> Result<bool> {
    kappa_admissible_with(family, t, s, kappa, &MatFnConfig::default())
}

pub fn kappa_admissible_with(
    family: &EvolutionFamily,
    t: &CoordinatePoint,
    s: &CoordinatePoint,
    kappa: KappaShift,
    cfg: &MatFnConfig,
) -> Result<bool> {
    let u = family.evaluate_at(t, s)?;
    let spec = spectrum_of(&u.shift(kappa.value()))?;
    Ok(spec
        .eigenvalues
        .iter()
        .all(|&z| branch_cut_distance(z) > cfg.branch_eps))
}

fn shifted_log(
    family: &EvolutionFamily,
    x: f64,
    xi: f64,
    kappa: KappaShift,
    cfg: &MatFnConfig,
) -> Result<DenseOperator> {
    let u = family.evaluate(x, xi)?;
    mat_log_principal_with(&u.shift(kappa.value()), cfg)
}

/// `d/dx Log(U(x, xi) + k I)` by a difference quotient.
pub fn log_derivative(
    family: &EvolutionFamily,
    x: &CoordinatePoint,
    xi: &CoordinatePoint,
    kappa: KappaShift,
    cfg: &LogRepConfig,
) -> Result<DenseOperator> {
    const OP: &str = "log_derivative";
    family.check_label(OP, x)?;
    family.check_label(OP, xi)?;
    let h = cfg.step_at(x.value);
    if !(h.is_finite() && h > 0.0) {
        return Err(LabError::InvalidParameter {
            op: OP,
            param: "h",
            detail: format!("step must be positive, got {h}"),
        });
    }
    let (x, xi) = (x.value, xi.value);
    family.check_domain(OP, xi)?;
    family.check_domain(OP, x + h)?;
    family.check_domain(OP, x - h)?;
    let m = &cfg.matfn;
    let central = |h: f64| -> Result<DenseOperator> {
        let plus = shifted_log(family, x + h, xi, kappa, m)?;
        let minus = shifted_log(family, x - h, xi, kappa, m)?;
        Ok((&plus - &minus).scale_real(0.5 / h))
    };
    match cfg.scheme {
        DifferenceScheme::Central => {
            // Admissibility at the centre point too, not only at x +- h.
            shifted_log(family, x, xi, kappa, m)?;
            central(h)
        }
        DifferenceScheme::Forward => {
            let plus = shifted_log(family, x + h, xi, kappa, m)?;
            let here = shifted_log(family, x, xi, kappa, m)?;
            Ok((&plus - &here).scale_real(1.0 / h))
        }
        DifferenceScheme::Richardson => {
            shifted_log(family, x, xi, kappa, m)?;
            let coarse = central(h)?;
            let fine = central(0.5 * h)?;
            Ok((&fine.scale_real(4.0) - &coarse).scale_real(1.0 / 3.0))
        }
    }
}

/// Generator estimate `(I + k U(s,t)) [Log(U(t+h,s)+kI) - Log(U(t-h,s)+kI)] / 2h`.
pub fn log_representation(
    family: &EvolutionFamily,
    t: &CoordinatePoint,
    s: &CoordinatePoint,
    kappa: KappaShift,
    h: f64,
) -> Result<LogRepResult> {
    log_representation_with(family, t, s, kappa, &LogRepConfig::with_step(h))
}

pub fn log_representation_with(
    family: &EvolutionFamily,
    t: &CoordinatePoint,
    s: &CoordinatePoint,
    kappa: KappaShift,
    cfg: &LogRepConfig,
) -> Result<LogRepResult> {
    let derivative = log_derivative(family, t, s, kappa, cfg)?;
    let back = family.evaluate_at(s, t)?;
    let prefactor = back.scale(kappa.value()).shift(Complex64::new(1.0, 0.0));
    let estimate = &prefactor * &derivative;
    let residual = estimate.max_abs_diff(&family.true_generator(t.value));
    Ok(LogRepResult {
        generator_estimate: estimate,
        kappa,
        t: t.clone(),
        s: s.clone(),
        fd_step: cfg.step_at(t.value),
        residual_vs_true: Some(residual),
    })
}

/// Unnormalised form `A(x) U(x, xi) = (k I + U(x, xi)) d/dx Log(U(x, xi) + k I)`.
pub fn generator_times_evolution(
    family: &EvolutionFamily,
    x: &CoordinatePoint,
    xi: &CoordinatePoint,
    kappa: KappaShift,
    cfg: &LogRepConfig,
) -> Result<DenseOperator> {
    let derivative = log_derivative(family, x, xi, kappa, cfg)?;
    let u = family.evaluate_at(x, xi)?;
    Ok(&u.shift(kappa.value()) * &derivative)
}

/// Normalised generator `A(x) = (k U(xi, x) + I) d/dx Log(U(x, xi) + k I)`.
///
/// Computed as `[A(x) U(x, xi)] U(x, xi)^{-1}`, i.e. by right-normalising the
/// unnormalised form with an explicit inverse. For commuting families this
/// agrees with [`log_representation`].
pub fn normalized_generator(
    family: &EvolutionFamily,
    x: &CoordinatePoint,
    xi: &CoordinatePoint,
    kappa: KappaShift,
    h: f64,
) -> Result<DenseOperator> {
    normalized_generator_with(family, x, xi, kappa, &LogRepConfig::with_step(h))
}

pub fn normalized_generator_with(
    family: &EvolutionFamily,
    x: &CoordinatePoint,
    xi: &CoordinatePoint,
    kappa: KappaShift,
    cfg: &LogRepConfig,
) -> Result<DenseOperator> {
    let product = generator_times_evolution(family, x, xi, kappa, cfg)?;
    let u = family.evaluate_at(x, xi)?;
    let u_inv = mat_inv_with(&u, &cfg.matfn)?;
    Ok(&product * &u_inv)
}

/// `-2 mu^{-1/2}` times the normalised generator.
pub fn generalized_cole_hopf(
    family: &EvolutionFamily,
    x: &CoordinatePoint,
    xi: &CoordinatePoint,
    kappa: KappaShift,
    mu: f64,
    h: f64,
) -> Result<DenseOperator> {
    generalized_cole_hopf_with(family, x, xi, kappa, mu, &LogRepConfig::with_step(h))
}

pub fn generalized_cole_hopf_with(
    family: &EvolutionFamily,
    x: &CoordinatePoint,
    xi: &CoordinatePoint,
    kappa: KappaShift,
    mu: f64,
    cfg: &LogRepConfig,
) -> Result<DenseOperator> {
    if !(mu.is_finite() && mu > 0.0) {
        return Err(LabError::InvalidParameter {
            op: "generalized_cole_hopf",
            param: "mu",
            detail: format!("mu must be positive, got {mu}"),
        });
    }
    let normalized = normalized_generator_with(family, x, xi, kappa, cfg)?;
    Ok(normalized.scale_real(cole_hopf_factor(mu)))
}

/// `-2 / sqrt(mu)`.
pub fn cole_hopf_factor(mu: f64) -> f64 {
    -2.0 / mu.sqrt()
}
