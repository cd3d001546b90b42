//! Two-parameter evolution families `U(t, s)` generated by commuting
//! generators, along an arbitrary evolution coordinate.
//!
//! Only generators whose values all commute with each other can be built:
//! a constant matrix `M`, or `a(x) M` for a scalar coefficient `a`. Then
//! `U(t, s) = exp((\int_s^t a) M)` and the two-parameter group laws hold
//! exactly in exact arithmetic.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::operator_core::{mat_exp, op_norm, DenseOperator};
use crate::quadrature::{integrate, QuadOptions};
use crate::report::{ReportBuilder, VerificationReport};

/// Default tolerance for the group-law residuals.
pub const TOL_SEMIGROUP: f64 = 1e-10;

/// Scalar coefficient catalogue: `const:c` is `c`, `linear:c` is `c x`,
/// `sin:c` is `c sin x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Coefficient {
    Const(f64),
    Linear(f64),
    Sin(f64),
}

impl Coefficient {
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Coefficient::Const(c) => c,
            Coefficient::Linear(c) => c * x,
            Coefficient::Sin(c) => c * x.sin(),
        }
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Const(c) => write!(f, "const:{c}"),
            Coefficient::Linear(c) => write!(f, "linear:{c}"),
            Coefficient::Sin(c) => write!(f, "sin:{c}"),
        }
    }
}

impl FromStr for Coefficient {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |detail: String| LabError::InvalidParameter {
            op: "Coefficient::parse",
            param: "coefficient",
            detail,
        };
        let (kind, c) = s
            .split_once(':')
            .ok_or_else(|| bad(format!("`{s}` is not of the form kind:c")))?;
        let c: f64 = c.trim().parse().map_err(|_| bad(format!("`{c}` is not a number")))?;
        if !c.is_finite() {
            return Err(bad(format!("`{c}` is not finite")));
        }
        match kind.trim() {
            "const" => Ok(Coefficient::Const(c)),
            "linear" => Ok(Coefficient::Linear(c)),
            "sin" => Ok(Coefficient::Sin(c)),
            other => Err(bad(format!("unknown coefficient kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorKind {
    Constant(DenseOperator),
    ScalarModulated {
        coefficient: Coefficient,
        matrix: DenseOperator,
    },
}

/// Generator of a family together with the name of its evolution coordinate
/// (`"t"`, `"x1"`, ...). The label is bookkeeping only and never enters a
/// computation.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub coordinate_label: String,
}

impl GeneratorSpec {
    pub fn constant(matrix: DenseOperator, label: impl Into<String>) -> Self {
        Self {
            kind: GeneratorKind::Constant(matrix),
            coordinate_label: label.into(),
        }
    }

    pub fn modulated(coefficient: Coefficient, matrix: DenseOperator, label: impl Into<String>) -> Self {
        Self {
            kind: GeneratorKind::ScalarModulated { coefficient, matrix },
            coordinate_label: label.into(),
        }
    }

    pub fn matrix(&self) -> &DenseOperator {
        match &self.kind {
            GeneratorKind::Constant(m) => m,
            GeneratorKind::ScalarModulated { matrix, .. } => matrix,
        }
    }

    /// Exact generator `K(x)`.
    pub fn generator_at(&self, x: f64) -> DenseOperator {
        match &self.kind {
            GeneratorKind::Constant(m) => m.clone(),
            GeneratorKind::ScalarModulated { coefficient, matrix } => matrix.scale_real(coefficient.value(x)),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.coordinate_label = label.into();
        self
    }
}

/// A value of the evolution coordinate, tagged with the coordinate's name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoordinatePoint {
    pub value: f64,
    pub label: String,
}

impl CoordinatePoint {
    pub fn new(value: f64, label: impl Into<String>) -> Self {
        Self {
            value,
            label: label.into(),
        }
    }
}

/// How a derivative along the evolution coordinate is approximated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DifferenceScheme {
    /// `(f(x+h) - f(x-h)) / 2h`
    #[default]
    Central,
    /// `(f(x+h) - f(x)) / h`
    Forward,
    /// Two-step Richardson extrapolation of the central quotient.
    Richardson,
}

impl FromStr for DifferenceScheme {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "central" => Ok(Self::Central),
            "forward" => Ok(Self::Forward),
            "richardson" => Ok(Self::Richardson),
            _ => Err(LabError::InvalidParameter {
                op: "DifferenceScheme::parse",
                param: "scheme",
                detail: format!("unknown scheme `{s}` (central | forward | richardson)"),
            }),
        }
    }
}

/// `U(t, s)` on the square `[-T, T]^2`.
#[derive(Debug, Clone)]
pub struct EvolutionFamily {
    spec: GeneratorSpec,
    half_width: f64,
    quad: QuadOptions,
}

impl EvolutionFamily {
    pub fn build(spec: GeneratorSpec, half_width: f64) -> Result<Self> {
        const OP: &str = "build_family";
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(LabError::InvalidParameter {
                op: OP,
                param: "T",
                detail: format!("half-width must be positive and finite, got {half_width}"),
            });
        }
        let family = Self {
            spec,
            half_width,
            quad: QuadOptions::abs(1e-12),
        };
        // Integrability of the coefficient over the whole domain.
        if let GeneratorKind::ScalarModulated { coefficient, .. } = &family.spec.kind {
            let c = *coefficient;
            integrate(|x| c.value(x), -half_width, half_width, family.quad).map_err(|e| LabError::Quadrature {
                op: OP,
                detail: e.to_string(),
            })?;
        }
        Ok(family)
    }

    pub fn spec(&self) -> &GeneratorSpec {
        &self.spec
    }

    pub fn label(&self) -> &str {
        &self.spec.coordinate_label
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn dim(&self) -> usize {
        self.spec.matrix().dim()
    }

    pub fn point(&self, value: f64) -> CoordinatePoint {
        CoordinatePoint::new(value, self.label())
    }

    pub fn check_domain(&self, op: &'static str, x: f64) -> Result<()> {
        if x.is_finite() && x.abs() <= self.half_width {
            Ok(())
        } else {
            Err(LabError::Domain {
                op,
                value: x,
                lo: -self.half_width,
                hi: self.half_width,
            })
        }
    }

    pub fn check_label(&self, op: &'static str, p: &CoordinatePoint) -> Result<()> {
        if p.label == self.spec.coordinate_label {
            Ok(())
        } else {
            Err(LabError::CoordinateMismatch {
                op,
                expected: self.spec.coordinate_label.clone(),
                got: p.label.clone(),
            })
        }
    }

    /// `\int_s^t a`; for a constant generator simply `t - s`.
    pub fn coefficient_integral(&self, t: f64, s: f64) -> Result<f64> {
        match &self.spec.kind {
            GeneratorKind::Constant(_) => Ok(t - s),
            GeneratorKind::ScalarModulated { coefficient, .. } => {
                let c = *coefficient;
                integrate(|x| c.value(x), s, t, self.quad)
            }
        }
    }

    /// `U(t, s)`. Exactly the identity when `t == s`.
    pub fn evaluate(&self, t: f64, s: f64) -> Result<DenseOperator> {
        const OP: &str = "EvolutionFamily::evaluate";
        self.check_domain(OP, t)?;
        self.check_domain(OP, s)?;
        if t == s {
            return Ok(DenseOperator::identity(self.dim()));
        }
        let w = self.coefficient_integral(t, s)?;
        mat_exp(&self.spec.matrix().scale_real(w))
    }

    pub fn evaluate_at(&self, t: &CoordinatePoint, s: &CoordinatePoint) -> Result<DenseOperator> {
        const OP: &str = "EvolutionFamily::evaluate_at";
        self.check_label(OP, t)?;
        self.check_label(OP, s)?;
        self.evaluate(t.value, s.value)
    }

    pub fn true_generator(&self, x: f64) -> DenseOperator {
        self.spec.generator_at(x)
    }
}

pub fn build_family(spec: GeneratorSpec, half_width: f64) -> Result<EvolutionFamily> {
    EvolutionFamily::build(spec, half_width)
}

/// Residuals of the composition, identity and inverse laws over `triples`
/// of `(t, r, s)`, each measured in the operator norm.
pub fn check_group_axioms(family: &EvolutionFamily, triples: &[(f64, f64, f64)]) -> VerificationReport {
    check_group_axioms_with_tol(family, triples, TOL_SEMIGROUP)
}

pub fn check_group_axioms_with_tol(
    family: &EvolutionFamily,
    triples: &[(f64, f64, f64)],
    tol: f64,
) -> VerificationReport {
    let mut composition: f64 = 0.0;
    let mut identity: f64 = 0.0;
    let mut inverse: f64 = 0.0;
    let id = DenseOperator::identity(family.dim());

    for &(t, r, s) in triples {
        let eval = || -> Result<(f64, f64, f64)> {
            let u_tr = family.evaluate(t, r)?;
            let u_rs = family.evaluate(r, s)?;
            let u_ts = family.evaluate(t, s)?;
            let u_st = family.evaluate(s, t)?;
            let u_ss = family.evaluate(s, s)?;
            Ok((
                op_norm(&(&(&u_tr * &u_rs) - &u_ts)),
                op_norm(&(&u_ss - &id)),
                op_norm(&(&(&u_st * &u_ts) - &id)),
            ))
        };
        match eval() {
            Ok((c, i, v)) => {
                composition = composition.max(c);
                identity = identity.max(i);
                inverse = inverse.max(v);
            }
            Err(_) => {
                composition = f64::NAN;
            }
        }
    }

    let inputs = format!("{:?}|T={}|triples={:?}", family.spec, family.half_width, triples);
    ReportBuilder::new("evolution.group_axioms", &inputs)
        .check("composition", composition, tol)
        .check("identity", identity, tol)
        .check("inverse", inverse, tol)
        .finish()
}

fn central_quotient(family: &EvolutionFamily, t: f64, h: f64) -> Result<DenseOperator> {
    let plus = family.evaluate(t + h, t)?;
    let minus = family.evaluate(t - h, t)?;
    Ok((&plus - &minus).scale_real(0.5 / h))
}

/// Difference-quotient approximation of the generator at `t`:
/// `(U(t+h, t) - U(t-h, t)) / 2h`.
pub fn pre_generator(family: &EvolutionFamily, t: &CoordinatePoint, h: f64) -> Result<DenseOperator> {
    pre_generator_with(family, t, h, DifferenceScheme::Central)
}

pub fn pre_generator_with(
    family: &EvolutionFamily,
    t: &CoordinatePoint,
    h: f64,
    scheme: DifferenceScheme,
) -> Result<DenseOperator> {
    const OP: &str = "pre_generator";
    family.check_label(OP, t)?;
    if !(h.is_finite() && h > 0.0) {
        return Err(LabError::InvalidParameter {
            op: OP,
            param: "h",
            detail: format!("step must be positive, got {h}"),
        });
    }
    let x = t.value;
    family.check_domain(OP, x + h)?;
    if scheme != DifferenceScheme::Forward {
        family.check_domain(OP, x - h)?;
    }
    match scheme {
        DifferenceScheme::Central => central_quotient(family, x, h),
        DifferenceScheme::Forward => {
            let plus = family.evaluate(x + h, x)?;
            Ok(plus.shift((-1.0).into()).scale_real(1.0 / h))
        }
        DifferenceScheme::Richardson => {
            let coarse = central_quotient(family, x, h)?;
            let fine = central_quotient(family, x, 0.5 * h)?;
            Ok((&fine.scale_real(4.0) - &coarse).scale_real(1.0 / 3.0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn skew() -> DenseOperator {
        DenseOperator::from_real(2, &[0.0, 1.0, -1.0, 0.0]).unwrap()
    }

    #[test]
    fn coefficient_parsing() {
        assert_eq!("sin:0.5".parse::<Coefficient>().unwrap(), Coefficient::Sin(0.5));
        assert_eq!("linear:-2".parse::<Coefficient>().unwrap(), Coefficient::Linear(-2.0));
        assert_eq!(
            Coefficient::Const(3.0).to_string().parse::<Coefficient>().unwrap(),
            Coefficient::Const(3.0)
        );
        assert!("cos:1".parse::<Coefficient>().is_err());
        assert!("const".parse::<Coefficient>().is_err());
        assert!("const:nan".parse::<Coefficient>().is_err());
    }

    #[test]
    fn zero_generator_gives_identity() {
        let f = build_family(GeneratorSpec::constant(DenseOperator::zeros(3), "t"), 1.0).unwrap();
        assert_eq!(f.evaluate(0.7, -0.2).unwrap(), DenseOperator::identity(3));
    }

    #[test]
    fn skew_generator_gives_rotation() {
        let f = build_family(GeneratorSpec::constant(skew(), "t"), 1.0).unwrap();
        let u = f.evaluate(0.3, 0.0).unwrap();
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let want = DenseOperator::from_real(2, &[c, s, -s, c]).unwrap();
        assert!(u.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn modulated_linear_coefficient() {
        let m = DenseOperator::diag_real(&[1.0, -1.0]).unwrap();
        let f = build_family(GeneratorSpec::modulated(Coefficient::Linear(1.0), m, "x1"), 2.0).unwrap();
        let u = f.evaluate(1.0, 0.0).unwrap();
        let want = DenseOperator::diag_real(&[0.5f64.exp(), (-0.5f64).exp()]).unwrap();
        assert!(u.max_abs_diff(&want) < 1e-13);
    }

    #[test]
    fn identity_exact_on_diagonal() {
        let f = build_family(GeneratorSpec::constant(skew(), "t"), 1.0).unwrap();
        let r = check_group_axioms(&f, &[(0.4, 0.4, 0.4)]);
        assert_eq!(r.residual("identity"), Some(0.0));
        assert_eq!(r.residual("composition"), Some(0.0));
        assert!(r.pass);
    }

    #[test]
    fn out_of_domain_is_rejected() {
        let f = build_family(GeneratorSpec::constant(skew(), "t"), 1.0).unwrap();
        assert!(matches!(f.evaluate(1.5, 0.0), Err(LabError::Domain { .. })));
        let r = check_group_axioms(&f, &[(2.0, 0.0, 0.0)]);
        assert!(!r.pass);
        let p = f.point(0.95);
        assert!(matches!(pre_generator(&f, &p, 0.1), Err(LabError::Domain { .. })));
    }

    #[test]
    fn label_mismatch_is_rejected() {
        let f = build_family(GeneratorSpec::constant(skew(), "t"), 1.0).unwrap();
        let p = CoordinatePoint::new(0.0, "x1");
        assert!(matches!(
            pre_generator(&f, &p, 1e-3),
            Err(LabError::CoordinateMismatch { .. })
        ));
    }

    #[test]
    fn build_rejects_bad_half_width() {
        assert!(build_family(GeneratorSpec::constant(skew(), "t"), 0.0).is_err());
        assert!(build_family(GeneratorSpec::constant(skew(), "t"), f64::INFINITY).is_err());
    }

    #[test]
    fn forward_scheme_is_first_order() {
        let m = DenseOperator::diag(&[Complex64::new(0.5, 0.0), Complex64::new(-1.0, 0.0)]).unwrap();
        let f = build_family(GeneratorSpec::constant(m.clone(), "t"), 1.0).unwrap();
        let p = f.point(0.0);
        let e1 = pre_generator_with(&f, &p, 1e-3, DifferenceScheme::Forward)
            .unwrap()
            .max_abs_diff(&m);
        let e2 = pre_generator_with(&f, &p, 5e-4, DifferenceScheme::Forward)
            .unwrap()
            .max_abs_diff(&m);
        let ratio = e1 / e2;
        assert!((ratio - 2.0).abs() < 0.1, "ratio {ratio}");
        let r = pre_generator_with(&f, &p, 1e-2, DifferenceScheme::Richardson)
            .unwrap()
            .max_abs_diff(&m);
        assert!(r < 1e-9);
    }
}
