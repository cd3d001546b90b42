//! Pointwise checks of the algebraic identities through which an advection
//! term appears when the ratio `w = -u/v` of two linear solutions is
//! differentiated in time.
//!
//! Left-hand sides are differentiated by the complex step (exact to
//! rounding for these analytic fields); right-hand sides use the symbolic
//! derivatives carried by [`Field`]. Neither side uses finite differences.

mod field;

use serde::{Deserialize, Serialize};

use crate::cole_hopf::{cole_hopf_transform, Grid1D, GridFunction1D};
use crate::error::{LabError, Result};
use crate::operator_core::C64;

pub use field::{Field, Term};

/// Relative tolerance of an identity that holds exactly.
pub const TOL_IDENTITY: f64 = 1e-12;
/// A violated identity must miss by at least this fraction of its scale.
pub const NEGATIVE_CONTROL_MARGIN: f64 = 1e-3;
/// Denominators below this magnitude are treated as vanishing.
pub const EPS_DIVISION: f64 = 1e-12;

const STEP: f64 = 1e-20;

/// Rectangular lattice `[t0, t1] x [x0, x1]` with `nt x nx` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalWindow {
    pub t: (f64, f64),
    pub x: (f64, f64),
    pub nt: usize,
    pub nx: usize,
}

impl EvalWindow {
    pub fn new(t: (f64, f64), x: (f64, f64), nt: usize, nx: usize) -> Result<Self> {
        let ok = [t.0, t.1, x.0, x.1].iter().all(|v| v.is_finite()) && t.0 <= t.1 && x.0 <= x.1;
        if !ok || nt == 0 || nx == 0 {
            return Err(LabError::InvalidParameter {
                op: "EvalWindow::new",
                param: "window",
                detail: format!("bad window t={t:?} x={x:?} ({nt} x {nx})"),
            });
        }
        Ok(Self { t, x, nt, nx })
    }

    fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![lo];
        }
        (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        let ts = Self::axis(self.t.0, self.t.1, self.nt);
        let xs = Self::axis(self.x.0, self.x.1, self.nx);
        ts.iter().flat_map(|&t| xs.iter().map(move |&x| (t, x))).collect()
    }

    pub fn len(&self) -> usize {
        self.nt * self.nx
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Two closed-form fields with the structural facts the identities rely on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothPair {
    pub name: String,
    pub u: Field,
    pub v: Field,
    /// `u = -v_x`.
    pub linked: bool,
    /// `u = -v_x` and `v_t = v_xx`.
    pub heat_constrained: bool,
    /// Window on which the catalogue runs the pair.
    pub window: EvalWindow,
}

impl SmoothPair {
    pub fn new(name: impl Into<String>, u: Field, v: Field, window: EvalWindow) -> Self {
        Self {
            name: name.into(),
            u,
            v,
            linked: false,
            heat_constrained: false,
            window,
        }
    }

    /// `u = -v_x` with `v` a heat solution (`mu = 1`).
    pub fn heat(name: impl Into<String>, v: Field, window: EvalWindow) -> Self {
        Self {
            name: name.into(),
            u: -v.dx(),
            v,
            linked: true,
            heat_constrained: true,
            window,
        }
    }

    /// `u = -v_x` without asking anything of `v`.
    pub fn linked(name: impl Into<String>, v: Field, window: EvalWindow) -> Self {
        Self {
            heat_constrained: false,
            ..Self::heat(name, v, window)
        }
    }
}

/// Which identity a residual belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    /// `(u/v)_t = (u_t v - v_t u) / v^2`.
    Leibniz,
    /// `(-u/v)_t = [u_t/u - v_t/v] (-u/v)`.
    Factorization,
    /// With `w = -u/v`, `u = -v_x`, `v_t = v_xx`:
    /// `w_t = (v_xt/v_x) w - w w_x - (v_x/v) w^2`.
    Advection,
    /// With `u = -v_x`: `(u^2)_x = 2 (v_xx / v_x) u^2`.
    GradientSquare,
}

impl Identity {
    pub const ALL: [Identity; 4] = [
        Identity::Leibniz,
        Identity::Factorization,
        Identity::Advection,
        Identity::GradientSquare,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Identity::Leibniz => "leibniz",
            Identity::Factorization => "factorization",
            Identity::Advection => "advection",
            Identity::GradientSquare => "gradient_square",
        }
    }

    /// Whether `p` satisfies the hypotheses of this identity.
    pub fn applies_to(&self, p: &SmoothPair) -> bool {
        match self {
            Identity::Leibniz | Identity::Factorization => true,
            Identity::Advection => p.heat_constrained,
            Identity::GradientSquare => p.linked,
        }
    }
}

/// Lattice maximum of `|lhs - rhs|`, and the largest magnitude among the
/// left side and the individual right-hand terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityResidual {
    pub identity: Identity,
    pub pair: String,
    pub max_abs: f64,
    pub scale: f64,
    pub sample_count: usize,
    /// Largest `|w w_x|` on the lattice; only for the advection identity.
    pub advection_term: Option<f64>,
}

impl IdentityResidual {
    pub fn holds(&self) -> bool {
        self.max_abs <= TOL_IDENTITY * self.scale
    }

    pub fn clearly_fails(&self) -> bool {
        self.max_abs >= NEGATIVE_CONTROL_MARGIN * self.scale
    }
}

fn d_t(f: impl Fn(C64, C64) -> C64, t: f64, x: f64) -> f64 {
    f(C64::new(t, STEP), C64::new(x, 0.0)).im / STEP
}

fn d_x(f: impl Fn(C64, C64) -> C64, t: f64, x: f64) -> f64 {
    f(C64::new(t, 0.0), C64::new(x, STEP)).im / STEP
}

/// Refuse a denominator that is tiny or changes sign on the lattice.
fn check_denominator(op: &'static str, name: &'static str, f: &Field, pts: &[(f64, f64)]) -> Result<()> {
    let mut sign = 0.0;
    for &(t, x) in pts {
        let v = f.eval(t, x);
        if v.is_nan() || v.abs() < EPS_DIVISION || (sign != 0.0 && v.signum() != sign) {
            return Err(LabError::DivisionWindow { op, name, t, x });
        }
        sign = v.signum();
    }
    Ok(())
}

struct Accum {
    max_abs: f64,
    scale: f64,
}

impl Accum {
    fn new() -> Self {
        Self {
            max_abs: 0.0,
            scale: 0.0,
        }
    }

    fn add(&mut self, lhs: f64, terms: &[f64]) {
        let rhs: f64 = terms.iter().sum();
        self.max_abs = self.max_abs.max((lhs - rhs).abs());
        self.scale = terms.iter().fold(self.scale.max(lhs.abs()), |m, v| m.max(v.abs()));
    }
}

fn finish(identity: Identity, p: &SmoothPair, a: Accum, n: usize, advection: Option<f64>) -> Result<IdentityResidual> {
    if !(a.max_abs.is_finite() && a.scale.is_finite()) {
        return Err(LabError::NonFinite {
            op: "identity_residual",
            what: format!("{} residual for pair {}", identity.name(), p.name),
        });
    }
    Ok(IdentityResidual {
        identity,
        pair: p.name.clone(),
        max_abs: a.max_abs,
        scale: a.scale,
        sample_count: n,
        advection_term: advection,
    })
}

pub fn leibniz_residual(p: &SmoothPair, window: &EvalWindow) -> Result<IdentityResidual> {
    const OP: &str = "leibniz_residual";
    let pts = window.points();
    check_denominator(OP, "v", &p.v, &pts)?;
    let (ut, vt) = (p.u.dt(), p.v.dt());
    let mut acc = Accum::new();
    for &(t, x) in &pts {
        let lhs = d_t(|t, x| p.u.eval_complex(t, x) / p.v.eval_complex(t, x), t, x);
        let (u, v) = (p.u.eval(t, x), p.v.eval(t, x));
        let v2 = v * v;
        acc.add(lhs, &[ut.eval(t, x) * v / v2, -vt.eval(t, x) * u / v2]);
    }
    finish(Identity::Leibniz, p, acc, pts.len(), None)
}

pub fn factorization_residual(p: &SmoothPair, window: &EvalWindow) -> Result<IdentityResidual> {
    const OP: &str = "factorization_residual";
    let pts = window.points();
    check_denominator(OP, "v", &p.v, &pts)?;
    check_denominator(OP, "u", &p.u, &pts)?;
    let (ut, vt) = (p.u.dt(), p.v.dt());
    let mut acc = Accum::new();
    for &(t, x) in &pts {
        let lhs = d_t(|t, x| -p.u.eval_complex(t, x) / p.v.eval_complex(t, x), t, x);
        let (u, v) = (p.u.eval(t, x), p.v.eval(t, x));
        let w = -u / v;
        acc.add(lhs, &[ut.eval(t, x) / u * w, -vt.eval(t, x) / v * w]);
    }
    finish(Identity::Factorization, p, acc, pts.len(), None)
}

pub fn advection_identity_residual(p: &SmoothPair, window: &EvalWindow) -> Result<IdentityResidual> {
    const OP: &str = "advection_identity_residual";
    let pts = window.points();
    let vx = p.v.dx();
    check_denominator(OP, "v", &p.v, &pts)?;
    check_denominator(OP, "v_x", &vx, &pts)?;
    let (ux, vxt) = (p.u.dx(), vx.dt());
    let mut acc = Accum::new();
    let mut advection = 0.0f64;
    for &(t, x) in &pts {
        let lhs = d_t(|t, x| -p.u.eval_complex(t, x) / p.v.eval_complex(t, x), t, x);
        let (u, v, vx_) = (p.u.eval(t, x), p.v.eval(t, x), vx.eval(t, x));
        let w = -u / v;
        let wx = -(ux.eval(t, x) * v - vx_ * u) / (v * v);
        advection = advection.max((w * wx).abs());
        acc.add(lhs, &[vxt.eval(t, x) / vx_ * w, -w * wx, -vx_ / v * w * w]);
    }
    finish(Identity::Advection, p, acc, pts.len(), Some(advection))
}

pub fn gradient_square_identity(p: &SmoothPair, window: &EvalWindow) -> Result<IdentityResidual> {
    const OP: &str = "gradient_square_identity";
    let pts = window.points();
    let vx = p.v.dx();
    check_denominator(OP, "v_x", &vx, &pts)?;
    let vxx = vx.dx();
    let mut acc = Accum::new();
    for &(t, x) in &pts {
        let lhs = d_x(
            |t, x| {
                let u = p.u.eval_complex(t, x);
                u * u
            },
            t,
            x,
        );
        let u = p.u.eval(t, x);
        acc.add(lhs, &[2.0 * vxx.eval(t, x) / vx.eval(t, x) * u * u]);
    }
    finish(Identity::GradientSquare, p, acc, pts.len(), None)
}

pub fn identity_residual(identity: Identity, p: &SmoothPair, window: &EvalWindow) -> Result<IdentityResidual> {
    match identity {
        Identity::Leibniz => leibniz_residual(p, window),
        Identity::Factorization => factorization_residual(p, window),
        Identity::Advection => advection_identity_residual(p, window),
        Identity::GradientSquare => gradient_square_identity(p, window),
    }
}

/// Pairs that satisfy the hypotheses of the identities they are run on.
pub fn conforming_pairs() -> Vec<SmoothPair> {
    let unit = EvalWindow::new((0.0, 1.0), (-2.0, 2.0), 21, 41).expect("static window");
    let right = EvalWindow::new((0.0, 1.0), (0.5, 2.0), 21, 31).expect("static window");
    let late = EvalWindow::new((1.0, 2.0), (-1.0, 1.0), 21, 21).expect("static window");
    vec![
        SmoothPair::heat("shock", Field::constant(1.0) + Field::exp(1.0, 1.0, 1.0), unit),
        SmoothPair::heat("shock_a2", Field::constant(1.0) + Field::exp(1.0, 2.0, 4.0), unit),
        SmoothPair::heat("single_exp", Field::exp(1.0, 1.0, 1.0), unit),
        // 2 + cosh(x) e^t
        SmoothPair::heat(
            "cosh_heat",
            Field::constant(2.0) + Field::exp(0.5, 1.0, 1.0) + Field::exp(0.5, -1.0, 1.0),
            right,
        ),
        SmoothPair::new(
            "exp_sum",
            Field::exp(1.0, 0.3, -0.2) + Field::monomial(2.0, 2, 0) + Field::constant(0.5),
            Field::constant(1.5) + Field::exp(0.7, 1.0, 0.5) + Field::term(0.2, 1, 1, 0.0, 0.0, 0.0),
            unit,
        ),
        SmoothPair::new("poly", Field::monomial(1.0, 2, 0), Field::monomial(1.0, 1, 0), late),
    ]
}

/// Pairs that break exactly one hypothesis, so the matching identity must
/// fail visibly.
pub fn negative_controls() -> Vec<(Identity, SmoothPair)> {
    let unit = EvalWindow::new((0.0, 1.0), (-2.0, 2.0), 21, 41).expect("static window");
    vec![
        (
            Identity::Advection,
            // e^x e^{t^2}: u = -v_x holds but v is not a heat solution
            SmoothPair::linked("gauss_time", Field::term(1.0, 0, 0, 1.0, 0.0, 1.0), unit),
        ),
        (
            Identity::GradientSquare,
            SmoothPair::new(
                "unlinked",
                Field::exp(1.0, 2.0, 0.0),
                Field::constant(1.0) + Field::exp(1.0, 1.0, 1.0),
                unit,
            ),
        ),
    ]
}

/// `max |(-u/v) + psi/2|` over the grid at time `t`, where `psi` is the
/// grid transform of `v` at `mu = 1`.
pub fn cole_hopf_consistency(p: &SmoothPair, t: f64, grid: Grid1D) -> Result<f64> {
    let v = GridFunction1D::from_fn(grid, |x| p.v.eval(t, x))?;
    let psi = cole_hopf_transform(&v, 1.0)?;
    Ok(grid
        .nodes()
        .zip(psi.values())
        .map(|(x, &s)| (-p.u.eval(t, x) / p.v.eval(t, x) + 0.5 * s).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn window() -> EvalWindow {
        EvalWindow::new((0.0, 1.0), (-2.0, 2.0), 11, 21).unwrap()
    }

    #[test]
    fn all_conforming_pairs_satisfy_their_identities() {
        for p in conforming_pairs() {
            for id in Identity::ALL.iter().filter(|id| id.applies_to(&p)) {
                let r = identity_residual(*id, &p, &p.window).unwrap();
                assert!(
                    r.holds(),
                    "{} on {}: {} vs scale {}",
                    id.name(),
                    p.name,
                    r.max_abs,
                    r.scale
                );
            }
        }
    }

    #[test]
    fn negative_controls_fail() {
        for (id, p) in negative_controls() {
            assert!(!id.applies_to(&p));
            let r = identity_residual(id, &p, &p.window).unwrap();
            assert!(
                r.clearly_fails(),
                "{} on {}: {} vs {}",
                id.name(),
                p.name,
                r.max_abs,
                r.scale
            );
        }
    }

    #[test]
    fn equal_fields_give_zero_derivative() {
        let f = Field::constant(2.0) + Field::exp(1.0, 0.5, 0.5);
        let p = SmoothPair::new("same", f.clone(), f, window());
        let r = leibniz_residual(&p, &window()).unwrap();
        assert!(r.max_abs <= 1e-15 * r.scale.max(1.0));
    }

    #[test]
    fn quadratic_over_linear_in_time() {
        let w = EvalWindow::new((1.0, 2.0), (0.0, 0.0), 11, 1).unwrap();
        let p = SmoothPair::new("poly", Field::monomial(1.0, 2, 0), Field::monomial(1.0, 1, 0), w);
        let r = leibniz_residual(&p, &w).unwrap();
        assert!(r.max_abs <= 1e-15);
        // right side t^2 * t / t^2 = t, so the scale is 2 on [1, 2]
        assert!((r.scale - 2.0).abs() < 1e-15);
    }

    #[test]
    fn proportional_pair_factorizes_to_zero() {
        let v = Field::constant(1.0) + Field::exp(1.0, 1.0, 1.0);
        let p = SmoothPair::new("prop", v.clone() * 3.0, v, window());
        assert!(factorization_residual(&p, &window()).unwrap().holds());
    }

    #[test]
    fn exponential_ratio_factorizes() {
        let p = SmoothPair::new("exp", Field::exp(1.0, 0.0, 2.0), Field::exp(1.0, 0.0, 1.0), window());
        let r = factorization_residual(&p, &window()).unwrap();
        assert!(r.max_abs <= 1e-13 * r.scale.max(1.0), "{}", r.max_abs);
    }

    #[test]
    fn advection_term_is_present() {
        let p = &conforming_pairs()[0];
        let r = advection_identity_residual(p, &p.window).unwrap();
        assert!(r.advection_term.unwrap() > 0.1);
    }

    #[test]
    fn single_exponential_gradient_square() {
        let p = SmoothPair::heat("e", Field::exp(1.0, 1.0, 1.0), window());
        let r = gradient_square_identity(&p, &window()).unwrap();
        assert!(r.holds());
        // both sides 2 e^{2(x+t)}: largest at t=1, x=2
        assert!((r.scale - 2.0 * 6.0f64.exp()).abs() < 1e-9 * r.scale);
    }

    #[test]
    fn vanishing_denominators_are_refused() {
        // v_x = sinh(x) e^t vanishes at x = 0
        let p = SmoothPair::heat("cosh", Field::exp(0.5, 1.0, 1.0) + Field::exp(0.5, -1.0, 1.0), window());
        assert!(matches!(
            gradient_square_identity(&p, &window()),
            Err(LabError::DivisionWindow { name: "v_x", .. })
        ));
        let q = SmoothPair::new("zero", Field::constant(1.0), Field::monomial(1.0, 0, 1), window());
        assert!(matches!(
            leibniz_residual(&q, &window()),
            Err(LabError::DivisionWindow { .. })
        ));
    }

    #[test]
    fn ratio_is_half_the_transform() {
        let p = &conforming_pairs()[0];
        let g = Grid1D::new(4.0, 512).unwrap();
        for t in [0.0, 0.5] {
            assert!(cole_hopf_consistency(p, t, g).unwrap() < 1e-6);
        }
    }
}
