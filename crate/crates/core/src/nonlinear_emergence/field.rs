use std::ops::{Add, Mul, Neg};

use serde::{Deserialize, Serialize};

use crate::operator_core::C64;

/// `coef * t^tp * x^xp * exp(ax x + bt t + qt t^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coef: f64,
    pub tp: u32,
    pub xp: u32,
    pub ax: f64,
    pub bt: f64,
    pub qt: f64,
}

impl Term {
    fn eval(&self, t: C64, x: C64) -> C64 {
        let mut v = C64::new(self.coef, 0.0);
        if self.tp > 0 {
            v *= t.powu(self.tp);
        }
        if self.xp > 0 {
            v *= x.powu(self.xp);
        }
        if self.ax != 0.0 || self.bt != 0.0 || self.qt != 0.0 {
            v *= (x * self.ax + t * self.bt + t * t * self.qt).exp();
        }
        v
    }

    fn with_coef(self, coef: f64) -> Self {
        Self { coef, ..self }
    }
}

/// A closed-form scalar function of `(t, x)`: a finite sum of [`Term`]s,
/// differentiated symbolically and evaluated at complex arguments.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Field {
    terms: Vec<Term>,
}

impl Field {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::term(c, 0, 0, 0.0, 0.0, 0.0)
    }

    pub fn term(coef: f64, tp: u32, xp: u32, ax: f64, bt: f64, qt: f64) -> Self {
        let mut f = Self::zero();
        if coef != 0.0 {
            f.terms.push(Term {
                coef,
                tp,
                xp,
                ax,
                bt,
                qt,
            });
        }
        f
    }

    /// `c exp(a x + b t)`.
    pub fn exp(c: f64, a: f64, b: f64) -> Self {
        Self::term(c, 0, 0, a, b, 0.0)
    }

    /// `c t^tp x^xp`.
    pub fn monomial(c: f64, tp: u32, xp: u32) -> Self {
        Self::term(c, tp, xp, 0.0, 0.0, 0.0)
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn eval_complex(&self, t: C64, x: C64) -> C64 {
        self.terms.iter().map(|term| term.eval(t, x)).sum()
    }

    pub fn eval(&self, t: f64, x: f64) -> f64 {
        self.eval_complex(C64::new(t, 0.0), C64::new(x, 0.0)).re
    }

    pub fn dt(&self) -> Self {
        let mut out = Self::zero();
        for &term in &self.terms {
            if term.tp > 0 {
                out.push(Term {
                    tp: term.tp - 1,
                    ..term.with_coef(term.coef * term.tp as f64)
                });
            }
            out.push(term.with_coef(term.coef * term.bt));
            out.push(Term {
                tp: term.tp + 1,
                ..term.with_coef(2.0 * term.coef * term.qt)
            });
        }
        out
    }

    pub fn dx(&self) -> Self {
        let mut out = Self::zero();
        for &term in &self.terms {
            if term.xp > 0 {
                out.push(Term {
                    xp: term.xp - 1,
                    ..term.with_coef(term.coef * term.xp as f64)
                });
            }
            out.push(term.with_coef(term.coef * term.ax));
        }
        out
    }

    fn push(&mut self, term: Term) {
        if term.coef != 0.0 {
            self.terms.push(term);
        }
    }
}

impl Add for Field {
    type Output = Field;
    fn add(mut self, rhs: Field) -> Field {
        self.terms.extend(rhs.terms);
        self
    }
}

impl Neg for Field {
    type Output = Field;
    fn neg(mut self) -> Field {
        for t in &mut self.terms {
            t.coef = -t.coef;
        }
        self
    }
}

impl Mul<f64> for Field {
    type Output = Field;
    fn mul(self, c: f64) -> Field {
        Field {
            terms: self
                .terms
                .into_iter()
                .filter(|t| c * t.coef != 0.0)
                .map(|t| t.with_coef(c * t.coef))
                .collect(),
        }
    }
}
