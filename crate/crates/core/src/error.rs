//! Error type shared by every numerical module.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

/// Failure of a numerical operation.
///
/// Every variant names the operation that raised it so that reports and the
/// command-line harness can point at the offending call.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum LabError {
    #[error("{op}: non-finite value in {what}")]
    NonFinite { op: &'static str, what: String },

    #[error("{op}: shape mismatch: {detail}")]
    Shape { op: &'static str, detail: String },

    #[error("{op}: invalid parameter `{param}`: {detail}")]
    InvalidParameter {
        op: &'static str,
        param: &'static str,
        detail: String,
    },

    #[error("{op}: result overflows the floating-point range ({detail})")]
    Overflow { op: &'static str, detail: String },

    #[error("{op}: eigenvalue {re:.6e}{im:+.6e}i lies within {distance:.3e} of the branch cut (-inf, 0]")]
    BranchCut {
        op: &'static str,
        re: f64,
        im: f64,
        distance: f64,
    },

    #[error("{op}: matrix is singular (smallest singular value {sigma_min:.3e} <= {threshold:.3e})")]
    Singular {
        op: &'static str,
        sigma_min: f64,
        threshold: f64,
    },

    #[error("{op}: iteration did not converge: {detail}")]
    Convergence { op: &'static str, detail: String },

    #[error("{op}: quadrature failed: {detail}")]
    Quadrature { op: &'static str, detail: String },

    #[error("{op}: coordinate {value} outside the domain [{lo}, {hi}]")]
    Domain {
        op: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("{op}: coordinate label `{got}` does not match family label `{expected}`")]
    CoordinateMismatch {
        op: &'static str,
        expected: String,
        got: String,
    },

    #[error("{op}: u = {value:.3e} at node {index} is not positive; log u is undefined")]
    Positivity { op: &'static str, index: usize, value: f64 },

    #[error("{op}: scheme produced a non-finite value at step {step}")]
    Stability { op: &'static str, step: usize },

    #[error("{op}: time step {dt:.3e} violates the stability limit {limit:.3e}")]
    Cfl { op: &'static str, dt: f64, limit: f64 },

    #[error("{op}: precondition violated: {detail}")]
    Precondition { op: &'static str, detail: String },

    #[error("{op}: denominator {name} vanishes on the evaluation window near (t, x) = ({t}, {x})")]
    DivisionWindow {
        op: &'static str,
        name: &'static str,
        t: f64,
        x: f64,
    },
}

impl LabError {
    /// Name of the operation that raised the error.
    pub fn op(&self) -> &'static str {
        match self {
            LabError::NonFinite { op, .. }
            | LabError::Shape { op, .. }
            | LabError::InvalidParameter { op, .. }
            | LabError::Overflow { op, .. }
            | LabError::BranchCut { op, .. }
            | LabError::Singular { op, .. }
            | LabError::Convergence { op, .. }
            | LabError::Quadrature { op, .. }
            | LabError::Domain { op, .. }
            | LabError::CoordinateMismatch { op, .. }
            | LabError::Positivity { op, .. }
            | LabError::Stability { op, .. }
            | LabError::Cfl { op, .. }
            | LabError::Precondition { op, .. }
            | LabError::DivisionWindow { op, .. } => op,
        }
    }

    /// True for errors caused by the numbers themselves (branch cuts,
    /// singular matrices, overflow, failed iterations) rather than by an
    /// invalid request.
    pub fn is_numerical(&self) -> bool {
        !matches!(
            self,
            LabError::Shape { .. }
                | LabError::InvalidParameter { .. }
                | LabError::Domain { .. }
                | LabError::CoordinateMismatch { .. }
                | LabError::Cfl { .. }
                | LabError::Precondition { .. }
        )
    }
}
