//! Finite-dimensional laboratory for evolution families and their
//! generators.
//!
//! The crate realises, on dense matrices and uniform grids, the logarithmic
//! representation of generators, the Cole-Hopf map between the heat and
//! Burgers equations, the x-direction evolution of the heat equation through
//! Fourier diagonalisation and subordination, and the algebraic identities
//! by which the nonlinear advection term emerges from a linear solution.

pub mod cole_hopf;
pub mod error;
pub mod evolution;
pub mod logrep;
pub mod nonlinear_emergence;
pub mod operator_core;
pub mod quadrature;
pub mod report;
pub mod spectral_x;

pub use error::{LabError, Result};
pub use operator_core::{DenseOperator, Spectrum};
pub use report::{ReportBuilder, VerificationReport};
