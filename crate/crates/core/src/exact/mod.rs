//! Exact arithmetic in cyclotomic fields and dense linear algebra over them.

mod cyclotomic;
mod literal;
mod matrix;

pub use cyclotomic::{lcm, totient, CycloScalar};
pub use literal::{format_rational, parse_rational, parse_scalar, scalar_to_literal};
pub use matrix::{solve_linear, ExactMatrix, Rref, SolutionSet};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("conductor must be positive")]
    ZeroConductor,
    #[error("conductor mismatch: Q(zeta_{0}) vs Q(zeta_{1})")]
    ConductorMismatch(u32, u32),
    #[error("Q(zeta_{0}) is not a subfield of Q(zeta_{1})")]
    NotASubfield(u32, u32),
    #[error("Q(zeta_{0}) does not contain the imaginary unit")]
    NoImaginaryUnit(u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("bad scalar literal: {0}")]
    Literal(String),
}
