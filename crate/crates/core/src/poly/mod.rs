//! Exact sparse multivariate polynomials and Sylvester resultants.

mod coeff;
mod polynomial;
mod resultant;

pub use coeff::{
    integer_gcd, parse_rational, rational_from_f64, rational_to_f64, rational_to_text, Coeff,
    GaussInt, Integer, Rational, RealCoeff,
};
pub use polynomial::{CompiledPoly, GaussPoly, IntPoly, Monomial, Polynomial, RatPoly};
pub use resultant::{bareiss_determinant, sylvester_matrix, sylvester_resultant, UniPolyOverRing};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("variable lists differ: {left:?} vs {right:?}")]
    VariableMismatch { left: Vec<String>, right: Vec<String> },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("expected {expected} values, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("degree too low")]
    DegreeTooLow,
    #[error("division is not exact")]
    InexactDivision,
    #[error("parse error: {0}")]
    Parse(String),
}
