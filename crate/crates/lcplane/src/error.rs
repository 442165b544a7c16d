//! Error type shared by the whole crate.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LcError {
    #[error("argument {0} outside the domain [{1}, {2}]")]
    Domain(f64, f64, f64),
    #[error("value {0} outside the range of the map")]
    Range(f64),
    #[error("bisection failed to bracket the target value {0}")]
    Convergence(f64),
    #[error("domains and ranges do not chain: {0}")]
    DomainMismatch(String),
    #[error("map does not fix the endpoints of [0, 1]")]
    NotFixingEndpoints,
    #[error("map is not monotone: {0}")]
    NotMonotone(String),
    #[error("map does not fix the origin")]
    NotFixingOrigin,
    #[error("map is not invertible")]
    NotInvertible,
    #[error("cyclic condition violated (residual {0})")]
    CyclicViolation(f64),
    #[error("gauge map is not odd (residual {0})")]
    NotOdd(f64),
    #[error("map is not even (residual {0})")]
    NotEven(f64),
    #[error("gauge recovered from h is inconsistent with k (residual {0})")]
    InconsistentGauge(f64),
    #[error("quadrilateral vertices must be positive distances along the characteristic axes")]
    VerticesNotOnAxes,
    #[error("side map does not fix the endpoints of [0, 1]")]
    NotEndpointFixing,
    #[error("restriction to the half line is not an increasing bijection")]
    NotBijectiveOnHalfLine,
    #[error("derivative is not positive away from the origin")]
    NonPositiveDerivative,
    #[error("Jacobian does not match either Lorentz-conformal form (residual {0})")]
    DegeneratePoint(f64),
    #[error("one-sided slopes fail to converge at the crossing")]
    NondifferentiableCrossing,
    #[error("density must be strictly positive (found {0} at {1})")]
    NonPositiveDensity(f64, f64),
    #[error("a component behaves as a constant on the sample grid")]
    ConstantFunction,
    #[error("symmetry pair image is not unique for {0}")]
    NonUniqueImage(String),
    #[error("characteristic ray misses the lateral side")]
    RayEscapes,
    #[error("rendering window is empty or degenerate")]
    EmptyWindow,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, LcError>;
