use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("root iteration did not converge after {iterations} iterations (worst residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("polynomial is identically zero")]
    ZeroPolynomial,

    #[error("polynomial is identically zero; its zero set is a continuum")]
    IdenticallyZero,

    #[error("leading coefficient in x2 vanishes identically")]
    DegenerateLeadingCoefficient,

    #[error("evaluation point {z} lies on a pole of the potential")]
    AtPole { z: Complex64 },

    #[error("normal form is undefined at the origin")]
    UndefinedAtOrigin,

    #[error("exponent n = 1 has a logarithmic potential, not a monomial one")]
    ExcludedExponent,

    #[error("equilibrium at {location} has multiplicity {multiplicity}")]
    MultipleRoot {
        location: Complex64,
        multiplicity: usize,
    },

    #[error("equilibrium configuration matches none of the cubic cases: {0}")]
    UnclassifiedConfiguration(String),

    #[error("alpha must be nonzero")]
    ZeroAlpha,

    #[error("crossing pairs form a period annulus around x = {center}")]
    CenterContinuum { center: f64 },

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("resultant vanishes identically: infinitely many crossing pairs")]
    ContinuumDetected,

    #[error("field is not finite on the contour at {z}")]
    FieldSingularOnCurve { z: Complex64 },

    #[error("closed-form flow undefined: {0}")]
    DomainViolation(String),

    #[error("integrator exceeded {0} steps")]
    StepLimit(usize),

    #[error("field at x = {x} does not point into the {side} half-plane")]
    NotEntering { x: f64, side: &'static str },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
