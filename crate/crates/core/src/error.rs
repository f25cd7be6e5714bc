use alloc::string::String;

/// Failure modes shared by every numerical routine in the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("resolvent is singular at lambda = {re} + {im}i (condition estimate {condition:e})")]
    SingularResolvent { re: f64, im: f64, condition: f64 },
    #[error(
        "contour angle {rho} does not separate the spectrum (spectral angle {spectral_angle}, admissible upper limit {upper})"
    )]
    ContourTooTight { rho: f64, spectral_angle: f64, upper: f64 },
    #[error("quadrature did not converge: refinement defect {defect:e} exceeds {tolerance:e}")]
    NotConverged { defect: f64, tolerance: f64 },
    #[error("norm specification incompatible with dimension {dim}: {reason}")]
    IncompatibleSpec { dim: usize, reason: String },
    #[error("operator has an eigenvalue at the origin; fractional and imaginary powers are undefined")]
    SingularBase,
    #[error("A + B is singular (condition estimate {condition:e})")]
    SingularSum { condition: f64 },
    #[error("gamma function has a pole at {re} + {im}i")]
    PoleAt { re: f64, im: f64 },
    #[error("Re s = {re_s} lies outside the strip ({lower}, {upper})")]
    StripViolation { re_s: f64, lower: f64, upper: f64 },
    #[error("weight exponent {theta} outside ({lower}, {upper}) for symbol {symbol}")]
    WeightOutOfRange { theta: f64, lower: f64, upper: f64, symbol: String },
    #[error("kernel angle {rho} outside the admissible range ({lower}, {upper})")]
    AngleViolation { rho: f64, lower: f64, upper: f64 },
    #[error("symbol {symbol} evaluated on its branch cut at {re} + {im}i")]
    BranchCut { symbol: String, re: f64, im: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operator is not diagonalizable to working accuracy (eigenvector condition {condition:e})")]
    NotDiagonalizable { condition: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = core::result::Result<T, Error>;
