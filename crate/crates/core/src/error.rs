use thiserror::Error;

/// Errors raised across the crate. Numeric payloads are reported as `f64`
/// regardless of the scalar type in use.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{p} is not coprime to {n}")]
    NotCoprime { p: usize, n: usize },
    #[error("value {value} outside the admissible range: {what}")]
    OutOfRange { what: &'static str, value: f64 },
    #[error("invalid coupling: {0}")]
    InvalidCoupling(String),
    #[error("integer identity failed: {0}")]
    VerificationFailed(String),
    #[error("product truncation would need more than {cap} factors (|Im z| = {im})")]
    TruncationOverflow { im: f64, cap: usize },
    #[error("argument {re}{im:+}i is at a lattice point of the s-function")]
    PoleAtLatticePoint { re: f64, im: f64 },
    #[error("sum of xi deviates from pi by {deviation}")]
    NotOnAffinePlane { deviation: f64 },
    #[error("point is not interior to the simplex (smallest slack {min_slack})")]
    NotInterior { min_slack: f64 },
    #[error("singular denominator in entry ({row}, {col})")]
    SingularDenominator { row: usize, col: usize },
    #[error("weight z_{index} = {value} is not positive")]
    NonPositiveWeight { index: usize, value: f64 },
    #[error("negative radicand {value} in component ({row}, {col})")]
    NegativeRadicand { row: usize, col: usize, value: f64 },
    #[error("spectral parameter {re}{im:+}i lies on the period lattice")]
    SpectralParameterOnLattice { re: f64, im: f64 },
    #[error("point is within {margin} of the simplex boundary (step {h})")]
    TooCloseToBoundary { margin: f64, h: f64 },
    #[error("step size underflow at t = {t} (h = {h})")]
    StepSizeUnderflow { t: f64, h: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
