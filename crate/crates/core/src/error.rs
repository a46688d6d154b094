use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix data of length {len} is not square")]
    NotSquare { len: usize },
    #[error("observable is not Hermitian")]
    NonHermitianObservable,
    #[error("expectation value has imaginary residual {0:e}")]
    ImaginaryResidualExceeded(f64),
    #[error("observable does not have a ±1 spectrum")]
    NonDichotomicObservable,
    #[error("input count {0} is invalid (need m >= 2)")]
    InvalidInputCount(usize),
    #[error("dimension {0} is invalid (need d >= 2)")]
    InvalidDimension(usize),
    #[error("Bob component is not dichotomic; the observable set does not anticommute")]
    NonUnitalComponent,
    #[error("unsharpness parameter {0} outside [0, 1]")]
    LambdaOutOfRange(f64),
    #[error("outcome probability {0:e} is too small to condition on")]
    ZeroProbabilityBranch(f64),
    #[error("subsystem index {site} out of range for {count} subsystems")]
    InvalidSubsystem { site: usize, count: usize },
    #[error("not a density matrix")]
    NotADensityMatrix,
    #[error("scenario has an empty schedule")]
    EmptySchedule,
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("schedule has {got} positions but position {needed} was requested")]
    ScheduleTooShort { needed: usize, got: usize },
    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("resource cap exceeded at n = {n}, m = {m}")]
    ResourceLimitExceeded { n: usize, m: usize },
    #[error("approximate bound undefined at k = {k}: 1/seed^2 - k + 1 = {denominator}")]
    BoundDomainExceeded { k: usize, denominator: f64 },
    #[error("degenerate measurement direction: omega = {0:e}")]
    DegenerateDirection(f64),
    #[error("state does not factorize across the two edges (distance {0:e})")]
    NotFactorized(f64),
}
