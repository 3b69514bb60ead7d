use thiserror::Error;

/// Failures raised by state construction, evolution and bound evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("state does not fit the momentum grid (edge/peak amplitude ratio {ratio:e})")]
    GridOverflow { ratio: f64 },
    #[error("outside the low-energy regime: {0}")]
    RegimeViolation(String),
    #[error("position derivative under-resolved (Richardson disagreement {0:e})")]
    DerivativeNoise(f64),
    #[error("trace-distance threshold not reached before t_max = {0}")]
    NotReached(f64),
    #[error("energy spread is zero")]
    ZeroSpread,
    #[error("time-dilation factor non-positive on the momentum grid (minimum {0})")]
    NegativeDilation(f64),
    #[error("state is not symmetric (|Cov(x,v)| relative to spreads = {0:e})")]
    SymmetryViolation(f64),
    #[error("dilation operator non-positive on the (p, energy) grid (minimum {0})")]
    DilationNonPositive(f64),
    #[error("Cov(p^2, tau^2) = {0:e} is negative")]
    CorrelationAssumptionViolated(f64),
    #[error("invalid input: {0}")]
    ConfigInvalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
