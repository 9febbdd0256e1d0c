//! Error type shared by all engines.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuenchError {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("group velocity profile is degenerate near k = {k}: one-sided limits differ ({left} vs {right})")]
    DegenerateVelocityProfile { k: f64, left: f64, right: f64 },

    #[error("v_max = 0: quench Hamiltonian has no dispersion, no revival prediction possible")]
    ZeroVelocity,

    #[error("magnetization {0} outside [0, 1] beyond tolerance (upstream bug)")]
    MagnetizationOutOfRange(f64),

    #[error("basis dimension {dim} exceeds cap {cap}; use the propagator path")]
    DimensionCap { dim: usize, cap: usize },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("propagator tolerance not met: {0}")]
    PropagatorTolerance(String),

    #[error("series too short: {0}")]
    SeriesTooShort(String),

    #[error("need at least {need} events, got {got}")]
    TooFewEvents { need: usize, got: usize },

    #[error("visibility window [{lo}, {hi}] outside series span [{t0}, {t1}]")]
    WindowOutOfRange { lo: f64, hi: f64, t0: f64, t1: f64 },

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, QuenchError>;
