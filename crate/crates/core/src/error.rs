use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PulseError {
    #[error("rotation axis is zero but the angle is not")]
    ZeroAxis,

    #[error("sequence has no steps")]
    EmptySequence,

    #[error("step {index}: {field} {reason}")]
    InvalidStep {
        index: usize,
        field: &'static str,
        reason: String,
    },

    #[error("invalid {field}: {reason}")]
    InvalidField { field: String, reason: String },

    #[error("step {index} has area {angle_over_pi}π; only π-pulse trains are supported here")]
    UnsupportedPulseArea { index: usize, angle_over_pi: f64 },

    #[error("time {t} is outside [0, {t_final}]")]
    TimeOutOfRange { t: f64, t_final: f64 },

    #[error("error model out of the perturbative regime: {0}")]
    ErrorModel(String),

    #[error("walk is open (|residual| = {residual:e}); vector area needs a closed curve")]
    OpenWalk { residual: f64 },

    #[error("no feasible γ for θ = {theta}, α = {alpha}: |θ / (4π cos α)| > 1")]
    Infeasible { theta: f64, alpha: f64 },

    #[error("no sign change of the target function on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("unknown sequence name `{0}`")]
    UnknownSequence(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T, E = PulseError> = std::result::Result<T, E>;
