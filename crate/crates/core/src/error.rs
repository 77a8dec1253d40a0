use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Hilbert space: {0}")]
    InvalidSpec(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-Hermitian Hamiltonian at t = {t:e} s (anti-Hermitian norm {norm:e})")]
    NonHermitian { t: f64, norm: f64 },

    #[error("schedule error: {0}")]
    Schedule(String),

    #[error("calibration failed: {0}")]
    CalibrationFailed(String),

    #[error("estimation failed: {0}")]
    EstimationFailed(String),

    #[error("linear estimator constraint infeasible (residual {residual:e})")]
    Infeasible { residual: f64 },

    #[error("settings mismatch: {0}")]
    SettingsMismatch(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Json(_) | Error::InvalidParameter(_) | Error::InvalidSpec(_) => 2,
            Error::CalibrationFailed(_) | Error::EstimationFailed(_) | Error::Infeasible { .. } | Error::SettingsMismatch(_) => 3,
            _ => 1,
        }
    }
}
