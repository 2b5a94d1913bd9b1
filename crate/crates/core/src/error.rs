use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("missing key `{0}`")]
    MissingKey(String),

    #[error("`{field}` has length {found}, expected {expected}")]
    DimensionMismatch {
        field: String,
        expected: usize,
        found: usize,
    },

    #[error("`{field}` must be non-negative, got {value}")]
    NegativeValue { field: String, value: f64 },

    #[error("invalid value for `{field}`: {reason}")]
    InvalidValue { field: String, reason: String },

    #[error("config parse error: {0}")]
    Parse(String),

    #[error("unknown mode label `{0}`")]
    UnknownMode(String),

    #[error("invalid partition `{spec}`: {reason}")]
    InvalidPartition { spec: String, reason: String },

    #[error("matrix dimension mismatch: {0}")]
    Shape(String),

    #[error("drift matrix is unstable (spectral abscissa {abscissa:.6e})")]
    Unstable { abscissa: f64 },

    #[error("singular linear system in {0}")]
    Singular(&'static str),

    #[error("non-finite covariance at t = {time} (spectral abscissa {abscissa:.6e})")]
    NonFinite { time: f64, abscissa: f64 },

    #[error("eigenvalue solver did not converge for a {0}x{0} matrix")]
    EigenSolver(usize),

    #[error("symplectic spectrum is not paired: {0}")]
    UnpairedSpectrum(String),

    #[error("input is not a physical covariance matrix: {0}")]
    Unphysical(String),

    #[error("steady-state residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    Residual { residual: f64, tolerance: f64 },

    #[error("fixed-point iteration did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("invalid parameter path `{0}`")]
    InvalidParameterPath(String),

    #[error("time grid: {0}")]
    TimeGrid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidValue {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad user input rather than numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::MissingKey(_)
                | Error::DimensionMismatch { .. }
                | Error::NegativeValue { .. }
                | Error::InvalidValue { .. }
                | Error::Parse(_)
                | Error::UnknownMode(_)
                | Error::InvalidPartition { .. }
                | Error::UnknownPreset(_)
                | Error::InvalidParameterPath(_)
                | Error::TimeGrid(_)
                | Error::Io(_)
        )
    }
}
