use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("subsystem index {index} out of range for a layout with {factors} factors")]
    IndexOutOfRange { index: usize, factors: usize },

    #[error("operator is not Hermitian (max |A - A^dagger| = {0:e})")]
    NotHermitian(f64),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("ground space is {0}-fold degenerate; the zero-temperature state is not unique")]
    DegenerateGround(usize),

    #[error("decay rate requested at zero frequency but no zero-frequency policy is configured")]
    ZeroFrequency,

    #[error("steady state is not unique: Liouvillian null space has dimension {0}")]
    DegenerateSteadyState(usize),

    #[error("single-qubit state is not diagonal in the energy basis (|rho_01| = {0:e})")]
    NotDiagonal(f64),

    #[error("eigendecomposition failed: {0}")]
    Decomposition(String),

    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("the Markovian family to optimise over is empty")]
    EmptyFamily,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("invalid regression targets: {0}")]
    Targets(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by user input (configuration, presets, targets)
    /// rather than by a numerical failure.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::UnknownPreset(_)
                | Error::Targets(_)
                | Error::Json(_)
                | Error::InvalidParameter(_)
        )
    }
}
