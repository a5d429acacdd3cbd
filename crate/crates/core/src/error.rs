use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("missing parameter `{0}`")]
    MissingParameter(String),

    #[error("unknown {kind} `{name}` (known: {known})")]
    UnknownKind {
        kind: &'static str,
        name: String,
        known: String,
    },

    #[error("non-finite sample at node {index} (x = {x})")]
    NonFiniteSample { index: usize, x: f64 },

    #[error("value {value} outside tabulated range [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("degenerate shock: phi_minus == phi_plus == {0}")]
    DegenerateShock(f64),

    #[error("not a shock: {0}")]
    NotAShock(String),

    #[error("unclassifiable data: asymptotic limit is zero")]
    Unclassifiable,

    #[error("singular tridiagonal system: zero pivot at row {0}")]
    SingularSystem(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("numerical blow-up at step {step} (t = {t}): {reason}")]
    BlowUp { step: usize, t: f64, reason: String },

    #[error("oscillation at step {step} (t = {t}): {reason}")]
    Oscillation { step: usize, t: f64, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no coalescence: {0}")]
    NoCoalescence(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("entropy condition violated: {0}")]
    EntropyViolation(String),

    #[error("no deficit: {0}")]
    NoDeficit(String),

    #[error("{path}:{line}: {reason}")]
    Parse {
        path: PathBuf,
        line: u64,
        reason: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }
}
