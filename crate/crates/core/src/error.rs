use crate::units::Dimension;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: Dimension, found: Dimension },

    #[error("non-finite value {0}")]
    NonFinite(f64),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unknown preset `{name}` (known: {known})")]
    UnknownPreset { name: String, known: String },

    #[error("unknown transition {0}")]
    UnknownTransition(String),

    #[error("initial state is not normalized (norm² = {0})")]
    NotNormalized(f64),

    #[error("relative phase error undefined: mean phase is zero")]
    ZeroMeanPhase,

    #[error("molecule `{0}` lacks the constants required for this calculation")]
    MissingConstants(String),

    #[error("no quadrupole coupling for nuclear spin I = {0} (< 1)")]
    NoQuadrupole(f64),

    #[error("invalid angular momentum: {0}")]
    AngularMomentum(String),

    #[error("occupied sites overlap at {0:?}")]
    OverlappingSites([i64; 3]),

    #[error("scenario `{scenario}` is not compatible with preset `{preset}`")]
    IncompatibleScenario { scenario: String, preset: String },

    #[error("unknown parameter override `{0}`")]
    UnknownOverride(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
