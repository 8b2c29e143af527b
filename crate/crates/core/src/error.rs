use thiserror::Error;

use crate::market::Variant;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("agent {0} is outside the choice function's ground set")]
    UnknownAgent(String),

    #[error("ground set has {size} elements, above the exhaustive cap of {cap}; pass --assume-substitutable to skip")]
    CapExceeded { size: usize, cap: usize },

    #[error("referential integrity: {0}")]
    ReferentialIntegrity(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("a side holds {0} agents; at most 64 are supported")]
    TooManyAgents(usize),

    #[error("operation needs a {expected} market, got {found}")]
    VariantMismatch {
        expected: &'static str,
        found: Variant,
    },

    #[error("matching violates the {variant} constraints: {detail}")]
    VariantViolation { variant: Variant, detail: String },

    #[error("matching is not worker-quasi-stable")]
    NotWorkerQuasiStable,

    #[error("matching is not firm-quasi-stable")]
    NotFirmQuasiStable,

    #[error("matching is not stable")]
    NotStable,

    #[error("no fixed point within {cap} steps; the market is probably not substitutable")]
    NonConvergence { cap: usize },

    #[error("canonical preimage of a stable matching is not stable in the related market")]
    PreimageNotStable,

    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("random market generation failed after {attempts} attempts")]
    GenerationFailed { attempts: usize },
}

impl Error {
    /// Stable machine-readable tag for the CLI's JSON error object.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::UnknownAgent(_) => "UnknownAgent",
            Error::CapExceeded { .. } => "CapExceeded",
            Error::ReferentialIntegrity(_) => "ReferentialIntegrity",
            Error::Schema(_) => "SchemaError",
            Error::Parse(_) => "ParseError",
            Error::Io(_) => "IoError",
            Error::TooManyAgents(_) => "TooManyAgents",
            Error::VariantMismatch { .. } => "VariantMismatch",
            Error::VariantViolation { .. } => "SchemaError",
            Error::NotWorkerQuasiStable => "NotWorkerQuasiStable",
            Error::NotFirmQuasiStable => "NotFirmQuasiStable",
            Error::NotStable => "NotStable",
            Error::NonConvergence { .. } => "NonConvergence",
            Error::PreimageNotStable => "PreimageNotStable",
            Error::BudgetExceeded(_) => "BudgetExceeded",
            Error::GenerationFailed { .. } => "GenerationFailed",
        }
    }
}
