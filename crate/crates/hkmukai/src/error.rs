//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failures raised by the exact-arithmetic and lattice operations.
///
/// Each variant corresponds to a violated precondition; results that are
/// legitimately negative (no solution, no isometry found, no transport word)
/// are returned as values instead.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("integrality required: {0}")]
    NotIntegral(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("isotropic vector: {0}")]
    Isotropic(String),
    #[error("vector outside the lattice: {0}")]
    OutsideLattice(String),
    #[error("unknown name: {0}")]
    UnknownName(String),
    #[error("very-general class required: {0}")]
    VeryGeneralRequired(String),
    #[error("degenerate Gram matrix: {0}")]
    Degenerate(String),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotIntegral(_) => "not_integral",
            Error::Dimension(_) => "dimension",
            Error::Invalid(_) => "invalid",
            Error::Isotropic(_) => "isotropic",
            Error::OutsideLattice(_) => "outside_lattice",
            Error::UnknownName(_) => "unknown_name",
            Error::VeryGeneralRequired(_) => "very_general_required",
            Error::Degenerate(_) => "degenerate",
            Error::CapExceeded(_) => "cap_exceeded",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
