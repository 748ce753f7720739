use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid root system: {0}")]
    InvalidRootSystem(String),

    /// The unit lattice failed one of the containment or invariance checks.
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("Weyl group has more than {limit} elements ({partial} enumerated before stopping)")]
    GroupTooLarge { limit: usize, partial: usize },

    #[error("unknown space `{0}`")]
    NotFound(String),

    #[error("not supported: {0}")]
    NotSupported(String),

    /// Signals either a bug or a lattice that slipped past validation.
    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
