//! Crate-wide error type.

use thiserror::Error;

/// Convenience alias used by every fallible operation in this crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors reported by state construction, circuit evolution, detection, and
/// the protocol runners.
#[derive(Debug, Error)]
pub enum Error {
    /// Adding a photon (or tensoring states) would exceed the registry's
    /// photon cap.
    #[error("photon cap of {cap} photons exceeded")]
    PhotonCapExceeded { cap: u32 },

    /// Two states that must share a mode registry do not.
    #[error("states belong to different mode registries")]
    RegistryMismatch,

    /// A tensor product was requested between states that occupy a common
    /// rail.
    #[error("rail `{rail}` is occupied in both tensor factors")]
    OverlappingRails { rail: String },

    /// A rail label appeared more than once where distinct rails are
    /// required.
    #[error("rail `{rail}` declared more than once")]
    DuplicateRail { rail: String },

    /// A rail label is not present in the registry in use.
    #[error("unknown rail `{rail}`")]
    UnknownRail { rail: String },

    /// The registry would exceed the packed-occupation capacity.
    #[error("{count} rails requested; at most {max} rails are supported")]
    TooManyRails { count: usize, max: usize },

    /// An operation that requires a nonzero state was given (numerically)
    /// zero.
    #[error("state has zero norm")]
    ZeroNorm,

    /// An input that must be normalized is not.
    #[error("input is not normalized: squared norm is {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    /// A supplied matrix that must be unitary is not.
    #[error("matrix is not unitary: max deviation {max_dev:e}")]
    NotUnitary { max_dev: f64 },

    /// A heralding pattern with no probability mass was requested.
    #[error("detection pattern has zero probability")]
    ZeroProbabilityPattern,

    /// The photon layout of a state violates an operation's precondition
    /// (for example, a code rail that does not carry exactly one photon).
    #[error("photon layout violates precondition: {detail}")]
    BadPhotonLayout { detail: String },

    /// Malformed serialized data (state files, circuit files, patterns).
    #[error("malformed data: {detail}")]
    Format { detail: String },

    /// Underlying I/O failure while reading or writing files.
    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// Underlying JSON syntax failure.
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
