use thiserror::Error;

/// Errors raised by the algebra, geometry and operator layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular evaluation: {0}")]
    Singularity(String),

    /// An off-surface integral was requested too close to the surface (or a
    /// volume grid point) for the quadrature to be trusted.
    #[error("near-singular evaluation: distance {distance:.3e} is below the guard {guard:.3e}")]
    NearSingular { distance: f64, guard: f64 },

    #[error(
        "degenerate coefficients c1 = {c1}, c2 = {c2}: c1 = \u{b1}c2 does not determine the jet"
    )]
    Degenerate { c1: f64, c2: f64 },

    #[error("ill-conditioned local system at node {node} (pivot ratio {ratio:.3e})")]
    Conditioning { node: usize, ratio: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("unknown kind `{0}`")]
    UnknownKind(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
