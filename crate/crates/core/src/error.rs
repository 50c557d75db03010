use thiserror::Error;

/// Errors raised across the library.
///
/// Variants are grouped so the CLI can map them onto its exit-code contract:
/// configuration problems, violated preconditions, and numerical diagnostics.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numerical integrity check failed: {0}")]
    Numerical(String),

    #[error("invalid model parameters: {0}")]
    Model(String),

    #[error("loop is not cyclic: pulse area {area} differs from pi by {deviation:.3e}")]
    NotCyclic { area: f64, deviation: f64 },

    #[error("grid too coarse: {0}")]
    Resolution(String),

    #[error("gauge transformation is not single-valued: |V(end) - V(start)| = {0:.3e}")]
    GaugeViolation(f64),

    #[error("frames span different subspaces (largest principal-angle sine {0:.3e})")]
    SpanMismatch(f64),

    #[error("unsupported envelope: {0}")]
    UnsupportedEnvelope(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
