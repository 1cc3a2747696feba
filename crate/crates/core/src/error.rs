use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("state vanishes identically: {0}")]
    ZeroFunction(String),

    /// The wavefunction is (numerically) zero, so its phase is undefined.
    #[error("configuration is a node of the wavefunction (|psi| = {modulus:e}, threshold {threshold:e})")]
    Node { modulus: f64, threshold: f64 },

    #[error("point outside the domain: {0}")]
    Domain(String),

    #[error("capability exceeded: {0}")]
    Capability(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
