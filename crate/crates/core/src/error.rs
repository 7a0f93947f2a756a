use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid reaction: {0}")]
    InvalidReaction(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("shooting failure at z = {z:.6}: {reason}")]
    ShootingFailure { z: f64, reason: String },

    #[error("tail too short: smallest sampled value {min_phi:e} does not reach {needed:e}")]
    TailTooShort { min_phi: f64, needed: f64 },

    #[error("blow-up at t = {t}: non-finite value at node {node}")]
    BlowUp { t: f64, node: usize },

    #[error("construction failure at t = {t}, x = {x}: {reason}")]
    ConstructionFailure { t: f64, x: f64, reason: String },

    #[error("no crossing of {threshold} before t = {t_cap}")]
    DetectionTimeout { threshold: f64, t_cap: f64 },

    #[error("degenerate reaction: {0}")]
    DegenerateReaction(String),

    #[error("integrator failure: {0}")]
    Integrator(String),

    #[error("i/o: {0}")]
    Io(String),

    #[error("malformed table: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
