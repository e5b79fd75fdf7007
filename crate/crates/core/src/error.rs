use thiserror::Error;

use crate::ptrans::Ambient;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ambient mismatch: {left} vs {right}")]
    AmbientMismatch { left: Ambient, right: Ambient },

    #[error("invalid ambient: {0}")]
    InvalidAmbient(String),

    #[error("point {point} is not in ambient {ambient}")]
    PointOutsideAmbient { point: usize, ambient: Ambient },

    #[error("point {0} appears twice in the domain")]
    DuplicateDomainPoint(usize),

    #[error("map is not injective: {0} is hit twice")]
    NotInjective(usize),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("vertex {0} is not a vertex of the graph")]
    InvalidVertex(usize),

    #[error("{family} needs n >= {min}, got {n}")]
    TooSmall {
        family: &'static str,
        min: usize,
        n: usize,
    },

    #[error("graph has {vertices} vertices, above the enumeration cap of {cap}")]
    EnumerationCap { vertices: usize, cap: usize },

    #[error("closure exceeded the element cap of {0}")]
    ElementCap(usize),

    #[error("generator {label} is not defined for n = {n}")]
    InvalidGenerator { label: String, n: usize },

    #[error("{0}")]
    NotInMonoid(String),

    #[error("arc {arc} is not contained in the domain")]
    ArcNotInDomain { arc: String },

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("{0}")]
    Usage(String),

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
