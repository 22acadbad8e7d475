use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by graph construction and the analyses built on top of it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("graph is disconnected")]
    DisconnectedGraph,
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("vertex {0:?} has non-positive or non-finite measure")]
    NonpositiveMeasure(String),
    #[error("edge {0:?}-{1:?} has non-positive or non-finite weight")]
    NegativeWeight(String, String),
    #[error("self-loop at vertex {0:?}")]
    SelfLoop(String),
    #[error("edge {0:?}-{1:?} listed more than once")]
    DuplicateEdge(String, String),
    #[error("vertex {0:?} listed more than once")]
    DuplicateVertex(String),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("graph has {got} vertices, limit is {limit}")]
    TooManyVertices { got: usize, limit: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("cartesian product requires unit measure on both factors")]
    NonUnitMeasure,
    #[error("{0:?}-{1:?} is not an edge")]
    NotAnEdge(String, String),
    #[error("function has {got} values, graph has {expected} vertices")]
    DomainMismatch { expected: usize, got: usize },
    #[error("index {index} out of range for {len} eigenpairs")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("exact Frobenius search limited to {limit} vertices, got {got}")]
    TooLargeForExact { got: usize, limit: usize },
    #[error("graph is not combinatorially a hypercube")]
    NotAHypercube,
    #[error("curvature bound K must be positive, got {0}")]
    NonpositiveK(f64),
    #[error("spectral data does not belong to this graph")]
    SpectralMismatch,
    #[error("restriction map at {vertex:?} is singular or ill-conditioned (condition {condition:e})")]
    SingularRestrictionMap { vertex: String, condition: f64 },
    #[error("vertex {vertex:?} has degree {degree} > level {level}")]
    DegreeExceedsLevel { vertex: String, degree: usize, level: usize },
    #[error("vertices {0:?} and {1:?} are not at distance 2")]
    NotDistanceTwo(String, String),
}

impl Error {
    /// Stable machine-readable identifier.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DisconnectedGraph => "DisconnectedGraph",
            Error::EmptyGraph => "EmptyGraph",
            Error::NonpositiveMeasure(_) => "NonpositiveMeasure",
            Error::NegativeWeight(..) => "NegativeWeight",
            Error::SelfLoop(_) => "SelfLoop",
            Error::DuplicateEdge(..) => "DuplicateEdge",
            Error::DuplicateVertex(_) => "DuplicateVertex",
            Error::UnknownVertex(_) => "UnknownVertex",
            Error::TooManyVertices { .. } => "TooManyVertices",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::NonUnitMeasure => "NonUnitMeasure",
            Error::NotAnEdge(..) => "NotAnEdge",
            Error::DomainMismatch { .. } => "DomainMismatch",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::TooLargeForExact { .. } => "TooLargeForExact",
            Error::NotAHypercube => "NotAHypercube",
            Error::NonpositiveK(_) => "NonpositiveK",
            Error::SpectralMismatch => "SpectralMismatch",
            Error::SingularRestrictionMap { .. } => "SingularRestrictionMap",
            Error::DegreeExceedsLevel { .. } => "DegreeExceedsLevel",
            Error::NotDistanceTwo(..) => "NotDistanceTwo",
        }
    }

    /// True for errors where the input was well formed but the requested
    /// computation is outside what the library will attempt.
    pub fn is_refusal(&self) -> bool {
        matches!(
            self,
            Error::TooLargeForExact { .. }
                | Error::NotAHypercube
                | Error::SingularRestrictionMap { .. }
                | Error::DegreeExceedsLevel { .. }
                | Error::NotDistanceTwo(..)
                | Error::SpectralMismatch
        )
    }
}
