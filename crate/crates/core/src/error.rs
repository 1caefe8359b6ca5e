use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("group table is not associative at ({0},{1},{2})")]
    NotAssociative(usize, usize, usize),
    #[error("group table has no two-sided identity")]
    NoIdentity,
    #[error("element {0} has no two-sided inverse")]
    NoInverse(usize),
    #[error("malformed group table: {0}")]
    BadTable(String),
    #[error("unknown group preset '{0}'")]
    UnknownGroup(String),
    #[error("group of order {order} exceeds the configured cap {cap}")]
    GroupTooLarge { order: usize, cap: usize },
    #[error("phase at ({g},{h}) is {dist:.3e} away from the nearest {m}-th root of unity")]
    SnapFailure { g: usize, h: usize, m: usize, dist: f64 },
    #[error("h2 enumeration requested beyond caps (|G| = {order}, m = {m})")]
    TooLarge { order: usize, m: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("site {0} out of range")]
    SiteOutOfRange(usize),
    #[error("closure did not converge: {0}")]
    NoConvergence(String),
    #[error("algebra is not central simple: {0}")]
    NotCentralSimple(String),
    #[error("algebra is not semisimple: {0}")]
    NotSemisimple(String),
    #[error("no intertwiner exists: {0}")]
    NoIntertwiner(String),
    #[error("intertwiner kernel has dimension {0} > 1")]
    AmbiguousKernel(usize),
    #[error("unitary parity mismatch: {0}")]
    ParityMismatch(String),
    #[error("scalar extraction failed with residual {0:.3e}")]
    ScalarExtractionFailure(f64),
    #[error("automorphism is not equivariant: {0}")]
    NotEquivariant(String),
    #[error("region out of range: {0}")]
    RegionOutOfRange(String),
    #[error("not nearest neighbour after grouping: {0}")]
    NotNearestNeighbourAfterGrouping(String),
    #[error("overlap factorization hypothesis violated: {0}")]
    FactorizationHypothesisViolated(String),
    #[error("index is inconsistent between the two routes: {0}")]
    InconsistentIndex(String),
    #[error("windows do not match: {0}")]
    WindowMismatch(String),
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("not a representation: {0}")]
    NotARepresentation(String),
    #[error("not a projective representation: {0}")]
    NotProjective(String),
    #[error("block unitary is not even and G-invariant: {0}")]
    BlockUnitaryNotEquivariant(String),
    #[error("index is not trivial: {0}")]
    IndexNotTrivial(String),
    #[error("no isomorphism of G-systems found: {0}")]
    IsomorphismNotFound(String),
    #[error("ambient dimension {dim} exceeds cap {cap}")]
    AmbientTooLarge { dim: usize, cap: usize },
    #[error("inner grading not found: {0}")]
    NotInnerSuper(String),
    #[error("empty intertwiner space")]
    EmptyIntertwinerSpace,
    #[error("intertwiner is singular")]
    SingularY,
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// Variant name, stable across message changes.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotAssociative(..) => "NotAssociative",
            Error::NoIdentity => "NoIdentity",
            Error::NoInverse(..) => "NoInverse",
            Error::BadTable(..) => "BadTable",
            Error::UnknownGroup(..) => "UnknownGroup",
            Error::GroupTooLarge { .. } => "GroupTooLarge",
            Error::SnapFailure { .. } => "SnapFailure",
            Error::TooLarge { .. } => "TooLarge",
            Error::DimensionMismatch(..) => "DimensionMismatch",
            Error::SiteOutOfRange(..) => "SiteOutOfRange",
            Error::NoConvergence(..) => "NoConvergence",
            Error::NotCentralSimple(..) => "NotCentralSimple",
            Error::NotSemisimple(..) => "NotSemisimple",
            Error::NoIntertwiner(..) => "NoIntertwiner",
            Error::AmbiguousKernel(..) => "AmbiguousKernel",
            Error::ParityMismatch(..) => "ParityMismatch",
            Error::ScalarExtractionFailure(..) => "ScalarExtractionFailure",
            Error::NotEquivariant(..) => "NotEquivariant",
            Error::RegionOutOfRange(..) => "RegionOutOfRange",
            Error::NotNearestNeighbourAfterGrouping(..) => "NotNearestNeighbourAfterGrouping",
            Error::FactorizationHypothesisViolated(..) => "FactorizationHypothesisViolated",
            Error::InconsistentIndex(..) => "InconsistentIndex",
            Error::WindowMismatch(..) => "WindowMismatch",
            Error::WindowTooSmall(..) => "WindowTooSmall",
            Error::NotARepresentation(..) => "NotARepresentation",
            Error::NotProjective(..) => "NotProjective",
            Error::BlockUnitaryNotEquivariant(..) => "BlockUnitaryNotEquivariant",
            Error::IndexNotTrivial(..) => "IndexNotTrivial",
            Error::IsomorphismNotFound(..) => "IsomorphismNotFound",
            Error::AmbientTooLarge { .. } => "AmbientTooLarge",
            Error::NotInnerSuper(..) => "NotInnerSuper",
            Error::EmptyIntertwinerSpace => "EmptyIntertwinerSpace",
            Error::SingularY => "SingularY",
            Error::Invalid(..) => "Invalid",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
