use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure mode surfaced by the library.
///
/// Variant names double as the stable error identifiers rendered by the CLI.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("polynomials live in different rings: {0}")]
    RingMismatch(String),
    #[error("quotient is infinite-dimensional: {0}")]
    InfiniteDimensional(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("eigensolver did not converge: {0}")]
    NonConvergence(String),
    #[error("cones {0:?} and {1:?} meet in a non-face")]
    OverlappingCones(Vec<usize>, Vec<usize>),
    #[error("no cone of the fan contains the sum of edges {0:?}")]
    NoConeContains(Vec<usize>),
    #[error("linear relation does not hold: {0}")]
    RelationFails(String),
    #[error("polytope is empty")]
    Empty,
    #[error("polytope is unbounded")]
    Unbounded,
    #[error("translated polytope is not integral: {0}")]
    DivisibilityFails(String),
    #[error("linear system is inconsistent: {0}")]
    Inconsistent(String),
    #[error("chop removes vertex {0} which is not on the chopped face")]
    ChopTooDeep(String),
    #[error("bundle is not monotone: {0}")]
    NotMonotone(String),
    #[error("index set {0:?} does not define a face of codimension >= 2")]
    NotAFace(Vec<usize>),
    #[error("Newton iteration diverged: {0}")]
    NewtonDiverged(String),
    #[error("mirror check failed in clause {clause}: {detail}")]
    MirrorMismatch { clause: String, detail: String },
    #[error("fan edges lie in a closed half-space; certificate direction {0:?}")]
    HalfSpaceFan(Vec<String>),
    #[error("critical values not separated: {0}")]
    SeparationFailed(String),
    #[error("tolerance exceeded: worst residual {worst:e} > {tolerance:e}")]
    ToleranceExceeded { worst: f64, tolerance: f64 },
    #[error("contour passes within {0:e} of the spectrum")]
    ContourHitsSpectrum(f64),
    #[error("projector is not idempotent: defect {0:e}")]
    IdempotencyFailed(f64),
    #[error("eigenvalue cluster changes along the ray: {0}")]
    ClusterAmbiguous(String),
    #[error("eigenvalue is not semisimple: {0}")]
    NotSemisimple(String),
    #[error("eigenvalue derivatives collide: {0}")]
    DerivativesCollide(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("eigenvector clustering is ambiguous: {0}")]
    ClusteringAmbiguous(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Short identifier, e.g. `NotMonotone`.
    pub fn name(&self) -> &'static str {
        match self {
            Error::RingMismatch(_) => "RingMismatch",
            Error::InfiniteDimensional(_) => "InfiniteDimensional",
            Error::NonSquare { .. } => "NonSquare",
            Error::NonConvergence(_) => "NonConvergence",
            Error::OverlappingCones(..) => "OverlappingCones",
            Error::NoConeContains(_) => "NoConeContains",
            Error::RelationFails(_) => "RelationFails",
            Error::Empty => "Empty",
            Error::Unbounded => "Unbounded",
            Error::DivisibilityFails(_) => "DivisibilityFails",
            Error::Inconsistent(_) => "Inconsistent",
            Error::ChopTooDeep(_) => "ChopTooDeep",
            Error::NotMonotone(_) => "NotMonotone",
            Error::NotAFace(_) => "NotAFace",
            Error::NewtonDiverged(_) => "NewtonDiverged",
            Error::MirrorMismatch { .. } => "MirrorMismatch",
            Error::HalfSpaceFan(_) => "HalfSpaceFan",
            Error::SeparationFailed(_) => "SeparationFailed",
            Error::ToleranceExceeded { .. } => "ToleranceExceeded",
            Error::ContourHitsSpectrum(_) => "ContourHitsSpectrum",
            Error::IdempotencyFailed(_) => "IdempotencyFailed",
            Error::ClusterAmbiguous(_) => "ClusterAmbiguous",
            Error::NotSemisimple(_) => "NotSemisimple",
            Error::DerivativesCollide(_) => "DerivativesCollide",
            Error::DimensionMismatch(..) => "DimensionMismatch",
            Error::ClusteringAmbiguous(_) => "ClusteringAmbiguous",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}
