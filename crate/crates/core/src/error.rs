use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("gluing mismatch: {0}")]
    GluingMismatch(String),
    #[error("polygon {0} is not strictly convex")]
    NonConvexPolygon(usize),
    #[error("surface is disconnected")]
    Disconnected,
    #[error("cone angle is not a multiple of pi at class {0}")]
    BadConeAngle(usize),
    #[error("stratum error: {0}")]
    StratumError(String),
    #[error("unknown builtin surface {0:?}")]
    UnknownName(String),
    #[error("singular matrix")]
    SingularMatrix,
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("direction leaves the field")]
    DirectionLeavesField,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no marked point hit within the crossing budget")]
    NoHitWithinBudget,
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("saddle connections are not pairwise disjoint")]
    NotPairwiseDisjoint,
    #[error("unknown format {0:?}")]
    UnknownFormat(String),
    #[error("seed is not pairwise disjoint")]
    SeedNotDisjoint,
    #[error("unknown edge {0}")]
    UnknownEdge(String),
    #[error("anchor invalid: {0}")]
    AnchorInvalid(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("cylinder status unknown in direction {0}")]
    UnknownCylinderStatus(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("no triangle in truncation")]
    NoTriangleInTruncation,
    #[error("not an edge: {0}")]
    NotAnEdge(String),
    #[error("bad generator: {0}")]
    BadGenerator(String),
    #[error("internal invariant failed: {0}")]
    Internal(String),
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse(_) => "ParseError",
            Error::GluingMismatch(_) => "GluingMismatch",
            Error::NonConvexPolygon(_) => "NonConvexPolygon",
            Error::Disconnected => "Disconnected",
            Error::BadConeAngle(_) => "BadConeAngle",
            Error::StratumError(_) => "StratumError",
            Error::UnknownName(_) => "UnknownName",
            Error::SingularMatrix => "SingularMatrix",
            Error::FieldMismatch(_) => "FieldMismatch",
            Error::DirectionLeavesField => "DirectionLeavesField",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::NoHitWithinBudget => "NoHitWithinBudget",
            Error::UnknownVertex(_) => "UnknownVertex",
            Error::NotPairwiseDisjoint => "NotPairwiseDisjoint",
            Error::UnknownFormat(_) => "UnknownFormat",
            Error::SeedNotDisjoint => "SeedNotDisjoint",
            Error::UnknownEdge(_) => "UnknownEdge",
            Error::AnchorInvalid(_) => "AnchorInvalid",
            Error::HypothesisViolated(_) => "HypothesisViolated",
            Error::UnknownCylinderStatus(_) => "UnknownCylinderStatus",
            Error::PreconditionViolated(_) => "PreconditionViolated",
            Error::NoTriangleInTruncation => "NoTriangleInTruncation",
            Error::NotAnEdge(_) => "NotAnEdge",
            Error::BadGenerator(_) => "BadGenerator",
            Error::Internal(_) => "Internal",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
