use crate::polygon::VertexId;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("a polygon needs at least three vertices")]
    TooFewPoints,
    #[error("polygon is not simple: edges {0} and {1} intersect")]
    NotSimple(usize, usize),
    #[error("degenerate polygon: {0}")]
    Degenerate(&'static str),
    #[error("mutation would make the polygon non-simple")]
    WouldSelfIntersect,
    #[error("cannot delete from a triangle")]
    TooFewVertices,
    #[error("no vertex with id {0:?}")]
    UnknownVertex(VertexId),
    #[error("oracle is at generation {oracle} but the polygon is at {polygon}")]
    StaleOracle { oracle: u64, polygon: u64 },
    #[error("sync for generation {got} but the oracle expected {expected}")]
    OutOfOrderSync { expected: u64, got: u64 },
    #[error("center is not strictly interior to the polygon")]
    CenterNotInterior,
    #[error("mutation would move the fixed center out of the polygon interior")]
    CenterDisplaced,
    #[error("query point is not exterior to the polygon")]
    PointNotExterior,
    #[error("point lies outside the polygon")]
    PointOutside,
    #[error("query segment is not strictly interior to the polygon")]
    SegmentNotInterior,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
