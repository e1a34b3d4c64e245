//! Dynamic visibility polygons over a mutable simple polygon.
//!
//! The polygon supports vertex insertion and deletion. On top of it the crate
//! maintains the visibility polygon of a fixed interior point, answers
//! visibility queries for arbitrary interior or exterior points, and answers
//! weak-visibility queries for interior segments. Every query is phrased in
//! terms of ray-shooting and ray-rotating queries issued to an oracle, so the
//! cost of an update tracks the size of the change rather than the polygon.

pub mod dynamic;
pub mod error;
pub mod exterior;
pub mod generators;
pub mod kernel;
pub mod oracle;
pub mod par;
pub mod polygon;
pub mod reference;
pub mod spatial;
pub mod vp;
pub mod weak;

pub use dynamic::{ChangeSet, DynamicVpState};
pub use error::{Error, Result};
pub use exterior::{exterior_vp, DynamicHull, ExteriorClass, PocketRef};
pub use kernel::{Point, Ray, Rational, Segment};
pub use oracle::{Domain, Hit, OracleConfig, OracleKind, OracleSuite, Rotation};
pub use polygon::{EdgeId, Location, Mutation, Side, SimplePolygon, VertexId};
pub use vp::{compute_vp, BoundaryVertex, VertexKind, VisibilityPolygon};
pub use weak::{wvp, CriticalConstraint, SPTChildrenView, WeakVisibilityPolygon};
