//! Exact ray-shooting and ray-rotating queries over a candidate provider.
//!
//! The provider decides which edges and vertices are looked at; everything
//! decided here is exact. The exhaustive provider hands over the whole
//! polygon, the accelerated one walks a bucket grid.

use std::collections::HashSet;

use num_traits::{Signed, ToPrimitive};

use crate::kernel::{
    cmp_dist, cross_sign, line_param, on_segment, orient, LineSide, Point, Rational,
};
use crate::polygon::{EdgeId, SimplePolygon, Side, VertexId};
use crate::spatial::BBox;

/// Region a query is confined to: the polygon interior, or the exterior
/// optionally closed off by a hull edge (the lid of a pocket).
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Domain {
    pub side: Side,
    /// Extra boundary segment `from -> to` between two polygon vertices.
    pub lid: Option<EdgeId>,
}

impl Domain {
    pub const INTERIOR: Domain = Domain { side: Side::Interior, lid: None };
    pub const EXTERIOR: Domain = Domain { side: Side::Exterior, lid: None };

    pub fn pocket(lid: EdgeId) -> Self {
        Domain { side: Side::Exterior, lid: Some(lid) }
    }
}

/// First boundary point struck by a ray.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hit {
    pub point: Point,
    /// Host edge; for a vertex hit, the edge leaving that vertex.
    pub edge: EdgeId,
    pub at_vertex: Option<VertexId>,
}

impl Hit {
    pub fn is_lid(&self, domain: &Domain) -> bool {
        domain.lid == Some(self.edge)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rotation {
    Ccw,
    Cw,
}

impl Rotation {
    pub fn sign(self) -> i8 {
        match self {
            Rotation::Ccw => 1,
            Rotation::Cw => -1,
        }
    }

    pub fn reversed(self) -> Rotation {
        match self {
            Rotation::Ccw => Rotation::Cw,
            Rotation::Cw => Rotation::Ccw,
        }
    }
}

/// Source of candidate edges and vertices.
pub(crate) trait Candidates {
    /// Calls `visit(edges, exit)` for successive groups of edges along the
    /// ray, where `exit` is the (approximate) distance from the origin covered
    /// so far. Stops when `visit` returns false.
    fn ray_edges(
        &self,
        poly: &SimplePolygon,
        origin: &Point,
        toward: &Point,
        visit: &mut dyn FnMut(&[EdgeId], f64) -> bool,
    );

    /// Edges that may meet `b`.
    fn edges_in_box(&self, poly: &SimplePolygon, b: &BBox, out: &mut Vec<EdgeId>);

    /// Vertices whose position may lie in `b`, possibly repeated.
    fn vertices_in_box(&self, poly: &SimplePolygon, b: &BBox, out: &mut Vec<VertexId>);

    /// Slack on approximate distances along the ray.
    fn param_slack(&self) -> f64 {
        0.0
    }
}

/// Whole-polygon provider.
pub(crate) struct AllOf;

impl Candidates for AllOf {
    fn ray_edges(
        &self,
        poly: &SimplePolygon,
        _origin: &Point,
        _toward: &Point,
        visit: &mut dyn FnMut(&[EdgeId], f64) -> bool,
    ) {
        let edges: Vec<EdgeId> = poly.edges().collect();
        visit(&edges, f64::INFINITY);
    }

    fn edges_in_box(&self, poly: &SimplePolygon, _b: &BBox, out: &mut Vec<EdgeId>) {
        out.extend(poly.edges());
    }

    fn vertices_in_box(&self, poly: &SimplePolygon, _b: &BBox, out: &mut Vec<VertexId>) {
        out.extend(poly.ids());
    }
}

fn edge_pts(poly: &SimplePolygon, e: EdgeId) -> (&Point, &Point) {
    (poly.point(e.from), poly.point(e.to))
}

/// Intersection of the ray with an edge at parameter `t > 0`. Edges lying on
/// the ray's line and containing the origin are ignored.
fn edge_hit(
    origin: &Point,
    toward: &Point,
    a: &Point,
    b: &Point,
) -> Option<(Rational, Point, u8)> {
    let sa = orient(origin, toward, a);
    let sb = orient(origin, toward, b);
    let param = |p: &Point| -> Rational { ray_param(origin, toward, p) };
    if sa == 0 && sb == 0 {
        if on_segment(a, b, origin) {
            return None;
        }
        let ta = param(a);
        let tb = param(b);
        return match (ta.is_positive(), tb.is_positive()) {
            (true, true) => {
                if ta <= tb {
                    Some((ta, a.clone(), 1))
                } else {
                    Some((tb, b.clone(), 2))
                }
            }
            (true, false) => Some((ta, a.clone(), 1)),
            (false, true) => Some((tb, b.clone(), 2)),
            (false, false) => None,
        };
    }
    if sa * sb > 0 {
        return None;
    }
    if sa == 0 {
        let t = param(a);
        return t.is_positive().then(|| (t, a.clone(), 1));
    }
    if sb == 0 {
        let t = param(b);
        return t.is_positive().then(|| (t, b.clone(), 2));
    }
    // orient(a, b, origin + s * (toward - origin)) is linear in s and
    // vanishes at the crossing; it lies ahead iff value and slope differ.
    if orient(a, b, origin) * cross_sign(a, b, origin, toward) >= 0 {
        return None;
    }
    let t = line_param(origin, toward, a, b)?;
    if !t.is_positive() {
        return None;
    }
    let p = origin.lerp(toward, &t);
    Some((t, p, 0))
}

/// Parameter of a point on the line `origin -> toward`.
pub(crate) fn ray_param(origin: &Point, toward: &Point, p: &Point) -> Rational {
    let dx = toward.x() - origin.x();
    if !num_traits::Zero::is_zero(&dx) {
        (p.x() - origin.x()) / dx
    } else {
        (p.y() - origin.y()) / (toward.y() - origin.y())
    }
}

/// Unit direction of `origin -> toward` in floating point, from the exact
/// difference.
pub(crate) fn unit_dir(origin: &Point, toward: &Point) -> Option<(f64, f64)> {
    let dx = (toward.x() - origin.x()).to_f64()?;
    let dy = (toward.y() - origin.y()).to_f64()?;
    let len = dx.hypot(dy);
    (len.is_finite() && len > 0.0).then(|| (dx / len, dy / len))
}

fn approx_dist_along(origin: &Point, dir: (f64, f64), p: &Point) -> f64 {
    let (ox, oy) = origin.approx();
    let (px, py) = p.approx();
    (px - ox) * dir.0 + (py - oy) * dir.1
}

/// First boundary point hit by the ray `origin -> toward` at positive parameter.
pub(crate) fn shoot<C: Candidates + ?Sized>(
    poly: &SimplePolygon,
    domain: &Domain,
    cands: &C,
    origin: &Point,
    toward: &Point,
) -> Option<Hit> {
    let mut best: Option<(Rational, Point, EdgeId, u8)> = None;
    let consider = |e: EdgeId, best: &mut Option<(Rational, Point, EdgeId, u8)>| {
        let (a, b) = edge_pts(poly, e);
        if let Some((t, p, end)) = edge_hit(origin, toward, a, b) {
            let better = match best {
                None => true,
                // Both points lie on the ray, so distance orders them.
                Some((_, bp, be, bend)) => match cmp_dist(origin, &p, bp) {
                    std::cmp::Ordering::Less => true,
                    std::cmp::Ordering::Equal => end == 0 && *bend == 0 && e < *be,
                    std::cmp::Ordering::Greater => false,
                },
            };
            if better {
                *best = Some((t, p, e, end));
            }
        }
    };
    if let Some(lid) = domain.lid {
        consider(lid, &mut best);
    }
    let slack = cands.param_slack();
    let dir = unit_dir(origin, toward);
    let line = LineSide::new(origin, toward);
    // Edges spanning several cells come up repeatedly; only those crossing
    // the ray's line are worth remembering.
    let mut seen: HashSet<EdgeId> = HashSet::new();
    cands.ray_edges(poly, origin, toward, &mut |edges, exit| {
        for &e in edges {
            let (a, b) = edge_pts(poly, e);
            if line.of(a) * line.of(b) > 0 || !seen.insert(e) {
                continue;
            }
            consider(e, &mut best);
        }
        match (&best, dir) {
            (Some((_, p, _, _)), Some(d)) => approx_dist_along(origin, d, p) > exit - slack,
            _ => true,
        }
    });
    let (_, point, edge, end) = best?;
    let vertex = match end {
        1 => Some(edge.from),
        2 => Some(edge.to),
        _ => None,
    };
    Some(match vertex {
        Some(v) => Hit { point, edge: poly.edge_after(v), at_vertex: Some(v) },
        None => Hit { point, edge, at_vertex: None },
    })
}

/// Edges incident to a vertex within the domain (its two polygon edges and
/// the lid when the vertex is a lid endpoint), as far endpoints.
fn incident_far_ends(poly: &SimplePolygon, domain: &Domain, x: VertexId) -> Vec<(VertexId, EdgeId)> {
    let mut out = vec![
        (poly.prev(x), EdgeId::new(poly.prev(x), x)),
        (poly.next(x), EdgeId::new(x, poly.next(x))),
    ];
    if let Some(lid) = domain.lid {
        if lid.from == x {
            out.push((lid.to, lid));
        } else if lid.to == x {
            out.push((lid.from, lid));
        }
    }
    out
}

/// True iff the domain near vertex `x` contains the direction `x -> p`
/// (closed wedge), accounting for a lid through `x`.
pub(crate) fn domain_wedge_contains(poly: &SimplePolygon, domain: &Domain, x: VertexId, p: &Point) -> bool {
    if !poly.wedge_contains(x, p, domain.side) {
        return false;
    }
    match domain.lid {
        Some(lid) if lid.touches(x) => {
            // The pocket lies to the right of the lid `from -> to`.
            let (a, b) = edge_pts(poly, lid);
            orient(a, b, p) <= 0
        }
        _ => true,
    }
}

/// Open version of [`domain_wedge_contains`].
pub(crate) fn domain_wedge_contains_strictly(poly: &SimplePolygon, domain: &Domain, x: VertexId, p: &Point) -> bool {
    if !poly.wedge_contains_strictly(x, p, domain.side) {
        return false;
    }
    match domain.lid {
        Some(lid) if lid.touches(x) => {
            let (a, b) = edge_pts(poly, lid);
            orient(a, b, p) < 0
        }
        _ => true,
    }
}

/// The two boundary neighbours of `x` within the domain; a lid endpoint has
/// the other lid endpoint in place of its neighbour outside the pocket.
pub(crate) fn domain_neighbors(poly: &SimplePolygon, domain: &Domain, x: VertexId) -> [VertexId; 2] {
    match domain.lid {
        Some(lid) if lid.to == x => [poly.next(x), lid.from],
        Some(lid) if lid.from == x => [poly.prev(x), lid.to],
        _ => [poly.prev(x), poly.next(x)],
    }
}

/// Rotates the ray `origin -> toward` about its origin and returns the first
/// vertex visible from the origin that it sweeps. With `strict`, vertices on
/// the starting ray are skipped.
pub(crate) fn rotate<C: Candidates + ?Sized>(
    poly: &SimplePolygon,
    domain: &Domain,
    cands: &C,
    origin: &Point,
    toward: &Point,
    dir: Rotation,
    strict: bool,
) -> Option<VertexId> {
    let first = shoot(poly, domain, cands, origin, toward);
    rotate_after(poly, domain, cands, origin, toward, dir, strict, first)
}

/// [`rotate`] starting on the ray through `v`, which must be visible from
/// `origin` and the nearest vertex on its ray. Skips the initial shot.
pub(crate) fn rotate_from_vertex<C: Candidates + ?Sized>(
    poly: &SimplePolygon,
    domain: &Domain,
    cands: &C,
    origin: &Point,
    v: VertexId,
    dir: Rotation,
) -> Option<VertexId> {
    let toward = poly.point(v);
    let first = Hit { point: toward.clone(), edge: poly.edge_after(v), at_vertex: Some(v) };
    rotate_after(poly, domain, cands, origin, toward, dir, true, Some(first))
}

#[allow(clippy::too_many_arguments)]
fn rotate_after<C: Candidates + ?Sized>(
    poly: &SimplePolygon,
    domain: &Domain,
    cands: &C,
    origin: &Point,
    toward: &Point,
    dir: Rotation,
    strict: bool,
    first: Option<Hit>,
) -> Option<VertexId> {
    let s = dir.sign();
    if !strict {
        if let Some(v) = first.as_ref().and_then(|h| h.at_vertex) {
            return Some(v);
        }
    }
    // Locate the edge struck just after the rotation starts, and its point on
    // the starting ray.
    let mut hit = first?;
    let (edge, h0) = loop {
        match hit.at_vertex {
            None => break (hit.edge, hit.point.clone()),
            Some(x) => {
                let xp = poly.point(x);
                let mut front: Option<(VertexId, EdgeId)> = None;
                for (far, e) in incident_far_ends(poly, domain, x) {
                    let fp = poly.point(far);
                    if orient(origin, xp, fp) * s <= 0 {
                        continue;
                    }
                    front = Some(match front {
                        None => (far, e),
                        Some((cur, ce)) => {
                            // Keep the edge nearer to the origin just past the ray.
                            let cp = poly.point(cur);
                            let q_side = orient(xp, cp, origin);
                            let other = orient(xp, cp, fp);
                            if q_side * other < 0 { (cur, ce) } else { (far, e) }
                        }
                    });
                }
                if let Some((_, e)) = front {
                    break (e, xp.clone());
                }
                // Nothing on the sweep side at x: the swept ray passes beside x.
                hit = shoot(poly, domain, cands, xp, &xp.mirror(origin))?;
            }
        }
    };
    let (a, b) = edge_pts(poly, edge);
    let w = if orient(origin, &h0, b) * s > 0 { b } else { a };
    debug_assert!(orient(origin, &h0, w) * s > 0);
    let tri = [origin.approx(), h0.approx(), w.approx()];
    let start = LineSide::new(origin, toward);
    // Closed triangle origin, h0, w; its orientation is `s`.
    let sides = [LineSide::new(origin, &h0), LineSide::new(&h0, w), LineSide::new(w, origin)];
    let mut best: Option<VertexId> = None;
    let offer = |v: VertexId, best: &mut Option<VertexId>| -> bool {
        let p = poly.point(v);
        // Angle zero is excluded.
        if p == origin || start.of(p) * s <= 0 || sides.iter().any(|l| l.of(p) * s < 0) {
            return false;
        }
        let better = match *best {
            None => true,
            Some(cur) => {
                let cp = poly.point(cur);
                let o = orient(origin, cp, p) * s;
                o < 0 || (o == 0 && cmp_dist(origin, p, cp).is_lt())
            }
        };
        if better {
            *best = Some(v);
        }
        better
    };
    let mut verts = Vec::new();
    cands.vertices_in_box(poly, &BBox::of_points(&tri), &mut verts);
    for v in verts {
        offer(v, &mut best);
    }
    best
}

