//! Weak visibility of interior segments.
//!
//! A point `p` slides from `a` to `b`. The vertices it sees change only when
//! it crosses a critical constraint: the line through a vertex and the child
//! hidden behind it, or through two angularly consecutive children. Crossings
//! are kept in a priority queue keyed by position along the segment; at each
//! one the visibility polygon of the sweep point is recomputed and new
//! constraints are queued from its children.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashSet};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::kernel::{cmp_dist, line_param, orient, same_direction, signed_area2, Point, Ray, Rational, Segment};
use crate::oracle::{domain_wedge_contains, Domain, Hit, OracleSuite, Rotation};
use crate::par;
use crate::polygon::{EdgeId, Location, SimplePolygon, VertexId};
use crate::vp::{compute_vp, is_occluder, BoundaryVertex, VertexKind, VisibilityPolygon};

/// A line through two mutually visible vertices along which the sweep point
/// starts or stops seeing `v_double_prime` past `v_prime`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalConstraint {
    pub v_prime: VertexId,
    pub v_double_prime: VertexId,
    /// Where the ray from `v_double_prime` through `v_prime` leaves the
    /// polygon.
    pub b_prime: Point,
    pub crossing: Point,
    /// Position of `crossing` along the query segment, in `[0, 1]`.
    pub key: Rational,
}

/// Root level of the shortest path tree from `origin`: the visible vertices in
/// angular order and, for each one with hidden children, the child whose
/// direction turns least from the ray `origin -> child`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SPTChildrenView {
    pub origin: Point,
    pub children: Vec<VertexId>,
    pub principal: BTreeMap<VertexId, VertexId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakVisibilityPolygon {
    pub source: Segment,
    /// Boundary in ccw order; constructed vertices end windows into pockets
    /// hidden from the whole segment.
    pub boundary: Vec<BoundaryVertex>,
}

impl WeakVisibilityPolygon {
    pub fn len(&self) -> usize {
        self.boundary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boundary.is_empty()
    }

    pub fn points(&self) -> Vec<Point> {
        self.boundary.iter().map(|b| b.point.clone()).collect()
    }

    pub fn polygon_vertices(&self) -> BTreeSet<VertexId> {
        self.boundary.iter().filter_map(BoundaryVertex::vertex).collect()
    }

    pub fn area2(&self) -> Rational {
        signed_area2(&self.points())
    }
}

/// Visible vertices of an interior point, in angular order.
pub fn spt_children(poly: &SimplePolygon, oracle: &OracleSuite, p: &Point) -> Result<SPTChildrenView> {
    let vp = compute_vp(poly, oracle, p)?;
    Ok(view_of(poly, oracle, &vp))
}

fn view_of(poly: &SimplePolygon, oracle: &OracleSuite, vp: &VisibilityPolygon) -> SPTChildrenView {
    let children: Vec<VertexId> = vp.boundary.iter().filter_map(BoundaryVertex::vertex).collect();
    let found = par::map(&children, |&v| principal_of(poly, oracle, &vp.center, v).map(|w| (v, w)));
    SPTChildrenView { origin: vp.center.clone(), children, principal: found.into_iter().flatten().collect() }
}

/// Principal child of `v` in the shortest path tree from `p`, found by one
/// ray rotation about `v` from the direction `p -> v` toward the side hidden
/// behind `v`.
pub fn principal_child(poly: &SimplePolygon, oracle: &OracleSuite, p: &Point, v: VertexId) -> Result<Option<VertexId>> {
    oracle.ensure_current(poly)?;
    if !poly.contains(v) {
        return Err(Error::UnknownVertex(v));
    }
    Ok(principal_of(poly, oracle, p, v))
}

fn principal_of(poly: &SimplePolygon, oracle: &OracleSuite, p: &Point, v: VertexId) -> Option<VertexId> {
    if !is_occluder(poly, &Domain::INTERIOR, p, v) {
        return None;
    }
    let vp = poly.point(v);
    // Both neighbours lie on the hidden side or on the line `p v`.
    let side = orient(p, vp, poly.point(poly.next(v))) + orient(p, vp, poly.point(poly.prev(v)));
    let dir = if side > 0 { Rotation::Ccw } else { Rotation::Cw };
    oracle.rotate(poly, &Domain::INTERIOR, vp, &vp.mirror(p), dir, true)
}

/// Where the ray from `from` through `v` stops, continuing past vertices it
/// only grazes. `None` when the ray cannot leave `v`.
fn extend_past(poly: &SimplePolygon, oracle: &OracleSuite, from: &Point, v: VertexId) -> Option<Point> {
    let domain = Domain::INTERIOR;
    let mut x = v;
    let mut reached = None;
    loop {
        let xp = poly.point(x);
        let beyond = xp.mirror(from);
        if !domain_wedge_contains(poly, &domain, x, &beyond) {
            return reached;
        }
        match oracle.shoot(poly, &domain, xp, &beyond) {
            Some(Hit { at_vertex: Some(y), point, .. }) => {
                reached = Some(point);
                x = y;
            }
            Some(h) => return Some(h.point),
            None => return reached,
        }
    }
}

/// True iff the closed segment `from -> to` stays in the closed polygon,
/// `from` being interior.
fn sees(poly: &SimplePolygon, oracle: &OracleSuite, from: &Point, to: &Point) -> bool {
    let domain = Domain::INTERIOR;
    let mut origin = from.clone();
    loop {
        let Some(h) = oracle.shoot(poly, &domain, &origin, to) else {
            return false;
        };
        if cmp_dist(from, &h.point, to).is_ge() {
            return true;
        }
        match h.at_vertex {
            Some(y) if domain_wedge_contains(poly, &domain, y, to) => origin = h.point,
            _ => return false,
        }
    }
}

/// Constraints from the view's origin that cross the part of `s` not yet
/// swept: the origin lies on `s` and only crossings strictly beyond it count.
pub fn candidate_constraints(
    poly: &SimplePolygon,
    oracle: &OracleSuite,
    view: &SPTChildrenView,
    s: &Segment,
) -> Vec<CriticalConstraint> {
    if s.is_degenerate() {
        return Vec::new();
    }
    let from = Ray::through(s.a.clone(), s.b.clone()).param_of(&view.origin);
    // Children sharing a direction from the origin are grouped, so that a
    // vertex about to drop behind another on the same ray still pairs with
    // the children on either side.
    let mut groups: Vec<Vec<VertexId>> = Vec::new();
    for &v in &view.children {
        match groups.last_mut() {
            Some(g) if same_direction(&view.origin, poly.point(g[0]), poly.point(v)) => g.push(v),
            _ => groups.push(vec![v]),
        }
    }
    let mut pairs: Vec<(VertexId, VertexId)> = Vec::new();
    for (i, g) in groups.iter().enumerate() {
        pairs.extend(g.windows(2).map(|w| (w[0], w[1])));
        if groups.len() > 1 {
            let h = &groups[(i + 1) % groups.len()];
            pairs.extend(g.iter().flat_map(|&x| h.iter().map(move |&y| (x, y))));
        }
    }
    pairs.extend(view.principal.iter().map(|(&v, &w)| (v, w)));
    let found = par::map(&pairs, |&(x, y)| constraint(poly, oracle, s, &from, x, y));
    let mut out: Vec<CriticalConstraint> = found.into_iter().flatten().collect();
    out.sort_by(|a, b| a.key.cmp(&b.key).then(a.v_prime.cmp(&b.v_prime)).then(a.v_double_prime.cmp(&b.v_double_prime)));
    out.dedup_by(|a, b| a.v_prime == b.v_prime && a.v_double_prime == b.v_double_prime);
    out
}

fn constraint(
    poly: &SimplePolygon,
    oracle: &OracleSuite,
    s: &Segment,
    from: &Rational,
    x: VertexId,
    y: VertexId,
) -> Option<CriticalConstraint> {
    let (px, py) = (poly.point(x), poly.point(y));
    let t = line_param(&s.a, &s.b, px, py)?;
    if t <= *from || t > Rational::one() {
        return None;
    }
    let c = s.at(&t);
    if !same_direction(&c, px, py) {
        return None;
    }
    let (near, far) = if cmp_dist(&c, px, py).is_le() { (x, y) } else { (y, x) };
    if !sees(poly, oracle, &c, poly.point(far)) {
        return None;
    }
    let b_prime = extend_past(poly, oracle, poly.point(far), near)?;
    Some(CriticalConstraint { v_prime: near, v_double_prime: far, b_prime, crossing: c, key: t })
}

/// Weak visibility polygon of a segment strictly inside the polygon.
pub fn wvp(poly: &SimplePolygon, oracle: &OracleSuite, s: &Segment) -> Result<WeakVisibilityPolygon> {
    Ok(wvp_traced(poly, oracle, s)?.0)
}

/// As [`wvp`], also returning the number of constraint crossings processed.
pub fn wvp_traced(poly: &SimplePolygon, oracle: &OracleSuite, s: &Segment) -> Result<(WeakVisibilityPolygon, usize)> {
    oracle.ensure_current(poly)?;
    if !segment_is_interior(poly, oracle, s)? {
        return Err(Error::SegmentNotInterior);
    }
    let mut samples: Vec<VisibilityPolygon> = Vec::new();
    let mut queue: BinaryHeap<Reverse<Rational>> = BinaryHeap::new();
    let mut queued: HashSet<(VertexId, VertexId)> = HashSet::new();
    let mut at = Rational::zero();
    let mut events = 0;
    loop {
        let p = s.at(&at);
        let vp = compute_vp(poly, oracle, &p)?;
        if !s.is_degenerate() && at < Rational::one() {
            let view = view_of(poly, oracle, &vp);
            for c in candidate_constraints(poly, oracle, &view, s) {
                if queued.insert((c.v_prime, c.v_double_prime)) {
                    queue.push(Reverse(c.key));
                }
            }
        }
        samples.push(vp);
        let mut next = None;
        while let Some(Reverse(t)) = queue.pop() {
            if t > at {
                next = Some(t);
                break;
            }
        }
        match next {
            Some(t) => {
                events += 1;
                at = t;
            }
            None if !s.is_degenerate() && at < Rational::one() => at = Rational::one(),
            None => break,
        }
    }
    let boundary = splice(poly, &samples);
    Ok((WeakVisibilityPolygon { source: s.clone(), boundary }, events))
}

/// Both endpoints interior and no boundary point on the closed segment.
fn segment_is_interior(poly: &SimplePolygon, oracle: &OracleSuite, s: &Segment) -> Result<bool> {
    if oracle.locate(poly, &s.a)? != Location::Interior {
        return Ok(false);
    }
    if s.is_degenerate() {
        return Ok(true);
    }
    Ok(match oracle.shoot(poly, &Domain::INTERIOR, &s.a, &s.b) {
        Some(h) => cmp_dist(&s.a, &s.b, &h.point).is_lt(),
        None => true,
    })
}

/// Walks the polygon boundary edge by edge, keeping the two extreme points
/// seen on each edge over all samples: its endpoints when they are weakly
/// visible, otherwise the deepest constructed points.
fn splice(poly: &SimplePolygon, samples: &[VisibilityPolygon]) -> Vec<BoundaryVertex> {
    let seen: BTreeSet<VertexId> = samples.iter().flat_map(|vp| vp.polygon_vertices()).collect();
    let mut on_edge: BTreeMap<EdgeId, Vec<&BoundaryVertex>> = BTreeMap::new();
    for vp in samples {
        for b in &vp.boundary {
            if let VertexKind::Constructed { edge, at_vertex: None, .. } = &b.kind {
                on_edge.entry(*edge).or_default().push(b);
            }
        }
    }
    let mut out: Vec<BoundaryVertex> = Vec::new();
    let mut push = |b: BoundaryVertex| {
        if out.last().is_none_or(|l: &BoundaryVertex| l.point != b.point) {
            out.push(b);
        }
    };
    for u in poly.ids() {
        let w = poly.next(u);
        let from = poly.point(u);
        let mut pts: Vec<BoundaryVertex> = Vec::new();
        if seen.contains(&u) {
            pts.push(BoundaryVertex::polygon(poly, u));
        }
        if let Some(found) = on_edge.get(&poly.edge_after(u)) {
            pts.extend(found.iter().map(|b| (*b).clone()));
        }
        if seen.contains(&w) {
            pts.push(BoundaryVertex::polygon(poly, w));
        }
        let near = pts.iter().min_by(|a, b| cmp_dist(from, &a.point, &b.point)).cloned();
        let far = pts.iter().max_by(|a, b| cmp_dist(from, &a.point, &b.point)).cloned();
        for b in near.into_iter().chain(far) {
            push(b);
        }
    }
    while out.len() > 1 && out[0].point == out[out.len() - 1].point {
        let last = out.pop().unwrap();
        if out[0].is_constructed() && !last.is_constructed() {
            out[0] = last;
        }
    }
    out
}
