//! The mutable simple polygon: a circular doubly-linked vertex list with
//! stable ids and an order-maintenance label per vertex.

use std::collections::HashSet;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::kernel::{
    dot_sign, in_cone, on_segment, orient, segments_cross_properly, segments_intersect, signed_area2, Cone, Point, Ray,
    Rational,
};
use crate::spatial::{BBox, UniformGrid};

#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub u32);

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// Directed boundary edge `from -> to` in ccw order.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct EdgeId {
    pub from: VertexId,
    pub to: VertexId,
}

impl EdgeId {
    pub fn new(from: VertexId, to: VertexId) -> Self {
        EdgeId { from, to }
    }

    pub fn touches(&self, v: VertexId) -> bool {
        self.from == v || self.to == v
    }
}

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum Location {
    Interior,
    Boundary,
    Exterior,
}

/// Which side of the boundary a query lives on.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum Side {
    Interior,
    Exterior,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MutationKind {
    Insert { id: VertexId, prev: VertexId, next: VertexId, point: Point },
    Delete { id: VertexId, prev: VertexId, next: VertexId, point: Point },
}

/// Record of one applied mutation; `generation` is the polygon's generation after it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mutation {
    pub generation: u64,
    pub kind: MutationKind,
}

impl Mutation {
    pub fn vertex(&self) -> VertexId {
        match self.kind {
            MutationKind::Insert { id, .. } | MutationKind::Delete { id, .. } => id,
        }
    }

    pub fn neighbors(&self) -> (VertexId, VertexId) {
        match self.kind {
            MutationKind::Insert { prev, next, .. } | MutationKind::Delete { prev, next, .. } => {
                (prev, next)
            }
        }
    }

    pub fn point(&self) -> &Point {
        match &self.kind {
            MutationKind::Insert { point, .. } | MutationKind::Delete { point, .. } => point,
        }
    }

    pub fn is_insert(&self) -> bool {
        matches!(self.kind, MutationKind::Insert { .. })
    }

    /// Edges that no longer exist after the mutation.
    pub fn removed_edges(&self) -> Vec<EdgeId> {
        let (p, n) = self.neighbors();
        let v = self.vertex();
        if self.is_insert() {
            vec![EdgeId::new(p, n)]
        } else {
            vec![EdgeId::new(p, v), EdgeId::new(v, n)]
        }
    }

    /// Edges created by the mutation.
    pub fn added_edges(&self) -> Vec<EdgeId> {
        let (p, n) = self.neighbors();
        let v = self.vertex();
        if self.is_insert() {
            vec![EdgeId::new(p, v), EdgeId::new(v, n)]
        } else {
            vec![EdgeId::new(p, n)]
        }
    }
}

/// Supplies candidate edges near a segment, to prune simplicity checks.
pub trait EdgeCandidates {
    fn edges_near(&self, polygon: &SimplePolygon, a: &Point, b: &Point, out: &mut Vec<EdgeId>);
}

#[derive(Clone, Debug)]
struct Node {
    point: Point,
    prev: VertexId,
    next: VertexId,
    label: u128,
}

const LABEL_GAP: u128 = 1 << 64;
const FULL_CHECK_LIMIT: usize = 256;

#[derive(Clone, Debug)]
pub struct SimplePolygon {
    nodes: Vec<Option<Node>>,
    head: VertexId,
    len: usize,
    generation: u64,
    area2: Rational,
    last: Option<Mutation>,
}

impl SimplePolygon {
    /// Builds a polygon, reversing clockwise input to counterclockwise.
    pub fn from_vertices(pts: &[Point]) -> Result<Self> {
        if pts.len() < 3 {
            return Err(Error::TooFewPoints);
        }
        let mut seen = HashSet::with_capacity(pts.len());
        for p in pts {
            if !seen.insert(p) {
                return Err(Error::Degenerate("repeated point"));
            }
        }
        if pts.iter().all(|p| orient(&pts[0], &pts[1], p) == 0) {
            return Err(Error::Degenerate("zero area"));
        }
        if let Some((i, j)) = find_self_intersection(pts) {
            return Err(Error::NotSimple(i, j));
        }
        let area = signed_area2(pts);
        if area.is_zero() {
            return Err(Error::Degenerate("zero area"));
        }
        let mut ordered: Vec<Point> = pts.to_vec();
        let mut area2 = area;
        if area2.is_negative() {
            ordered.reverse();
            area2 = -area2;
        }
        let n = ordered.len();
        let nodes = ordered
            .into_iter()
            .enumerate()
            .map(|(i, point)| {
                Some(Node {
                    point,
                    prev: VertexId(((i + n - 1) % n) as u32),
                    next: VertexId(((i + 1) % n) as u32),
                    label: (i as u128 + 1) * LABEL_GAP,
                })
            })
            .collect();
        Ok(SimplePolygon { nodes, head: VertexId(0), len: n, generation: 0, area2, last: None })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn last_mutation(&self) -> Option<&Mutation> {
        self.last.as_ref()
    }

    /// Twice the (positive) area.
    pub fn area2(&self) -> &Rational {
        &self.area2
    }

    /// Upper bound on ids ever issued.
    pub fn id_bound(&self) -> usize {
        self.nodes.len()
    }

    fn node(&self, id: VertexId) -> &Node {
        self.nodes[id.0 as usize].as_ref().expect("live vertex id")
    }

    fn node_mut(&mut self, id: VertexId) -> &mut Node {
        self.nodes[id.0 as usize].as_mut().expect("live vertex id")
    }

    pub fn contains(&self, id: VertexId) -> bool {
        self.nodes.get(id.0 as usize).is_some_and(|n| n.is_some())
    }

    pub fn point(&self, id: VertexId) -> &Point {
        &self.node(id).point
    }

    pub fn next(&self, id: VertexId) -> VertexId {
        self.node(id).next
    }

    pub fn prev(&self, id: VertexId) -> VertexId {
        self.node(id).prev
    }

    pub fn head(&self) -> VertexId {
        self.head
    }

    /// Order-maintenance label: increasing ccw from the head vertex.
    pub fn label(&self, id: VertexId) -> u128 {
        self.node(id).label
    }

    pub fn is_edge(&self, e: EdgeId) -> bool {
        self.contains(e.from) && self.contains(e.to) && self.next(e.from) == e.to
    }

    pub fn edge_after(&self, id: VertexId) -> EdgeId {
        EdgeId::new(id, self.next(id))
    }

    pub fn edge_points(&self, e: EdgeId) -> (&Point, &Point) {
        (self.point(e.from), self.point(e.to))
    }

    /// Vertex ids in ccw order starting at the head.
    pub fn ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        let mut cur = self.head;
        (0..self.len).map(move |_| {
            let id = cur;
            cur = self.next(cur);
            id
        })
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.ids().map(|id| self.edge_after(id))
    }

    pub fn points(&self) -> Vec<Point> {
        self.ids().map(|id| self.point(id).clone()).collect()
    }

    /// True iff the direction from vertex `id` towards `p` lies in the closed
    /// wedge of `side` at that vertex.
    pub fn wedge_contains(&self, id: VertexId, p: &Point, side: Side) -> bool {
        let w = self.point(id);
        if p == w {
            return true;
        }
        let next = self.point(self.next(id)).clone();
        let prev = self.point(self.prev(id)).clone();
        let (start, end) = match side {
            Side::Interior => (next, prev),
            Side::Exterior => (prev, next),
        };
        let cone = Cone::new(Ray::through(w.clone(), start), Ray::through(w.clone(), end), false);
        in_cone(&cone, p)
    }

    /// Same as [`Self::wedge_contains`] but excluding the wedge's bounding rays.
    pub fn wedge_contains_strictly(&self, id: VertexId, p: &Point, side: Side) -> bool {
        let w = self.point(id);
        let next = self.point(self.next(id)).clone();
        let prev = self.point(self.prev(id)).clone();
        let (start, end) = match side {
            Side::Interior => (next, prev),
            Side::Exterior => (prev, next),
        };
        let cone = Cone::new(Ray::through(w.clone(), start), Ray::through(w.clone(), end), true);
        in_cone(&cone, p)
    }

    /// Point location by winding number over all edges.
    pub fn locate(&self, p: &Point) -> Location {
        let mut winding = 0i64;
        for e in self.edges() {
            let (a, b) = self.edge_points(e);
            if on_segment(a, b, p) {
                return Location::Boundary;
            }
            if a.y() <= p.y() {
                if b.y() > p.y() && orient(a, b, p) > 0 {
                    winding += 1;
                }
            } else if b.y() <= p.y() && orient(a, b, p) < 0 {
                winding -= 1;
            }
        }
        if winding != 0 {
            Location::Interior
        } else {
            Location::Exterior
        }
    }

    /// Inserts `v` between `after` and its ccw successor.
    pub fn insert_vertex(&mut self, after: VertexId, v: Point) -> Result<VertexId> {
        self.insert_vertex_with(after, v, None)
    }

    pub fn insert_vertex_with(
        &mut self,
        after: VertexId,
        v: Point,
        index: Option<&dyn EdgeCandidates>,
    ) -> Result<VertexId> {
        if !self.contains(after) {
            return Err(Error::UnknownVertex(after));
        }
        let prev = after;
        let next = self.next(after);
        let pp = self.point(prev).clone();
        let pn = self.point(next).clone();
        if v == pp || v == pn {
            return Err(Error::WouldSelfIntersect);
        }
        let removed = EdgeId::new(prev, next);
        let new_edges = [(pp.clone(), v.clone(), prev), (v.clone(), pn.clone(), next)];
        // Overlap between the two new edges at v.
        if orient(&pp, &v, &pn) == 0 && dot_sign(&v, &pp, &v, &pn) > 0 {
            return Err(Error::WouldSelfIntersect);
        }
        let mut candidates = Vec::new();
        for (a, b, shared) in &new_edges {
            self.collect_candidates(a, b, index, &mut candidates);
            for &e in &candidates {
                if e == removed {
                    continue;
                }
                if self.new_edge_conflicts(a, b, *shared, e) {
                    return Err(Error::WouldSelfIntersect);
                }
            }
        }
        let delta = cross2(&pp, &v) + cross2(&v, &pn) - cross2(&pp, &pn);
        let area2 = &self.area2 + delta;
        if !area2.is_positive() {
            return Err(Error::WouldSelfIntersect);
        }
        let id = VertexId(self.nodes.len() as u32);
        let label = self.label_between(prev, next);
        self.nodes.push(Some(Node { point: v.clone(), prev, next, label }));
        self.node_mut(prev).next = id;
        self.node_mut(next).prev = id;
        self.len += 1;
        self.area2 = area2;
        self.generation += 1;
        self.last = Some(Mutation {
            generation: self.generation,
            kind: MutationKind::Insert { id, prev, next, point: v },
        });
        if label == 0 {
            self.relabel();
        }
        self.debug_check();
        Ok(id)
    }

    pub fn delete_vertex(&mut self, id: VertexId) -> Result<()> {
        self.delete_vertex_with(id, None)
    }

    pub fn delete_vertex_with(&mut self, id: VertexId, index: Option<&dyn EdgeCandidates>) -> Result<()> {
        if !self.contains(id) {
            return Err(Error::UnknownVertex(id));
        }
        if self.len <= 3 {
            return Err(Error::TooFewVertices);
        }
        let prev = self.prev(id);
        let next = self.next(id);
        let pp = self.point(prev).clone();
        let pn = self.point(next).clone();
        let pv = self.point(id).clone();
        let mut candidates = Vec::new();
        self.collect_candidates(&pp, &pn, index, &mut candidates);
        for &e in &candidates {
            if e.touches(id) {
                continue;
            }
            let conflict = if e.to == prev {
                // e = (pprev, prev) shares prev with the new edge (prev, next).
                let a = self.point(e.from);
                orient(a, &pp, &pn) == 0 && dot_sign(&pp, a, &pp, &pn) > 0
            } else if e.from == next {
                let c = self.point(e.to);
                orient(&pp, &pn, c) == 0 && dot_sign(&pn, &pp, &pn, c) > 0
            } else {
                let (a, b) = self.edge_points(e);
                segments_intersect(&pp, &pn, a, b)
            };
            if conflict {
                return Err(Error::WouldSelfIntersect);
            }
        }
        let delta = cross2(&pp, &pn) - cross2(&pp, &pv) - cross2(&pv, &pn);
        let area2 = &self.area2 + delta;
        if !area2.is_positive() {
            return Err(Error::WouldSelfIntersect);
        }
        self.node_mut(prev).next = next;
        self.node_mut(next).prev = prev;
        self.nodes[id.0 as usize] = None;
        if self.head == id {
            self.head = next;
        }
        self.len -= 1;
        self.area2 = area2;
        self.generation += 1;
        self.last = Some(Mutation {
            generation: self.generation,
            kind: MutationKind::Delete { id, prev, next, point: pv },
        });
        self.debug_check();
        Ok(())
    }

    fn collect_candidates(
        &self,
        a: &Point,
        b: &Point,
        index: Option<&dyn EdgeCandidates>,
        out: &mut Vec<EdgeId>,
    ) {
        out.clear();
        match index {
            Some(ix) => ix.edges_near(self, a, b, out),
            None => out.extend(self.edges()),
        }
    }

    /// Conflict test for a new edge `a -> b` (one endpoint shared with vertex
    /// `shared`) against the existing edge `e`.
    fn new_edge_conflicts(&self, a: &Point, b: &Point, shared: VertexId, e: EdgeId) -> bool {
        let (c, d) = self.edge_points(e);
        if e.touches(shared) {
            let sp = self.point(shared);
            let other_new = if a == sp { b } else { a };
            let other_old = if e.from == shared { d } else { c };
            // Only the shared endpoint may be common.
            if orient(sp, other_new, other_old) == 0 && dot_sign(sp, other_new, sp, other_old) > 0 {
                return true;
            }
            // The far endpoint of the new edge must not lie on e and vice versa.
            return on_segment(c, d, other_new) || on_segment(a, b, other_old);
        }
        segments_intersect(a, b, c, d)
    }

    fn label_between(&self, prev: VertexId, next: VertexId) -> u128 {
        let lo = self.label(prev);
        let hi = if next == self.head { u128::MAX } else { self.label(next) };
        if hi - lo < 2 {
            0
        } else {
            lo + (hi - lo) / 2
        }
    }

    fn relabel(&mut self) {
        let ids: Vec<VertexId> = self.ids().collect();
        for (i, id) in ids.into_iter().enumerate() {
            self.node_mut(id).label = (i as u128 + 1) * LABEL_GAP;
        }
    }

    fn debug_check(&self) {
        if cfg!(debug_assertions) && self.len <= FULL_CHECK_LIMIT {
            let pts = self.points();
            debug_assert!(find_self_intersection(&pts).is_none(), "polygon lost simplicity");
            debug_assert_eq!(signed_area2(&pts), self.area2);
        }
    }

    /// True iff the closed segment `ab` lies in the closure of `side`. Linear
    /// scan over all edges; used as the ground-truth visibility test.
    pub fn segment_within(&self, a: &Point, b: &Point, side: Side) -> bool {
        let bad = match side {
            Side::Interior => Location::Exterior,
            Side::Exterior => Location::Interior,
        };
        if a == b {
            return self.locate(a) != bad;
        }
        let line = Ray::through(a.clone(), b.clone());
        let mut cuts = vec![Rational::zero(), Rational::one()];
        for e in self.edges() {
            let (u, w) = self.edge_points(e);
            if segments_cross_properly(a, b, u, w) {
                return false;
            }
            if on_segment(a, b, u) {
                cuts.push(line.param_of(u));
            }
        }
        cuts.sort();
        cuts.dedup();
        // Between consecutive cuts the open piece is wholly on the boundary or
        // wholly on one side, so its midpoint decides it.
        let two = Rational::from_integer(2.into());
        cuts.windows(2).all(|w| {
            let t = (&w[0] + &w[1]) / &two;
            self.locate(&a.lerp(b, &t)) != bad
        })
    }

    /// Full simplicity scan.
    pub fn is_simple(&self) -> bool {
        find_self_intersection(&self.points()).is_none()
    }
}

fn cross2(a: &Point, b: &Point) -> Rational {
    a.x() * b.y() - b.x() * a.y()
}

fn edge_bbox(a: &Point, b: &Point) -> BBox {
    BBox::of_points(&[a.approx(), b.approx()])
}

/// Finds a pair of conflicting edges in the closed polyline `pts`; edge `i`
/// runs from `pts[i]` to `pts[i + 1]`.
pub fn find_self_intersection(pts: &[Point]) -> Option<(usize, usize)> {
    let n = pts.len();
    let bounds = BBox::of_points(&pts.iter().map(Point::approx).collect::<Vec<_>>());
    let mut grid: UniformGrid<u32> = UniformGrid::new(bounds, n);
    let edge = |i: usize| (&pts[i], &pts[(i + 1) % n]);
    for i in 0..n {
        let (a, b) = edge(i);
        grid.insert(i as u32, &edge_bbox(a, b));
    }
    let mut stamp = vec![usize::MAX; n];
    let mut cand = Vec::new();
    for i in 0..n {
        let (a, b) = edge(i);
        cand.clear();
        grid.query_box(&edge_bbox(a, b), &mut cand);
        for &j in &cand {
            let j = j as usize;
            if j <= i || stamp[j] == i {
                continue;
            }
            stamp[j] = i;
            let (c, d) = edge(j);
            let conflict = if j == i + 1 {
                // shared vertex b == c
                orient(a, b, d) == 0 && dot_sign(b, a, b, d) > 0
            } else if i == 0 && j == n - 1 {
                // shared vertex a == d
                orient(c, a, b) == 0 && dot_sign(a, c, a, b) > 0
            } else {
                segments_intersect(a, b, c, d)
            };
            if conflict {
                return Some((i, j));
            }
        }
    }
    None
}
