//! Maintenance of the visibility polygon of a fixed interior point while the
//! polygon gains and loses vertices.
//!
//! A mutation replaces one or two edges inside the triangle spanned by the
//! moving vertex and its neighbours. The boundary can only change in
//! directions where the old boundary ran along a removed edge, or where a new
//! edge passes in front of it. Those directions are found from the stored
//! boundary alone; each maximal interval of them is then rescanned with the
//! oracle and spliced in.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::kernel::{orient, point_in_triangle, segments_intersect, AngularOrder, LineSide, Point, Rational};
use crate::oracle::{Domain, OracleSuite};
use crate::polygon::{EdgeId, SimplePolygon, VertexId};
use crate::vp::{assemble, compute_vp, BoundaryVertex, Scan, VertexKind, VisibilityPolygon};

/// Direction from the center, ordered by ccw angle from the positive x axis.
#[derive(Clone, Debug)]
struct DirKey {
    d: Point,
}

fn origin() -> &'static Point {
    static ORIGIN: OnceLock<Point> = OnceLock::new();
    ORIGIN.get_or_init(|| Point::from_ints(0, 0))
}

impl DirKey {
    fn of(q: &Point, p: &Point) -> Self {
        DirKey { d: Point::new(p.x() - q.x(), p.y() - q.y()) }
    }

    fn half(&self) -> u8 {
        let (dx, dy) = (self.d.x(), self.d.y());
        if dy.is_positive() || (dy.is_zero() && dx.is_positive()) {
            0
        } else {
            1
        }
    }
}

impl PartialEq for DirKey {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for DirKey {}

impl PartialOrd for DirKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DirKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.half().cmp(&other.half()).then_with(|| 0.cmp(&orient(origin(), &self.d, &other.d)))
    }
}

/// Combinatorial difference between two consecutive boundaries.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ChangeSet {
    pub removed: Vec<BoundaryVertex>,
    pub added: Vec<BoundaryVertex>,
    /// Constructed vertices that moved to a new position behind the same
    /// blocker, as (old, new).
    pub replaced: Vec<(BoundaryVertex, BoundaryVertex)>,
}

impl ChangeSet {
    /// Number of combinatorial changes.
    pub fn k(&self) -> usize {
        self.removed.len() + self.added.len() + self.replaced.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k() == 0
    }

    /// True iff the removed polygon vertices lie in one run of `prior` made of
    /// removed or replaced entries.
    pub fn removed_is_one_arc(&self, prior: &[BoundaryVertex]) -> bool {
        let gone = |b: &BoundaryVertex| self.removed.contains(b) || self.replaced.iter().any(|(o, _)| o == b);
        let key = |b: &BoundaryVertex| !b.is_constructed() && self.removed.contains(b);
        one_run(prior, gone, key)
    }

    /// True iff the added polygon vertices lie in one run of `after` made of
    /// added or replacing entries.
    pub fn added_is_one_arc(&self, after: &[BoundaryVertex]) -> bool {
        let new = |b: &BoundaryVertex| self.added.contains(b) || self.replaced.iter().any(|(_, n)| n == b);
        let key = |b: &BoundaryVertex| !b.is_constructed() && self.added.contains(b);
        one_run(after, new, key)
    }
}

/// Whether all `key` entries of the cyclic sequence fall in a single maximal
/// run of `member` entries.
fn one_run<M, K>(seq: &[BoundaryVertex], member: M, key: K) -> bool
where
    M: Fn(&BoundaryVertex) -> bool,
    K: Fn(&BoundaryVertex) -> bool,
{
    let n = seq.len();
    if !seq.iter().any(&key) {
        return true;
    }
    if seq.iter().all(&member) {
        return true;
    }
    // Start just after a non-member so runs do not wrap.
    let start = (0..n).find(|&i| !member(&seq[i])).unwrap() + 1;
    let mut runs_with_key = 0;
    let mut in_run = false;
    let mut run_has_key = false;
    for j in 0..n {
        let b = &seq[(start + j) % n];
        if member(b) {
            if !in_run {
                in_run = true;
                run_has_key = false;
            }
            run_has_key |= key(b);
        } else if in_run {
            in_run = false;
            runs_with_key += run_has_key as usize;
        }
    }
    if in_run {
        runs_with_key += run_has_key as usize;
    }
    runs_with_key <= 1
}

/// Visibility polygon of a fixed interior point, kept current under vertex
/// insertions and deletions.
#[derive(Debug)]
pub struct DynamicVpState {
    poly: SimplePolygon,
    oracle: OracleSuite,
    q: Point,
    groups: BTreeMap<DirKey, Vec<BoundaryVertex>>,
    registry: HashMap<EdgeId, Vec<BoundaryVertex>>,
    last_calls: u64,
}

/// One pending mutation, described by its triangle.
struct Patch {
    tri: [Point; 3],
    removed: Vec<EdgeId>,
    added: Vec<(Point, Point)>,
    pivots: Vec<VertexId>,
}

impl DynamicVpState {
    /// Computes the initial boundary of `q` in `poly`.
    pub fn attach(poly: SimplePolygon, q: Point, oracle: OracleSuite) -> Result<Self> {
        let vp = compute_vp(&poly, &oracle, &q)?;
        Ok(Self::from_vp(poly, oracle, vp))
    }

    /// Starts from a boundary already computed for `vp.center` in `poly`.
    /// The boundary is trusted as is.
    pub fn from_vp(poly: SimplePolygon, oracle: OracleSuite, vp: VisibilityPolygon) -> Self {
        debug_assert!(!vp.unbounded);
        let mut state = DynamicVpState {
            poly,
            oracle,
            q: vp.center,
            groups: BTreeMap::new(),
            registry: HashMap::new(),
            last_calls: 0,
        };
        state.insert_run(vp.boundary);
        for b in state.groups.values().flatten().cloned().collect::<Vec<_>>() {
            state.register(b);
        }
        state
    }

    pub fn polygon(&self) -> &SimplePolygon {
        &self.poly
    }

    pub fn oracle(&self) -> &OracleSuite {
        &self.oracle
    }

    pub fn center(&self) -> &Point {
        &self.q
    }

    /// Oracle queries issued by the last update.
    pub fn last_update_calls(&self) -> u64 {
        self.last_calls
    }

    /// Constructed vertices hosted by `edge`, ordered from `edge.from`.
    pub fn constructed_on(&self, edge: EdgeId) -> &[BoundaryVertex] {
        self.registry.get(&edge).map_or(&[], Vec::as_slice)
    }

    /// Snapshot of the maintained boundary.
    pub fn current_vp(&self) -> VisibilityPolygon {
        VisibilityPolygon {
            center: self.q.clone(),
            boundary: self.groups.values().flatten().cloned().collect(),
            unbounded: false,
        }
    }

    /// Visibility polygon of any interior point of the current polygon.
    pub fn query_vp_interior(&self, p: &Point) -> Result<VisibilityPolygon> {
        compute_vp(&self.poly, &self.oracle, p)
    }

    /// Inserts `v` between `after` and its successor.
    pub fn apply_insert(&mut self, after: VertexId, v: Point) -> Result<ChangeSet> {
        if !self.poly.contains(after) {
            return Err(Error::UnknownVertex(after));
        }
        let b = self.poly.next(after);
        let (pa, pb) = (self.poly.point(after).clone(), self.poly.point(b).clone());
        let patch = Patch {
            tri: [pa.clone(), v.clone(), pb.clone()],
            removed: vec![EdgeId::new(after, b)],
            added: vec![(pa, v.clone()), (v.clone(), pb)],
            pivots: vec![after, b],
        };
        self.update(patch, |poly, oracle| poly.insert_vertex_with(after, v, oracle.edge_candidates()).map(drop))
    }

    /// Deletes vertex `id`, joining its neighbours.
    pub fn apply_delete(&mut self, id: VertexId) -> Result<ChangeSet> {
        if !self.poly.contains(id) {
            return Err(Error::UnknownVertex(id));
        }
        let (a, b) = (self.poly.prev(id), self.poly.next(id));
        let (pa, pv, pb) = (self.poly.point(a).clone(), self.poly.point(id).clone(), self.poly.point(b).clone());
        let patch = Patch {
            tri: [pa.clone(), pv, pb.clone()],
            removed: vec![EdgeId::new(a, id), EdgeId::new(id, b)],
            added: vec![(pa, pb)],
            pivots: vec![a, id, b],
        };
        self.update(patch, |poly, oracle| poly.delete_vertex_with(id, oracle.edge_candidates()))
    }

    fn update<F>(&mut self, patch: Patch, mutate: F) -> Result<ChangeSet>
    where
        F: FnOnce(&mut SimplePolygon, &OracleSuite) -> Result<()>,
    {
        let [a, v, b] = &patch.tri;
        if point_in_triangle(a, v, b, &self.q) {
            return Err(Error::CenterDisplaced);
        }
        let spans = self.affected(&patch);
        mutate(&mut self.poly, &self.oracle)?;
        let change = self.poly.last_mutation().expect("mutation recorded").clone();
        self.oracle.sync(&self.poly, &change)?;

        let before = self.oracle.calls();
        let mut old = Vec::new();
        let mut new = Vec::new();
        for (lo, hi) in &spans {
            let (o, n) = self.rescan(lo, hi);
            old.extend(o);
            new.extend(n);
        }
        self.last_calls = self.oracle.calls() - before;

        let mut set = ChangeSet {
            removed: old.iter().filter(|b| !new.contains(b)).cloned().collect(),
            added: new.iter().filter(|b| !old.contains(b)).cloned().collect(),
            replaced: Vec::new(),
        };
        let mut i = 0;
        while i < set.removed.len() {
            let pair = match set.removed[i].kind {
                VertexKind::Constructed { blocker, .. } => set.added.iter().position(
                    |n| matches!(n.kind, VertexKind::Constructed { blocker: u, .. } if u == blocker),
                ),
                VertexKind::Polygon(_) => None,
            };
            match pair {
                Some(j) => {
                    let o = set.removed.remove(i);
                    let n = set.added.remove(j);
                    set.replaced.push((o, n));
                }
                None => i += 1,
            }
        }
        for b in set.removed.iter().chain(set.replaced.iter().map(|(o, _)| o)) {
            self.unregister(b);
        }
        for b in set.added.clone().into_iter().chain(set.replaced.iter().map(|(_, n)| n.clone())) {
            self.register(b);
        }
        Ok(set)
    }

    /// Maximal closed direction intervals, as (cw end, ccw end) points, in
    /// which the boundary may differ after the patch.
    fn affected(&self, patch: &Patch) -> Vec<(Point, Point)> {
        let q = &self.q;
        let tri = &patch.tri;
        let Some(s0) = tri.iter().find(|s| tri.iter().all(|o| orient(q, s, o) >= 0)) else {
            return Vec::new();
        };
        let s1 = tri.iter().find(|s| tri.iter().all(|o| orient(q, o, s) >= 0)).unwrap_or(s0);
        let order = AngularOrder::new(q, s0);
        let entries = self.entries_around(&order, s1);
        let whole = entries.len() >= self.groups.values().map(Vec::len).sum::<usize>();

        let mut spans: Vec<(Point, Point)> = Vec::new();
        for w in &patch.pivots {
            let p = self.poly.point(*w);
            if self.groups.get(&DirKey::of(q, p)).is_some_and(|g| g.iter().any(|b| &b.point == p)) {
                spans.push((p.clone(), p.clone()));
            }
        }
        for x in &entries {
            if let VertexKind::Constructed { edge, .. } = &x.kind {
                if patch.removed.contains(edge) {
                    spans.push((x.point.clone(), x.point.clone()));
                }
            }
        }
        let n = entries.len();
        let pairs = if whole { n } else { n.saturating_sub(1) };
        for i in 0..pairs {
            let (x, y) = (&entries[i], &entries[(i + 1) % n]);
            let (px, py) = (&x.point, &y.point);
            if self.host_edges(x).iter().any(|e| self.host_edges(y).contains(e) && patch.removed.contains(e)) {
                spans.push((px.clone(), py.clone()));
            }
            let o = if paired(x, y) { 0 } else { orient(q, px, py) };
            for (e0, e1) in &patch.added {
                if o == 0 {
                    let far = if crate::kernel::cmp_dist(q, px, py) == Ordering::Less { py } else { px };
                    if segments_intersect(e0, e1, q, far) {
                        spans.push((px.clone(), px.clone()));
                    }
                } else if o > 0 {
                    if let Some((lo, hi)) = clip_to_triangle(e0, e1, q, px, py) {
                        if orient(q, &lo, &hi) >= 0 {
                            spans.push((lo, hi));
                        } else {
                            spans.push((hi, lo));
                        }
                    }
                } else {
                    spans.push((s0.clone(), s1.clone()));
                }
            }
        }
        merge_spans(&order, spans)
    }

    /// Stored boundary entries whose directions meet the cone from `order`'s
    /// reference ccw to `end`, plus one group on either side.
    fn entries_around(&self, order: &AngularOrder, end: &Point) -> Vec<BoundaryVertex> {
        let q = &self.q;
        let start = DirKey::of(q, order.reference());
        let before = self.groups.range(..start.clone()).next_back().or_else(|| self.groups.iter().next_back());
        let mut picked: Vec<&Vec<BoundaryVertex>> = Vec::new();
        if let Some((_, g)) = before {
            picked.push(g);
        }
        let cyclic = self.groups.range(start.clone()..).chain(self.groups.range(..start));
        for (_, g) in cyclic {
            if picked.len() > self.groups.len() {
                break;
            }
            picked.push(g);
            if order.cmp(&g[0].point, end) == Ordering::Greater {
                break;
            }
        }
        if picked.len() > self.groups.len() {
            return self.groups.values().flatten().cloned().collect();
        }
        picked.into_iter().flatten().cloned().collect()
    }

    /// Edges of the current polygon that a boundary segment ending at `b`
    /// might run along.
    fn host_edges(&self, b: &BoundaryVertex) -> Vec<EdgeId> {
        let around = |w: VertexId| vec![EdgeId::new(self.poly.prev(w), w), EdgeId::new(w, self.poly.next(w))];
        match &b.kind {
            VertexKind::Polygon(w) => around(*w),
            VertexKind::Constructed { at_vertex: Some(w), .. } => around(*w),
            VertexKind::Constructed { edge, .. } => vec![*edge],
        }
    }

    /// Replaces the stored groups in the closed interval `lo..=hi` by a fresh
    /// scan; returns (old entries, new entries).
    fn rescan(&mut self, lo: &Point, hi: &Point) -> (Vec<BoundaryVertex>, Vec<BoundaryVertex>) {
        let q = self.q.clone();
        let order = AngularOrder::new(&q, lo);
        let start = DirKey::of(&q, lo);
        let keys: Vec<DirKey> = self
            .groups
            .range(start.clone()..)
            .chain(self.groups.range(..start))
            .take_while(|(_, g)| order.cmp(&g[0].point, hi) != Ordering::Greater)
            .map(|(k, _)| k.clone())
            .collect();
        let old: Vec<BoundaryVertex> = keys.iter().flat_map(|k| self.groups.remove(k).unwrap()).collect();

        let scan = Scan { poly: &self.poly, oracle: &self.oracle, domain: Domain::INTERIOR, q: &q };
        let mut visible = std::collections::BTreeSet::new();
        scan.ray_vertices(lo, &mut visible);
        if !order.is_zero(hi) {
            scan.open_cone(lo, hi, &mut visible);
            scan.ray_vertices(hi, &mut visible);
        }
        let list: Vec<VertexId> = visible.into_iter().collect();
        let cons = scan.constructed(&list);
        let fresh = assemble(&self.poly, &Domain::INTERIOR, &q, list, cons);
        let new = rotate_to(&order, fresh);
        self.insert_run(new.clone());
        (old, new)
    }

    fn insert_run(&mut self, run: Vec<BoundaryVertex>) {
        for b in run {
            let key = DirKey::of(&self.q, &b.point);
            self.groups.entry(key).or_default().push(b);
        }
    }

    fn register(&mut self, b: BoundaryVertex) {
        let VertexKind::Constructed { edge, .. } = b.kind else {
            return;
        };
        let from = self.poly.point(edge.from).clone();
        let list = self.registry.entry(edge).or_default();
        let at = list.partition_point(|c| from.dist2(&c.point) < from.dist2(&b.point));
        list.insert(at, b);
    }

    fn unregister(&mut self, b: &BoundaryVertex) {
        let VertexKind::Constructed { edge, .. } = b.kind else {
            return;
        };
        if let Some(list) = self.registry.get_mut(&edge) {
            list.retain(|c| c != b);
            if list.is_empty() {
                self.registry.remove(&edge);
            }
        }
    }

    /// Checks the internal indexes against each other and the polygon.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        for (k, g) in &self.groups {
            if g.is_empty() || g.iter().any(|b| DirKey::of(&self.q, &b.point) != *k) {
                return Err("angular index holds a misfiled group".into());
            }
        }
        let cons: Vec<&BoundaryVertex> = self.groups.values().flatten().filter(|b| b.is_constructed()).collect();
        let filed: usize = self.registry.values().map(Vec::len).sum();
        if filed != cons.len() {
            return Err(format!("registry holds {filed} entries for {} constructed vertices", cons.len()));
        }
        for b in cons {
            let VertexKind::Constructed { edge, .. } = b.kind else { unreachable!() };
            if !self.poly.is_edge(edge) {
                return Err(format!("constructed vertex {} hosted by a missing edge", b.point));
            }
            if !self.constructed_on(edge).contains(b) {
                return Err(format!("constructed vertex {} is not registered", b.point));
            }
        }
        Ok(())
    }
}

/// Rotates a list sorted by angle from the x axis so that it starts at the
/// reference direction of `order`.
fn rotate_to(order: &AngularOrder, mut run: Vec<BoundaryVertex>) -> Vec<BoundaryVertex> {
    if let Some(first) = (0..run.len()).min_by(|&i, &j| order.cmp(&run[i].point, &run[j].point).then(i.cmp(&j))) {
        run.rotate_left(first);
    }
    run
}

fn area(a: &Point, b: &Point, c: &Point) -> Rational {
    (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x())
}

/// Whether one entry is the constructed vertex seen past the other, so both
/// lie on one ray from the center.
fn paired(x: &BoundaryVertex, y: &BoundaryVertex) -> bool {
    let behind = |c: &BoundaryVertex, v: &BoundaryVertex| match (&c.kind, v.vertex()) {
        (VertexKind::Constructed { blocker, .. }, Some(b)) => *blocker == b,
        _ => false,
    };
    behind(x, y) || behind(y, x)
}

/// Part of segment `e0 e1` inside the closed ccw triangle `q x y`.
fn clip_to_triangle(e0: &Point, e1: &Point, q: &Point, x: &Point, y: &Point) -> Option<(Point, Point)> {
    let mut lo = Rational::zero();
    let mut hi = Rational::one();
    let sides = [(q, x), (x, y), (y, q)];
    if sides.iter().any(|(i, j)| orient(i, j, e0) < 0 && orient(i, j, e1) < 0) {
        return None;
    }
    let across = LineSide::new(e0, e1);
    let s = [across.of(q), across.of(x), across.of(y)];
    if s.iter().all(|&v| v > 0) || s.iter().all(|&v| v < 0) {
        return None;
    }
    for (i, j) in sides {
        if orient(i, j, e0) >= 0 && orient(i, j, e1) >= 0 {
            continue;
        }
        let f0 = area(i, j, e0);
        let f1 = area(i, j, e1);
        match (f0.is_negative(), f1.is_negative()) {
            (true, true) => return None,
            (false, false) => continue,
            _ => {
                let t = &f0 / (&f0 - &f1);
                if f0.is_negative() {
                    lo = lo.max(t);
                } else {
                    hi = hi.min(t);
                }
            }
        }
    }
    (lo <= hi).then(|| (e0.lerp(e1, &lo), e0.lerp(e1, &hi)))
}

/// Sorts closed intervals by start and merges any that overlap or touch.
fn merge_spans(order: &AngularOrder, mut spans: Vec<(Point, Point)>) -> Vec<(Point, Point)> {
    spans.sort_by(|a, b| order.cmp(&a.0, &b.0));
    let mut out: Vec<(Point, Point)> = Vec::new();
    for (lo, hi) in spans {
        match out.last_mut() {
            Some(last) if order.cmp(&lo, &last.1) != Ordering::Greater => {
                if order.cmp(&hi, &last.1) == Ordering::Greater {
                    last.1 = hi;
                }
            }
            _ => out.push((lo, hi)),
        }
    }
    out
}
