//! Visibility from points outside the polygon.
//!
//! A point outside the convex hull sees the polygon inside the wedge between
//! its two tangents to the hull. A point inside the hull but outside the
//! polygon sits in a pocket, closed off by a hull edge (the lid), and sees
//! nothing beyond that pocket.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::kernel::{cmp_dist, on_segment, orient, same_direction, AngularOrder, Point};
use crate::oracle::{Domain, OracleSuite};
use crate::polygon::{EdgeId, Location, Mutation, MutationKind, SimplePolygon, VertexId};
use crate::vp::{assemble, unit_east, BoundaryVertex, Scan, VisibilityPolygon};

/// Convex hull of the polygon's vertices in ccw order, including vertices
/// that lie on a hull edge.
#[derive(Clone, Debug)]
pub struct DynamicHull {
    seq: Vec<VertexId>,
    index: HashMap<VertexId, usize>,
    generation: u64,
}

/// A pocket: the region between the hull edge `t_prime -> t_double_prime`
/// and the polygon chain running ccw from `t_prime` to `t_double_prime`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct PocketRef {
    pub t_prime: VertexId,
    pub t_double_prime: VertexId,
}

impl PocketRef {
    /// The hull edge closing the pocket, oriented with the pocket on its right.
    pub fn lid(&self) -> EdgeId {
        EdgeId::new(self.t_double_prime, self.t_prime)
    }

    /// Polygon vertices of the pocket chain, from `t_prime` to `t_double_prime`.
    pub fn chain(&self, poly: &SimplePolygon) -> Vec<VertexId> {
        let mut out = vec![self.t_prime];
        let mut x = self.t_prime;
        while x != self.t_double_prime {
            x = poly.next(x);
            out.push(x);
        }
        out
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ExteriorClass {
    /// Outside or on the hull; carries the tangent vertices. The hull lies in
    /// the cone swept ccw from `q -> t_double_prime` to `q -> t_prime`.
    OutsideHull { t_prime: VertexId, t_double_prime: VertexId },
    InPocket(PocketRef),
    NotExterior,
}

/// Convex hull by monotone chain, keeping points on hull edges.
pub fn monotone_chain(poly: &SimplePolygon, ids: &[VertexId]) -> Vec<VertexId> {
    let mut pts: Vec<VertexId> = ids.to_vec();
    pts.sort_by(|a, b| poly.point(*a).cmp(poly.point(*b)));
    pts.dedup_by(|a, b| poly.point(*a) == poly.point(*b));
    if pts.len() < 3 {
        return pts;
    }
    let turn = |h: &[VertexId], p: VertexId| orient(poly.point(h[h.len() - 2]), poly.point(h[h.len() - 1]), poly.point(p));
    let mut lower: Vec<VertexId> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && turn(&lower, p) < 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<VertexId> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && turn(&upper, p) < 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

impl DynamicHull {
    pub fn build(poly: &SimplePolygon) -> Self {
        let ids: Vec<VertexId> = poly.ids().collect();
        let mut h = DynamicHull { seq: Vec::new(), index: HashMap::new(), generation: poly.generation() };
        h.set(monotone_chain(poly, &ids));
        h
    }

    fn set(&mut self, seq: Vec<VertexId>) {
        self.index = seq.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        self.seq = seq;
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.seq
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    pub fn points(&self, poly: &SimplePolygon) -> Vec<Point> {
        self.seq.iter().map(|&v| poly.point(v).clone()).collect()
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.index.contains_key(&v)
    }

    pub fn next(&self, v: VertexId) -> VertexId {
        self.seq[(self.index[&v] + 1) % self.seq.len()]
    }

    pub fn prev(&self, v: VertexId) -> VertexId {
        let n = self.seq.len();
        self.seq[(self.index[&v] + n - 1) % n]
    }

    /// Brings the hull up to date with one mutation already applied to `poly`.
    pub fn sync(&mut self, poly: &SimplePolygon, change: &Mutation) -> Result<()> {
        let expected = self.generation + 1;
        if change.generation != expected {
            return Err(Error::OutOfOrderSync { expected, got: change.generation });
        }
        match &change.kind {
            MutationKind::Insert { id, point, .. } => {
                if self.locate(poly, point) != Location::Interior {
                    let mut ids = self.seq.clone();
                    ids.push(*id);
                    self.set(monotone_chain(poly, &ids));
                }
            }
            MutationKind::Delete { id, .. } => {
                if self.contains_vertex(*id) {
                    let ids: Vec<VertexId> = poly.ids().collect();
                    self.set(monotone_chain(poly, &ids));
                }
            }
        }
        self.generation = expected;
        Ok(())
    }

    /// Position of `p` relative to the closed hull.
    pub fn locate(&self, poly: &SimplePolygon, p: &Point) -> Location {
        let n = self.seq.len();
        let mut on_edge = false;
        for i in 0..n {
            let a = poly.point(self.seq[i]);
            let b = poly.point(self.seq[(i + 1) % n]);
            match orient(a, b, p) {
                -1 => return Location::Exterior,
                0 if on_segment(a, b, p) => on_edge = true,
                0 => return Location::Exterior,
                _ => {}
            }
        }
        if on_edge {
            Location::Boundary
        } else {
            Location::Interior
        }
    }

    /// Tangent vertices seen from `q` outside the open hull: `t_double_prime`
    /// starts the ccw cone holding the hull and `t_prime` ends it. Among hull
    /// vertices on a tangent line the one nearest `q` is taken.
    pub fn tangents(&self, poly: &SimplePolygon, q: &Point) -> Option<(VertexId, VertexId)> {
        let n = self.seq.len();
        if let Some(i) = (0..n).find(|&i| {
            on_segment(poly.point(self.seq[i]), poly.point(self.seq[(i + 1) % n]), q)
        }) {
            let (a, b) = (self.seq[i], self.seq[(i + 1) % n]);
            if poly.point(a) == q || poly.point(b) == q {
                return None;
            }
            return Some((a, b));
        }
        let pick = |sign: i8| {
            let mut best = self.seq[0];
            for &v in &self.seq[1..] {
                let (pb, pv) = (poly.point(best), poly.point(v));
                let o = orient(q, pb, pv) * sign;
                if o < 0 || (o == 0 && same_direction(q, pb, pv) && cmp_dist(q, pv, pb).is_lt()) {
                    best = v;
                }
            }
            best
        };
        Some((pick(-1), pick(1)))
    }

    /// Classifies `q` and, for points inside the hull but outside the
    /// polygon, finds the pocket by shooting toward the nearest hull vertex
    /// and walking the polygon chain to the hull on both sides of the hit.
    pub fn classify(&self, poly: &SimplePolygon, oracle: &OracleSuite, q: &Point) -> Result<ExteriorClass> {
        self.ensure_current(poly)?;
        if oracle.locate(poly, q)? != Location::Exterior {
            return Ok(ExteriorClass::NotExterior);
        }
        if self.locate(poly, q) != Location::Interior {
            let (t_prime, t_double_prime) = self.tangents(poly, q).ok_or(Error::PointNotExterior)?;
            return Ok(ExteriorClass::OutsideHull { t_prime, t_double_prime });
        }
        let target = *self
            .seq
            .iter()
            .min_by(|a, b| cmp_dist(q, poly.point(**a), poly.point(**b)))
            .expect("hull is not empty");
        let hit = oracle
            .ray_shoot_in(poly, &Domain::EXTERIOR, &crate::kernel::Ray::through(q.clone(), poly.point(target).clone()))?
            .expect("a ray toward a polygon vertex hits the polygon");
        let pocket = match hit.at_vertex {
            Some(w) if self.contains_vertex(w) => {
                let wp = poly.point(w);
                let from = poly.point(self.next(w));
                let order = AngularOrder::new(wp, from);
                if order.cmp(q, poly.point(poly.next(w))) != std::cmp::Ordering::Greater {
                    PocketRef { t_prime: w, t_double_prime: self.next(w) }
                } else {
                    PocketRef { t_prime: self.prev(w), t_double_prime: w }
                }
            }
            Some(w) => self.pocket_around(poly, w, w),
            None => self.pocket_around(poly, hit.edge.from, hit.edge.to),
        };
        Ok(ExteriorClass::InPocket(pocket))
    }

    /// The pocket whose chain contains the chain piece `back ..= fwd`.
    fn pocket_around(&self, poly: &SimplePolygon, back: VertexId, fwd: VertexId) -> PocketRef {
        let mut t_prime = back;
        while !self.contains_vertex(t_prime) {
            t_prime = poly.prev(t_prime);
        }
        let mut t_double_prime = fwd;
        while !self.contains_vertex(t_double_prime) {
            t_double_prime = poly.next(t_double_prime);
        }
        PocketRef { t_prime, t_double_prime }
    }

    fn ensure_current(&self, poly: &SimplePolygon) -> Result<()> {
        if poly.generation() != self.generation {
            return Err(Error::StaleOracle { oracle: self.generation, polygon: poly.generation() });
        }
        Ok(())
    }
}

/// Visibility polygon of a point outside the polygon. Outside the hull the
/// result runs from the tangent ray through `t_double_prime` to the one
/// through `t_prime` and is flagged unbounded; in a pocket it is the region
/// of the pocket seen from `q`.
pub fn exterior_vp(
    poly: &SimplePolygon,
    oracle: &OracleSuite,
    hull: &DynamicHull,
    q: &Point,
) -> Result<VisibilityPolygon> {
    oracle.ensure_current(poly)?;
    match hull.classify(poly, oracle, q)? {
        ExteriorClass::NotExterior => Err(Error::PointNotExterior),
        ExteriorClass::OutsideHull { t_prime, t_double_prime } => {
            let scan = Scan { poly, oracle, domain: Domain::EXTERIOR, q };
            let (a, b) = (poly.point(t_double_prime), poly.point(t_prime));
            let mut visible = BTreeSet::new();
            scan.ray_vertices(a, &mut visible);
            scan.open_cone(a, b, &mut visible);
            scan.ray_vertices(b, &mut visible);
            let list: Vec<VertexId> = visible.into_iter().collect();
            let cons = scan.constructed(&list);
            let boundary = assemble(poly, &Domain::EXTERIOR, q, list, cons);
            Ok(VisibilityPolygon { center: q.clone(), boundary: start_at(q, a, boundary), unbounded: true })
        }
        ExteriorClass::InPocket(pocket) => {
            let scan = Scan { poly, oracle, domain: Domain::pocket(pocket.lid()), q };
            let east = unit_east(q);
            let mut visible = BTreeSet::new();
            scan.ray_vertices(&east, &mut visible);
            scan.open_cone(&east, &east, &mut visible);
            let list: Vec<VertexId> = visible.into_iter().collect();
            let cons = scan.constructed(&list);
            let boundary = assemble(poly, &scan.domain, q, list, cons);
            Ok(VisibilityPolygon { center: q.clone(), boundary, unbounded: false })
        }
    }
}

/// Rotates a boundary sorted by angle so that it starts at direction `q -> a`.
pub(crate) fn start_at(q: &Point, a: &Point, mut boundary: Vec<BoundaryVertex>) -> Vec<BoundaryVertex> {
    let order = AngularOrder::new(q, a);
    if let Some(first) =
        (0..boundary.len()).min_by(|&i, &j| order.cmp(&boundary[i].point, &boundary[j].point).then(i.cmp(&j)))
    {
        boundary.rotate_left(first);
    }
    boundary
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{random_edit, random_exterior_point, random_star, random_two_opt, Edit};
    use crate::reference::{brute_exterior_vp, brute_hull, brute_hull_ids, brute_visible};
    use crate::polygon::Side;
    use crate::vp::cyclic_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pt(x: i64, y: i64) -> Point {
        Point::from_ints(x, y)
    }

    fn poly(v: &[(i64, i64)]) -> SimplePolygon {
        SimplePolygon::from_vertices(&v.iter().map(|&(x, y)| pt(x, y)).collect::<Vec<_>>()).unwrap()
    }

    fn id_at(p: &SimplePolygon, at: (i64, i64)) -> VertexId {
        p.ids().find(|&v| p.point(v) == &pt(at.0, at.1)).unwrap()
    }

    fn u_shape() -> SimplePolygon {
        poly(&[(0, 0), (6, 0), (6, 6), (4, 6), (4, 2), (2, 2), (2, 6), (0, 6)])
    }

    fn square() -> SimplePolygon {
        poly(&[(0, 0), (1, 0), (1, 1), (0, 1)])
    }

    fn same_vp(p: &SimplePolygon, q: &Point) -> (VisibilityPolygon, VisibilityPolygon) {
        let o = OracleSuite::exhaustive(p);
        let h = DynamicHull::build(p);
        (exterior_vp(p, &o, &h, q).unwrap(), brute_exterior_vp(p, q).unwrap())
    }

    #[test]
    fn brute_hull_examples() {
        let sq = vec![pt(0, 0), pt(1, 0), pt(1, 1), pt(0, 1)];
        assert_eq!(brute_hull(&sq), vec![0, 1, 2, 3]);
        let mut with_inner = sq.clone();
        with_inner.push(Point::from_fracs(1, 2, 1, 2));
        assert_eq!(brute_hull(&with_inner), vec![0, 1, 2, 3]);
        let mut with_side = sq;
        with_side.push(Point::from_fracs(1, 2, 0, 1));
        assert_eq!(brute_hull(&with_side), vec![0, 4, 1, 2, 3]);
    }

    #[test]
    fn hulls_agree_on_random_polygons() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let n = rng.gen_range(3..=20);
            let p = random_two_opt(&mut rng, n, 8);
            let h = DynamicHull::build(&p);
            assert!(cyclic_eq(h.vertices(), &brute_hull_ids(&p)));
        }
    }

    #[test]
    fn hull_sync_examples() {
        let mut p = square();
        let mut h = DynamicHull::build(&p);
        let a = id_at(&p, (1, 0));
        let out = p.insert_vertex(a, Point::from_fracs(3, 2, 1, 2)).unwrap();
        h.sync(&p, p.last_mutation().unwrap()).unwrap();
        assert!(h.contains_vertex(out));
        let b = id_at(&p, (0, 1));
        let inner = p.insert_vertex(b, Point::from_fracs(1, 2, 1, 2)).unwrap();
        h.sync(&p, p.last_mutation().unwrap()).unwrap();
        assert!(!h.contains_vertex(inner));
        assert_eq!(h.len(), 5);
        p.delete_vertex(out).unwrap();
        h.sync(&p, p.last_mutation().unwrap()).unwrap();
        assert!(cyclic_eq(h.vertices(), &brute_hull_ids(&p)));
        let stale = p.last_mutation().unwrap().clone();
        assert!(matches!(h.sync(&p, &stale), Err(Error::OutOfOrderSync { .. })));
    }

    #[test]
    fn classify_examples() {
        let p = square();
        let o = OracleSuite::exhaustive(&p);
        let h = DynamicHull::build(&p);
        assert_eq!(
            h.classify(&p, &o, &pt(3, 3)).unwrap(),
            ExteriorClass::OutsideHull { t_prime: id_at(&p, (1, 0)), t_double_prime: id_at(&p, (0, 1)) }
        );
        assert_eq!(h.classify(&p, &o, &Point::from_fracs(1, 2, 1, 2)).unwrap(), ExteriorClass::NotExterior);

        let u = u_shape();
        let o = OracleSuite::exhaustive(&u);
        let h = DynamicHull::build(&u);
        let want = PocketRef { t_prime: id_at(&u, (4, 6)), t_double_prime: id_at(&u, (2, 6)) };
        for q in [pt(3, 5), pt(3, 3), Point::from_fracs(5, 2, 11, 2)] {
            assert_eq!(h.classify(&u, &o, &q).unwrap(), ExteriorClass::InPocket(want));
        }
        assert!(matches!(h.classify(&u, &o, &pt(3, 6)).unwrap(), ExteriorClass::OutsideHull { .. }));
    }

    #[test]
    fn exterior_vp_examples() {
        let (got, want) = same_vp(&square(), &Point::from_fracs(3, 1, 1, 2));
        assert_eq!(got, want);
        assert!(got.unbounded);
        assert_eq!(got.points(), vec![pt(1, 1), pt(1, 0)]);

        let u = u_shape();
        let (got, want) = same_vp(&u, &pt(3, 5));
        assert_eq!(got, want);
        let seen = got.polygon_vertices();
        for c in [(2, 2), (4, 2), (2, 6), (4, 6)] {
            assert!(seen.contains(&id_at(&u, c)));
        }
        assert_eq!(seen.len(), 4);

        let (got, want) = same_vp(&square(), &pt(3, 0));
        assert_eq!(got, want);
        assert_eq!(got.points(), vec![pt(1, 1), pt(1, 0), pt(0, 0)]);

        let p = square();
        let o = OracleSuite::exhaustive(&p);
        let h = DynamicHull::build(&p);
        assert_eq!(exterior_vp(&p, &o, &h, &Point::from_fracs(1, 2, 1, 2)).unwrap_err(), Error::PointNotExterior);
    }

    #[test]
    fn random_exterior_points_match_brute() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut pockets = 0;
        for case in 0..60 {
            let n = rng.gen_range(5..=24);
            let mut p = if case % 2 == 0 { random_two_opt(&mut rng, n, 12) } else { random_star(&mut rng, n, 40) };
            let mut o = OracleSuite::accelerated(&p);
            let mut h = DynamicHull::build(&p);
            for _ in 0..8 {
                let edit = random_edit(&mut rng, &p, 0.4);
                let ok = match edit {
                    Edit::Insert { after, point } => p.insert_vertex(after, point).is_ok(),
                    Edit::Delete { id } => p.delete_vertex(id).is_ok(),
                };
                if ok {
                    let m = p.last_mutation().unwrap().clone();
                    o.sync(&p, &m).unwrap();
                    h.sync(&p, &m).unwrap();
                    assert!(cyclic_eq(h.vertices(), &brute_hull_ids(&p)));
                }
            }
            for _ in 0..10 {
                let q = random_exterior_point(&mut rng, &p, 2, 3);
                let got = exterior_vp(&p, &o, &h, &q).unwrap();
                let want: BTreeSet<VertexId> = brute_visible(&p, Side::Exterior, &q).into_iter().collect();
                assert_eq!(got.polygon_vertices(), want, "case {case}, q = {q}");
                assert_eq!(got, brute_exterior_vp(&p, &q).unwrap(), "case {case}, q = {q}");
                pockets += !got.unbounded as usize;
            }
        }
        assert!(pockets > 20);
    }
}
