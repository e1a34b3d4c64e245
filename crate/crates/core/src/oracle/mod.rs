//! Ray-shooting, ray-rotating, point-location and geodesic queries over the
//! current polygon.
//!
//! An [`OracleSuite`] is bound to one polygon and must see every mutation of
//! it, in order, through [`OracleSuite::sync`]. Queries against a polygon whose
//! generation differs from the suite's fail with [`Error::StaleOracle`].

mod accel;
mod geodesic;
mod query;

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use crate::error::{Error, Result};
use num_traits::{One, Zero};

use crate::kernel::{on_segment, orient, Point, Ray, Rational, Segment};
use crate::spatial::BBox;
use crate::polygon::{EdgeCandidates, Location, Mutation, Side, SimplePolygon, VertexId};

use accel::GridIndex;
use geodesic::{path_length, Triangulation, VisibilityGraph};
use query::{AllOf, Candidates};

pub use query::{Domain, Hit, Rotation};

pub(crate) use query::{domain_neighbors, domain_wedge_contains, domain_wedge_contains_strictly};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum OracleKind {
    /// Linear scan per query.
    Exhaustive,
    /// Bucket-grid candidates and a triangulation for geodesics.
    Accelerated,
    /// Runs both and panics on any disagreement.
    CrossCheck,
}

impl std::str::FromStr for OracleKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exhaustive" => Ok(OracleKind::Exhaustive),
            "accelerated" => Ok(OracleKind::Accelerated),
            "cross-check" | "crosscheck" => Ok(OracleKind::CrossCheck),
            _ => Err(format!("unknown oracle kind `{s}`")),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    pub kind: OracleKind,
    /// Full rebuild of the accelerated index after this many patched
    /// mutations; `None` means the square root of the vertex count.
    pub rebuild_period: Option<usize>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { kind: OracleKind::Accelerated, rebuild_period: None }
    }
}

#[derive(Debug)]
pub struct OracleSuite {
    config: OracleConfig,
    generation: u64,
    calls: AtomicU64,
    grid: Option<GridIndex>,
    graph: Mutex<Option<VisibilityGraph>>,
    tri: Mutex<Option<Triangulation>>,
}

impl OracleSuite {
    pub fn new(poly: &SimplePolygon, config: OracleConfig) -> Self {
        let grid = (config.kind != OracleKind::Exhaustive).then(|| GridIndex::build(poly));
        OracleSuite {
            config,
            generation: poly.generation(),
            calls: AtomicU64::new(0),
            grid,
            graph: Mutex::new(None),
            tri: Mutex::new(None),
        }
    }

    pub fn exhaustive(poly: &SimplePolygon) -> Self {
        Self::new(poly, OracleConfig { kind: OracleKind::Exhaustive, rebuild_period: None })
    }

    pub fn accelerated(poly: &SimplePolygon) -> Self {
        Self::new(poly, OracleConfig::default())
    }

    pub fn kind(&self) -> OracleKind {
        self.config.kind
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    /// Number of queries answered so far.
    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn reset_calls(&self) {
        self.calls.store(0, Ordering::Relaxed);
    }

    /// Candidate provider for the polygon's own simplicity checks.
    pub fn edge_candidates(&self) -> Option<&dyn EdgeCandidates> {
        self.grid.as_ref().map(|g| g as &dyn EdgeCandidates)
    }

    fn check(&self, poly: &SimplePolygon) -> Result<()> {
        if poly.generation() != self.generation {
            return Err(Error::StaleOracle { oracle: self.generation, polygon: poly.generation() });
        }
        self.calls.fetch_add(1, Ordering::Relaxed);
        Ok(())
    }

    /// Runs `f` on the configured provider(s).
    fn run<T, F>(&self, f: F) -> T
    where
        T: PartialEq + std::fmt::Debug,
        F: Fn(&dyn Candidates) -> T,
    {
        match (self.config.kind, &self.grid) {
            (OracleKind::Exhaustive, _) | (_, None) => f(&AllOf),
            (OracleKind::Accelerated, Some(g)) => f(g),
            (OracleKind::CrossCheck, Some(g)) => {
                let fast = f(g);
                let slow = f(&AllOf);
                assert_eq!(fast, slow, "accelerated and exhaustive oracles disagree");
                fast
            }
        }
    }

    /// First boundary point struck by `ray` from a point in the closed interior.
    pub fn ray_shoot(&self, poly: &SimplePolygon, ray: &Ray) -> Result<Option<Hit>> {
        self.ray_shoot_in(poly, &Domain::INTERIOR, ray)
    }

    pub fn ray_shoot_in(&self, poly: &SimplePolygon, domain: &Domain, ray: &Ray) -> Result<Option<Hit>> {
        self.check(poly)?;
        Ok(self.run(|c| query::shoot(poly, domain, c, ray.origin(), ray.toward())))
    }

    /// First visible vertex swept by rotating `ray` about its origin.
    pub fn ray_rotate(
        &self,
        poly: &SimplePolygon,
        ray: &Ray,
        dir: Rotation,
        strict: bool,
    ) -> Result<Option<VertexId>> {
        self.ray_rotate_in(poly, &Domain::INTERIOR, ray, dir, strict)
    }

    pub fn ray_rotate_in(
        &self,
        poly: &SimplePolygon,
        domain: &Domain,
        ray: &Ray,
        dir: Rotation,
        strict: bool,
    ) -> Result<Option<VertexId>> {
        self.check(poly)?;
        Ok(self.run(|c| query::rotate(poly, domain, c, ray.origin(), ray.toward(), dir, strict)))
    }

    /// Point location: one shot to the right, then a local side test.
    pub fn locate(&self, poly: &SimplePolygon, p: &Point) -> Result<Location> {
        self.check(poly)?;
        Ok(self.run(|c| locate_with(poly, c, p)))
    }

    /// Shortest path from `a` to `b` inside the closed polygon, as a point list.
    pub fn geodesic_path(&self, poly: &SimplePolygon, a: &Point, b: &Point) -> Result<Vec<Point>> {
        self.check(poly)?;
        for p in [a, b] {
            if poly.locate(p) == Location::Exterior {
                return Err(Error::PointOutside);
            }
        }
        let by_graph = || {
            let mut g = self.graph.lock().unwrap();
            g.get_or_insert_with(|| VisibilityGraph::build(poly)).path(poly, a, b)
        };
        let by_tri = || {
            let mut t = self.tri.lock().unwrap();
            t.get_or_insert_with(|| Triangulation::build(poly))
                .path(poly, a, b)
                .expect("both points lie in the polygon")
        };
        Ok(match self.config.kind {
            OracleKind::Exhaustive => by_graph(),
            OracleKind::Accelerated => by_tri(),
            OracleKind::CrossCheck => {
                let fast = by_tri();
                let slow = by_graph();
                assert_eq!(fast, slow, "geodesic paths disagree");
                fast
            }
        })
    }

    /// First segment of the shortest path from `a` to `b`.
    pub fn geodesic_first_edge(&self, poly: &SimplePolygon, a: &Point, b: &Point) -> Result<Segment> {
        let path = self.geodesic_path(poly, a, b)?;
        Ok(Segment::new(a.clone(), path.get(1).unwrap_or(a).clone()))
    }

    pub fn geodesic_distance(&self, poly: &SimplePolygon, a: &Point, b: &Point) -> Result<f64> {
        Ok(path_length(&self.geodesic_path(poly, a, b)?))
    }

    /// Brings the suite up to date with one mutation already applied to `poly`.
    pub fn sync(&mut self, poly: &SimplePolygon, change: &Mutation) -> Result<()> {
        let expected = self.generation + 1;
        if change.generation != expected {
            return Err(Error::OutOfOrderSync { expected, got: change.generation });
        }
        if poly.generation() != change.generation {
            return Err(Error::StaleOracle { oracle: change.generation, polygon: poly.generation() });
        }
        let period = self
            .config
            .rebuild_period
            .unwrap_or_else(|| (poly.len() as f64).sqrt().ceil() as usize)
            .max(1);
        if let Some(g) = &mut self.grid {
            g.apply(poly, change);
            if g.patched >= period {
                *g = GridIndex::build(poly);
            }
        }
        *self.graph.get_mut().unwrap() = None;
        *self.tri.get_mut().unwrap() = None;
        self.generation = expected;
        Ok(())
    }

    /// Internal entry points used by the visibility algorithms; each counts as
    /// one query.
    pub(crate) fn shoot(&self, poly: &SimplePolygon, domain: &Domain, origin: &Point, toward: &Point) -> Option<Hit> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.run(|c| query::shoot(poly, domain, c, origin, toward))
    }

    pub(crate) fn rotate(
        &self,
        poly: &SimplePolygon,
        domain: &Domain,
        origin: &Point,
        toward: &Point,
        dir: Rotation,
        strict: bool,
    ) -> Option<VertexId> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.run(|c| query::rotate(poly, domain, c, origin, toward, dir, strict))
    }

    /// Strict rotation from the ray through `v`, a vertex visible from
    /// `origin` and nearest on its ray.
    pub(crate) fn rotate_from_vertex(
        &self,
        poly: &SimplePolygon,
        domain: &Domain,
        origin: &Point,
        v: VertexId,
        dir: Rotation,
    ) -> Option<VertexId> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.run(|c| query::rotate_from_vertex(poly, domain, c, origin, v, dir))
    }

    pub(crate) fn ensure_current(&self, poly: &SimplePolygon) -> Result<()> {
        if poly.generation() != self.generation {
            return Err(Error::StaleOracle { oracle: self.generation, polygon: poly.generation() });
        }
        Ok(())
    }
}

fn locate_with(poly: &SimplePolygon, cands: &dyn Candidates, p: &Point) -> Location {
    let right = p.translate(&Rational::one(), &Rational::zero());
    let mut near = Vec::new();
    cands.edges_in_box(poly, &BBox::of_points(&[p.approx()]), &mut near);
    if near.iter().any(|&e| {
        let (a, b) = poly.edge_points(e);
        on_segment(a, b, p)
    }) {
        return Location::Boundary;
    }
    match query::shoot(poly, &Domain::INTERIOR, cands, p, &right) {
        None => Location::Exterior,
        Some(h) => {
            let inside = match h.at_vertex {
                Some(x) => poly.wedge_contains(x, p, Side::Interior),
                None => {
                    let (a, b) = poly.edge_points(h.edge);
                    orient(a, b, p) > 0
                }
            };
            if inside {
                Location::Interior
            } else {
                Location::Exterior
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{comb, random_interior_point, random_star, random_two_opt};
    use crate::kernel::{ray_segment_hit, AngularOrder};
    use crate::polygon::EdgeId;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pt(x: i64, y: i64) -> Point {
        Point::from_ints(x, y)
    }

    fn half(x: i64, y: i64) -> Point {
        Point::from_fracs(x, 2, y, 2)
    }

    fn square() -> SimplePolygon {
        SimplePolygon::from_vertices(&[pt(0, 0), pt(1, 0), pt(1, 1), pt(0, 1)]).unwrap()
    }

    fn id_at(poly: &SimplePolygon, p: &Point) -> VertexId {
        poly.ids().find(|&v| poly.point(v) == p).unwrap()
    }

    /// Nearest hit over all edges, straight from the kernel primitive.
    fn scan_hit(poly: &SimplePolygon, ray: &Ray) -> Option<Point> {
        poly.edges()
            .filter_map(|e| {
                let (a, b) = poly.edge_points(e);
                ray_segment_hit(ray, &Segment::new(a.clone(), b.clone()))
            })
            .filter(|(_, t)| t > &Rational::zero())
            .min_by(|a, b| a.1.cmp(&b.1))
            .map(|(p, _)| p)
    }

    /// Rotation by definition: sort the visible vertices by turning angle.
    fn brute_rotate(poly: &SimplePolygon, ray: &Ray, dir: Rotation, strict: bool) -> Option<VertexId> {
        let q = ray.origin();
        let order = AngularOrder::from_ray(ray);
        let mut vis: Vec<VertexId> = poly
            .ids()
            .filter(|&v| poly.point(v) != q && poly.segment_within(q, poly.point(v), Side::Interior))
            .filter(|&v| !(strict && order.is_zero(poly.point(v))))
            .collect();
        vis.sort_by(|&a, &b| {
            let (pa, pb) = (poly.point(a), poly.point(b));
            let za = order.is_zero(pa);
            let zb = order.is_zero(pb);
            let ang = match (za, zb) {
                (true, true) => std::cmp::Ordering::Equal,
                (true, false) => std::cmp::Ordering::Less,
                (false, true) => std::cmp::Ordering::Greater,
                _ => match dir {
                    Rotation::Ccw => order.cmp(pa, pb),
                    Rotation::Cw => order.cmp(pb, pa),
                },
            };
            ang.then_with(|| crate::kernel::cmp_dist(q, pa, pb))
        });
        vis.first().copied()
    }

    #[test]
    fn shoot_examples() {
        let sq = square();
        let o = OracleSuite::accelerated(&sq);
        let h = o.ray_shoot(&sq, &Ray::through(half(1, 1), pt(1, 0).translate(&Rational::zero(), &Rational::new(1.into(), 2.into())))).unwrap().unwrap();
        assert_eq!(h.point, half(2, 1));
        assert_eq!(h.edge, EdgeId::new(id_at(&sq, &pt(1, 0)), id_at(&sq, &pt(1, 1))));
        assert_eq!(h.at_vertex, None);
        let h = o.ray_shoot(&sq, &Ray::through(half(1, 1), pt(1, 1))).unwrap().unwrap();
        assert_eq!(h.point, pt(1, 1));
        assert_eq!(h.at_vertex, Some(id_at(&sq, &pt(1, 1))));
    }

    #[test]
    fn shoot_at_notch_tip() {
        let mut sq = square();
        let tip = Point::from_fracs(1, 2, 7, 10);
        let id = sq.insert_vertex(id_at(&sq, &pt(1, 1)), tip.clone()).unwrap();
        let o = OracleSuite::exhaustive(&sq);
        let ray = Ray::through(Point::from_fracs(1, 2, 3, 10), tip.clone());
        let h = o.ray_shoot(&sq, &ray).unwrap().unwrap();
        assert_eq!(h.at_vertex, Some(id));
        assert_eq!(Some(h.point), scan_hit(&sq, &ray));
    }

    #[test]
    fn rotate_examples() {
        let sq = square();
        let o = OracleSuite::accelerated(&sq);
        let c = half(1, 1);
        let east = Ray::through(c.clone(), half(2, 1));
        assert_eq!(o.ray_rotate(&sq, &east, Rotation::Ccw, false).unwrap(), Some(id_at(&sq, &pt(1, 1))));
        let diag = Ray::through(c.clone(), pt(1, 1));
        assert_eq!(o.ray_rotate(&sq, &diag, Rotation::Ccw, true).unwrap(), Some(id_at(&sq, &pt(0, 1))));
        assert_eq!(o.ray_rotate(&sq, &diag, Rotation::Ccw, false).unwrap(), Some(id_at(&sq, &pt(1, 1))));
        assert_eq!(o.ray_rotate(&sq, &diag, Rotation::Cw, true).unwrap(), Some(id_at(&sq, &pt(1, 0))));
    }

    #[test]
    fn rotate_in_comb_matches_definition() {
        let c = comb(6, 4);
        let o = OracleSuite::accelerated(&c);
        let q = Point::from_fracs(9, 2, 3, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let toward = q.translate(&Rational::from_integer(rng.gen_range(-9..=9).into()), &Rational::from_integer(rng.gen_range(-9..=9).into()));
            let Some(ray) = Ray::try_through(q.clone(), toward) else { continue };
            for dir in [Rotation::Ccw, Rotation::Cw] {
                for strict in [false, true] {
                    assert_eq!(o.ray_rotate(&c, &ray, dir, strict).unwrap(), brute_rotate(&c, &ray, dir, strict));
                }
            }
        }
    }

    #[test]
    fn locate_examples() {
        let sq = square();
        for o in [OracleSuite::exhaustive(&sq), OracleSuite::accelerated(&sq)] {
            assert_eq!(o.locate(&sq, &half(1, 1)).unwrap(), Location::Interior);
            assert_eq!(o.locate(&sq, &half(2, 1)).unwrap(), Location::Boundary);
            assert_eq!(o.locate(&sq, &pt(2, 2)).unwrap(), Location::Exterior);
            assert_eq!(o.locate(&sq, &half(-1, 1)).unwrap(), Location::Exterior);
        }
    }

    #[test]
    fn sync_tracks_mutations() {
        let mut sq = square();
        let mut o = OracleSuite::accelerated(&sq);
        let a = id_at(&sq, &pt(0, 0));
        let spike = sq.insert_vertex(a, half(1, -1)).unwrap();
        let down = Ray::through(Point::from_fracs(1, 2, 1, 10), Point::from_fracs(1, 2, -1, 1));
        assert_eq!(o.ray_shoot(&sq, &down), Err(Error::StaleOracle { oracle: 0, polygon: 1 }));
        let m = sq.last_mutation().unwrap().clone();
        o.sync(&sq, &m).unwrap();
        let h = o.ray_shoot(&sq, &down).unwrap().unwrap();
        assert_eq!(h.at_vertex, Some(spike));
        assert_eq!(o.sync(&sq, &m), Err(Error::OutOfOrderSync { expected: 2, got: 1 }));

        sq.delete_vertex(spike).unwrap();
        o.sync(&sq, &sq.last_mutation().unwrap().clone()).unwrap();
        let h = o.ray_shoot(&sq, &down).unwrap().unwrap();
        assert_eq!(h.point, half(1, 0));
        assert_eq!(h.at_vertex, None);
    }

    fn l_shape() -> SimplePolygon {
        SimplePolygon::from_vertices(&[pt(0, 0), pt(4, 0), pt(4, 1), pt(1, 1), pt(1, 4), pt(0, 4)]).unwrap()
    }

    #[test]
    fn geodesic_examples() {
        let sq = square();
        let l = l_shape();
        for kind in [OracleKind::Exhaustive, OracleKind::Accelerated, OracleKind::CrossCheck] {
            let cfg = OracleConfig { kind, rebuild_period: None };
            let o = OracleSuite::new(&sq, cfg);
            let (a, b) = (Point::from_fracs(1, 10, 1, 5), Point::from_fracs(9, 10, 7, 10));
            assert_eq!(o.geodesic_first_edge(&sq, &a, &b).unwrap(), Segment::new(a.clone(), b.clone()));
            assert!((o.geodesic_distance(&sq, &a, &b).unwrap() - a.dist_f64(&b)).abs() < 1e-12);
            assert_eq!(o.geodesic_distance(&sq, &a, &a).unwrap(), 0.0);
            assert!(o.geodesic_first_edge(&sq, &a, &a).unwrap().is_degenerate());

            let o = OracleSuite::new(&l, cfg);
            let (a, b) = (half(7, 1), half(1, 7));
            let corner = pt(1, 1);
            assert_eq!(o.geodesic_first_edge(&l, &a, &b).unwrap(), Segment::new(a.clone(), corner.clone()));
            let d = o.geodesic_distance(&l, &a, &b).unwrap();
            assert!((d - (a.dist_f64(&corner) + corner.dist_f64(&b))).abs() < 1e-12);
        }
    }

    #[test]
    fn geodesics_agree_on_random_polygons() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for round in 0..40 {
            let poly = if round % 2 == 0 { random_star(&mut rng, 16, 50) } else { random_two_opt(&mut rng, 14, 30) };
            let o = OracleSuite::new(&poly, OracleConfig { kind: OracleKind::CrossCheck, rebuild_period: None });
            for _ in 0..5 {
                let a = random_interior_point(&mut rng, &poly, 4);
                let b = random_interior_point(&mut rng, &poly, 4);
                o.geodesic_path(&poly, &a, &b).unwrap();
            }
        }
    }

    /// Random legal mutation; returns false when the attempt was rejected.
    fn mutate<R: Rng>(rng: &mut R, poly: &mut SimplePolygon, keep_inside: Option<&Point>) -> bool {
        let ids: Vec<VertexId> = poly.ids().collect();
        let v = ids[rng.gen_range(0..ids.len())];
        let snapshot = poly.clone();
        let ok = if rng.gen_bool(0.5) && poly.len() > 4 {
            poly.delete_vertex(v).is_ok()
        } else {
            let (a, b) = (poly.point(v).clone(), poly.point(poly.next(v)).clone());
            let mid = a.midpoint(&b);
            let p = mid.translate(
                &Rational::new(rng.gen_range(-20..=20).into(), 4.into()),
                &Rational::new(rng.gen_range(-20..=20).into(), 4.into()),
            );
            poly.insert_vertex(v, p).is_ok()
        };
        if ok {
            if let Some(q) = keep_inside {
                if poly.locate(q) != Location::Interior {
                    *poly = snapshot;
                    return false;
                }
            }
        }
        ok
    }

    #[test]
    fn accelerated_matches_exhaustive_under_mutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for round in 0..12 {
            let mut poly = if round % 2 == 0 { random_star(&mut rng, 24, 40) } else { random_two_opt(&mut rng, 24, 40) };
            let mut o = OracleSuite::new(&poly, OracleConfig { kind: OracleKind::CrossCheck, rebuild_period: Some(3) });
            for _ in 0..30 {
                if mutate(&mut rng, &mut poly, None) {
                    let m = poly.last_mutation().unwrap().clone();
                    o.sync(&poly, &m).unwrap();
                }
                let q = random_interior_point(&mut rng, &poly, 8);
                let toward = random_interior_point(&mut rng, &poly, 8);
                let Some(ray) = Ray::try_through(q, toward) else { continue };
                o.ray_shoot(&poly, &ray).unwrap();
                for dir in [Rotation::Ccw, Rotation::Cw] {
                    for strict in [false, true] {
                        let got = o.ray_rotate(&poly, &ray, dir, strict).unwrap();
                        assert_eq!(got, brute_rotate(&poly, &ray, dir, strict));
                    }
                }
                o.locate(&poly, ray.toward()).unwrap();
            }
        }
    }

    #[test]
    fn random_queries_agree_across_implementations() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut queries = 0;
        while queries < 1000 {
            let n = rng.gen_range(4..=64);
            let poly = if queries % 2 == 0 { random_star(&mut rng, n, 200) } else { random_two_opt(&mut rng, n, 60) };
            let o = OracleSuite::new(&poly, OracleConfig { kind: OracleKind::CrossCheck, rebuild_period: None });
            for _ in 0..50 {
                let q = random_interior_point(&mut rng, &poly, 3);
                // Aim at vertices half the time to exercise degenerate hits.
                let toward = if rng.gen_bool(0.5) {
                    let ids: Vec<VertexId> = poly.ids().collect();
                    poly.point(ids[rng.gen_range(0..ids.len())]).clone()
                } else {
                    random_interior_point(&mut rng, &poly, 3)
                };
                let Some(ray) = Ray::try_through(q.clone(), toward) else { continue };
                let h = o.ray_shoot(&poly, &ray).unwrap().unwrap();
                assert_eq!(Some(h.point.clone()), scan_hit(&poly, &ray));
                for dir in [Rotation::Ccw, Rotation::Cw] {
                    for strict in [false, true] {
                        let got = o.ray_rotate(&poly, &ray, dir, strict).unwrap();
                        if let Some(v) = got {
                            let p = poly.point(v);
                            assert!(poly.segment_within(&q, p, Side::Interior));
                            if strict {
                                assert!(!ray.contains(p));
                            }
                        }
                        assert_eq!(got, brute_rotate(&poly, &ray, dir, strict));
                    }
                }
                assert_eq!(o.locate(&poly, ray.toward()).unwrap(), poly.locate(ray.toward()));
                queries += 1;
            }
        }
    }
}
