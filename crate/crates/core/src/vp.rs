//! Visibility polygons of points.
//!
//! Visible vertices are found by sweeping open cones with strict ray
//! rotations; each reflex-visible vertex then gets its constructed vertex by
//! one ray shot, and the boundary is assembled by angle around the center.

use std::collections::BTreeSet;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::kernel::{
    in_cone, orient, same_direction, signed_area2, AngularOrder, Cone, Point, Ray, Rational,
};
use crate::oracle::{
    domain_neighbors, domain_wedge_contains, domain_wedge_contains_strictly, Domain, Hit,
    OracleSuite, Rotation,
};
use crate::par;
use crate::polygon::{EdgeId, Location, SimplePolygon, VertexId};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum VertexKind {
    Polygon(VertexId),
    /// Lies on `edge`, seen past `blocker`; `at_vertex` is set when the point
    /// is itself a polygon vertex.
    Constructed { edge: EdgeId, blocker: VertexId, at_vertex: Option<VertexId> },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BoundaryVertex {
    pub point: Point,
    pub kind: VertexKind,
}

impl BoundaryVertex {
    pub fn polygon(poly: &SimplePolygon, v: VertexId) -> Self {
        BoundaryVertex { point: poly.point(v).clone(), kind: VertexKind::Polygon(v) }
    }

    pub fn constructed(blocker: VertexId, hit: Hit) -> Self {
        BoundaryVertex {
            point: hit.point,
            kind: VertexKind::Constructed { edge: hit.edge, blocker, at_vertex: hit.at_vertex },
        }
    }

    pub fn vertex(&self) -> Option<VertexId> {
        match self.kind {
            VertexKind::Polygon(v) => Some(v),
            VertexKind::Constructed { .. } => None,
        }
    }

    pub fn is_constructed(&self) -> bool {
        matches!(self.kind, VertexKind::Constructed { .. })
    }
}

/// Visible region of a point, as its boundary in ccw order around the center.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VisibilityPolygon {
    pub center: Point,
    pub boundary: Vec<BoundaryVertex>,
    /// Set when the region is open between the last and the first boundary
    /// vertex, extending to infinity along the rays from the center through
    /// them.
    pub unbounded: bool,
}

impl VisibilityPolygon {
    pub fn len(&self) -> usize {
        self.boundary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boundary.is_empty()
    }

    pub fn points(&self) -> Vec<Point> {
        self.boundary.iter().map(|b| b.point.clone()).collect()
    }

    /// Polygon vertices on the boundary.
    pub fn polygon_vertices(&self) -> BTreeSet<VertexId> {
        self.boundary.iter().filter_map(BoundaryVertex::vertex).collect()
    }

    pub fn constructed(&self) -> impl Iterator<Item = &BoundaryVertex> {
        self.boundary.iter().filter(|b| b.is_constructed())
    }

    /// Same cyclic sequence of boundary points.
    pub fn same_boundary(&self, other: &VisibilityPolygon) -> bool {
        cyclic_eq(&self.points(), &other.points())
    }

    /// Twice the enclosed area (of the closed boundary polygon).
    pub fn area2(&self) -> Rational {
        signed_area2(&self.points())
    }
}

/// True iff `b` is a rotation of `a`.
pub fn cyclic_eq<T: PartialEq>(a: &[T], b: &[T]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    let n = a.len();
    (0..n).any(|s| b[s] == a[0] && (0..n).all(|i| a[i] == b[(s + i) % n]))
}

/// True iff the center sees past `v`: the direction `v - q` lies strictly
/// inside the domain's wedge at `v`.
pub(crate) fn is_occluder(poly: &SimplePolygon, domain: &Domain, q: &Point, v: VertexId) -> bool {
    let p = poly.point(v);
    p != q && domain_wedge_contains_strictly(poly, domain, v, &p.mirror(q))
}

pub(crate) fn unit_east(q: &Point) -> Point {
    q.translate(&Rational::one(), &Rational::zero())
}

/// Orders visible vertices and constructed points into the boundary.
///
/// Points are grouped by direction from `q` and the groups sorted by angle.
/// Inside a group the boundary runs outward when the nearest vertex's
/// off-ray neighbour lies clockwise of the ray, inward otherwise.
pub(crate) fn assemble<I, J>(
    poly: &SimplePolygon,
    domain: &Domain,
    q: &Point,
    visible: I,
    constructed: J,
) -> Vec<BoundaryVertex>
where
    I: IntoIterator<Item = VertexId>,
    J: IntoIterator<Item = (VertexId, Hit)>,
{
    let mut items: Vec<BoundaryVertex> = visible.into_iter().map(|v| BoundaryVertex::polygon(poly, v)).collect();
    items.extend(constructed.into_iter().map(|(u, h)| BoundaryVertex::constructed(u, h)));
    let east = unit_east(q);
    let order = AngularOrder::new(q, &east);
    items.sort_by(|a, b| {
        order
            .cmp_then_dist(&a.point, &b.point)
            .then_with(|| a.is_constructed().cmp(&b.is_constructed()))
    });
    let mut out: Vec<BoundaryVertex> = Vec::with_capacity(items.len());
    let mut i = 0;
    while i < items.len() {
        let mut j = i + 1;
        while j < items.len() && order.cmp(&items[i].point, &items[j].point).is_eq() {
            j += 1;
        }
        let mut group: Vec<BoundaryVertex> = Vec::with_capacity(j - i);
        for b in &items[i..j] {
            push_dedup(&mut group, b.clone());
        }
        for b in walk_group(poly, domain, q, group) {
            push_dedup(&mut out, b);
        }
        i = j;
    }
    while out.len() > 1 && out[0].point == out[out.len() - 1].point {
        let last = out.pop().unwrap();
        if out[0].is_constructed() && !last.is_constructed() {
            out[0] = last;
        }
    }
    out
}

fn push_dedup(out: &mut Vec<BoundaryVertex>, b: BoundaryVertex) {
    match out.last_mut() {
        Some(prev) if prev.point == b.point => {
            if prev.is_constructed() && !b.is_constructed() {
                *prev = b;
            }
        }
        _ => out.push(b),
    }
}

/// Sides of the ray `q -> b` touched by the domain boundary at `b`, as
/// (clockwise, counterclockwise).
fn attachment(poly: &SimplePolygon, domain: &Domain, q: &Point, b: &BoundaryVertex) -> (bool, bool) {
    let w = match &b.kind {
        VertexKind::Polygon(v) => *v,
        VertexKind::Constructed { at_vertex: Some(w), .. } => *w,
        VertexKind::Constructed { .. } => return (true, true),
    };
    let mut sides = (false, false);
    for nb in domain_neighbors(poly, domain, w) {
        match orient(q, &b.point, poly.point(nb)) {
            s if s < 0 => sides.0 = true,
            s if s > 0 => sides.1 = true,
            _ => {}
        }
    }
    sides
}

/// Orders the points of one direction, sorted by distance, in boundary order:
/// from where the boundary arrives on the clockwise side out to the farthest
/// point, then back to where it leaves on the counterclockwise side.
fn walk_group(poly: &SimplePolygon, domain: &Domain, q: &Point, group: Vec<BoundaryVertex>) -> Vec<BoundaryVertex> {
    if group.len() < 2 {
        return group;
    }
    let sides: Vec<(bool, bool)> = group.iter().map(|b| attachment(poly, domain, q, b)).collect();
    let r = sides.iter().position(|s| s.0);
    let l = sides.iter().position(|s| s.1);
    let (r, l) = match (r, l) {
        (Some(r), Some(l)) => (r, l),
        (None, Some(_)) => return group.into_iter().rev().collect(),
        _ => return group,
    };
    let far = group.len() - 1;
    let mut order = vec![r];
    order.extend((r + 1..=far).filter(|&k| k != l));
    if l < r {
        order.extend((l..r).rev());
    } else if l != r {
        order.push(l);
    }
    order.into_iter().map(|k| group[k].clone()).collect()
}

/// Cone scans and on-ray walks against one oracle, domain and center.
pub(crate) struct Scan<'a> {
    pub poly: &'a SimplePolygon,
    pub oracle: &'a OracleSuite,
    pub domain: Domain,
    pub q: &'a Point,
}

impl<'a> Scan<'a> {
    /// Adds `first` (visible, nearest on its ray) and every vertex visible
    /// beyond it on the same ray.
    pub(crate) fn on_ray(&self, first: VertexId, out: &mut BTreeSet<VertexId>) {
        let mut x = first;
        loop {
            out.insert(x);
            let xp = self.poly.point(x);
            let beyond = xp.mirror(self.q);
            if !domain_wedge_contains(self.poly, &self.domain, x, &beyond) {
                return;
            }
            match self.oracle.shoot(self.poly, &self.domain, xp, &beyond) {
                Some(Hit { at_vertex: Some(y), .. }) => x = y,
                _ => return,
            }
        }
    }

    /// Visible vertices on the ray `q -> toward`.
    pub(crate) fn ray_vertices(&self, toward: &Point, out: &mut BTreeSet<VertexId>) {
        if let Some(Hit { at_vertex: Some(x), .. }) = self.oracle.shoot(self.poly, &self.domain, self.q, toward) {
            self.on_ray(x, out);
        }
    }

    /// Visible vertices strictly inside the open cone swept ccw from
    /// `q -> a` to `q -> b` (the plane minus one ray when the two coincide in
    /// direction). Returns the number of nested cones examined.
    pub(crate) fn open_cone(&self, a: &Point, b: &Point, out: &mut BTreeSet<VertexId>) -> usize {
        let q = self.q;
        let mut a = a.clone();
        let mut b = b.clone();
        // Set once the bounding ray runs through a vertex found here.
        let (mut va, mut vb): (Option<VertexId>, Option<VertexId>) = (None, None);
        let mut depth = 0;
        let rotate = |p: &Point, v: Option<VertexId>, dir: Rotation| match v {
            Some(v) => self.oracle.rotate_from_vertex(self.poly, &self.domain, q, v, dir),
            None => self.oracle.rotate(self.poly, &self.domain, q, p, dir, true),
        };
        loop {
            depth += 1;
            let cone = Cone::new(Ray::through(q.clone(), a.clone()), Ray::through(q.clone(), b.clone()), true);
            let inside = |v: &VertexId| in_cone(&cone, self.poly.point(*v));
            let Some(v1) = rotate(&a, va, Rotation::Ccw).filter(inside) else {
                return depth;
            };
            self.on_ray(v1, out);
            let p1 = self.poly.point(v1).clone();
            let v2 = rotate(&b, vb, Rotation::Cw).filter(inside);
            match v2 {
                Some(v2) if !same_direction(q, &p1, self.poly.point(v2)) => {
                    self.on_ray(v2, out);
                    b = self.poly.point(v2).clone();
                    vb = Some(v2);
                    a = p1;
                    va = Some(v1);
                }
                Some(_) => return depth,
                None => {
                    a = p1;
                    va = Some(v1);
                }
            }
        }
    }

    /// Constructed hits of every occluder among `visible`.
    pub(crate) fn constructed(&self, visible: &[VertexId]) -> Vec<(VertexId, Hit)> {
        let hits = par::map(visible, |&v| {
            if !is_occluder(self.poly, &self.domain, self.q, v) {
                return None;
            }
            let p = self.poly.point(v);
            self.oracle.shoot(self.poly, &self.domain, p, &p.mirror(self.q)).map(|h| (v, h))
        });
        hits.into_iter().flatten().collect()
    }

    pub(crate) fn assemble(&self, visible: &BTreeSet<VertexId>) -> VisibilityPolygon {
        let list: Vec<VertexId> = visible.iter().copied().collect();
        let cons = self.constructed(&list);
        VisibilityPolygon {
            center: self.q.clone(),
            boundary: assemble(self.poly, &self.domain, self.q, list, cons),
            unbounded: false,
        }
    }
}

/// Vertices visible from `r1`'s origin strictly inside the open cone from
/// `r1` ccw to `r2`. Equal rays give the plane minus that ray.
pub fn visible_vertices_in_opencone(
    poly: &SimplePolygon,
    oracle: &OracleSuite,
    r1: &Ray,
    r2: &Ray,
) -> Result<BTreeSet<VertexId>> {
    Ok(visible_vertices_in_opencone_traced(poly, oracle, r1, r2)?.0)
}

/// As [`visible_vertices_in_opencone`], also returning the number of nested
/// cones examined.
pub fn visible_vertices_in_opencone_traced(
    poly: &SimplePolygon,
    oracle: &OracleSuite,
    r1: &Ray,
    r2: &Ray,
) -> Result<(BTreeSet<VertexId>, usize)> {
    oracle.ensure_current(poly)?;
    assert_eq!(r1.origin(), r2.origin(), "cone rays must share their origin");
    let scan = Scan { poly, oracle, domain: Domain::INTERIOR, q: r1.origin() };
    let mut out = BTreeSet::new();
    let depth = scan.open_cone(r1.toward(), r2.toward(), &mut out);
    Ok((out, depth))
}

/// The visibility polygon of a strictly interior point.
pub fn compute_vp(poly: &SimplePolygon, oracle: &OracleSuite, q: &Point) -> Result<VisibilityPolygon> {
    if oracle.locate(poly, q)? != Location::Interior {
        return Err(Error::CenterNotInterior);
    }
    let scan = Scan { poly, oracle, domain: Domain::INTERIOR, q };
    let east = unit_east(q);
    let mut visible = BTreeSet::new();
    scan.ray_vertices(&east, &mut visible);
    scan.open_cone(&east, &east, &mut visible);
    Ok(scan.assemble(&visible))
}

/// Constructed vertex behind `v` as seen from `q`, if the boundary continues
/// behind `v`.
pub fn constructed_vertex_for(
    poly: &SimplePolygon,
    oracle: &OracleSuite,
    q: &Point,
    v: VertexId,
) -> Result<Option<BoundaryVertex>> {
    oracle.ensure_current(poly)?;
    if !poly.contains(v) {
        return Err(Error::UnknownVertex(v));
    }
    let scan = Scan { poly, oracle, domain: Domain::INTERIOR, q };
    Ok(scan.constructed(&[v]).pop().map(|(u, h)| BoundaryVertex::constructed(u, h)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{comb, random_interior_point, random_star, random_two_opt};
    use crate::reference::{brute_shoot, brute_visible_in_opencone, brute_vp, brute_vp_radial};
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

    fn notched() -> SimplePolygon {
        poly(&[(0, 0), (10, 0), (10, 10), (6, 10), (6, 6), (4, 6), (4, 10), (0, 10)])
    }

    #[test]
    fn quadrant_of_square() {
        let sq = poly(&[(0, 0), (2, 0), (2, 2), (0, 2)]);
        let o = OracleSuite::accelerated(&sq);
        let c = pt(1, 1);
        let got = visible_vertices_in_opencone(&sq, &o, &Ray::through(c.clone(), pt(2, 1)), &Ray::through(c.clone(), pt(1, 2))).unwrap();
        assert_eq!(got, BTreeSet::from([id_at(&sq, (2, 2))]));
        let east = Ray::through(c.clone(), pt(2, 1));
        let all = visible_vertices_in_opencone(&sq, &o, &east, &east).unwrap();
        assert_eq!(all.len(), 4);
    }

    #[test]
    fn comb_quarter_cone_matches_brute() {
        let c = comb(5, 4);
        let o = OracleSuite::accelerated(&c);
        let q = Point::from_fracs(9, 2, 1, 2);
        let r1 = Ray::through(q.clone(), q.translate(&Rational::one(), &Rational::zero()));
        let r2 = Ray::through(q.clone(), q.translate(&Rational::zero(), &Rational::one()));
        assert_eq!(visible_vertices_in_opencone(&c, &o, &r1, &r2).unwrap(), brute_visible_in_opencone(&c, &r1, &r2));
    }

    #[test]
    fn convex_vp_is_the_polygon() {
        let p = poly(&[(0, 0), (4, 0), (5, 3), (2, 5), (-1, 3)]);
        let o = OracleSuite::exhaustive(&p);
        let vp = compute_vp(&p, &o, &pt(2, 2)).unwrap();
        assert!(cyclic_eq(&vp.points(), &p.points()));
        assert_eq!(vp.constructed().count(), 0);
    }

    #[test]
    fn notch_casts_one_constructed_vertex_per_side() {
        let p = notched();
        let o = OracleSuite::accelerated(&p);
        let q = pt(5, 3);
        let vp = compute_vp(&p, &o, &q).unwrap();
        assert!(vp.same_boundary(&brute_vp(&p, &q).unwrap()));
        let blockers: BTreeSet<VertexId> = vp
            .constructed()
            .map(|b| match b.kind {
                VertexKind::Constructed { blocker, .. } => blocker,
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(blockers, BTreeSet::from([id_at(&p, (4, 6)), id_at(&p, (6, 6))]));
        assert!(vp.area2() < *p.area2());
    }

    #[test]
    fn vp_in_a_comb_tooth() {
        let c = comb(6, 5);
        let o = OracleSuite::accelerated(&c);
        let q = Point::from_fracs(9, 2, 5, 1);
        let vp = compute_vp(&c, &o, &q).unwrap();
        assert!(vp.same_boundary(&brute_vp(&c, &q).unwrap()));
        assert!(vp.polygon_vertices().len() < c.len() / 2);
    }

    #[test]
    fn boundary_center_is_rejected() {
        let p = notched();
        let o = OracleSuite::exhaustive(&p);
        assert_eq!(compute_vp(&p, &o, &pt(5, 0)), Err(Error::CenterNotInterior));
        assert_eq!(compute_vp(&p, &o, &pt(5, 8)), Err(Error::CenterNotInterior));
    }

    #[test]
    fn constructed_vertex_examples() {
        let p = notched();
        let o = OracleSuite::exhaustive(&p);
        let c = pt(5, 3);
        assert_eq!(constructed_vertex_for(&p, &o, &c, id_at(&p, (10, 10))).unwrap(), None);
        let mouth = id_at(&p, (6, 6));
        let got = constructed_vertex_for(&p, &o, &c, mouth).unwrap().unwrap();
        let want = brute_shoot(&p, None, &pt(6, 6), &pt(6, 6).mirror(&c)).unwrap();
        assert_eq!(got.point, want.point);
        assert_eq!(got.kind, VertexKind::Constructed { edge: want.edge, blocker: mouth, at_vertex: None });

        // The extension from (4, 2) through (6, 6) lands on the vertex (8, 10).
        let p = poly(&[(0, 0), (10, 0), (10, 10), (8, 10), (6, 10), (6, 6), (4, 6), (4, 10), (0, 10)]);
        let o = OracleSuite::accelerated(&p);
        let got = constructed_vertex_for(&p, &o, &pt(4, 2), id_at(&p, (6, 6))).unwrap().unwrap();
        assert_eq!(got.point, pt(8, 10));
        match got.kind {
            VertexKind::Constructed { at_vertex, .. } => assert_eq!(at_vertex, Some(id_at(&p, (8, 10)))),
            _ => panic!("expected a constructed vertex"),
        }
        let vp = compute_vp(&p, &o, &pt(4, 2)).unwrap();
        assert!(vp.same_boundary(&brute_vp(&p, &pt(4, 2)).unwrap()));
    }

    #[test]
    fn random_vps_match_both_brute_paths() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut worst = 0.0f64;
        for round in 0..100 {
            let n = rng.gen_range(4..=64);
            let p = if round % 2 == 0 { random_star(&mut rng, n, 300) } else { random_two_opt(&mut rng, n, 40) };
            let o = OracleSuite::accelerated(&p);
            for _ in 0..10 {
                let q = random_interior_point(&mut rng, &p, 2);
                o.reset_calls();
                let vp = compute_vp(&p, &o, &q).unwrap();
                let calls = o.calls() as f64;
                worst = worst.max(calls / (vp.len() as f64 + 1.0));
                let brute = brute_vp(&p, &q).unwrap();
                assert!(vp.same_boundary(&brute), "q = {q}\n got {:?}\nwant {:?}", vp.points(), brute.points());
                assert!(cyclic_eq(&vp.points(), &brute_vp_radial(&p, &q).unwrap()), "radial disagrees at q = {q}");
            }
        }
        assert!(worst <= 8.0, "calls per output vertex {worst}");
    }

    #[test]
    fn random_cones_match_brute() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for round in 0..300 {
            let n = rng.gen_range(4..=40);
            let p = if round % 2 == 0 { random_star(&mut rng, n, 300) } else { random_two_opt(&mut rng, n, 40) };
            let o = OracleSuite::accelerated(&p);
            let q = random_interior_point(&mut rng, &p, 2);
            let ids: Vec<VertexId> = p.ids().collect();
            let aim = |rng: &mut ChaCha8Rng| {
                if rng.gen_bool(0.5) {
                    p.point(ids[rng.gen_range(0..ids.len())]).clone()
                } else {
                    random_interior_point(rng, &p, 2)
                }
            };
            let a = aim(&mut rng);
            let b = if rng.gen_bool(0.2) { a.clone() } else { aim(&mut rng) };
            let (Some(r1), Some(r2)) = (Ray::try_through(q.clone(), a), Ray::try_through(q.clone(), b)) else { continue };
            let (got, depth) = visible_vertices_in_opencone_traced(&p, &o, &r1, &r2).unwrap();
            let want = brute_visible_in_opencone(&p, &r1, &r2);
            assert_eq!(got, want);
            assert!(depth <= want.len() + 1);
        }
    }
}
