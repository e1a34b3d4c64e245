//! Brute-force ground truth. Nothing here consults an oracle; every answer is
//! computed from the definitions by scanning all vertices and edges.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::kernel::{
    cmp_dist, line_intersection, line_param, on_segment, orient, ray_segment_hit, same_direction,
    segments_intersect, AngularOrder, Point, Ray, Rational, Segment,
};
use crate::oracle::{Domain, Hit, Rotation};
use crate::par;
use crate::polygon::{EdgeId, Location, Side, SimplePolygon, VertexId};
use crate::vp::{assemble, is_occluder, unit_east, BoundaryVertex, VisibilityPolygon};
use crate::weak::WeakVisibilityPolygon;

/// Vertices `v` whose closed segment `qv` stays in the closure of `side`.
pub fn brute_visible(poly: &SimplePolygon, side: Side, q: &Point) -> Vec<VertexId> {
    let ids: Vec<VertexId> = poly.ids().collect();
    let seen = par::map(&ids, |&v| poly.segment_within(q, poly.point(v), side));
    ids.into_iter().zip(seen).filter_map(|(v, s)| s.then_some(v)).collect()
}

/// First boundary point at positive parameter along `origin -> toward`,
/// scanning every edge (and the extra `lid` segment when given).
pub fn brute_shoot(poly: &SimplePolygon, lid: Option<EdgeId>, origin: &Point, toward: &Point) -> Option<Hit> {
    let ray = Ray::through(origin.clone(), toward.clone());
    let mut best: Option<(Rational, Point, EdgeId)> = None;
    for e in poly.edges().chain(lid) {
        let (a, b) = poly.edge_points(e);
        let Some((p, t)) = ray_segment_hit(&ray, &Segment::new(a.clone(), b.clone())) else {
            continue;
        };
        if !t.is_positive() {
            continue;
        }
        if best.as_ref().is_none_or(|(bt, _, _)| t < *bt) {
            best = Some((t, p, e));
        }
    }
    let (_, point, edge) = best?;
    match poly.ids().find(|&w| poly.point(w) == &point) {
        Some(w) => Some(Hit { point, edge: poly.edge_after(w), at_vertex: Some(w) }),
        None => Some(Hit { point, edge, at_vertex: None }),
    }
}

fn brute_region_in(poly: &SimplePolygon, domain: &Domain, q: &Point, visible: &[VertexId]) -> VisibilityPolygon {
    let cons: Vec<(VertexId, Hit)> = visible
        .iter()
        .filter(|&&v| is_occluder(poly, domain, q, v))
        .filter_map(|&v| {
            let p = poly.point(v);
            brute_shoot(poly, domain.lid, p, &p.mirror(q)).map(|h| (v, h))
        })
        .collect();
    VisibilityPolygon {
        center: q.clone(),
        boundary: assemble(poly, domain, q, visible.iter().copied(), cons),
        unbounded: false,
    }
}

/// Visibility polygon of an interior point by per-vertex segment tests.
pub fn brute_vp(poly: &SimplePolygon, q: &Point) -> Result<VisibilityPolygon> {
    if poly.locate(q) != Location::Interior {
        return Err(Error::CenterNotInterior);
    }
    let visible = brute_visible(poly, Side::Interior, q);
    Ok(brute_region_in(poly, &Domain::INTERIOR, q, &visible))
}

/// Boundary points of the visibility polygon by a radial sweep: the edge seen
/// between consecutive vertex directions is found by shooting the bisecting
/// ray, and each vertex direction contributes the two limit points of its
/// neighbouring edges plus the vertices seen along it.
pub fn brute_vp_radial(poly: &SimplePolygon, q: &Point) -> Result<Vec<Point>> {
    if poly.locate(q) != Location::Interior {
        return Err(Error::CenterNotInterior);
    }
    let east = unit_east(q);
    let order = AngularOrder::new(q, &east);
    let mut pts: Vec<VertexId> = poly.ids().collect();
    pts.sort_by(|a, b| order.cmp_then_dist(poly.point(*a), poly.point(*b)));
    let mut groups: Vec<Vec<VertexId>> = Vec::new();
    for v in pts {
        match groups.last_mut() {
            Some(g) if order.cmp(poly.point(g[0]), poly.point(v)) == Ordering::Equal => g.push(v),
            _ => groups.push(vec![v]),
        }
    }
    let m = groups.len();
    let dir = |i: usize| poly.point(groups[i % m][0]);
    // Edge seen in the gap after each direction.
    let gap_edges: Vec<(Point, Point)> = (0..m)
        .map(|i| {
            let (a, b) = (dir(i), dir(i + 1));
            debug_assert!(orient(q, a, b) > 0, "angular gap below half a turn");
            let mid = Point::new(a.x() + b.x() - q.x(), a.y() + b.y() - q.y());
            let h = brute_shoot(poly, None, q, &mid).expect("interior point sees the boundary");
            let (u, w) = poly.edge_points(h.edge);
            (u.clone(), w.clone())
        })
        .collect();
    let mut out: Vec<Point> = Vec::new();
    for i in 0..m {
        let d = dir(i);
        let before = &gap_edges[(i + m - 1) % m];
        let after = &gap_edges[i];
        let r = line_intersection(&before.0, &before.1, q, d).expect("edge meets the ray");
        let l = line_intersection(&after.0, &after.1, q, d).expect("edge meets the ray");
        let seen: Vec<Point> = groups[i]
            .iter()
            .map(|&v| poly.point(v).clone())
            .filter(|p| poly.segment_within(q, p, Side::Interior))
            .collect();
        if seen.is_empty() {
            continue;
        }
        // Walk from r out to the farthest point, then back to l.
        let mut along = seen;
        along.push(r.clone());
        along.push(l.clone());
        along.extend(farthest_on_ray(poly, q, d));
        along.sort_by(|a, b| cmp_dist(q, a, b));
        along.dedup();
        let at = |p: &Point| along.iter().position(|x| x == p).unwrap();
        let (ri, li, far) = (at(&r), at(&l), along.len() - 1);
        out.push(r.clone());
        out.extend((ri + 1..=far).filter(|&k| k != li).map(|k| along[k].clone()));
        if li < ri {
            out.extend((li..ri).rev().map(|k| along[k].clone()));
        } else if li != ri {
            out.push(l);
        }
    }
    out.dedup();
    while out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    Ok(out)
}

/// Farthest boundary point along `q -> d` whose segment from `q` stays inside.
fn farthest_on_ray(poly: &SimplePolygon, q: &Point, d: &Point) -> Option<Point> {
    let ray = Ray::through(q.clone(), d.clone());
    poly.edges()
        .filter_map(|e| {
            let (a, b) = poly.edge_points(e);
            let s = Segment::new(a.clone(), b.clone());
            if orient(q, d, a) == 0 && orient(q, d, b) == 0 {
                return Some(vec![a.clone(), b.clone()]);
            }
            ray_segment_hit(&ray, &s).map(|(p, _)| vec![p])
        })
        .flatten()
        .filter(|p| ray.param_of(p).is_positive() && poly.segment_within(q, p, Side::Interior))
        .max_by(|a, b| cmp_dist(q, a, b))
}

/// Ray rotation by definition: sort the visible vertices by turning angle.
pub fn brute_ray_rotate(poly: &SimplePolygon, ray: &Ray, dir: Rotation, strict: bool) -> Option<VertexId> {
    brute_ray_rotate_in(poly, Side::Interior, ray, dir, strict)
}

pub fn brute_ray_rotate_in(
    poly: &SimplePolygon,
    side: Side,
    ray: &Ray,
    dir: Rotation,
    strict: bool,
) -> Option<VertexId> {
    let q = ray.origin();
    let order = AngularOrder::from_ray(ray);
    brute_visible(poly, side, q)
        .into_iter()
        .filter(|&v| poly.point(v) != q && !(strict && order.is_zero(poly.point(v))))
        .min_by(|&a, &b| {
            let (pa, pb) = (poly.point(a), poly.point(b));
            let ang = match (order.is_zero(pa), order.is_zero(pb)) {
                (true, true) => Ordering::Equal,
                (true, false) => Ordering::Less,
                (false, true) => Ordering::Greater,
                _ => match dir {
                    Rotation::Ccw => order.cmp(pa, pb),
                    Rotation::Cw => order.cmp(pb, pa),
                },
            };
            ang.then_with(|| cmp_dist(q, pa, pb))
        })
}

/// Visible vertices strictly inside the open cone from `r1` ccw to `r2`.
pub fn brute_visible_in_opencone(poly: &SimplePolygon, r1: &Ray, r2: &Ray) -> BTreeSet<VertexId> {
    let cone = crate::kernel::Cone::new(r1.clone(), r2.clone(), true);
    brute_visible(poly, Side::Interior, r1.origin())
        .into_iter()
        .filter(|&v| poly.point(v) != r1.origin() && crate::kernel::in_cone(&cone, poly.point(v)))
        .collect()
}

/// Convex hull by gift wrapping, keeping points on hull edges: from each hull
/// point the next one makes the smallest left turn from the incoming
/// direction, the nearest winning ties. Starts at the lowest leftmost point.
pub fn brute_hull(points: &[Point]) -> Vec<usize> {
    let n = points.len();
    if n < 3 {
        return (0..n).collect();
    }
    let start = (0..n).min_by(|&a, &b| points[a].cmp(&points[b])).unwrap();
    let mut out = vec![start];
    let mut cur = start;
    let mut heading = points[start].translate(&Rational::zero(), &-Rational::one());
    loop {
        let c = &points[cur];
        let order = AngularOrder::new(c, &heading);
        let next = (0..n)
            .filter(|&i| points[i] != *c)
            .min_by(|&a, &b| order.cmp_then_dist(&points[a], &points[b]))
            .unwrap();
        if next == start || out.len() > n {
            break;
        }
        heading = points[next].mirror(c);
        out.push(next);
        cur = next;
    }
    out
}

/// Hull of the polygon's vertices as vertex ids, by [`brute_hull`].
pub fn brute_hull_ids(poly: &SimplePolygon) -> Vec<VertexId> {
    let ids: Vec<VertexId> = poly.ids().collect();
    let pts: Vec<Point> = ids.iter().map(|&v| poly.point(v).clone()).collect();
    brute_hull(&pts).into_iter().map(|i| ids[i]).collect()
}

/// Visibility polygon of an exterior point by per-vertex segment tests in
/// the closed exterior, assembled inside the tangent wedge or the pocket.
pub fn brute_exterior_vp(poly: &SimplePolygon, q: &Point) -> Result<VisibilityPolygon> {
    if poly.locate(q) != Location::Exterior {
        return Err(Error::PointNotExterior);
    }
    let hull = brute_hull_ids(poly);
    let h = hull.len();
    let visible = brute_visible(poly, Side::Exterior, q);
    let inside_hull = (0..h).all(|i| orient(poly.point(hull[i]), poly.point(hull[(i + 1) % h]), q) > 0);
    if !inside_hull {
        // The tangent vertex starting the ccw cone: every hull vertex lies
        // ccw of it or on its ray, and it is the nearest such.
        let start = hull
            .iter()
            .copied()
            .filter(|&s| hull.iter().all(|&p| orient(q, poly.point(s), poly.point(p)) >= 0))
            .filter(|&s| poly.point(s) != q)
            .min_by(|&a, &b| cmp_dist(q, poly.point(a), poly.point(b)))
            .ok_or(Error::PointNotExterior)?;
        let mut region = brute_region_in(poly, &Domain::EXTERIOR, q, &visible);
        region.boundary = crate::exterior::start_at(q, poly.point(start), region.boundary);
        region.unbounded = true;
        return Ok(region);
    }
    for i in 0..h {
        let (t1, t2) = (hull[i], hull[(i + 1) % h]);
        if poly.next(t1) == t2 {
            continue;
        }
        let pocket = crate::exterior::PocketRef { t_prime: t1, t_double_prime: t2 };
        let chain: Vec<Point> = pocket.chain(poly).iter().map(|&v| poly.point(v).clone()).collect();
        // The chain runs cw around the pocket; reverse it for a ccw polygon.
        let ring: Vec<Point> = chain.into_iter().rev().collect();
        let Ok(shape) = SimplePolygon::from_vertices(&ring) else { continue };
        if shape.locate(q) == Location::Interior {
            return Ok(brute_region_in(poly, &Domain::pocket(pocket.lid()), q, &visible));
        }
    }
    Err(Error::PointNotExterior)
}

/// Parameters along `s` where the visibility of some vertex from the moving
/// point may change: the endpoints, every crossing of `s` with a line through
/// two vertices, and the midpoints between consecutive ones.
fn sweep_params(poly: &SimplePolygon, s: &Segment, through: Option<VertexId>) -> Vec<Rational> {
    let mut ts = vec![Rational::zero(), Rational::one()];
    if !s.is_degenerate() {
        let ids: Vec<VertexId> = poly.ids().collect();
        for (i, &x) in ids.iter().enumerate() {
            for &y in &ids[i + 1..] {
                if through.is_some_and(|v| v != x && v != y) {
                    continue;
                }
                if let Some(t) = line_param(&s.a, &s.b, poly.point(x), poly.point(y)) {
                    if !t.is_negative() && t <= Rational::one() {
                        ts.push(t);
                    }
                }
            }
        }
    }
    ts.sort();
    ts.dedup();
    let two = Rational::from_integer(2.into());
    let mids: Vec<Rational> = ts.windows(2).map(|w| (&w[0] + &w[1]) / &two).collect();
    ts.extend(mids);
    ts.sort();
    ts
}

/// Vertices `v` seen from some point of `s`, i.e. with `VP(v)` meeting `s`.
pub fn brute_weakly_visible(poly: &SimplePolygon, s: &Segment) -> Vec<VertexId> {
    let ids: Vec<VertexId> = poly.ids().collect();
    let seen = par::map(&ids, |&v| {
        sweep_params(poly, s, Some(v))
            .iter()
            .any(|t| poly.segment_within(poly.point(v), &s.at(t), Side::Interior))
    });
    ids.into_iter().zip(seen).filter_map(|(v, s)| s.then_some(v)).collect()
}

/// Every critical constraint crossing `s`, by enumerating vertex pairs: the
/// crossing `c` at parameter `t` sees `far` along a line through `near`.
/// Returned as `(near, far, t)`.
pub fn brute_constraints(poly: &SimplePolygon, s: &Segment) -> Vec<(VertexId, VertexId, Rational)> {
    let mut out = Vec::new();
    if s.is_degenerate() {
        return out;
    }
    for x in poly.ids() {
        for y in poly.ids() {
            let (px, py) = (poly.point(x), poly.point(y));
            if x == y {
                continue;
            }
            let Some(t) = line_param(&s.a, &s.b, px, py) else { continue };
            if t.is_negative() || t > Rational::one() {
                continue;
            }
            let c = s.at(&t);
            // `x` strictly between `c` and `y`.
            let ahead = same_direction(&c, px, py) && cmp_dist(&c, px, py).is_lt();
            if ahead && poly.segment_within(&c, py, Side::Interior) {
                out.push((x, y, t));
            }
        }
    }
    out
}

/// Sweep parameter and boundary entry at one end of a visible span.
type End = (Rational, BoundaryVertex);

/// Weak visibility polygon of `s` as the union of visibility polygons sampled
/// along it. On each edge the union of the sampled visible parts is one
/// interval; the boundary lists the ends of those intervals in edge order.
pub fn brute_wvp(poly: &SimplePolygon, s: &Segment) -> Result<WeakVisibilityPolygon> {
    if !s.is_degenerate() && poly.edges().any(|e| {
        let (u, w) = poly.edge_points(e);
        segments_intersect(&s.a, &s.b, u, w)
    }) {
        return Err(Error::SegmentNotInterior);
    }
    if poly.locate(&s.a) != Location::Interior {
        return Err(Error::SegmentNotInterior);
    }
    let ts = sweep_params(poly, s, None);
    let samples = par::map(&ts, |t| brute_vp(poly, &s.at(t)).expect("segment is interior"));
    let mut spans: Vec<Option<(End, End)>> = Vec::new();
    let edges: Vec<EdgeId> = poly.edges().collect();
    for &e in &edges {
        let (u, w) = poly.edge_points(e);
        let line = Ray::through(u.clone(), w.clone());
        let mut span: Option<((Rational, BoundaryVertex), (Rational, BoundaryVertex))> = None;
        for b in samples.iter().flat_map(|vp| vp.boundary.iter()) {
            if !on_segment(u, w, &b.point) {
                continue;
            }
            let t = line.param_of(&b.point);
            let b = match poly.ids().find(|&v| poly.point(v) == &b.point) {
                Some(v) => BoundaryVertex::polygon(poly, v),
                None => b.clone(),
            };
            span = Some(match span {
                None => ((t.clone(), b.clone()), (t, b)),
                Some((lo, hi)) => {
                    let lo = if t < lo.0 { (t.clone(), b.clone()) } else { lo };
                    let hi = if t > hi.0 { (t, b) } else { hi };
                    (lo, hi)
                }
            });
        }
        spans.push(span);
    }
    let mut out: Vec<BoundaryVertex> = Vec::new();
    for ((_, lo), (_, hi)) in spans.into_iter().flatten() {
        for b in [lo, hi] {
            if out.last().is_none_or(|l| l.point != b.point) {
                out.push(b);
            }
        }
    }
    while out.len() > 1 && out[0].point == out[out.len() - 1].point {
        out.pop();
    }
    Ok(WeakVisibilityPolygon { source: s.clone(), boundary: out })
}
