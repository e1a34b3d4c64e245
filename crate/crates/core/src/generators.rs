//! Polygon families for tests and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::kernel::{orient, segments_intersect, AngularOrder, Point, Rational, Segment};
use crate::polygon::{Location, SimplePolygon, VertexId};

/// Comb with `teeth` upward teeth of width 1 separated by gaps of width 1,
/// standing on a spine of height 1. Has `4 * teeth` vertices.
pub fn comb(teeth: usize, height: i64) -> SimplePolygon {
    assert!(teeth >= 1);
    let t = teeth as i64;
    let mut pts = vec![Point::from_ints(0, 0), Point::from_ints(2 * t - 1, 0)];
    for i in (0..t).rev() {
        pts.push(Point::from_ints(2 * i + 1, 1 + height));
        pts.push(Point::from_ints(2 * i, 1 + height));
        if i > 0 {
            pts.push(Point::from_ints(2 * i, 1));
            pts.push(Point::from_ints(2 * i - 1, 1));
        }
    }
    SimplePolygon::from_vertices(&pts).expect("comb is simple")
}

/// Id of the vertex at the top-left corner of tooth `i` (counted from the left).
pub fn comb_tooth_corner(poly: &SimplePolygon, i: usize, height: i64) -> Option<VertexId> {
    let target = Point::from_ints(2 * i as i64, 1 + height);
    poly.ids().find(|&v| poly.point(v) == &target)
}

/// Staircase with `steps` unit steps rising to the right, closed by the axes.
pub fn staircase(steps: usize) -> SimplePolygon {
    assert!(steps >= 1);
    let s = steps as i64;
    let mut pts = vec![Point::from_ints(0, 0)];
    for i in 0..s {
        pts.push(Point::from_ints(i + 1, i));
        pts.push(Point::from_ints(i + 1, i + 1));
    }
    pts.push(Point::from_ints(0, s));
    SimplePolygon::from_vertices(&pts).expect("staircase is simple")
}

/// Random polygon star-shaped about the origin, with integer coordinates in
/// `[-range, range]`. The origin is strictly interior.
pub fn random_star<R: Rng>(rng: &mut R, n: usize, range: i64) -> SimplePolygon {
    assert!(n >= 3);
    let origin = Point::from_ints(0, 0);
    let east = Point::from_ints(1, 0);
    loop {
        let mut pts: Vec<Point> = (0..n)
            .map(|_| {
                let r = rng.gen_range(range / 4..=range).max(1);
                let theta = rng.gen_range(0.0..std::f64::consts::TAU);
                Point::from_ints((r as f64 * theta.cos()).round() as i64, (r as f64 * theta.sin()).round() as i64)
            })
            .filter(|p| *p != origin)
            .collect();
        let order = AngularOrder::new(&origin, &east);
        pts.sort_by(|a, b| order.cmp(a, b));
        pts.dedup_by(|a, b| order.cmp(a, b).is_eq());
        if pts.len() < 3 {
            continue;
        }
        let m = pts.len();
        if (0..m).any(|i| orient(&origin, &pts[i], &pts[(i + 1) % m]) <= 0) {
            continue;
        }
        if let Ok(p) = SimplePolygon::from_vertices(&pts) {
            return p;
        }
    }
}

/// Random simple polygon from uniformly scattered integer points, untangled
/// by 2-opt moves.
pub fn random_two_opt<R: Rng>(rng: &mut R, n: usize, range: i64) -> SimplePolygon {
    assert!(n >= 3);
    loop {
        let mut pts: Vec<Point> = Vec::with_capacity(n);
        while pts.len() < n {
            let p = Point::from_ints(rng.gen_range(-range..=range), rng.gen_range(-range..=range));
            if !pts.contains(&p) {
                pts.push(p);
            }
        }
        pts.shuffle(rng);
        if untangle(&mut pts) {
            if let Ok(p) = SimplePolygon::from_vertices(&pts) {
                return p;
            }
        }
    }
}

/// Applies 2-opt reversals until no two edges meet improperly. Gives up
/// (returns false) on configurations it cannot resolve, such as collinear
/// overlaps.
fn untangle(pts: &mut [Point]) -> bool {
    let n = pts.len();
    for _ in 0..n * n * 4 {
        let mut fixed = true;
        'scan: for i in 0..n {
            for j in i + 2..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (a, b) = (&pts[i], &pts[(i + 1) % n]);
                let (c, d) = (&pts[j], &pts[(j + 1) % n]);
                if segments_intersect(a, b, c, d) {
                    pts[i + 1..=j].reverse();
                    fixed = false;
                    break 'scan;
                }
            }
        }
        if fixed {
            return true;
        }
    }
    false
}

/// Uniform random point with coordinates on a grid of `1/denom` inside the
/// bounding box of `poly`, rejected until it is strictly interior.
pub fn random_interior_point<R: Rng>(rng: &mut R, poly: &SimplePolygon, denom: i64) -> Point {
    let (lo, hi) = int_bounds(poly);
    loop {
        let p = Point::from_fracs(
            rng.gen_range(lo.0 * denom..=hi.0 * denom),
            denom,
            rng.gen_range(lo.1 * denom..=hi.1 * denom),
            denom,
        );
        if poly.locate(&p) == Location::Interior {
            return p;
        }
    }
}

/// Segment between two random interior points whose closed extent touches no
/// edge.
pub fn random_interior_segment<R: Rng>(rng: &mut R, poly: &SimplePolygon, denom: i64) -> Segment {
    loop {
        let a = random_interior_point(rng, poly, denom);
        let b = random_interior_point(rng, poly, denom);
        let clear = poly.edges().all(|e| {
            let (u, w) = poly.edge_points(e);
            !segments_intersect(&a, &b, u, w)
        });
        if clear {
            return Segment::new(a, b);
        }
    }
}

/// Like [`random_interior_point`] but strictly exterior, within the bounding
/// box grown by `pad`.
pub fn random_exterior_point<R: Rng>(rng: &mut R, poly: &SimplePolygon, denom: i64, pad: i64) -> Point {
    let (lo, hi) = int_bounds(poly);
    loop {
        let p = Point::from_fracs(
            rng.gen_range((lo.0 - pad) * denom..=(hi.0 + pad) * denom),
            denom,
            rng.gen_range((lo.1 - pad) * denom..=(hi.1 + pad) * denom),
            denom,
        );
        if poly.locate(&p) == Location::Exterior {
            return p;
        }
    }
}

/// A proposed polygon mutation; it may still be rejected when applied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Edit {
    Insert { after: VertexId, point: Point },
    Delete { id: VertexId },
}

/// Random insert (a point near a random edge, offset along its normal by up
/// to half the edge length) or, with probability `p_delete`, a random delete.
pub fn random_edit<R: Rng>(rng: &mut R, poly: &SimplePolygon, p_delete: f64) -> Edit {
    let ids: Vec<VertexId> = poly.ids().collect();
    let pick = ids[rng.gen_range(0..ids.len())];
    if ids.len() > 3 && rng.gen_bool(p_delete) {
        return Edit::Delete { id: pick };
    }
    let a = poly.point(pick);
    let b = poly.point(poly.next(pick));
    let (dx, dy) = (b.x() - a.x(), b.y() - a.y());
    let t = Rational::new(rng.gen_range(1..16).into(), 16.into());
    let s = Rational::new(rng.gen_range(-8..=8).into(), 16.into());
    let point = Point::new(a.x() + &t * &dx - &s * &dy, a.y() + &t * &dy + &s * &dx);
    Edit::Insert { after: pick, point }
}

fn int_bounds(poly: &SimplePolygon) -> ((i64, i64), (i64, i64)) {
    let mut lo = (i64::MAX, i64::MAX);
    let mut hi = (i64::MIN, i64::MIN);
    for v in poly.ids() {
        let (x, y) = poly.point(v).approx();
        lo = (lo.0.min(x.floor() as i64), lo.1.min(y.floor() as i64));
        hi = (hi.0.max(x.ceil() as i64), hi.1.max(y.ceil() as i64));
    }
    (lo, hi)
}
