//! Euclidean shortest paths inside the polygon.
//!
//! Two independent paths: Dijkstra over the visibility graph of the vertices,
//! and the funnel algorithm over an ear-clipping triangulation.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, VecDeque};

use crate::kernel::{dot_sign, orient, point_in_triangle, Point};
use crate::polygon::{Side, SimplePolygon, VertexId};

/// Drops interior points of straight runs.
pub(crate) fn straighten(path: Vec<Point>) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(path.len());
    for p in path {
        if out.last() == Some(&p) {
            continue;
        }
        while out.len() >= 2 {
            let a = &out[out.len() - 2];
            let b = &out[out.len() - 1];
            if orient(a, b, &p) == 0 && dot_sign(a, b, b, &p) > 0 {
                out.pop();
            } else {
                break;
            }
        }
        out.push(p);
    }
    out
}

pub(crate) fn path_length(path: &[Point]) -> f64 {
    path.windows(2).map(|w| w[0].dist_f64(&w[1])).sum()
}

/// Vertex-to-vertex visibility, computed once per polygon generation.
#[derive(Debug)]
pub(crate) struct VisibilityGraph {
    ids: Vec<VertexId>,
    adj: Vec<Vec<(usize, f64)>>,
}

impl VisibilityGraph {
    pub(crate) fn build(poly: &SimplePolygon) -> Self {
        let ids: Vec<VertexId> = poly.ids().collect();
        let n = ids.len();
        let mut adj = vec![Vec::new(); n];
        for i in 0..n {
            for j in i + 1..n {
                let (p, r) = (poly.point(ids[i]), poly.point(ids[j]));
                if poly.segment_within(p, r, Side::Interior) {
                    let d = p.dist_f64(r);
                    adj[i].push((j, d));
                    adj[j].push((i, d));
                }
            }
        }
        VisibilityGraph { ids, adj }
    }

    /// Shortest path from `a` to `b`, both in the closed polygon.
    pub(crate) fn path(&self, poly: &SimplePolygon, a: &Point, b: &Point) -> Vec<Point> {
        if poly.segment_within(a, b, Side::Interior) {
            return straighten(vec![a.clone(), b.clone()]);
        }
        let n = self.ids.len();
        // Nodes 0..n are vertices, n is `a`, n + 1 is `b`.
        let sees = |p: &Point| -> Vec<(usize, f64)> {
            (0..n)
                .filter_map(|i| {
                    let v = poly.point(self.ids[i]);
                    poly.segment_within(p, v, Side::Interior).then(|| (i, p.dist_f64(v)))
                })
                .collect()
        };
        let from_a = sees(a);
        let to_b: HashMap<usize, f64> = sees(b).into_iter().collect();
        let mut dist = vec![f64::INFINITY; n + 2];
        let mut prev = vec![usize::MAX; n + 2];
        let mut heap = BinaryHeap::new();
        dist[n] = 0.0;
        heap.push(State(0.0, n));
        while let Some(State(d, u)) = heap.pop() {
            if d > dist[u] || u == n + 1 {
                continue;
            }
            let edges: Vec<(usize, f64)> = if u == n {
                from_a.clone()
            } else {
                let mut e = self.adj[u].clone();
                if let Some(&w) = to_b.get(&u) {
                    e.push((n + 1, w));
                }
                e
            };
            for (v, w) in edges {
                let nd = d + w;
                if nd < dist[v] {
                    dist[v] = nd;
                    prev[v] = u;
                    heap.push(State(nd, v));
                }
            }
        }
        let mut rev = vec![b.clone()];
        let mut cur = prev[n + 1];
        while cur != n && cur != usize::MAX {
            rev.push(poly.point(self.ids[cur]).clone());
            cur = prev[cur];
        }
        rev.push(a.clone());
        rev.reverse();
        straighten(rev)
    }
}

#[derive(PartialEq)]
struct State(f64, usize);

impl Eq for State {}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

/// Triangulation by ear clipping; triangles are ccw.
#[derive(Debug)]
pub(crate) struct Triangulation {
    tris: Vec<[VertexId; 3]>,
    /// `adj[t][k]` is the triangle across edge `tris[t][k] -> tris[t][k + 1]`.
    adj: Vec<[Option<usize>; 3]>,
}

impl Triangulation {
    pub(crate) fn build(poly: &SimplePolygon) -> Self {
        let mut ring: Vec<VertexId> = poly.ids().collect();
        let mut tris = Vec::with_capacity(ring.len().saturating_sub(2));
        let mut i = 0;
        let mut misses = 0;
        while ring.len() > 3 {
            let m = ring.len();
            let (u, v, w) = (ring[(i + m - 1) % m], ring[i % m], ring[(i + 1) % m]);
            if is_ear(poly, &ring, u, v, w) {
                tris.push([u, v, w]);
                ring.remove(i % m);
                misses = 0;
                i %= ring.len();
            } else {
                i = (i + 1) % m;
                misses += 1;
                assert!(misses <= m, "no ear found in a simple polygon");
            }
        }
        tris.push([ring[0], ring[1], ring[2]]);
        let mut by_edge: HashMap<(VertexId, VertexId), (usize, usize)> = HashMap::new();
        let mut adj = vec![[None; 3]; tris.len()];
        for (t, tri) in tris.iter().enumerate() {
            for k in 0..3 {
                let (x, y) = (tri[k], tri[(k + 1) % 3]);
                if let Some(&(t2, k2)) = by_edge.get(&(y, x)) {
                    adj[t][k] = Some(t2);
                    adj[t2][k2] = Some(t);
                } else {
                    by_edge.insert((x, y), (t, k));
                }
            }
        }
        Triangulation { tris, adj }
    }

    fn locate(&self, poly: &SimplePolygon, p: &Point) -> Option<usize> {
        self.tris.iter().position(|t| {
            point_in_triangle(poly.point(t[0]), poly.point(t[1]), poly.point(t[2]), p)
        })
    }

    /// Shortest path from `a` to `b`; `None` if either lies outside.
    pub(crate) fn path(&self, poly: &SimplePolygon, a: &Point, b: &Point) -> Option<Vec<Point>> {
        let ta = self.locate(poly, a)?;
        let tb = self.locate(poly, b)?;
        // Sleeve of triangles between the two, through the dual tree.
        let mut from = vec![usize::MAX; self.tris.len()];
        from[ta] = ta;
        let mut queue = VecDeque::from([ta]);
        while let Some(t) = queue.pop_front() {
            if t == tb {
                break;
            }
            for n in self.adj[t].iter().flatten() {
                if from[*n] == usize::MAX {
                    from[*n] = t;
                    queue.push_back(*n);
                }
            }
        }
        let mut sleeve = vec![tb];
        while *sleeve.last().unwrap() != ta {
            sleeve.push(from[*sleeve.last().unwrap()]);
        }
        sleeve.reverse();
        let mut portals: Vec<(Point, Point)> = vec![(a.clone(), a.clone())];
        for w in sleeve.windows(2) {
            let k = (0..3).find(|&k| self.adj[w[0]][k] == Some(w[1])).unwrap();
            let tri = &self.tris[w[0]];
            let right = poly.point(tri[k]).clone();
            let left = poly.point(tri[(k + 1) % 3]).clone();
            portals.push((left, right));
        }
        portals.push((b.clone(), b.clone()));
        Some(straighten(funnel(&portals)))
    }
}

fn is_ear(poly: &SimplePolygon, ring: &[VertexId], u: VertexId, v: VertexId, w: VertexId) -> bool {
    let (pu, pv, pw) = (poly.point(u), poly.point(v), poly.point(w));
    if orient(pu, pv, pw) <= 0 {
        return false;
    }
    ring.iter().all(|&x| {
        if x == u || x == v || x == w {
            return true;
        }
        let p = poly.point(x);
        !point_in_triangle(pu, pv, pw, p)
    })
}

/// String pulling through a sequence of (left, right) portals.
fn funnel(portals: &[(Point, Point)]) -> Vec<Point> {
    let mut path = vec![portals[0].0.clone()];
    let mut apex = portals[0].0.clone();
    let mut left = apex.clone();
    let mut right = apex.clone();
    let (mut left_i, mut right_i) = (0usize, 0usize);
    let mut i = 1;
    while i < portals.len() {
        let (pl, pr) = (&portals[i].0, &portals[i].1);
        if orient(&apex, &right, pr) >= 0 {
            if apex == right || orient(&apex, &left, pr) < 0 {
                right = pr.clone();
                right_i = i;
            } else {
                path.push(left.clone());
                apex = left.clone();
                right = apex.clone();
                right_i = left_i;
                i = left_i + 1;
                continue;
            }
        }
        if orient(&apex, &left, pl) <= 0 {
            if apex == left || orient(&apex, &right, pl) > 0 {
                left = pl.clone();
                left_i = i;
            } else {
                path.push(right.clone());
                apex = right.clone();
                left = apex.clone();
                left_i = right_i;
                i = right_i + 1;
                continue;
            }
        }
        i += 1;
    }
    let end = &portals[portals.len() - 1].0;
    if path.last() != Some(end) {
        path.push(end.clone());
    }
    path
}
