//! Bucket-grid candidate index kept in step with polygon mutations.

use crate::kernel::Point;
use crate::polygon::{EdgeCandidates, EdgeId, Mutation, MutationKind, SimplePolygon, VertexId};
use crate::spatial::{BBox, UniformGrid};

use super::query::{unit_dir, Candidates};

fn seg_box(a: &Point, b: &Point) -> BBox {
    BBox::of_points(&[a.approx(), b.approx()])
}

fn point_box(p: &Point) -> BBox {
    BBox::of_points(&[p.approx()])
}

#[derive(Clone, Debug)]
pub(crate) struct GridIndex {
    edges: UniformGrid<EdgeId>,
    verts: UniformGrid<VertexId>,
    /// Mutations patched in since the last full build.
    pub(crate) patched: usize,
}

impl GridIndex {
    pub(crate) fn build(poly: &SimplePolygon) -> Self {
        let pts: Vec<(f64, f64)> = poly.ids().map(|v| poly.point(v).approx()).collect();
        let bounds = BBox::of_points(&pts);
        let mut edges = UniformGrid::new(bounds, poly.len());
        let mut verts = UniformGrid::new(bounds, poly.len());
        for e in poly.edges() {
            let (a, b) = poly.edge_points(e);
            edges.insert(e, &seg_box(a, b));
        }
        for v in poly.ids() {
            verts.insert(v, &point_box(poly.point(v)));
        }
        GridIndex { edges, verts, patched: 0 }
    }

    /// Patches the index for one mutation already applied to `poly`.
    pub(crate) fn apply(&mut self, poly: &SimplePolygon, m: &Mutation) {
        match &m.kind {
            MutationKind::Insert { id, prev, next, point } => {
                let (pp, np) = (poly.point(*prev), poly.point(*next));
                self.edges.remove(EdgeId::new(*prev, *next), &seg_box(pp, np));
                self.edges.insert(EdgeId::new(*prev, *id), &seg_box(pp, point));
                self.edges.insert(EdgeId::new(*id, *next), &seg_box(point, np));
                self.verts.insert(*id, &point_box(point));
            }
            MutationKind::Delete { id, prev, next, point } => {
                let (pp, np) = (poly.point(*prev), poly.point(*next));
                self.edges.remove(EdgeId::new(*prev, *id), &seg_box(pp, point));
                self.edges.remove(EdgeId::new(*id, *next), &seg_box(point, np));
                self.edges.insert(EdgeId::new(*prev, *next), &seg_box(pp, np));
                self.verts.remove(*id, &point_box(point));
            }
        }
        self.patched += 1;
    }
}

impl Candidates for GridIndex {
    fn ray_edges(
        &self,
        poly: &SimplePolygon,
        origin: &Point,
        toward: &Point,
        visit: &mut dyn FnMut(&[EdgeId], f64) -> bool,
    ) {
        let Some(dir) = unit_dir(origin, toward) else {
            let all: Vec<EdgeId> = poly.edges().collect();
            visit(&all, f64::INFINITY);
            return;
        };
        if !self.edges.overflow().is_empty() && !visit(self.edges.overflow(), 0.0) {
            return;
        }
        self.edges.walk_ray(origin.approx(), dir, |items, exit| visit(items, exit));
    }

    fn edges_in_box(&self, _poly: &SimplePolygon, b: &BBox, out: &mut Vec<EdgeId>) {
        self.edges.query_box(b, out);
        out.sort_unstable();
        out.dedup();
    }

    fn vertices_in_box(&self, _poly: &SimplePolygon, b: &BBox, out: &mut Vec<VertexId>) {
        self.verts.query_box(b, out);
    }

    fn param_slack(&self) -> f64 {
        self.edges.margin() * 8.0
    }
}

impl EdgeCandidates for GridIndex {
    fn edges_near(&self, _polygon: &SimplePolygon, a: &Point, b: &Point, out: &mut Vec<EdgeId>) {
        self.edges.query_box(&seg_box(a, b), out);
        out.sort_unstable();
        out.dedup();
    }
}
