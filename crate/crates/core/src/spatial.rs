//! Uniform bucket grid over floating-point bounding boxes.
//!
//! The grid only prunes candidates; every geometric decision made on the
//! items it returns is exact. Items are registered in every cell touched by
//! their box grown by a small margin, so float rounding in a query cannot skip
//! a cell that the exact geometry reaches.

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BBox {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl BBox {
    pub fn empty() -> Self {
        BBox {
            min_x: f64::INFINITY,
            min_y: f64::INFINITY,
            max_x: f64::NEG_INFINITY,
            max_y: f64::NEG_INFINITY,
        }
    }

    pub fn of_points(pts: &[(f64, f64)]) -> Self {
        let mut b = BBox::empty();
        for &(x, y) in pts {
            b.add(x, y);
        }
        b
    }

    pub fn add(&mut self, x: f64, y: f64) {
        self.min_x = self.min_x.min(x);
        self.min_y = self.min_y.min(y);
        self.max_x = self.max_x.max(x);
        self.max_y = self.max_y.max(y);
    }

    pub fn is_empty(&self) -> bool {
        self.min_x > self.max_x
    }

    pub fn grown(&self, m: f64) -> Self {
        BBox {
            min_x: self.min_x - m,
            min_y: self.min_y - m,
            max_x: self.max_x + m,
            max_y: self.max_y + m,
        }
    }

    pub fn contains_box(&self, o: &BBox) -> bool {
        o.min_x >= self.min_x && o.max_x <= self.max_x && o.min_y >= self.min_y && o.max_y <= self.max_y
    }

    pub fn width(&self) -> f64 {
        self.max_x - self.min_x
    }

    pub fn height(&self) -> f64 {
        self.max_y - self.min_y
    }
}

/// Grid of `cols x rows` cells holding item handles. Boxes not fully inside
/// the grid's bounds go to an overflow list that every query returns.
#[derive(Clone, Debug)]
pub struct UniformGrid<T> {
    bounds: BBox,
    cols: usize,
    rows: usize,
    cell_w: f64,
    cell_h: f64,
    margin: f64,
    cells: Vec<Vec<T>>,
    overflow: Vec<T>,
}

impl<T: Copy + PartialEq> UniformGrid<T> {
    /// Sizes the grid for roughly `items` entries over `bounds`.
    pub fn new(bounds: BBox, items: usize) -> Self {
        let bounds = if bounds.is_empty() {
            BBox { min_x: 0.0, min_y: 0.0, max_x: 1.0, max_y: 1.0 }
        } else {
            bounds
        };
        let span = bounds.width().max(bounds.height()).max(1e-12);
        let margin = span * 1e-9;
        let bounds = bounds.grown(margin * 4.0);
        let w = bounds.width().max(span * 1e-6);
        let h = bounds.height().max(span * 1e-6);
        let target = (items.max(1)) as f64;
        let mut cols = (target * w / h).sqrt().ceil().max(1.0);
        let mut rows = (target / cols).ceil().max(1.0);
        let cap = 4.0 * target + 16.0;
        while cols * rows > cap {
            cols = (cols / 2.0).ceil().max(1.0);
            rows = (rows / 2.0).ceil().max(1.0);
        }
        let (cols, rows) = (cols as usize, rows as usize);
        UniformGrid {
            bounds,
            cols,
            rows,
            cell_w: w / cols as f64,
            cell_h: h / rows as f64,
            margin,
            cells: vec![Vec::new(); cols * rows],
            overflow: Vec::new(),
        }
    }

    pub fn bounds(&self) -> &BBox {
        &self.bounds
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.cols, self.rows)
    }

    fn col_of(&self, x: f64) -> usize {
        let c = ((x - self.bounds.min_x) / self.cell_w).floor();
        c.clamp(0.0, (self.cols - 1) as f64) as usize
    }

    fn row_of(&self, y: f64) -> usize {
        let r = ((y - self.bounds.min_y) / self.cell_h).floor();
        r.clamp(0.0, (self.rows - 1) as f64) as usize
    }

    fn cell_range(&self, b: &BBox) -> (usize, usize, usize, usize) {
        let g = b.grown(self.margin);
        (self.col_of(g.min_x), self.col_of(g.max_x), self.row_of(g.min_y), self.row_of(g.max_y))
    }

    pub fn insert(&mut self, item: T, b: &BBox) {
        if !self.bounds.contains_box(&b.grown(self.margin)) {
            self.overflow.push(item);
            return;
        }
        let (c0, c1, r0, r1) = self.cell_range(b);
        for r in r0..=r1 {
            for c in c0..=c1 {
                self.cells[r * self.cols + c].push(item);
            }
        }
    }

    pub fn remove(&mut self, item: T, b: &BBox) {
        if !self.bounds.contains_box(&b.grown(self.margin)) {
            self.overflow.retain(|x| *x != item);
            return;
        }
        let (c0, c1, r0, r1) = self.cell_range(b);
        for r in r0..=r1 {
            for c in c0..=c1 {
                self.cells[r * self.cols + c].retain(|x| *x != item);
            }
        }
    }

    pub fn overflow(&self) -> &[T] {
        &self.overflow
    }

    pub fn cell(&self, c: usize, r: usize) -> &[T] {
        &self.cells[r * self.cols + c]
    }

    /// Items in cells overlapping `b`, plus the overflow list. May repeat items.
    pub fn query_box(&self, b: &BBox, out: &mut Vec<T>) {
        out.extend_from_slice(&self.overflow);
        let (c0, c1, r0, r1) = self.cell_range(b);
        for r in r0..=r1 {
            for c in c0..=c1 {
                out.extend_from_slice(&self.cells[r * self.cols + c]);
            }
        }
    }

    /// Walks the cells pierced by the ray `origin + t * dir`, `t >= 0`, in
    /// order. The visitor receives each cell's items and the ray parameter at
    /// which the walk leaves that cell; returning `false` stops the walk.
    pub fn walk_ray<F>(&self, origin: (f64, f64), dir: (f64, f64), mut visit: F)
    where
        F: FnMut(&[T], f64) -> bool,
    {
        let (ox, oy) = origin;
        let (dx, dy) = dir;
        // Clip the ray to the grid bounds.
        let mut t0 = 0.0f64;
        let mut t1 = f64::INFINITY;
        for (o, d, lo, hi) in [
            (ox, dx, self.bounds.min_x, self.bounds.max_x),
            (oy, dy, self.bounds.min_y, self.bounds.max_y),
        ] {
            if d == 0.0 {
                if o < lo || o > hi {
                    return;
                }
            } else {
                let a = (lo - o) / d;
                let b = (hi - o) / d;
                let (a, b) = if a <= b { (a, b) } else { (b, a) };
                t0 = t0.max(a);
                t1 = t1.min(b);
            }
        }
        if t0 > t1 {
            return;
        }
        let sx = ox + dx * t0;
        let sy = oy + dy * t0;
        let mut c = self.col_of(sx) as isize;
        let mut r = self.row_of(sy) as isize;
        let step_c: isize = if dx > 0.0 { 1 } else { -1 };
        let step_r: isize = if dy > 0.0 { 1 } else { -1 };
        let next_x = |c: isize| {
            let edge = if dx > 0.0 { c + 1 } else { c };
            self.bounds.min_x + edge as f64 * self.cell_w
        };
        let next_y = |r: isize| {
            let edge = if dy > 0.0 { r + 1 } else { r };
            self.bounds.min_y + edge as f64 * self.cell_h
        };
        let mut tmax_x = if dx != 0.0 { (next_x(c) - ox) / dx } else { f64::INFINITY };
        let mut tmax_y = if dy != 0.0 { (next_y(r) - oy) / dy } else { f64::INFINITY };
        let tdelta_x = if dx != 0.0 { self.cell_w / dx.abs() } else { f64::INFINITY };
        let tdelta_y = if dy != 0.0 { self.cell_h / dy.abs() } else { f64::INFINITY };
        loop {
            let exit = tmax_x.min(tmax_y).min(t1);
            if !visit(&self.cells[r as usize * self.cols + c as usize], exit) {
                return;
            }
            if tmax_x < tmax_y {
                c += step_c;
                tmax_x += tdelta_x;
            } else {
                r += step_r;
                tmax_y += tdelta_y;
            }
            if c < 0 || r < 0 || c >= self.cols as isize || r >= self.rows as isize {
                return;
            }
        }
    }
}
