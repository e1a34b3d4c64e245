//! SVG snapshots of a scenario after a prefix of its events.
//!
//! The polygon is filled with the occluded color, the center's visibility
//! polygon is drawn over it, and when the last replayed event is a query its
//! answer is outlined on top. Output depends only on the scenario and the
//! event count.

use std::fmt::Write;

use dynvis::{OracleKind, Point, VisibilityPolygon};

use crate::error::CliError;
use crate::run::{Live, Outcome};
use crate::scenario::Scenario;

const SIZE: f64 = 800.0;
const MARGIN: f64 = 20.0;

struct Frame {
    min: (f64, f64),
    scale: f64,
    height: f64,
}

impl Frame {
    fn fit(points: &[(f64, f64)]) -> Frame {
        let (mut lo, mut hi) = ((f64::MAX, f64::MAX), (f64::MIN, f64::MIN));
        for &(x, y) in points {
            lo = (lo.0.min(x), lo.1.min(y));
            hi = (hi.0.max(x), hi.1.max(y));
        }
        let span = (hi.0 - lo.0).max(hi.1 - lo.1).max(1e-9);
        let scale = (SIZE - 2.0 * MARGIN) / span;
        Frame { min: lo, scale, height: (hi.1 - lo.1) * scale + 2.0 * MARGIN }
    }

    fn map(&self, p: &Point) -> (f64, f64) {
        let (x, y) = p.approx();
        (MARGIN + (x - self.min.0) * self.scale, self.height - MARGIN - (y - self.min.1) * self.scale)
    }

    fn path(&self, pts: &[Point]) -> String {
        let mut s = String::new();
        for (i, p) in pts.iter().enumerate() {
            let (x, y) = self.map(p);
            let _ = write!(s, "{}{x:.3},{y:.3}", if i == 0 { "M" } else { " L" });
        }
        s.push_str(" Z");
        s
    }

    fn dot(&self, out: &mut String, p: &Point, r: f64, fill: &str) {
        let (x, y) = self.map(p);
        let _ = writeln!(out, r#"<circle cx="{x:.3}" cy="{y:.3}" r="{r:.1}" fill="{fill}"/>"#);
    }
}

fn region_points(vp: &VisibilityPolygon) -> Vec<Point> {
    let mut pts = vp.points();
    if vp.unbounded {
        pts.insert(0, vp.center.clone());
    }
    pts
}

/// Replays the first `at` events and renders the resulting state.
pub fn render(s: &Scenario, at: usize) -> Result<String, CliError> {
    if at > s.events.len() {
        return Err(CliError::Usage(format!("--at={at} but the scenario has {} events", s.events.len())));
    }
    let mut live = Live::new(s, OracleKind::Accelerated)?;
    let mut last = None;
    for (i, e) in s.events[..at].iter().enumerate() {
        last = Some((e.clone(), live.step(i, e)?.0));
    }
    let poly = live.polygon().points();
    let center = live.center_vp();
    let query = match &last {
        Some((_, Outcome::Region(vp))) => Some((region_points(vp), Some(vp.clone()))),
        Some((_, Outcome::Weak(pts))) => Some((pts.clone(), None)),
        _ => None,
    };

    let mut extent: Vec<(f64, f64)> = poly.iter().map(Point::approx).collect();
    if let Some((pts, _)) = &query {
        extent.extend(pts.iter().map(Point::approx));
    }
    if let Some((crate::scenario::Event::QueryWvp { from, to }, _)) = &last {
        extent.push(from.0.approx());
        extent.push(to.0.approx());
    }
    let frame = Frame::fit(&extent);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE:.0}" height="{:.0}" viewBox="0 0 {SIZE:.0} {:.0}">"#,
        frame.height, frame.height
    );
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    let _ = writeln!(out, r##"<path class="occluded" d="{}" fill="#c8c8c8" stroke="none"/>"##, frame.path(&poly));
    if let Some(vp) = &center {
        let _ = writeln!(out, r##"<path class="visible" d="{}" fill="#ffe680" stroke="none"/>"##, frame.path(&vp.points()));
    }
    let _ = writeln!(
        out,
        r##"<path class="polygon" d="{}" fill="none" stroke="#202020" stroke-width="1.5"/>"##,
        frame.path(&poly)
    );
    if let Some((pts, _)) = &query {
        let _ = writeln!(
            out,
            r##"<path class="query" d="{}" fill="#4a90d9" fill-opacity="0.35" stroke="#1f5fa8" stroke-width="1"/>"##,
            frame.path(pts)
        );
    }
    for p in &poly {
        frame.dot(&mut out, p, 2.0, "#202020");
    }
    let constructed = center.iter().chain(query.iter().filter_map(|(_, vp)| vp.as_ref()));
    for vp in constructed {
        for b in vp.constructed() {
            frame.dot(&mut out, &b.point, 3.0, "#d0021b");
        }
    }
    if let Some(vp) = &center {
        frame.dot(&mut out, &vp.center, 4.0, "#7b2fbf");
    }
    match &last {
        Some((crate::scenario::Event::QueryWvp { from, to }, _)) => {
            let ((x1, y1), (x2, y2)) = (frame.map(&from.0), frame.map(&to.0));
            let _ = writeln!(
                out,
                r##"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="#1f5fa8" stroke-width="2.5"/>"##
            );
        }
        Some((_, Outcome::Region(vp))) => frame.dot(&mut out, &vp.center, 4.0, "#1f5fa8"),
        _ => {}
    }
    out.push_str("</svg>\n");
    Ok(out)
}
