//! Exact geometric primitives.
//!
//! Coordinates are arbitrary-precision rationals. Sign predicates first try a
//! floating-point evaluation with a static error bound and only fall back to
//! exact rational arithmetic when the filter cannot decide.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// Relative slack of the floating-point filter, in units of `f64::EPSILON * M^2`.
const FILTER_SLACK: f64 = 256.0;
const FILTER_MIN: f64 = 1e-120;
const FILTER_MAX: f64 = 1e120;

#[derive(Clone)]
pub struct Point {
    x: Rational,
    y: Rational,
    fx: f64,
    fy: f64,
    /// Both coordinates are integers below `SMALL_INT` in magnitude.
    small: bool,
}

/// Predicates on points with integer coordinates below this bound are exact
/// in floating point.
const SMALL_INT: f64 = (1u64 << 24) as f64;

impl Point {
    pub fn new(x: Rational, y: Rational) -> Self {
        let fx = x.to_f64().unwrap_or(f64::NAN);
        let fy = y.to_f64().unwrap_or(f64::NAN);
        let small = x.is_integer() && y.is_integer() && fx.abs() < SMALL_INT && fy.abs() < SMALL_INT;
        Point { x, y, fx, fy, small }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point::new(Rational::from_integer(x.into()), Rational::from_integer(y.into()))
    }

    /// `(xn/xd, yn/yd)`.
    pub fn from_fracs(xn: i64, xd: i64, yn: i64, yd: i64) -> Self {
        Point::new(
            Rational::new(xn.into(), xd.into()),
            Rational::new(yn.into(), yd.into()),
        )
    }

    /// Exact conversion of a finite float.
    pub fn from_f64(x: f64, y: f64) -> Option<Self> {
        Some(Point::new(Rational::from_float(x)?, Rational::from_float(y)?))
    }

    pub fn x(&self) -> &Rational {
        &self.x
    }

    pub fn y(&self) -> &Rational {
        &self.y
    }

    pub fn approx(&self) -> (f64, f64) {
        (self.fx, self.fy)
    }

    pub fn translate(&self, dx: &Rational, dy: &Rational) -> Point {
        Point::new(&self.x + dx, &self.y + dy)
    }

    /// `self + t * (other - self)`.
    pub fn lerp(&self, other: &Point, t: &Rational) -> Point {
        Point::new(
            &self.x + (&other.x - &self.x) * t,
            &self.y + (&other.y - &self.y) * t,
        )
    }

    pub fn midpoint(&self, other: &Point) -> Point {
        let half = Rational::new(BigInt::one(), BigInt::from(2));
        self.lerp(other, &half)
    }

    /// Point reflected through `self`: `2*self - other`.
    pub fn mirror(&self, other: &Point) -> Point {
        Point::new(
            &self.x + &self.x - &other.x,
            &self.y + &self.y - &other.y,
        )
    }

    pub fn dist2(&self, other: &Point) -> Rational {
        let dx = &other.x - &self.x;
        let dy = &other.y - &self.y;
        &dx * &dx + &dy * &dy
    }

    pub fn dist_f64(&self, other: &Point) -> f64 {
        let (ax, ay) = self.approx();
        let (bx, by) = other.approx();
        (bx - ax).hypot(by - ay)
    }
}

impl PartialEq for Point {
    fn eq(&self, other: &Self) -> bool {
        // Equal rationals round to equal floats.
        let nan = self.fx.is_nan() || self.fy.is_nan() || other.fx.is_nan() || other.fy.is_nan();
        if (self.fx != other.fx || self.fy != other.fy) && !nan {
            return false;
        }
        self.x == other.x && self.y == other.y
    }
}

impl Eq for Point {}

impl Hash for Point {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.x.hash(state);
        self.y.hash(state);
    }
}

impl PartialOrd for Point {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic (x, then y).
impl Ord for Point {
    fn cmp(&self, other: &Self) -> Ordering {
        self.x.cmp(&other.x).then_with(|| self.y.cmp(&other.y))
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse {0:?} as an exact rational")]
pub struct ParseRationalError(pub String);

/// Parses `"3/7"`, `"-2"`, `"0.45"` or `"1.5e-3"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let s = text.trim();
    let err = || ParseRationalError(text.to_string());
    if s.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| err())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut num = BigInt::from_str(if all.is_empty() { "0" } else { &all }).map_err(|_| err())?;
    if neg {
        num = -num;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Rational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

/// Sign of a value as -1, 0 or +1.
fn sign_of(r: &Rational) -> i8 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

fn sign_f64(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

fn filter_scale(pts: &[&Point]) -> Option<f64> {
    let mut m = 0.0f64;
    for p in pts {
        let (x, y) = p.approx();
        if !x.is_finite() || !y.is_finite() {
            return None;
        }
        m = m.max(x.abs()).max(y.abs());
    }
    if m == 0.0 {
        return Some(0.0);
    }
    if !(FILTER_MIN..=FILTER_MAX).contains(&m) {
        return None;
    }
    Some(m)
}

fn filtered(value: f64, m: Option<f64>) -> Option<i8> {
    let m = m?;
    let bound = FILTER_SLACK * f64::EPSILON * m * m;
    if value > bound {
        Some(1)
    } else if value < -bound {
        Some(-1)
    } else {
        None
    }
}

/// Sign of the cross product `(b - a) x (d - c)`.
pub fn cross_sign(a: &Point, b: &Point, c: &Point, d: &Point) -> i8 {
    let (ax, ay) = a.approx();
    let (bx, by) = b.approx();
    let (cx, cy) = c.approx();
    let (dx, dy) = d.approx();
    let approx = (bx - ax) * (dy - cy) - (by - ay) * (dx - cx);
    if a.small && b.small && c.small && d.small {
        return sign_f64(approx);
    }
    if let Some(s) = filtered(approx, filter_scale(&[a, b, c, d])) {
        return s;
    }
    let exact = (&b.x - &a.x) * (&d.y - &c.y) - (&b.y - &a.y) * (&d.x - &c.x);
    sign_of(&exact)
}

/// Sign of the dot product `(b - a) . (d - c)`.
pub fn dot_sign(a: &Point, b: &Point, c: &Point, d: &Point) -> i8 {
    let (ax, ay) = a.approx();
    let (bx, by) = b.approx();
    let (cx, cy) = c.approx();
    let (dx, dy) = d.approx();
    let approx = (bx - ax) * (dx - cx) + (by - ay) * (dy - cy);
    if a.small && b.small && c.small && d.small {
        return sign_f64(approx);
    }
    if let Some(s) = filtered(approx, filter_scale(&[a, b, c, d])) {
        return s;
    }
    let exact = (&b.x - &a.x) * (&d.x - &c.x) + (&b.y - &a.y) * (&d.y - &c.y);
    sign_of(&exact)
}

/// [`orient`] against a fixed directed line, for testing many points.
#[derive(Clone, Debug)]
pub struct LineSide<'a> {
    a: &'a Point,
    b: &'a Point,
    dx: f64,
    dy: f64,
    m: f64,
    small: bool,
    finite: bool,
}

impl<'a> LineSide<'a> {
    pub fn new(a: &'a Point, b: &'a Point) -> Self {
        let (ax, ay) = a.approx();
        let (bx, by) = b.approx();
        let m = ax.abs().max(ay.abs()).max(bx.abs()).max(by.abs());
        LineSide {
            a,
            b,
            dx: bx - ax,
            dy: by - ay,
            m,
            small: a.small && b.small,
            finite: m.is_finite() && m <= FILTER_MAX,
        }
    }

    /// Same value as `orient(a, b, p)`.
    #[inline]
    pub fn of(&self, p: &Point) -> i8 {
        let (ax, ay) = self.a.approx();
        let v = self.dx * (p.fy - ay) - self.dy * (p.fx - ax);
        if self.small && p.small {
            return sign_f64(v);
        }
        if self.finite {
            let m = self.m.max(p.fx.abs()).max(p.fy.abs());
            if m.is_finite() && (FILTER_MIN..=FILTER_MAX).contains(&m) {
                let bound = FILTER_SLACK * f64::EPSILON * m * m;
                if v > bound {
                    return 1;
                }
                if v < -bound {
                    return -1;
                }
            }
        }
        orient(self.a, self.b, p)
    }
}

/// +1 iff `c` is strictly left of the directed line `ab`, 0 iff collinear.
pub fn orient(a: &Point, b: &Point, c: &Point) -> i8 {
    cross_sign(a, b, a, c)
}

/// Compares `|p - o|` with `|r - o|`.
pub fn cmp_dist(o: &Point, p: &Point, r: &Point) -> Ordering {
    let (ox, oy) = o.approx();
    let (px, py) = p.approx();
    let (rx, ry) = r.approx();
    let dp = (px - ox).powi(2) + (py - oy).powi(2);
    let dr = (rx - ox).powi(2) + (ry - oy).powi(2);
    if o.small && p.small && r.small {
        return sign_f64(dp - dr).cmp(&0);
    }
    if let Some(s) = filtered(dp - dr, filter_scale(&[o, p, r]).map(|m| 2.0 * m)) {
        return s.cmp(&0);
    }
    o.dist2(p).cmp(&o.dist2(r))
}

/// True iff `b - o` and `c - o` point in the same direction (both nonzero).
pub fn same_direction(o: &Point, b: &Point, c: &Point) -> bool {
    orient(o, b, c) == 0 && dot_sign(o, b, o, c) > 0
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Self {
        Segment { a, b }
    }

    pub fn is_degenerate(&self) -> bool {
        self.a == self.b
    }

    pub fn contains(&self, p: &Point) -> bool {
        on_segment(&self.a, &self.b, p)
    }

    /// Point at parameter `t` in `[0, 1]`.
    pub fn at(&self, t: &Rational) -> Point {
        self.a.lerp(&self.b, t)
    }
}

/// A ray from `origin` through `toward`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ray {
    origin: Point,
    toward: Point,
}

impl Ray {
    /// Panics when `toward == origin`; a ray needs a nonzero direction.
    pub fn through(origin: Point, toward: Point) -> Self {
        assert!(origin != toward, "ray direction must be nonzero");
        Ray { origin, toward }
    }

    pub fn try_through(origin: Point, toward: Point) -> Option<Self> {
        (origin != toward).then_some(Ray { origin, toward })
    }

    pub fn with_direction(origin: Point, dx: Rational, dy: Rational) -> Self {
        let toward = origin.translate(&dx, &dy);
        Ray::through(origin, toward)
    }

    pub fn origin(&self) -> &Point {
        &self.origin
    }

    /// A point other than the origin on the ray; direction = `toward - origin`.
    pub fn toward(&self) -> &Point {
        &self.toward
    }

    /// The same line traversed in the opposite direction.
    pub fn reversed(&self) -> Ray {
        Ray {
            toward: self.origin.mirror(&self.toward),
            origin: self.origin.clone(),
        }
    }

    /// Ray parameter of a point lying on the ray's line.
    pub fn param_of(&self, p: &Point) -> Rational {
        let dx = &self.toward.x - &self.origin.x;
        let dy = &self.toward.y - &self.origin.y;
        if !dx.is_zero() {
            (&p.x - &self.origin.x) / dx
        } else {
            (&p.y - &self.origin.y) / dy
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        p == &self.origin
            || (orient(&self.origin, &self.toward, p) == 0
                && dot_sign(&self.origin, &self.toward, &self.origin, p) > 0)
    }
}

/// Angular cone at `apex` swept counterclockwise from `start` to `end`.
#[derive(Clone, Debug)]
pub struct Cone {
    pub start: Ray,
    pub end: Ray,
    pub open: bool,
}

impl Cone {
    /// Panics if the rays do not share an origin.
    pub fn new(start: Ray, end: Ray, open: bool) -> Self {
        assert!(start.origin == end.origin, "cone rays must share their apex");
        Cone { start, end, open }
    }

    pub fn apex(&self) -> &Point {
        &self.start.origin
    }

    pub fn is_full_turn(&self) -> bool {
        same_direction(&self.start.origin, &self.start.toward, &self.end.toward)
    }
}

/// Counterclockwise angular order of directions around an apex, starting at a
/// reference direction (angle 0) and increasing towards a full turn.
#[derive(Clone, Debug)]
pub struct AngularOrder<'a> {
    apex: &'a Point,
    reference: &'a Point,
}

impl<'a> AngularOrder<'a> {
    pub fn new(apex: &'a Point, reference: &'a Point) -> Self {
        debug_assert!(apex != reference);
        AngularOrder { apex, reference }
    }

    pub fn from_ray(ray: &'a Ray) -> Self {
        AngularOrder::new(&ray.origin, &ray.toward)
    }

    pub fn apex(&self) -> &'a Point {
        self.apex
    }

    pub fn reference(&self) -> &'a Point {
        self.reference
    }

    /// 0 for angles in `[0, pi)`, 1 for `[pi, 2pi)`.
    fn half(&self, p: &Point) -> u8 {
        match orient(self.apex, self.reference, p) {
            1 => 0,
            -1 => 1,
            _ => {
                if dot_sign(self.apex, self.reference, self.apex, p) > 0 {
                    0
                } else {
                    1
                }
            }
        }
    }

    pub fn is_zero(&self, p: &Point) -> bool {
        same_direction(self.apex, self.reference, p)
    }

    /// Orders the directions `apex -> p` and `apex -> r` by ccw angle from the reference.
    pub fn cmp(&self, p: &Point, r: &Point) -> Ordering {
        let hp = self.half(p);
        let hr = self.half(r);
        if hp != hr {
            return hp.cmp(&hr);
        }
        match orient(self.apex, p, r) {
            1 => Ordering::Less,
            -1 => Ordering::Greater,
            _ => Ordering::Equal,
        }
    }

    /// Angular order, then distance from the apex.
    pub fn cmp_then_dist(&self, p: &Point, r: &Point) -> Ordering {
        self.cmp(p, r).then_with(|| cmp_dist(self.apex, p, r))
    }
}

/// True iff the direction `apex -> p` lies in the cone.
///
/// A cone whose start and end coincide is the full plane when closed and the
/// plane minus the start ray when open.
pub fn in_cone(cone: &Cone, p: &Point) -> bool {
    let apex = cone.apex();
    debug_assert!(p != apex);
    let order = AngularOrder::from_ray(&cone.start);
    if cone.is_full_turn() {
        return !cone.open || !order.is_zero(p);
    }
    let at_start = order.is_zero(p);
    let vs_end = order.cmp(p, &cone.end.toward);
    if cone.open {
        !at_start && vs_end == Ordering::Less
    } else {
        vs_end != Ordering::Greater
    }
}

/// True iff `p` lies on the closed segment `ab`.
pub fn on_segment(a: &Point, b: &Point, p: &Point) -> bool {
    if orient(a, b, p) != 0 {
        return false;
    }
    if a == b {
        return p == a;
    }
    dot_sign(p, a, p, b) <= 0
}

/// True iff the closed segments `ab` and `cd` share at least one point.
pub fn segments_intersect(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    (o1 == 0 && on_segment(a, b, c))
        || (o2 == 0 && on_segment(a, b, d))
        || (o3 == 0 && on_segment(c, d, a))
        || (o4 == 0 && on_segment(c, d, b))
}

/// True iff the segments cross at a single point interior to both.
pub fn segments_cross_properly(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    o1 * o2 < 0 && o3 * o4 < 0
}

/// Intersection point of the (non-parallel) lines `ab` and `cd`.
pub fn line_intersection(a: &Point, b: &Point, c: &Point, d: &Point) -> Option<Point> {
    let t = line_param(a, b, c, d)?;
    Some(a.lerp(b, &t))
}

/// Parameter `t` along `ab` where the line `ab` meets the line `cd`.
pub fn line_param(a: &Point, b: &Point, c: &Point, d: &Point) -> Option<Rational> {
    let rx = &b.x - &a.x;
    let ry = &b.y - &a.y;
    let sx = &d.x - &c.x;
    let sy = &d.y - &c.y;
    let denom = &rx * &sy - &ry * &sx;
    if denom.is_zero() {
        return None;
    }
    let qx = &c.x - &a.x;
    let qy = &c.y - &a.y;
    Some((&qx * &sy - &qy * &sx) / denom)
}

/// Nearest intersection of a ray with a closed segment and its ray parameter
/// (`point = origin + t * (toward - origin)`).
pub fn ray_segment_hit(r: &Ray, s: &Segment) -> Option<(Point, Rational)> {
    let o = &r.origin;
    let w = &r.toward;
    let sa = orient(o, w, &s.a);
    let sb = orient(o, w, &s.b);
    if sa == 0 && sb == 0 {
        // Collinear: nearest point of the segment at or after the origin.
        let ta = r.param_of(&s.a);
        let tb = r.param_of(&s.b);
        let (lo, hi) = if ta <= tb { (ta, tb) } else { (tb, ta) };
        if hi.is_negative() {
            return None;
        }
        let t = if lo.is_negative() { Rational::zero() } else { lo };
        let p = o.lerp(w, &t);
        return Some((p, t));
    }
    if sa * sb > 0 {
        return None;
    }
    let t = line_param(o, w, &s.a, &s.b)?;
    if t.is_negative() {
        return None;
    }
    let p = if sa == 0 {
        s.a.clone()
    } else if sb == 0 {
        s.b.clone()
    } else {
        o.lerp(w, &t)
    };
    Some((p, t))
}

/// True iff the closed segment meets the closed triangle `abc`.
pub fn triangle_segment_intersects(a: &Point, b: &Point, c: &Point, s: &Segment) -> bool {
    point_in_triangle(a, b, c, &s.a)
        || point_in_triangle(a, b, c, &s.b)
        || segments_intersect(a, b, &s.a, &s.b)
        || segments_intersect(b, c, &s.a, &s.b)
        || segments_intersect(c, a, &s.a, &s.b)
}

/// Closed-triangle membership; works for either orientation of `abc`.
pub fn point_in_triangle(a: &Point, b: &Point, c: &Point, p: &Point) -> bool {
    let o = orient(a, b, c);
    if o == 0 {
        return on_segment(a, b, p) || on_segment(b, c, p) || on_segment(c, a, p);
    }
    orient(a, b, p) * o >= 0 && orient(b, c, p) * o >= 0 && orient(c, a, p) * o >= 0
}

/// Strict interior of triangle `abc`.
pub fn point_strictly_in_triangle(a: &Point, b: &Point, c: &Point, p: &Point) -> bool {
    let o = orient(a, b, c);
    o != 0 && orient(a, b, p) == o && orient(b, c, p) == o && orient(c, a, p) == o
}

/// Twice the signed area of a closed polyline.
pub fn signed_area2(points: &[Point]) -> Rational {
    let n = points.len();
    let mut acc = Rational::zero();
    for i in 0..n {
        let p = &points[i];
        let q = &points[(i + 1) % n];
        acc += &p.x * &q.y - &q.x * &p.y;
    }
    acc
}

pub fn signed_area_f64(points: &[Point]) -> f64 {
    let n = points.len();
    let mut acc = 0.0;
    for i in 0..n {
        let (px, py) = points[i].approx();
        let (qx, qy) = points[(i + 1) % n].approx();
        acc += px * qy - qx * py;
    }
    acc / 2.0
}
