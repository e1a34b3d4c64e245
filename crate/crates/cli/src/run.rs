//! Replays a scenario against the dynamic structures, the brute-force
//! references, or both.

use std::fmt;
use std::time::Instant;

use dynvis::reference::{brute_exterior_vp, brute_vp, brute_wvp};
use dynvis::vp::cyclic_eq;
use dynvis::{
    exterior_vp, wvp, ChangeSet, DynamicHull, DynamicVpState, Location, OracleConfig, OracleKind, OracleSuite,
    Point, Segment, SimplePolygon, VertexId, VisibilityPolygon,
};

use crate::error::CliError;
use crate::scenario::{Event, Scenario, Xy};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Mode {
    Dynamic,
    Oracle,
    CrossCheck,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "dynamic" => Ok(Mode::Dynamic),
            "oracle" => Ok(Mode::Oracle),
            "cross-check" => Ok(Mode::CrossCheck),
            _ => Err(format!("unknown mode `{s}` (expected dynamic, oracle or cross-check)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Ok,
    Diff(String),
}

/// One line of the report. `event` is `None` for the initial state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventReport {
    pub event: Option<usize>,
    pub kind: &'static str,
    pub k: usize,
    pub calls: u64,
    pub micros: u128,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub lines: Vec<EventReport>,
}

impl Report {
    pub fn diffs(&self) -> usize {
        self.lines.iter().filter(|l| l.verdict != Verdict::Ok).count()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        writeln!(f, "event\tkind\tk\tcalls\tus\tverdict")?;
        for l in &self.lines {
            let id = l.event.map_or("init".to_string(), |i| i.to_string());
            let verdict = match &l.verdict {
                Verdict::Ok => "ok".to_string(),
                Verdict::Diff(why) => format!("DIFF {why}"),
            };
            writeln!(f, "{id}\t{}\t{}\t{}\t{}\t{verdict}", l.kind, l.k, l.calls, l.micros)?;
        }
        Ok(())
    }
}

/// Result of one step, comparable across engines.
#[derive(Clone, Debug)]
pub enum Outcome {
    /// Visibility polygon of the fixed center, if there is one.
    Center(Option<VisibilityPolygon>, Option<ChangeSet>),
    Region(VisibilityPolygon),
    Weak(Vec<Point>),
}

impl Outcome {
    fn size(&self, n: usize) -> usize {
        match self {
            Outcome::Center(_, Some(c)) => c.k(),
            Outcome::Center(Some(vp), None) => vp.len(),
            Outcome::Center(None, _) => n,
            Outcome::Region(vp) => vp.len(),
            Outcome::Weak(pts) => pts.len(),
        }
    }

    fn compare(&self, want: &Outcome, prior: Option<&VisibilityPolygon>) -> Verdict {
        let mismatch = match (self, want) {
            (Outcome::Center(a, change), Outcome::Center(b, _)) => {
                if a != b {
                    Some("center visibility polygon differs".to_string())
                } else {
                    match (change, prior, a) {
                        (Some(c), Some(before), Some(after)) => {
                            if !c.removed_is_one_arc(&before.boundary) {
                                Some("removed vertices are not one arc".to_string())
                            } else if !c.added_is_one_arc(&after.boundary) {
                                Some("added vertices are not one arc".to_string())
                            } else {
                                None
                            }
                        }
                        _ => None,
                    }
                }
            }
            (Outcome::Region(a), Outcome::Region(b)) => (a != b).then(|| "visibility polygon differs".to_string()),
            (Outcome::Weak(a), Outcome::Weak(b)) => {
                (!cyclic_eq(a, b)).then(|| "weak visibility polygon differs".to_string())
            }
            _ => Some("outcome kinds differ".to_string()),
        };
        mismatch.map_or(Verdict::Ok, Verdict::Diff)
    }
}

/// Maps the scenario's vertex indices to polygon ids.
struct Order {
    ids: Vec<VertexId>,
}

impl Order {
    fn new(poly: &SimplePolygon, pts: &[Point]) -> Order {
        let ids = pts
            .iter()
            .map(|p| poly.ids().find(|&v| poly.point(v) == p).expect("vertex survives construction"))
            .collect();
        Order { ids }
    }

    fn get(&self, i: usize) -> Result<VertexId, String> {
        self.ids.get(i).copied().ok_or_else(|| format!("vertex index {i} out of range (polygon has {})", self.ids.len()))
    }

    /// Polygon-order predecessor of a vertex inserted after index `i`.
    fn insert_anchor(&self, poly: &SimplePolygon, i: usize) -> Result<VertexId, String> {
        let a = self.get(i)?;
        let b = self.ids[(i + 1) % self.ids.len()];
        Ok(if poly.next(a) == b { a } else { b })
    }
}

fn poly_error(event: usize) -> impl Fn(dynvis::Error) -> CliError {
    move |e| CliError::ScenarioInvalid { event: Some(event), reason: e.to_string() }
}

fn index_error(event: usize) -> impl Fn(String) -> CliError {
    move |reason| CliError::ScenarioInvalid { event: Some(event), reason }
}

fn initial(s: &Scenario) -> Result<SimplePolygon, CliError> {
    let poly = SimplePolygon::from_vertices(&s.polygon)
        .map_err(|e| CliError::ScenarioInvalid { event: None, reason: e.to_string() })?;
    if poly.len() != s.polygon.len() {
        return Err(CliError::ScenarioInvalid { event: None, reason: "repeated polygon vertex".into() });
    }
    if let Some(c) = &s.center {
        if poly.locate(c) != Location::Interior {
            return Err(CliError::ScenarioInvalid { event: None, reason: format!("center {c} is not interior") });
        }
    }
    Ok(poly)
}

#[allow(clippy::large_enum_variant)]
enum Tracked {
    Center(Box<DynamicVpState>),
    Plain(SimplePolygon, OracleSuite),
}

/// The dynamic structures: a maintained center VP (when there is a center),
/// the oracle suite and the hull.
pub struct Live {
    order: Order,
    tracked: Tracked,
    hull: DynamicHull,
}

impl Live {
    pub fn new(s: &Scenario, kind: OracleKind) -> Result<Live, CliError> {
        let poly = initial(s)?;
        let order = Order::new(&poly, &s.polygon);
        let hull = DynamicHull::build(&poly);
        let oracle = OracleSuite::new(&poly, OracleConfig { kind, rebuild_period: None });
        let tracked = match &s.center {
            Some(c) => Tracked::Center(Box::new(
                DynamicVpState::attach(poly, c.clone(), oracle)
                    .map_err(|e| CliError::ScenarioInvalid { event: None, reason: e.to_string() })?,
            )),
            None => Tracked::Plain(poly, oracle),
        };
        Ok(Live { order, tracked, hull })
    }

    pub fn polygon(&self) -> &SimplePolygon {
        match &self.tracked {
            Tracked::Center(st) => st.polygon(),
            Tracked::Plain(p, _) => p,
        }
    }

    pub fn oracle(&self) -> &OracleSuite {
        match &self.tracked {
            Tracked::Center(st) => st.oracle(),
            Tracked::Plain(_, o) => o,
        }
    }

    pub fn center_vp(&self) -> Option<VisibilityPolygon> {
        match &self.tracked {
            Tracked::Center(st) => Some(st.current_vp()),
            Tracked::Plain(..) => None,
        }
    }

    /// Applies one event; returns its outcome and the oracle calls it made.
    pub fn step(&mut self, i: usize, e: &Event) -> Result<(Outcome, u64), CliError> {
        self.oracle().reset_calls();
        let out = match e {
            Event::Insert { after, point: Xy(p) } => {
                let anchor = self.order.insert_anchor(self.polygon(), *after).map_err(index_error(i))?;
                let change = self.mutate(i, |t| match t {
                    Tracked::Center(st) => st.apply_insert(anchor, p.clone()).map(Some),
                    Tracked::Plain(poly, o) => {
                        poly.insert_vertex(anchor, p.clone())?;
                        o.sync(poly, poly.last_mutation().expect("just mutated"))?;
                        Ok(None)
                    }
                })?;
                let id = self.polygon().last_mutation().expect("just mutated").vertex();
                self.order.ids.insert(after + 1, id);
                Outcome::Center(self.center_vp(), change)
            }
            Event::Delete { index } => {
                let id = self.order.get(*index).map_err(index_error(i))?;
                let change = self.mutate(i, |t| match t {
                    Tracked::Center(st) => st.apply_delete(id).map(Some),
                    Tracked::Plain(poly, o) => {
                        poly.delete_vertex(id)?;
                        o.sync(poly, poly.last_mutation().expect("just mutated"))?;
                        Ok(None)
                    }
                })?;
                self.order.ids.remove(*index);
                Outcome::Center(self.center_vp(), change)
            }
            Event::QueryVp { point: Xy(p) } => {
                let vp = match &self.tracked {
                    Tracked::Center(st) => st.query_vp_interior(p),
                    Tracked::Plain(poly, o) => dynvis::compute_vp(poly, o, p),
                };
                Outcome::Region(vp.map_err(poly_error(i))?)
            }
            Event::QueryExteriorVp { point: Xy(p) } => Outcome::Region(
                exterior_vp(self.polygon(), self.oracle(), &self.hull, p).map_err(poly_error(i))?,
            ),
            Event::QueryWvp { from: Xy(a), to: Xy(b) } => {
                let w = wvp(self.polygon(), self.oracle(), &Segment::new(a.clone(), b.clone())).map_err(poly_error(i))?;
                Outcome::Weak(w.points())
            }
            Event::Snapshot => Outcome::Center(self.center_vp(), None),
        };
        let calls = match (&self.tracked, e.is_mutation()) {
            (Tracked::Center(st), true) => st.last_update_calls(),
            _ => self.oracle().calls(),
        };
        Ok((out, calls))
    }

    fn mutate(
        &mut self,
        i: usize,
        f: impl FnOnce(&mut Tracked) -> dynvis::Result<Option<ChangeSet>>,
    ) -> Result<Option<ChangeSet>, CliError> {
        let change = f(&mut self.tracked).map_err(poly_error(i))?;
        let poly = match &self.tracked {
            Tracked::Center(st) => st.polygon(),
            Tracked::Plain(p, _) => p,
        };
        let m = poly.last_mutation().expect("just mutated").clone();
        self.hull.sync(poly, &m).map_err(poly_error(i))?;
        Ok(change)
    }
}

/// Brute-force replay: every answer recomputed from scratch.
pub struct Brute {
    order: Order,
    poly: SimplePolygon,
    center: Option<Point>,
}

impl Brute {
    pub fn new(s: &Scenario) -> Result<Brute, CliError> {
        let poly = initial(s)?;
        let order = Order::new(&poly, &s.polygon);
        Ok(Brute { order, poly, center: s.center.clone() })
    }

    pub fn center_vp(&self, i: Option<usize>) -> Result<Option<VisibilityPolygon>, CliError> {
        self.center
            .as_ref()
            .map(|c| {
                brute_vp(&self.poly, c).map_err(|e| CliError::ScenarioInvalid { event: i, reason: e.to_string() })
            })
            .transpose()
    }

    pub fn step(&mut self, i: usize, e: &Event) -> Result<Outcome, CliError> {
        Ok(match e {
            Event::Insert { after, point: Xy(p) } => {
                let anchor = self.order.insert_anchor(&self.poly, *after).map_err(index_error(i))?;
                let id = self.poly.insert_vertex(anchor, p.clone()).map_err(poly_error(i))?;
                self.order.ids.insert(after + 1, id);
                Outcome::Center(self.center_vp(Some(i))?, None)
            }
            Event::Delete { index } => {
                let id = self.order.get(*index).map_err(index_error(i))?;
                self.poly.delete_vertex(id).map_err(poly_error(i))?;
                self.order.ids.remove(*index);
                Outcome::Center(self.center_vp(Some(i))?, None)
            }
            Event::QueryVp { point: Xy(p) } => Outcome::Region(brute_vp(&self.poly, p).map_err(poly_error(i))?),
            Event::QueryExteriorVp { point: Xy(p) } => {
                Outcome::Region(brute_exterior_vp(&self.poly, p).map_err(poly_error(i))?)
            }
            Event::QueryWvp { from: Xy(a), to: Xy(b) } => Outcome::Weak(
                brute_wvp(&self.poly, &Segment::new(a.clone(), b.clone())).map_err(poly_error(i))?.points(),
            ),
            Event::Snapshot => Outcome::Center(self.center_vp(Some(i))?, None),
        })
    }
}

/// Replays `s` in the given mode. Illegal events abort with
/// [`CliError::ScenarioInvalid`]; disagreements in cross-check mode are
/// reported as `DIFF` lines.
pub fn run(s: &Scenario, mode: Mode, kind: OracleKind) -> Result<Report, CliError> {
    let mut report = Report::default();
    let mut live = match mode {
        Mode::Oracle => None,
        _ => Some(Live::new(s, kind)?),
    };
    let mut brute = match mode {
        Mode::Dynamic => None,
        _ => Some(Brute::new(s)?),
    };
    let n = s.polygon.len();
    let mut prior = live.as_ref().and_then(Live::center_vp);
    let init_verdict = match (&live, &brute) {
        (Some(_), Some(b)) => Outcome::Center(prior.clone(), None).compare(&Outcome::Center(b.center_vp(None)?, None), None),
        _ => Verdict::Ok,
    };
    report.lines.push(EventReport {
        event: None,
        kind: "init",
        k: prior.as_ref().map_or(n, VisibilityPolygon::len),
        calls: 0,
        micros: 0,
        verdict: init_verdict,
    });
    for (i, e) in s.events.iter().enumerate() {
        let start = Instant::now();
        let (out, calls) = match (&mut live, &mut brute) {
            (Some(l), _) => l.step(i, e)?,
            (None, Some(b)) => (b.step(i, e)?, 0),
            (None, None) => unreachable!(),
        };
        let micros = start.elapsed().as_micros();
        let n_now = live.as_ref().map_or_else(|| brute.as_ref().unwrap().poly.len(), |l| l.polygon().len());
        let verdict = match (&live, &mut brute) {
            (Some(_), Some(b)) => out.compare(&b.step(i, e)?, prior.as_ref()),
            _ => Verdict::Ok,
        };
        if let Outcome::Center(Some(vp), _) = &out {
            prior = Some(vp.clone());
        }
        report.lines.push(EventReport { event: Some(i), kind: e.name(), k: out.size(n_now), calls, micros, verdict });
    }
    Ok(report)
}
