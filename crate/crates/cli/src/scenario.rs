//! Scenario files: a polygon, an optional fixed center and a list of events.
//!
//! Coordinates are exact. Each one is a string holding a fraction (`"3/7"`)
//! or a decimal (`"0.45"`); plain JSON numbers are read through their decimal
//! spelling.

use std::fmt;

use dynvis::kernel::parse_rational;
use dynvis::{Point, Rational};
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    pub polygon: Vec<Point>,
    pub center: Option<Point>,
    pub events: Vec<Event>,
}

/// Vertex indices refer to the current vertex list in the order the scenario
/// wrote it, updated by every insert and delete before the event.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Event {
    /// New vertex between vertex `after` and the one following it.
    Insert { after: usize, point: Xy },
    Delete { index: usize },
    QueryVp { point: Xy },
    QueryExteriorVp { point: Xy },
    QueryWvp { from: Xy, to: Xy },
    Snapshot,
}

impl Event {
    pub fn name(&self) -> &'static str {
        match self {
            Event::Insert { .. } => "insert",
            Event::Delete { .. } => "delete",
            Event::QueryVp { .. } => "query_vp",
            Event::QueryExteriorVp { .. } => "query_exterior_vp",
            Event::QueryWvp { .. } => "query_wvp",
            Event::Snapshot => "snapshot",
        }
    }

    pub fn is_mutation(&self) -> bool {
        matches!(self, Event::Insert { .. } | Event::Delete { .. })
    }
}

/// A point written as `[x, y]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Xy(pub Point);

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Raw {
    polygon: Vec<Xy>,
    #[serde(default)]
    center: Option<Xy>,
    #[serde(default)]
    events: Vec<Event>,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Scenario, CliError> {
        let raw: Raw = serde_json::from_str(text).map_err(|e| CliError::Parse {
            line: e.line(),
            column: e.column(),
            message: strip_position(&e.to_string()),
        })?;
        Ok(Scenario {
            polygon: raw.polygon.into_iter().map(|p| p.0).collect(),
            center: raw.center.map(|p| p.0),
            events: raw.events,
        })
    }

    pub fn load(path: &std::path::Path) -> Result<Scenario, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Scenario::parse(&text)
    }
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

struct Coord(Rational);

impl<'de> Deserialize<'de> for Coord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Coord;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational as a string such as \"3/7\" or \"0.45\", or a number")
            }

            fn visit_str<E: de::Error>(self, s: &str) -> Result<Coord, E> {
                parse_rational(s).map(Coord).map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Coord, E> {
                Ok(Coord(Rational::from_integer(v.into())))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Coord, E> {
                Ok(Coord(Rational::from_integer(v.into())))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Coord, E> {
                if !v.is_finite() {
                    return Err(E::custom("coordinate is not finite"));
                }
                self.visit_str(&v.to_string())
            }
        }
        d.deserialize_any(V)
    }
}

impl<'de> Deserialize<'de> for Xy {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Xy;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a point [x, y]")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Xy, A::Error> {
                let x: Coord = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let y: Coord = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(1, &self))?;
                if seq.next_element::<de::IgnoredAny>()?.is_some() {
                    return Err(de::Error::invalid_length(3, &self));
                }
                Ok(Xy(Point::new(x.0, y.0)))
            }
        }
        d.deserialize_seq(V)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_event_kind() {
        let text = r#"{
            "polygon": [["0", "0"], ["4", "0"], ["4", "4"], [0, 4]],
            "center": ["1/2", "0.5"],
            "events": [
                {"kind": "insert", "after": 1, "point": ["5", "2"]},
                {"kind": "delete", "index": 2},
                {"kind": "query_vp", "point": ["1", "1"]},
                {"kind": "query_exterior_vp", "point": ["9", "1"]},
                {"kind": "query_wvp", "from": ["1", "1"], "to": ["2", "3"]},
                {"kind": "snapshot"}
            ]
        }"#;
        let s = Scenario::parse(text).unwrap();
        assert_eq!(s.polygon.len(), 4);
        assert_eq!(s.center, Some(Point::from_fracs(1, 2, 1, 2)));
        let names: Vec<&str> = s.events.iter().map(Event::name).collect();
        assert_eq!(names, ["insert", "delete", "query_vp", "query_exterior_vp", "query_wvp", "snapshot"]);
    }

    #[test]
    fn decimals_are_exact() {
        let s = Scenario::parse(r#"{"polygon": [[0.1, "0.2"], [1, 0], [1, 1]]}"#).unwrap();
        assert_eq!(s.polygon[0], Point::from_fracs(1, 10, 1, 5));
    }

    #[test]
    fn errors_carry_position() {
        let text = "{\n  \"polygon\": [[\"0\", \"0\"], [\"1/0\", \"2\"]]\n}";
        match Scenario::parse(text) {
            Err(CliError::Parse { line, column, message }) => {
                assert_eq!(line, 2);
                assert!(column > 20);
                assert!(message.contains("1/0"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            Scenario::parse(r#"{"polygon": [], "events": [{"kind": "teleport"}]}"#),
            Err(CliError::Parse { line: 1, .. })
        ));
    }
}
