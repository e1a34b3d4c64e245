use std::path::{Path, PathBuf};
use std::process::Command;

use dynvis::{OracleKind, Point};
use dynvis_cli::render::render;
use dynvis_cli::run::Live;
use dynvis_cli::{run, CliError, Mode, Scenario, Verdict};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn load(name: &str) -> Scenario {
    Scenario::load(&fixture(name)).unwrap()
}

fn dynvis(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_dynvis")).args(args).output().unwrap()
}

#[test]
fn cross_check_fixtures_have_no_diffs() {
    for name in ["notch.json", "notch_cw.json", "no_center.json", "empty_events.json"] {
        let s = load(name);
        for kind in [OracleKind::Exhaustive, OracleKind::Accelerated] {
            let r = run(&s, Mode::CrossCheck, kind).unwrap();
            assert_eq!(r.lines.len(), s.events.len() + 1, "{name}");
            assert_eq!(r.diffs(), 0, "{name}\n{r}");
        }
    }
}

#[test]
fn dynamic_and_oracle_modes_agree_on_query_sizes() {
    let s = load("notch.json");
    let d = run(&s, Mode::Dynamic, OracleKind::Accelerated).unwrap();
    let o = run(&s, Mode::Oracle, OracleKind::Accelerated).unwrap();
    for (a, b) in d.lines.iter().zip(&o.lines) {
        assert_eq!(a.kind, b.kind);
        if a.kind.starts_with("query") || a.kind == "snapshot" {
            assert_eq!(a.k, b.k, "event {:?}", a.event);
        }
        assert_eq!(b.calls, 0);
    }
    assert!(d.lines.iter().filter(|l| l.kind.starts_with("query")).all(|l| l.calls > 0));
}

#[test]
fn indices_follow_the_written_order_of_a_clockwise_polygon() {
    let s = load("notch_cw.json");
    let mut live = Live::new(&s, OracleKind::Accelerated).unwrap();
    live.step(0, &s.events[0]).unwrap();
    let p = live.polygon();
    let spike = p.ids().find(|&v| p.point(v) == &Point::from_ints(8, 11)).unwrap();
    let mut around = [p.point(p.prev(spike)).clone(), p.point(p.next(spike)).clone()];
    around.sort();
    let mut want = [Point::from_ints(6, 10), Point::from_ints(10, 10)];
    want.sort();
    assert_eq!(around, want);
}

#[test]
fn illegal_events_name_the_event() {
    let s = load("illegal_insert.json");
    for mode in [Mode::Dynamic, Mode::Oracle, Mode::CrossCheck] {
        match run(&s, mode, OracleKind::Accelerated) {
            Err(CliError::ScenarioInvalid { event: Some(1), .. }) => {}
            other => panic!("{mode:?}: {other:?}"),
        }
    }
    let mut s = load("empty_events.json");
    s.events = Scenario::parse(r#"{"polygon": [], "events": [{"kind": "delete", "index": 4}]}"#).unwrap().events;
    assert!(matches!(
        run(&s, Mode::Dynamic, OracleKind::Exhaustive),
        Err(CliError::ScenarioInvalid { event: Some(0), .. })
    ));
    s.center = Some(Point::from_ints(9, 9));
    assert!(matches!(
        run(&s, Mode::Dynamic, OracleKind::Exhaustive),
        Err(CliError::ScenarioInvalid { event: None, .. })
    ));
}

#[test]
fn empty_event_list_reports_initial_state() {
    let r = run(&load("empty_events.json"), Mode::CrossCheck, OracleKind::Accelerated).unwrap();
    assert_eq!(r.lines.len(), 1);
    assert_eq!(r.lines[0].verdict, Verdict::Ok);
    assert_eq!(r.lines[0].k, 4);
}

#[test]
fn binary_exit_codes_and_messages() {
    let out = dynvis(&["run", fixture("notch.json").to_str().unwrap(), "--mode=cross-check"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("event\tkind\tk\tcalls\tus\tverdict\n"));
    assert_eq!(text.lines().count(), 16);

    let out = dynvis(&["run", fixture("malformed.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 3, column 3"), "{err}");

    let out = dynvis(&["run", fixture("illegal_insert.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("event 1"));

    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.tsv");
    let out = dynvis(&["run", fixture("no_center.json").to_str().unwrap(), "--report", report.to_str().unwrap()]);
    assert!(out.status.success() && out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(report).unwrap().lines().count(), 7);
}

#[test]
fn render_is_deterministic() {
    let s = load("notch.json");
    for at in [0, 3, 5, 12, s.events.len()] {
        let a = render(&s, at).unwrap();
        assert_eq!(a, render(&s, at).unwrap());
        assert!(a.starts_with("<svg") && a.ends_with("</svg>\n"));
        assert!(a.contains(r#"class="occluded""#) && a.contains(r#"class="visible""#));
        assert_eq!(a.contains(r#"class="query""#), s.events[..at].last().is_some_and(|e| e.name().starts_with("query")));
    }
    assert!(render(&s, s.events.len() + 1).is_err());

    let dir = tempfile::tempdir().unwrap();
    let (x, y) = (dir.path().join("x.svg"), dir.path().join("y.svg"));
    for path in [&x, &y] {
        let out = dynvis(&["render", fixture("notch.json").to_str().unwrap(), "--at=5", "--out", path.to_str().unwrap()]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&x).unwrap(), std::fs::read(&y).unwrap());
}

#[test]
fn bench_prints_one_row_per_update() {
    let out = dynvis(&["bench", "--gen=comb", "--n=80", "--updates=6"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 6);
    assert!(text.contains("# median"));
    let out = dynvis(&["bench", "--gen=spiral", "--n=10"]);
    assert!(!out.status.success());
}
