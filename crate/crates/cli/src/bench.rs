//! Update-versus-recompute timing on generated polygon families.

use std::fmt;
use std::time::Instant;

use dynvis::generators::{comb, comb_tooth_corner, random_edit, random_star, staircase, Edit};
use dynvis::{compute_vp, DynamicVpState, OracleConfig, OracleKind, OracleSuite, Point, SimplePolygon};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::CliError;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Family {
    Comb,
    Staircase,
    RandomStar,
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "comb" => Ok(Family::Comb),
            "staircase" => Ok(Family::Staircase),
            "random-star" => Ok(Family::RandomStar),
            _ => Err(format!("unknown generator `{s}` (expected comb, staircase or random-star)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub family: Family,
    pub n: usize,
    pub updates: usize,
    pub oracle: OracleKind,
    pub seed: u64,
}

pub const COMB_HEIGHT: i64 = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchRow {
    pub n: usize,
    pub k: usize,
    pub dynamic_us: u128,
    pub recompute_us: u128,
    pub calls: u64,
}

#[derive(Clone, Debug, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

fn median(mut v: Vec<u128>) -> u128 {
    if v.is_empty() {
        return 0;
    }
    v.sort_unstable();
    v[v.len() / 2]
}

impl BenchReport {
    pub fn median_dynamic_us(&self) -> u128 {
        median(self.rows.iter().map(|r| r.dynamic_us).collect())
    }

    pub fn median_recompute_us(&self) -> u128 {
        median(self.rows.iter().map(|r| r.recompute_us).collect())
    }
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        writeln!(f, "n\tk\tdynamic_us\trecompute_us\tcalls")?;
        for r in &self.rows {
            writeln!(f, "{}\t{}\t{}\t{}\t{}", r.n, r.k, r.dynamic_us, r.recompute_us, r.calls)?;
        }
        let (d, c) = (self.median_dynamic_us(), self.median_recompute_us());
        write!(f, "# median dynamic_us={d} recompute_us={c}")?;
        if d > 0 {
            write!(f, " speedup={:.1}", c as f64 / d as f64)?;
        }
        writeln!(f)
    }
}

/// Polygon and fixed center for a family at roughly `n` vertices.
pub fn instance(family: Family, n: usize, rng: &mut ChaCha8Rng) -> (SimplePolygon, Point) {
    match family {
        Family::Comb => {
            let teeth = (n / 4).max(1) as i64;
            (comb(teeth as usize, COMB_HEIGHT), Point::from_fracs(2 * teeth - 1, 2, 1, 2))
        }
        Family::Staircase => (staircase((n.saturating_sub(2) / 2).max(1)), Point::from_fracs(1, 2, 1, 4)),
        Family::RandomStar => (random_star(rng, n.max(3), 10 * n.max(3) as i64), Point::from_ints(0, 0)),
    }
}

pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (poly, q) = instance(cfg.family, cfg.n, &mut rng);
    let oracle = OracleSuite::new(&poly, OracleConfig { kind: cfg.oracle, rebuild_period: None });
    let mut st = DynamicVpState::attach(poly, q.clone(), oracle).map_err(|e| CliError::Usage(e.to_string()))?;
    let teeth = (cfg.n / 4).max(1);
    let mut dent = None;
    let mut report = BenchReport::default();
    let mut attempts = 0;
    while report.rows.len() < cfg.updates {
        attempts += 1;
        if attempts > 100 * cfg.updates.max(1) {
            return Err(CliError::Usage("could not find enough legal updates".into()));
        }
        let edit = match (cfg.family, dent.take()) {
            (Family::Comb, Some(id)) => Edit::Delete { id },
            (Family::Comb, None) => {
                let corner = comb_tooth_corner(st.polygon(), rand::Rng::gen_range(&mut rng, 0..teeth), COMB_HEIGHT)
                    .expect("tooth corners are never edited");
                let x = st.polygon().point(corner).x() + dynvis::Rational::new(1.into(), 4.into());
                Edit::Insert { after: corner, point: Point::new(x, dynvis::Rational::new(3.into(), 2.into())) }
            }
            _ => random_edit(&mut rng, st.polygon(), 0.4),
        };
        let start = Instant::now();
        let change = match edit {
            Edit::Insert { after, point } => st.apply_insert(after, point),
            Edit::Delete { id } => st.apply_delete(id),
        };
        let dynamic_us = start.elapsed().as_micros();
        let Ok(change) = change else { continue };
        if cfg.family == Family::Comb && change_is_insert(&st) {
            dent = st.polygon().last_mutation().map(|m| m.vertex());
        }
        let calls = st.last_update_calls();
        let start = Instant::now();
        let fresh = compute_vp(st.polygon(), st.oracle(), &q).map_err(|e| CliError::Usage(e.to_string()))?;
        let recompute_us = start.elapsed().as_micros();
        debug_assert_eq!(fresh.len(), st.current_vp().len());
        report.rows.push(BenchRow { n: st.polygon().len(), k: change.k(), dynamic_us, recompute_us, calls });
    }
    Ok(report)
}

fn change_is_insert(st: &DynamicVpState) -> bool {
    st.polygon().last_mutation().is_some_and(|m| m.is_insert())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comb_updates_alternate_dents() {
        let cfg = BenchConfig { family: Family::Comb, n: 40, updates: 6, oracle: OracleKind::Accelerated, seed: 1 };
        let r = run_bench(&cfg).unwrap();
        let sizes: Vec<usize> = r.rows.iter().map(|r| r.n).collect();
        assert_eq!(sizes, [41, 40, 41, 40, 41, 40]);
        assert!(r.rows.iter().all(|r| r.k <= 8));
    }

    #[test]
    fn every_family_runs() {
        for family in [Family::Staircase, Family::RandomStar] {
            let cfg = BenchConfig { family, n: 30, updates: 5, oracle: OracleKind::Exhaustive, seed: 3 };
            let r = run_bench(&cfg).unwrap();
            assert_eq!(r.rows.len(), 5);
            assert!(r.to_string().starts_with("n\tk\t"));
        }
    }
}
