//! Self-checks behind the `verify` command. Each suite returns a report of
//! named checks with a short diff for every failure.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::cache::{self, Cache};
use crate::complex_e::{slice_structure, EhSlice, EpiOptions, EpiSlice};
use crate::complex_hh::{hh_structure, HHSlice};
use crate::genfunc;
use crate::graphs::Parity;
use crate::known::{self, KnownClass};
use crate::symfunc::euler_table_via_pairing;
use crate::tables::{EulerTable, Format, TableKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Appendix,
    SmallComplexity,
    CrossMethod,
    DSquared,
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "appendix" => Ok(Suite::Appendix),
            "small-complexity" => Ok(Suite::SmallComplexity),
            "cross-method" => Ok(Suite::CrossMethod),
            "d-squared" => Ok(Suite::DSquared),
            _ => Err(format!("unknown suite `{s}` (expected appendix, small-complexity, cross-method or d-squared)")),
        }
    }
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::Appendix => "appendix",
            Suite::SmallComplexity => "small-complexity",
            Suite::CrossMethod => "cross-method",
            Suite::DSquared => "d-squared",
        }
    }

    pub fn default_max_t(&self) -> usize {
        match self {
            Suite::Appendix => known::GOLDEN_MAX,
            Suite::SmallComplexity => 3,
            Suite::CrossMethod | Suite::DSquared => 4,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diff: Option<String>,
}

impl Check {
    fn new(name: String, diff: Option<String>) -> Self {
        Check { name, pass: diff.is_none(), diff }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: String,
    pub max_t: usize,
    pub pass: bool,
    pub checks: Vec<Check>,
}

/// A representative (m, n) for each parity class, all with n >= 2m + 2.
pub fn representative(p: Parity) -> (i64, i64) {
    match (p.m_odd, p.n_odd) {
        (true, true) => (3, 9),
        (true, false) => (3, 8),
        (false, true) => (2, 7),
        (false, false) => (2, 8),
    }
}

pub fn run(suite: Suite, max_t: Option<usize>, cache: Option<&Cache>) -> Report {
    let max_t = max_t.unwrap_or(suite.default_max_t());
    let checks = match suite {
        Suite::Appendix => appendix(max_t),
        Suite::SmallComplexity => small_complexity(max_t.min(3), cache),
        Suite::CrossMethod => cross_method(max_t),
        Suite::DSquared => d_squared(max_t),
    };
    Report { suite: suite.name().to_string(), max_t, pass: checks.iter().all(|c| c.pass), checks }
}

/// Lists differing entries, at most a handful.
pub fn table_diff(expected: &EulerTable, got: &EulerTable, max_s: usize, max_t: usize) -> Option<String> {
    let mut out = String::new();
    let mut count = 0;
    for t in 1..=max_t {
        for s in 1..=max_s {
            let (e, g) = (expected.get(s, t), got.get(s, t));
            if e != g {
                count += 1;
                if count <= 5 {
                    let _ = write!(out, "(s={s},t={t}) expected {e} got {g}; ");
                }
            }
        }
    }
    (count > 0).then(|| format!("{count} entries differ: {out}"))
}

/// Reads a committed CSV table back into entries.
pub fn parse_golden(text: &str, kind: TableKind) -> Result<EulerTable, String> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().ok_or("empty table")?.split(',').collect();
    let has_total = header.last() == Some(&"total");
    let max_s = header.len() - 1 - usize::from(has_total);
    let mut table = EulerTable::new(kind, "golden", max_s, 0);
    for line in lines {
        let cells: Vec<i64> = line.split(',').map(|c| c.parse::<i64>().map_err(|e| e.to_string())).collect::<Result<_, _>>()?;
        let t = usize::try_from(cells[0]).map_err(|e| e.to_string())?;
        for s in 1..=max_s {
            table.set(s, t, cells[s]);
        }
        table.max_t = table.max_t.max(t);
    }
    Ok(table)
}

fn appendix(max_t: usize) -> Vec<Check> {
    let max_t = max_t.min(known::GOLDEN_MAX);
    let s = known::GOLDEN_MAX;
    Parity::all()
        .par_iter()
        .map(|&p| {
            let (m, n) = representative(p);
            let (pi, h) = genfunc::tables(m, n, s, max_t).expect("sufficient truncation");
            let mut checks = Vec::new();
            for (kind, got) in [(TableKind::Homotopy, pi), (TableKind::Homology, h)] {
                let (number, text) = known::golden_table(p, kind);
                let name = format!("table {number} ({} {})", p.tag(), if kind == TableKind::Homotopy { "homotopy" } else { "homology" });
                let diff = match parse_golden(text, kind) {
                    Err(e) => Some(format!("golden unreadable: {e}")),
                    Ok(expected) => table_diff(&expected, &got, s, max_t).or_else(|| {
                        (max_t == known::GOLDEN_MAX && got.render(Format::Csv) != text).then(|| "CSV rendering differs".to_string())
                    }),
                };
                checks.push(Check::new(name, diff));
            }
            checks
        })
        .flatten()
        .collect()
}

pub const SMALL_COMPLEXITY_PAIRS: [(i64, i64); 6] = [(1, 4), (1, 5), (2, 6), (2, 7), (3, 8), (3, 9)];

/// Classes of the connected complex found by direct computation up to
/// complexity `max_t`.
pub fn computed_classes(m: i64, n: i64, max_t: usize, cache: Option<&Cache>) -> Vec<KnownClass> {
    let slices: Vec<(usize, usize)> = (1..=max_t).flat_map(|t| (1..=t + 1).map(move |s| (s, t))).collect();
    let mut out: Vec<KnownClass> = slices
        .par_iter()
        .flat_map_iter(|&(s, t)| {
            let (sl, _) = cache::epi_slice(cache, m, n, s, t);
            sl.homology()
                .into_iter()
                .flat_map(move |(degree, r)| std::iter::repeat(KnownClass { t, s, degree }).take(r))
                .collect::<Vec<_>>()
        })
        .collect();
    out.sort();
    out
}

fn small_complexity(max_t: usize, cache: Option<&Cache>) -> Vec<Check> {
    SMALL_COMPLEXITY_PAIRS
        .iter()
        .filter(|&&(m, n)| n >= 2 * m + 2)
        .map(|&(m, n)| {
            let expected: Vec<KnownClass> = known::low_complexity_classes(m, n).into_iter().filter(|c| c.t <= max_t).collect();
            let got = computed_classes(m, n, max_t, cache);
            let diff = (expected != got).then(|| format!("expected {expected:?} got {got:?}"));
            Check::new(format!("classes m={m} n={n} t<={max_t}"), diff)
        })
        .collect()
}

fn cross_method(max_t: usize) -> Vec<Check> {
    let mut checks = Vec::new();
    let structures: BTreeMap<(usize, usize), _> =
        (1..=max_t).flat_map(|t| (1..=t + 1).map(move |s| (s, t))).collect::<Vec<_>>().into_par_iter().map(|k| (k, slice_structure(k.0, k.1))).collect();
    for p in Parity::all() {
        let (m, n) = representative(p);
        let max_s = max_t + 1;
        let (pi, h) = genfunc::tables(m, n, max_s, max_t).expect("sufficient truncation");

        let mut direct = EulerTable::new(TableKind::Homotopy, "complex-e", max_s, max_t);
        for (&(s, t), st) in &structures {
            direct.set(s, t, EpiSlice::from_structure(st, m, n, EpiOptions::default()).euler());
        }
        checks.push(Check::new(format!("complex-e vs genfunc ({})", p.tag()), table_diff(&pi, &direct, max_s, max_t)));

        let paired = euler_table_via_pairing(m, n, max_s, max_t);
        checks.push(Check::new(format!("pairing vs genfunc ({})", p.tag()), table_diff(&h, &paired, max_s, max_t)));

        for (s, t, d) in hh_vs_e(m, n, max_t.min(3)) {
            checks.push(Check::new(format!("complex-hh vs complex-e ({}, s={s}, t={t})", p.tag()), d));
        }
    }
    checks
}

/// Per-slice Euler characteristic and homology comparison between the
/// two complexes, connected and full.
pub fn hh_vs_e(m: i64, n: i64, max_t: usize) -> Vec<(usize, usize, Option<String>)> {
    let keys: Vec<(usize, usize)> = (1..=max_t).flat_map(|t| (1..=2 * t).map(move |s| (s, t))).collect();
    let pis: BTreeMap<(usize, usize), EpiSlice> =
        keys.par_iter().filter(|(s, t)| *s <= t + 1).map(|&(s, t)| ((s, t), EpiSlice::build(m, n, s, t))).collect();
    keys.par_iter()
        .map(|&(s, t)| {
            let mut diff = String::new();
            if s <= t + 1 {
                let (e, hh) = (&pis[&(s, t)], HHSlice::build(m, n, s, t, true));
                if e.euler() != hh.euler() || e.homology() != hh.homology() {
                    let _ = write!(diff, "connected: E chi {} H {:?}, HH chi {} H {:?}; ", e.euler(), e.homology(), hh.euler(), hh.homology());
                }
            }
            let (e, hh) = (EhSlice::from_pi(m, n, s, t, &pis), HHSlice::build(m, n, s, t, false));
            if e.euler() != hh.euler() || e.homology() != hh.homology() {
                let _ = write!(diff, "full: E chi {} H {:?}, HH chi {} H {:?}", e.euler(), e.homology(), hh.euler(), hh.homology());
            }
            (s, t, (!diff.is_empty()).then_some(diff))
        })
        .collect()
}

fn d_squared(max_t: usize) -> Vec<Check> {
    let mut checks: Vec<Check> = (1..=max_t)
        .flat_map(|t| (1..=t + 1).map(move |s| (s, t)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(s, t)| {
            let st = slice_structure(s, t);
            let bad: Vec<&str> = Parity::all()
                .into_iter()
                .filter(|&p| {
                    let (m, n) = representative(p);
                    !EpiSlice::from_structure(&st, m, n, EpiOptions::default()).d_squared_is_zero()
                })
                .map(|p| p.tag())
                .collect();
            Check::new(format!("complex-e s={s} t={t}"), (!bad.is_empty()).then(|| format!("d^2 != 0 for {bad:?}")))
        })
        .collect();
    let hh: Vec<Check> = (1..=max_t.min(3))
        .flat_map(|t| (1..=2 * t).flat_map(move |s| [(s, t, true), (s, t, false)]))
        .filter(|&(s, t, connected)| !connected || s <= t + 1)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(s, t, connected)| {
            let st = hh_structure(s, t, connected);
            let bad: Vec<&str> = Parity::all()
                .into_iter()
                .filter(|&p| {
                    let (m, n) = representative(p);
                    !HHSlice::from_structure(&st, m, n).d_squared_is_zero()
                })
                .map(|p| p.tag())
                .collect();
            let which = if connected { "connected" } else { "full" };
            Check::new(format!("complex-hh {which} s={s} t={t}"), (!bad.is_empty()).then(|| format!("d^2 != 0 for {bad:?}")))
        })
        .collect();
    checks.extend(hh);
    checks
}
