//! Euler-characteristic and rank tables, with deterministic rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableKind {
    /// Euler characteristics of the homotopy (connected graphs).
    Homotopy,
    /// Euler characteristics of the homology.
    Homology,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerTable {
    pub kind: TableKind,
    pub method: String,
    pub max_s: usize,
    pub max_t: usize,
    /// Keyed by (s, t); absent entries are zero.
    pub entries: BTreeMap<(usize, usize), i64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RankTable {
    /// Keyed by (degree, s, t); only non-zero ranks are stored.
    pub entries: BTreeMap<(i64, usize, usize), usize>,
}

impl RankTable {
    pub fn insert_slice(&mut self, s: usize, t: usize, ranks: &BTreeMap<i64, usize>) {
        for (&d, &r) in ranks {
            if r > 0 {
                self.entries.insert((d, s, t), r);
            }
        }
    }

    pub fn total(&self, s: usize, t: usize) -> usize {
        self.entries.iter().filter(|((_, a, b), _)| (*a, *b) == (s, t)).map(|(_, r)| r).sum()
    }

    /// Ranks summed over (s, t) for each degree.
    pub fn by_degree(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for ((d, _, _), r) in &self.entries {
            *out.entry(*d).or_insert(0) += r;
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Markdown,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("unknown output format `{0}` (expected csv, json or md)")]
    Unknown(String),
}

impl std::str::FromStr for Format {
    type Err = FormatError;

    fn from_str(s: &str) -> Result<Self, FormatError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "md" | "markdown" => Ok(Format::Markdown),
            other => Err(FormatError::Unknown(other.to_string())),
        }
    }
}

impl EulerTable {
    pub fn new(kind: TableKind, method: &str, max_s: usize, max_t: usize) -> Self {
        EulerTable { kind, method: method.to_string(), max_s, max_t, entries: BTreeMap::new() }
    }

    pub fn get(&self, s: usize, t: usize) -> i64 {
        self.entries.get(&(s, t)).copied().unwrap_or(0)
    }

    pub fn set(&mut self, s: usize, t: usize, v: i64) {
        if v == 0 {
            self.entries.remove(&(s, t));
        } else {
            self.entries.insert((s, t), v);
        }
    }

    /// Sum of absolute values across row `t`.
    pub fn row_total(&self, t: usize) -> i64 {
        (self.first_index()..=self.max_s).map(|s| self.get(s, t).abs()).sum()
    }

    /// Row and column 0 appear only when the table holds the (0,0) unit.
    fn first_index(&self) -> usize {
        if self.entries.contains_key(&(0, 0)) {
            0
        } else {
            1
        }
    }

    /// Rows by t, columns by s; homotopy tables carry a total column.
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.render_csv(),
            Format::Json => serde_json::to_string_pretty(&JsonTable::from(self)).expect("serializable") + "\n",
            Format::Markdown => self.render_md(),
        }
    }

    fn columns(&self) -> Vec<usize> {
        (self.first_index()..=self.max_s).collect()
    }

    fn render_csv(&self) -> String {
        let mut out = String::from("t");
        for s in self.columns() {
            let _ = write!(out, ",s{s}");
        }
        if self.kind == TableKind::Homotopy {
            out.push_str(",total");
        }
        out.push('\n');
        for t in self.first_index()..=self.max_t {
            let _ = write!(out, "{t}");
            for s in self.columns() {
                let _ = write!(out, ",{}", self.get(s, t));
            }
            if self.kind == TableKind::Homotopy {
                let _ = write!(out, ",{}", self.row_total(t));
            }
            out.push('\n');
        }
        out
    }

    fn render_md(&self) -> String {
        let cols = self.columns();
        let mut out = String::from("| t |");
        for s in &cols {
            let _ = write!(out, " {s} |");
        }
        if self.kind == TableKind::Homotopy {
            out.push_str(" total |");
        }
        out.push_str("\n|---|");
        for _ in &cols {
            out.push_str("---|");
        }
        if self.kind == TableKind::Homotopy {
            out.push_str("---|");
        }
        out.push('\n');
        for t in self.first_index()..=self.max_t {
            let _ = write!(out, "| {t} |");
            for &s in &cols {
                let _ = write!(out, " {} |", self.get(s, t));
            }
            if self.kind == TableKind::Homotopy {
                let _ = write!(out, " {} |", self.row_total(t));
            }
            out.push('\n');
        }
        out
    }

    pub fn parse_json(text: &str) -> Result<Self, serde_json::Error> {
        let j: JsonTable = serde_json::from_str(text)?;
        Ok(j.into())
    }
}

/// JSON shape: one object per row with values in s order.
#[derive(Serialize, Deserialize)]
struct JsonTable {
    kind: TableKind,
    method: String,
    max_s: usize,
    max_t: usize,
    columns: Vec<usize>,
    rows: Vec<JsonRow>,
}

#[derive(Serialize, Deserialize)]
struct JsonRow {
    t: usize,
    values: Vec<i64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    total: Option<i64>,
}

impl From<&EulerTable> for JsonTable {
    fn from(e: &EulerTable) -> Self {
        let rows = (e.first_index()..=e.max_t)
            .map(|t| JsonRow {
                t,
                values: e.columns().iter().map(|&s| e.get(s, t)).collect(),
                total: (e.kind == TableKind::Homotopy).then(|| e.row_total(t)),
            })
            .collect();
        JsonTable { kind: e.kind, method: e.method.clone(), max_s: e.max_s, max_t: e.max_t, columns: e.columns(), rows }
    }
}

impl From<JsonTable> for EulerTable {
    fn from(j: JsonTable) -> Self {
        let mut e = EulerTable::new(j.kind, &j.method, j.max_s, j.max_t);
        for row in j.rows {
            for (&s, v) in j.columns.iter().zip(row.values) {
                e.set(s, row.t, v);
            }
        }
        e
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let mut e = EulerTable::new(TableKind::Homotopy, "genfunc", 3, 2);
        e.set(2, 1, 1);
        e.set(1, 2, -1);
        let text = e.render(Format::Json);
        assert_eq!(EulerTable::parse_json(&text).unwrap(), e);
    }

    #[test]
    fn csv_layout() {
        let mut e = EulerTable::new(TableKind::Homotopy, "genfunc", 2, 1);
        e.set(2, 1, 1);
        assert_eq!(e.render(Format::Csv), "t,s1,s2,total\n1,0,1,1\n");
        let h = EulerTable::new(TableKind::Homology, "genfunc", 2, 1);
        assert_eq!(h.render(Format::Csv), "t,s1,s2\n1,0,0\n");
    }

    #[test]
    fn empty_and_unit_tables() {
        let e = EulerTable::new(TableKind::Homotopy, "genfunc", 0, 0);
        assert_eq!(e.render(Format::Csv), "t,total\n");
        let mut u = EulerTable::new(TableKind::Homology, "genfunc", 0, 0);
        u.set(0, 0, 1);
        assert_eq!(u.render(Format::Csv), "t,s0\n0,1\n");
        assert_eq!(EulerTable::parse_json(&u.render(Format::Json)).unwrap(), u);
    }

    #[test]
    fn format_parse() {
        assert_eq!("md".parse::<Format>().unwrap(), Format::Markdown);
        assert!("xml".parse::<Format>().is_err());
    }
}
