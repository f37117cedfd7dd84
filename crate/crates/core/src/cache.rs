//! On-disk cache of slice bases and matrices.
//!
//! Layout: `<root>/<module>/m<m>_n<n>/s<s>_t<t>/` holding `slice.txt`, one
//! `basis_d<k>.txt` per degree and one `<name>_d<k>.mat` per matrix. Every
//! file starts with a versioned header that states its length and ends
//! with `end`, so truncated or foreign files are rejected and the slice is
//! recomputed.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::complex_e::EpiSlice;
use crate::complex_hh::HHSlice;
use crate::exactq::SparseMatrix;
use crate::graphs::OrientedGraph;

pub const VERSION: u32 = 1;
pub const ENV_VAR: &str = "EMBGRAPH_CACHE_DIR";
const MAGIC: &str = "embgraph-cache";

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("bad header")]
    Header,
    #[error("unsupported version {0}")]
    Version(u32),
    #[error("wrong file kind: expected {expected}, found {found}")]
    Kind { expected: String, found: String },
    #[error("expected {expected} lines, found {found}")]
    Length { expected: usize, found: usize },
    #[error("missing end marker")]
    Truncated,
    #[error("bad entry: {0}")]
    Entry(String),
}

/// Splits a cache file into its body lines after checking the header,
/// declared length and end marker.
pub fn parse_file<'a>(text: &'a str, kind: &str) -> Result<Vec<&'a str>, CacheError> {
    let mut lines: Vec<&str> = text.split('\n').collect();
    if lines.last() == Some(&"") {
        lines.pop();
    } else {
        return Err(CacheError::Truncated);
    }
    let header = lines.first().ok_or(CacheError::Header)?;
    let parts: Vec<&str> = header.split(' ').collect();
    if parts.len() != 4 || parts[0] != MAGIC {
        return Err(CacheError::Header);
    }
    let version: u32 = parts[1].parse().map_err(|_| CacheError::Header)?;
    if version != VERSION {
        return Err(CacheError::Version(version));
    }
    if parts[2] != kind {
        return Err(CacheError::Kind { expected: kind.to_string(), found: parts[2].to_string() });
    }
    let count: usize = parts[3].parse().map_err(|_| CacheError::Header)?;
    if lines.last() != Some(&"end") || lines.len() < 2 {
        return Err(CacheError::Truncated);
    }
    let body = &lines[1..lines.len() - 1];
    if body.len() != count {
        return Err(CacheError::Length { expected: count, found: body.len() });
    }
    Ok(body.to_vec())
}

pub fn render_file(kind: &str, body: &[String]) -> String {
    let mut out = format!("{MAGIC} {VERSION} {kind} {}\n", body.len());
    for line in body {
        out.push_str(line);
        out.push('\n');
    }
    out.push_str("end\n");
    out
}

/// A matrix file wraps the triplet format.
pub fn parse_matrix_file(text: &str) -> Result<SparseMatrix, CacheError> {
    let body = parse_file(text, "matrix")?;
    let mut joined = body.join("\n");
    joined.push('\n');
    SparseMatrix::parse_triplets(&joined).map_err(|e| CacheError::Entry(e.to_string()))
}

pub fn render_matrix_file(m: &SparseMatrix) -> String {
    let body: Vec<String> = m.to_triplet_string().lines().map(str::to_string).collect();
    render_file("matrix", &body)
}

/// Manifest lines: `basis <d> <count>` and `<name> <d>` per matrix.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Manifest {
    pub bases: BTreeMap<i64, usize>,
    pub matrices: Vec<(String, i64)>,
}

pub fn parse_manifest(text: &str) -> Result<Manifest, CacheError> {
    let mut out = Manifest::default();
    for line in parse_file(text, "slice")? {
        let parts: Vec<&str> = line.split(' ').collect();
        let bad = || CacheError::Entry(line.to_string());
        match parts.as_slice() {
            ["basis", d, c] => {
                out.bases.insert(d.parse().map_err(|_| bad())?, c.parse().map_err(|_| bad())?);
            }
            [name, d] if name.chars().all(|c| c.is_ascii_lowercase()) && !name.is_empty() => {
                out.matrices.push((name.to_string(), d.parse().map_err(|_| bad())?));
            }
            _ => return Err(bad()),
        }
    }
    Ok(out)
}

fn render_manifest(m: &Manifest) -> String {
    let mut body: Vec<String> = m.bases.iter().map(|(d, c)| format!("basis {d} {c}")).collect();
    body.extend(m.matrices.iter().map(|(n, d)| format!("{n} {d}")));
    render_file("slice", &body)
}

#[derive(Clone, Debug)]
pub struct Cache {
    root: PathBuf,
}

/// Bases as encoded lines plus named matrices, the common shape of all
/// cached slices.
struct Stored {
    bases: BTreeMap<i64, Vec<String>>,
    matrices: Vec<(String, i64, SparseMatrix)>,
}

fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let dir = path.parent().expect("cache files live in a directory");
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

impl Cache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Cache { root: root.into() }
    }

    /// The flag wins over the environment variable; neither means no cache.
    pub fn resolve(flag: Option<&Path>) -> Option<Cache> {
        flag.map(Path::to_path_buf).or_else(|| std::env::var_os(ENV_VAR).map(PathBuf::from)).map(Cache::new)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn slice_dir(&self, module: &str, m: i64, n: i64, s: usize, t: usize) -> PathBuf {
        self.root.join(module).join(format!("m{m}_n{n}")).join(format!("s{s}_t{t}"))
    }

    fn load(&self, dir: &Path) -> Result<Stored, CacheError> {
        let manifest = parse_manifest(&fs::read_to_string(dir.join("slice.txt"))?)?;
        let mut bases = BTreeMap::new();
        for (&d, &count) in &manifest.bases {
            let text = fs::read_to_string(dir.join(format!("basis_d{d}.txt")))?;
            let lines: Vec<String> = parse_file(&text, "basis")?.into_iter().map(str::to_string).collect();
            if lines.len() != count {
                return Err(CacheError::Length { expected: count, found: lines.len() });
            }
            bases.insert(d, lines);
        }
        let mut matrices = Vec::new();
        for (name, d) in &manifest.matrices {
            let text = fs::read_to_string(dir.join(format!("{name}_d{d}.mat")))?;
            matrices.push((name.clone(), *d, parse_matrix_file(&text)?));
        }
        Ok(Stored { bases, matrices })
    }

    fn store(&self, dir: &Path, stored: &Stored) -> Result<(), CacheError> {
        fs::create_dir_all(dir)?;
        let mut manifest = Manifest::default();
        for (d, lines) in &stored.bases {
            write_atomic(&dir.join(format!("basis_d{d}.txt")), &render_file("basis", lines))?;
            manifest.bases.insert(*d, lines.len());
        }
        for (name, d, m) in &stored.matrices {
            write_atomic(&dir.join(format!("{name}_d{d}.mat")), &render_matrix_file(m))?;
            manifest.matrices.push((name.clone(), *d));
        }
        // The manifest goes last: a slice without one is never read.
        write_atomic(&dir.join("slice.txt"), &render_manifest(&manifest))?;
        Ok(())
    }

    pub fn load_epi(&self, m: i64, n: i64, s: usize, t: usize) -> Result<EpiSlice, CacheError> {
        let stored = self.load(&self.slice_dir("e", m, n, s, t))?;
        let mut bases = BTreeMap::new();
        for (d, lines) in stored.bases {
            let graphs = lines
                .iter()
                .map(|l| OrientedGraph::decode(l).map_err(|e| CacheError::Entry(e.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            bases.insert(d, graphs);
        }
        let mut differentials = BTreeMap::new();
        for (name, d, mat) in stored.matrices {
            if name != "diff" {
                return Err(CacheError::Entry(name));
            }
            let shape = (bases.get(&(d - 1)).map_or(0, Vec::len), bases.get(&d).map_or(0, Vec::len));
            if (mat.rows(), mat.cols()) != shape {
                return Err(CacheError::Entry(format!("diff_d{d} shape")));
            }
            differentials.insert(d, mat);
        }
        Ok(EpiSlice { m, n, s, t, bases, differentials })
    }

    pub fn store_epi(&self, slice: &EpiSlice) -> Result<(), CacheError> {
        let stored = Stored {
            bases: slice.bases.iter().map(|(&d, b)| (d, b.iter().map(OrientedGraph::encode).collect())).collect(),
            matrices: slice.differentials.iter().map(|(&d, m)| ("diff".to_string(), d, m.clone())).collect(),
        };
        self.store(&self.slice_dir("e", slice.m, slice.n, slice.s, slice.t), &stored)
    }

    fn hh_module(connected: bool) -> &'static str {
        if connected {
            "hh/pi"
        } else {
            "hh/full"
        }
    }

    pub fn load_hh(&self, m: i64, n: i64, s: usize, t: usize, connected: bool) -> Result<HHSlice, CacheError> {
        let stored = self.load(&self.slice_dir(Self::hh_module(connected), m, n, s, t))?;
        let mut bases = BTreeMap::new();
        for (d, lines) in stored.bases {
            let graphs = lines
                .iter()
                .map(|l| l.parse().map_err(|e: crate::complex_hh::MonomialError| CacheError::Entry(e.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            bases.insert(d, graphs);
        }
        let (mut relations, mut differentials) = (BTreeMap::new(), BTreeMap::new());
        for (name, d, mat) in stored.matrices {
            match name.as_str() {
                "rel" => {
                    relations.insert(d, mat);
                }
                "diff" => {
                    differentials.insert(d, mat);
                }
                _ => return Err(CacheError::Entry(name)),
            }
        }
        if relations.keys().ne(bases.keys()) {
            return Err(CacheError::Entry("relations do not match bases".into()));
        }
        Ok(HHSlice { m, n, s, t, connected, bases, relations, differentials })
    }

    pub fn store_hh(&self, slice: &HHSlice) -> Result<(), CacheError> {
        let mut matrices: Vec<(String, i64, SparseMatrix)> =
            slice.relations.iter().map(|(&d, m)| ("rel".to_string(), d, m.clone())).collect();
        matrices.extend(slice.differentials.iter().map(|(&d, m)| ("diff".to_string(), d, m.clone())));
        let stored = Stored { bases: slice.bases.iter().map(|(&d, b)| (d, b.iter().map(|g| g.to_string()).collect())).collect(), matrices };
        self.store(&self.slice_dir(Self::hh_module(slice.connected), slice.m, slice.n, slice.s, slice.t), &stored)
    }
}

/// Reads through the cache when one is configured, recomputing on any
/// miss or corrupt entry. Returns the slice and whether it was a hit.
pub fn epi_slice(cache: Option<&Cache>, m: i64, n: i64, s: usize, t: usize) -> (EpiSlice, bool) {
    if let Some(c) = cache {
        if let Ok(sl) = c.load_epi(m, n, s, t) {
            return (sl, true);
        }
    }
    let sl = EpiSlice::build(m, n, s, t);
    if let Some(c) = cache {
        let _ = c.store_epi(&sl);
    }
    (sl, false)
}

pub fn hh_slice(cache: Option<&Cache>, m: i64, n: i64, s: usize, t: usize, connected: bool) -> (HHSlice, bool) {
    if let Some(c) = cache {
        if let Ok(sl) = c.load_hh(m, n, s, t, connected) {
            return (sl, true);
        }
    }
    let sl = HHSlice::build(m, n, s, t, connected);
    if let Some(c) = cache {
        let _ = c.store_hh(&sl);
    }
    (sl, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_checks() {
        let text = render_file("basis", &["a".into(), "b".into()]);
        assert_eq!(parse_file(&text, "basis").unwrap(), vec!["a", "b"]);
        assert!(matches!(parse_file(&text[..text.len() - 4], "basis"), Err(CacheError::Truncated)));
        assert!(matches!(parse_file(&text, "slice"), Err(CacheError::Kind { .. })));
        let short = text.replace(" 2\n", " 3\n");
        assert!(matches!(parse_file(&short, "basis"), Err(CacheError::Length { .. })));
        assert!(parse_file("embgraph-cache 9 basis 0\nend\n", "basis").is_err());
    }

    #[test]
    fn epi_round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let (fresh, hit) = epi_slice(Some(&cache), 3, 9, 1, 3);
        assert!(!hit);
        let (again, hit) = epi_slice(Some(&cache), 3, 9, 1, 3);
        assert!(hit);
        assert_eq!(again.bases, fresh.bases);
        assert_eq!(again.differentials, fresh.differentials);

        let d = *fresh.differentials.keys().next().unwrap();
        let path = cache.slice_dir("e", 3, 9, 1, 3).join(format!("diff_d{d}.mat"));
        let text = fs::read_to_string(&path).unwrap();
        fs::write(&path, &text[..text.len() / 2]).unwrap();
        assert!(cache.load_epi(3, 9, 1, 3).is_err());
        let (healed, hit) = epi_slice(Some(&cache), 3, 9, 1, 3);
        assert!(!hit);
        assert_eq!(healed.homology(), fresh.homology());
    }

    #[test]
    fn hh_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let (fresh, _) = hh_slice(Some(&cache), 2, 7, 1, 2, true);
        let (again, hit) = hh_slice(Some(&cache), 2, 7, 1, 2, true);
        assert!(hit);
        assert_eq!(again.bases, fresh.bases);
        assert_eq!(again.homology(), fresh.homology());
    }
}
