//! Replays the fuzz corpus seeds, and random mutations of them, through the
//! same checks the fuzz targets make.

use std::fs;
use std::path::PathBuf;

use embgraph::cache::{parse_file, parse_manifest, parse_matrix_file, render_file};
use embgraph::complex_hh::BicolorGraph;
use embgraph::exactq::SparseMatrix;
use embgraph::graphs::{OrientedGraph, Parity};
use proptest::prelude::*;

fn triplets(text: &str) {
    if let Ok(m) = SparseMatrix::parse_triplets(text) {
        assert_eq!(SparseMatrix::parse_triplets(&m.to_triplet_string()).unwrap(), m);
    }
}

fn graph_decode(text: &str) {
    if let Ok(g) = OrientedGraph::decode(text) {
        assert_eq!(OrientedGraph::decode(&g.encode()).unwrap(), g);
        if g.is_well_formed() && g.n_vertices() <= 10 && g.edges.len() <= 12 {
            for p in Parity::all() {
                assert!(g.canonicalize(p).sign.abs() <= 1);
            }
        }
    }
}

fn monomial_parse(text: &str) {
    if let Ok(g) = text.parse::<BicolorGraph>() {
        assert_eq!(g.to_string().parse::<BicolorGraph>().unwrap(), g);
    }
}

fn cache_file(text: &str) {
    let _ = parse_manifest(text);
    let _ = parse_matrix_file(text);
    for kind in ["basis", "slice", "matrix"] {
        if let Ok(body) = parse_file(text, kind) {
            let body: Vec<String> = body.into_iter().map(str::to_string).collect();
            assert_eq!(render_file(kind, &body), text);
        }
    }
}

const TARGETS: [(&str, fn(&str)); 4] =
    [("triplets", triplets), ("graph_decode", graph_decode), ("monomial_parse", monomial_parse), ("cache_file", cache_file)];

fn seeds(target: &str) -> Vec<String> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<String> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| fs::read_to_string(e.unwrap().path()).unwrap())
        .collect();
    out.sort();
    out
}

#[test]
fn seeds_replay() {
    for (target, check) in TARGETS {
        let s = seeds(target);
        assert!(!s.is_empty(), "{target} has no seeds");
        for text in &s {
            check(text);
        }
    }
}

#[test]
fn seeds_mostly_parse() {
    assert!(seeds("triplets").iter().filter(|t| SparseMatrix::parse_triplets(t).is_ok()).count() >= 3);
    assert!(seeds("graph_decode").iter().all(|t| OrientedGraph::decode(t.trim()).is_ok()));
    assert!(seeds("monomial_parse").iter().all(|t| t.parse::<BicolorGraph>().is_ok()));
    assert!(parse_manifest(&seeds("cache_file").into_iter().find(|t| t.contains(" slice ")).unwrap()).is_ok());
}

#[derive(Clone, Debug)]
enum Edit {
    Replace(usize, u8),
    Insert(usize, u8),
    Delete(usize),
    Truncate(usize),
}

fn edit() -> impl Strategy<Value = Edit> {
    let byte = prop::sample::select(b"0123456789-/,|: \nFDEI=abcdefghijklmnopqrstuvwxyz".to_vec());
    prop_oneof![
        (any::<usize>(), byte.clone()).prop_map(|(i, b)| Edit::Replace(i, b)),
        (any::<usize>(), byte).prop_map(|(i, b)| Edit::Insert(i, b)),
        any::<usize>().prop_map(Edit::Delete),
        any::<usize>().prop_map(Edit::Truncate),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn mutated_seeds_never_panic(target in 0..4usize, pick in any::<prop::sample::Index>(), edits in prop::collection::vec(edit(), 1..6)) {
        let (name, check) = TARGETS[target];
        let all = seeds(name);
        let mut bytes = pick.get(&all).clone().into_bytes();
        for e in edits {
            let len = bytes.len();
            match e {
                Edit::Replace(i, b) if len > 0 => bytes[i % len] = b,
                Edit::Insert(i, b) => bytes.insert(i % (len + 1), b),
                Edit::Delete(i) if len > 0 => {
                    bytes.remove(i % len);
                }
                Edit::Truncate(i) => bytes.truncate(i % (len + 1)),
                _ => {}
            }
        }
        if let Ok(text) = String::from_utf8(bytes) {
            check(&text);
        }
    }
}
