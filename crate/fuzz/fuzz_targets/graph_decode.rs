#![no_main]

use embgraph::graphs::{OrientedGraph, Parity};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = OrientedGraph::decode(text) {
        assert_eq!(OrientedGraph::decode(&g.encode()).unwrap(), g);
        if g.is_well_formed() && g.n_vertices() <= 10 && g.edges.len() <= 12 {
            for p in Parity::all() {
                let c = g.canonicalize(p);
                assert!(c.sign.abs() <= 1);
            }
        }
    }
});
