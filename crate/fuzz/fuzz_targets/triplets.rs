#![no_main]

use embgraph::exactq::SparseMatrix;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = SparseMatrix::parse_triplets(text) {
        let again = SparseMatrix::parse_triplets(&m.to_triplet_string()).expect("rendered matrices parse");
        assert_eq!(again, m);
    }
});
