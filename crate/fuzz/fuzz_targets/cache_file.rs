#![no_main]

use embgraph::cache::{parse_file, parse_manifest, parse_matrix_file, render_file};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = parse_manifest(text);
    let _ = parse_matrix_file(text);
    for kind in ["basis", "slice", "matrix"] {
        if let Ok(body) = parse_file(text, kind) {
            let body: Vec<String> = body.into_iter().map(str::to_string).collect();
            assert_eq!(render_file(kind, &body), text);
        }
    }
});
