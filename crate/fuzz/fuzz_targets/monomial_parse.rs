#![no_main]

use embgraph::complex_hh::BicolorGraph;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = text.parse::<BicolorGraph>() {
        assert_eq!(g.to_string().parse::<BicolorGraph>().unwrap(), g);
    }
});
