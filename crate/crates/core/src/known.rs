//! Reference values used by `verify`: low-complexity homology classes, the
//! wheel pattern, and the committed Euler-characteristic tables.

use crate::graphs::Parity;
use crate::tables::TableKind;

/// A homology class of the connected graph complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct KnownClass {
    pub t: usize,
    pub s: usize,
    pub degree: i64,
}

fn odd(x: i64) -> bool {
    x.rem_euclid(2) == 1
}

/// All classes of complexity 1 to 3, sorted. Valid for `n >= 2m + 2`.
pub fn low_complexity_classes(m: i64, n: i64) -> Vec<KnownClass> {
    let c = |t, s, degree| KnownClass { t, s, degree };
    let mut out = Vec::new();
    if !odd(n - m) {
        out.push(c(1, 2, n - 2 * m - 1));
    }
    if !odd(n) {
        out.push(c(1, 1, n - m - 2));
    }
    if odd(n - m) {
        out.push(c(2, 3, 2 * n - 3 * m - 3));
    }
    if odd(m) && odd(n) {
        out.push(c(2, 2, 2 * n - 2 * m - 4));
    }
    if odd(n) {
        out.push(c(2, 1, 2 * n - m - 4));
    }
    if odd(m) {
        out.push(c(3, 2, 3 * n - 2 * m - 7));
    } else {
        out.push(c(3, 3, 3 * n - 3 * m - 6));
    }
    out.push(c(3, 1, 3 * n - m - 7));
    out.sort();
    out
}

/// Whether the t-wheel carries the (t,t) homology.
pub fn wheel_survives(p: Parity, t: usize) -> bool {
    match (p.m(), p.n()) {
        (1, 1) => t % 2 == 0,
        (1, 0) => t % 4 == 1,
        (0, 1) => t % 4 == 3,
        _ => t % 2 == 1,
    }
}

const GOLDEN: [&str; 8] = [
    include_str!("../tests/golden/table1_pi_oo.csv"),
    include_str!("../tests/golden/table2_h_oo.csv"),
    include_str!("../tests/golden/table3_pi_oe.csv"),
    include_str!("../tests/golden/table4_h_oe.csv"),
    include_str!("../tests/golden/table5_pi_eo.csv"),
    include_str!("../tests/golden/table6_h_eo.csv"),
    include_str!("../tests/golden/table7_pi_ee.csv"),
    include_str!("../tests/golden/table8_h_ee.csv"),
];

/// Size of the committed tables.
pub const GOLDEN_MAX: usize = 23;

/// Tables are numbered 1..=8 as homotopy/homology pairs for oo, oe, eo, ee.
pub fn golden_table(p: Parity, kind: TableKind) -> (usize, &'static str) {
    let i = 2 * p.index() + usize::from(kind == TableKind::Homology);
    (i + 1, GOLDEN[i])
}
