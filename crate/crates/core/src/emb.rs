//! Passage from the embedding space modulo immersions to the embedding
//! space: Stiefel manifold homotopy, the image of the connecting map, and
//! the resulting rank corrections.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EmbError {
    #[error("need n > 2m >= 2, got m = {0}, n = {1}")]
    StiefelRange(i64, i64),
    #[error("need n >= 2m + 2, got m = {0}, n = {1}")]
    Range(i64, i64),
    #[error("rank in degree {0} would become negative")]
    NegativeRank(i64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum StiefelClass {
    Euler,
    Pontryagin,
}

/// Degrees of the rational homotopy generators of `Inj(R^m, R^n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeList {
    pub classes: Vec<(i64, StiefelClass)>,
}

impl DegreeList {
    pub fn degrees(&self) -> Vec<i64> {
        self.classes.iter().map(|c| c.0).collect()
    }
}

fn odd(x: i64) -> bool {
    x.rem_euclid(2) == 1
}

/// `first - 4k` for `0 <= k <= k_max` (empty when `k_max < 0`).
fn ladder(first: i64, k_max: i64) -> impl Iterator<Item = i64> {
    (0..=k_max).map(move |k| first - 4 * k)
}

/// Floor division for the k-ranges like `(m - 3) / 2`, which may be negative.
fn half(x: i64) -> i64 {
    x.div_euclid(2)
}

pub fn stiefel_homotopy(m: i64, n: i64) -> Result<DegreeList, EmbError> {
    if !(m >= 1 && n > 2 * m) {
        return Err(EmbError::StiefelRange(m, n));
    }
    use StiefelClass::*;
    let mut classes: Vec<(i64, StiefelClass)> = match (odd(m), odd(n)) {
        (true, true) => std::iter::once((n - m, Euler)).chain(ladder(2 * n - 3, half(m - 1)).map(|d| (d, Pontryagin))).collect(),
        (true, false) => std::iter::once((n - 1, Euler)).chain(ladder(2 * n - 5, half(m - 3)).map(|d| (d, Pontryagin))).collect(),
        (false, true) => ladder(2 * n - 3, half(m - 2)).map(|d| (d, Pontryagin)).collect(),
        (false, false) => [(n - 1, Euler), (n - m, Euler)]
            .into_iter()
            .chain(ladder(2 * n - 5, half(m - 2)).map(|d| (d, Pontryagin)))
            .collect(),
    };
    classes.sort();
    Ok(DegreeList { classes })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum ConnectingGraph {
    /// One edge between two external vertices.
    Segment,
    /// A leg on a looped vertex.
    Tadpole,
    /// A leg on a theta graph.
    Theta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ConnectingClass {
    pub graph: ConnectingGraph,
    pub degree: i64,
    pub complexity: usize,
    /// Number of external vertices.
    pub hodge: usize,
}

/// Classes of the embedding space modulo immersions hit by the connecting
/// map from the Stiefel side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConnectingImage {
    pub classes: Vec<ConnectingClass>,
}

pub fn connecting_image(m: i64, n: i64) -> ConnectingImage {
    let mut classes = Vec::new();
    if !odd(n - m) {
        classes.push(ConnectingClass { graph: ConnectingGraph::Segment, degree: n - 2 * m - 1, complexity: 1, hodge: 2 });
    }
    if !odd(n) {
        classes.push(ConnectingClass { graph: ConnectingGraph::Tadpole, degree: n - m - 2, complexity: 1, hodge: 1 });
    } else {
        classes.push(ConnectingClass { graph: ConnectingGraph::Theta, degree: 2 * n - m - 4, complexity: 2, hodge: 1 });
    }
    classes.sort_by_key(|c| c.degree);
    ConnectingImage { classes }
}

/// The degree shifts `(+1 degrees, -1 degrees)` between the two spaces.
pub fn rank_adjustments(m: i64, n: i64) -> (Vec<i64>, Vec<i64>) {
    match (odd(m), odd(n)) {
        (true, true) => (ladder(2 * n - m - 7, half(m - 3)).collect(), vec![2 * n - m - 4, n - 2 * m - 1]),
        (true, false) => (ladder(2 * n - m - 5, half(m - 3)).collect(), vec![n - m - 2]),
        (false, true) => (ladder(2 * n - m - 7, half(m - 4)).collect(), vec![2 * n - m - 4]),
        (false, false) => (ladder(2 * n - m - 5, half(m - 2)).collect(), vec![n - m - 2, n - 2 * m - 1]),
    }
}

/// Ranks of the embedding space from those of the space modulo immersions.
pub fn emb_rank_adjust(m: i64, n: i64, bar_ranks: &BTreeMap<i64, usize>) -> Result<BTreeMap<i64, usize>, EmbError> {
    if !(m >= 1 && n >= 2 * m + 2) {
        return Err(EmbError::Range(m, n));
    }
    let mut out: BTreeMap<i64, i64> = bar_ranks.iter().map(|(&d, &r)| (d, r as i64)).collect();
    let (plus, minus) = rank_adjustments(m, n);
    for d in plus {
        *out.entry(d).or_insert(0) += 1;
    }
    for d in minus {
        *out.entry(d).or_insert(0) -= 1;
    }
    let mut res = BTreeMap::new();
    for (d, r) in out {
        if r < 0 {
            return Err(EmbError::NegativeRank(d));
        }
        if r > 0 {
            res.insert(d, r as usize);
        }
    }
    Ok(res)
}

/// Degrees of the first rational homotopy generators of the embedding
/// space modulo immersions for `n > 2m + 1`, and the degree from which
/// further generators may appear.
pub fn summary_degrees(m: i64, n: i64) -> (Vec<i64>, i64) {
    let mut listed = match (odd(m), odd(n)) {
        (true, true) => vec![n - 2 * m - 1, 2 * n - 2 * m - 4, 2 * n - m - 4, 3 * n - 2 * m - 7, 3 * n - m - 7, 4 * n - 4 * m - 8],
        (true, false) => vec![n - m - 2, 2 * n - 3 * m - 3, 3 * n - 2 * m - 7, 3 * n - m - 7],
        (false, true) => vec![2 * n - 3 * m - 3, 2 * n - m - 4, 3 * n - 3 * m - 6, 3 * n - m - 7],
        (false, false) => vec![n - 2 * m - 1, n - m - 2, 3 * n - 3 * m - 6, 3 * n - m - 7],
    };
    listed.sort();
    (listed, 4 * n - 3 * m - 9)
}

#[cfg(test)]
mod tests {
    use super::*;
    use StiefelClass::*;

    #[test]
    fn stiefel_cases() {
        assert_eq!(stiefel_homotopy(3, 9).unwrap().classes, vec![(6, Euler), (11, Pontryagin), (15, Pontryagin)]);
        assert_eq!(stiefel_homotopy(2, 6).unwrap().classes, vec![(4, Euler), (5, Euler), (7, Pontryagin)]);
        assert_eq!(stiefel_homotopy(1, 4).unwrap().classes, vec![(3, Euler)]);
        assert!(stiefel_homotopy(3, 6).is_err());
    }

    #[test]
    fn connecting_cases() {
        let d = |m, n| connecting_image(m, n).classes.iter().map(|c| (c.graph, c.degree, c.complexity)).collect::<Vec<_>>();
        use ConnectingGraph::*;
        assert_eq!(d(3, 9), vec![(Segment, 2, 1), (Theta, 11, 2)]);
        assert_eq!(d(2, 8), vec![(Segment, 3, 1), (Tadpole, 4, 1)]);
        assert_eq!(d(2, 7), vec![(Theta, 8, 2)]);
    }

    #[test]
    fn adjustments() {
        assert_eq!(rank_adjustments(3, 9), (vec![8], vec![11, 2]));
        assert_eq!(rank_adjustments(1, 6), (vec![], vec![3]));
        let bar = BTreeMap::from([(11, 1), (2, 1)]);
        assert_eq!(emb_rank_adjust(3, 9, &bar).unwrap(), BTreeMap::from([(8, 1)]));
        assert_eq!(emb_rank_adjust(3, 9, &BTreeMap::new()), Err(EmbError::NegativeRank(2)));
    }

    #[test]
    fn minus_degrees_are_the_connecting_image() {
        for (m, n) in [(1, 4), (1, 5), (2, 6), (2, 7), (3, 8), (3, 9), (4, 11), (5, 12)] {
            let mut minus = rank_adjustments(m, n).1;
            minus.sort();
            let image: Vec<i64> = connecting_image(m, n).classes.iter().map(|c| c.degree).collect();
            assert_eq!(minus, image, "({m},{n})");
        }
    }
}
