//! Library results against brute-force oracles written independently here.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::*;
use embgraph::complex_e::EpiSlice;
use embgraph::complex_hh::{admissible_basis_dim, admissible_monomials, kq_basis, straighten, Monomial};
use embgraph::exactq::{rank, Rational};
use embgraph::genfunc;
use embgraph::symfunc::{self, cycle_index_conf, Monomial as SeriesMonomial};
use num_traits::ToPrimitive;

#[test]
fn admissible_top_degree_is_factorial() {
    for k in 1..=6 {
        assert_eq!(admissible_basis_dim(k, k - 1), factorial(k - 1), "k = {k}");
    }
}

#[test]
fn admissible_dims_match_the_arnold_quotient() {
    for k in 2..=5 {
        for r in 0..k {
            for n in [2, 3] {
                assert_eq!(ConfQuotient::new(k, n, r).dim(), admissible_basis_dim(k, r), "k={k} r={r} n={n}");
            }
        }
    }
}

#[test]
fn kq_dims_match_the_arnold_quotient() {
    for k in 1..=6 {
        for s in 1..=k {
            let quot = ConfQuotient::new(k, 2, k - s);
            assert_eq!(kq_basis(k, s).len(), quot.dim_with_components(s), "k={k} s={s}");
        }
    }
}

fn to_word(m: &Monomial) -> Vec<(usize, usize)> {
    m.gens.iter().map(|&(a, b)| (a as usize - 1, b as usize - 1)).collect()
}

/// `mono - straighten(mono)` lies in the relation span.
#[test]
fn straightening_is_congruent() {
    for n in [2, 3] {
        for k in 3..=5 {
            for r in 1..k {
                let quot = ConfQuotient::new(k, n, r);
                for ids in quot.monomials.iter().take(60) {
                    for flip in [false, true] {
                        let mut gens: Vec<(u8, u8)> =
                            ids.iter().map(|&p| (quot.pairs[p].0 as u8 + 1, quot.pairs[p].1 as u8 + 1)).collect();
                        if flip {
                            gens.reverse();
                            gens[0] = (gens[0].1, gens[0].0);
                        }
                        let mono = Monomial::new(gens);
                        let mut terms = vec![(to_word(&mono), 1)];
                        for (adm, c) in straighten(&mono, n) {
                            assert!(adm.is_admissible());
                            terms.push((to_word(&adm), -c));
                        }
                        assert!(quot.reduce_word(&terms).is_empty(), "{mono:?} n={n}");
                    }
                }
            }
        }
    }
}

#[test]
fn admissible_monomials_are_independent() {
    for n in [2, 3] {
        for k in 2..=5 {
            for r in 0..k {
                let quot = ConfQuotient::new(k, n, r);
                let mut e = Echelon::default();
                for m in admissible_monomials(k, r) {
                    let red = quot.reduce_word(&[(to_word(&m), 1)]);
                    assert!(e.insert(red));
                }
            }
        }
    }
}

fn cycle_type(sigma: &[usize]) -> Vec<u32> {
    let mut seen = vec![false; sigma.len()];
    let mut a = vec![0u32; sigma.len()];
    for i in 0..sigma.len() {
        let mut len = 0;
        let mut j = i;
        while !seen[j] {
            seen[j] = true;
            j = sigma[j];
            len += 1;
        }
        if len > 0 {
            a[len - 1] += 1;
        }
    }
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

/// Coefficients of the configuration-space cycle index are characters
/// divided by centralizer orders.
#[test]
fn conf_cycle_index_matches_characters() {
    for n in [2, 3] {
        let series = cycle_index_conf(n, 4, 3);
        for k in 1..=4 {
            for r in 0..k {
                let quot = ConfQuotient::new(k, n, r);
                let mut by_type: BTreeMap<Vec<u32>, i64> = BTreeMap::new();
                for sigma in permutations(k) {
                    by_type.insert(cycle_type(&sigma), quot.trace(&sigma));
                }
                for (ct, tr) in by_type {
                    let mono = SeriesMonomial { x: 0, u: r as i32, z: (n as i32 - 1) * r as i32, a: ct.clone() };
                    let z = SeriesMonomial { a: ct.clone(), ..Default::default() }.centralizer();
                    let expected = Rational::from_integer(tr.into()) / z;
                    assert_eq!(series.coeff(&mono), expected, "n={n} k={k} r={r} type={ct:?}");
                }
            }
        }
    }
}

/// Hom-dimensions between permutation representations of three points
/// count orbits on pairs.
#[test]
fn pairing_counts_orbits_on_three_points() {
    use symfunc::{Truncation, TruncatedSeries};
    let t = Truncation::default();
    let z = |a: &[u32]| SeriesMonomial { a: a.to_vec(), ..Default::default() };
    // Characters of the trivial, sign and regular representations of Sigma_3.
    let perms = permutations(3);
    let reps: Vec<Box<dyn Fn(&[usize]) -> i64>> = vec![
        Box::new(|_| 1),
        Box::new(|p| perm_sign(p)),
        Box::new(|p| if p.iter().enumerate().all(|(i, &x)| i == x) { 6 } else { 0 }),
        Box::new(|p| p.iter().enumerate().filter(|(i, &x)| *i == x).count() as i64),
    ];
    let index = |chi: &dyn Fn(&[usize]) -> i64| {
        let mut s = TruncatedSeries::zero(t);
        for p in &perms {
            s.add_term(z(&cycle_type(p)), Rational::new(chi(p).into(), 6.into()));
        }
        s
    };
    for a in &reps {
        for b in &reps {
            let brute: i64 = perms.iter().map(|p| a(p) * b(p)).sum::<i64>() / 6;
            let got = symfunc::pair(&index(a.as_ref()), &index(b.as_ref())).coeff(&SeriesMonomial::default());
            assert_eq!(got, Rational::from_integer(brute.into()));
        }
    }
}

/// `l E_l(q)` counts primitive words of length l over q letters.
#[test]
fn necklace_counts_primitive_words() {
    for l in 1..=8u64 {
        let poly = symfunc::necklace(l).unwrap();
        for qv in 1..=3u64 {
            let total = qv.pow(l as u32);
            let primitive = (0..total)
                .filter(|&w| {
                    let digits: Vec<u64> = (0..l).map(|i| (w / qv.pow(i as u32)) % qv).collect();
                    (1..l).all(|shift| (0..l as usize).any(|i| digits[i] != digits[(i + shift as usize) % l as usize]))
                })
                .count() as i64;
            let value: Rational = poly.iter().enumerate().map(|(e, c)| c * Rational::from_integer((qv as i64).pow(e as u32).into())).sum();
            assert_eq!(value * Rational::from_integer((l as i64).into()), Rational::from_integer(primitive.into()), "l={l} q={qv}");
        }
    }
}

#[test]
fn differential_ranks_match_modular_rank() {
    for (m, n) in [(3, 9), (3, 8), (2, 7), (2, 8)] {
        for (s, t) in [(1, 2), (2, 2), (1, 3), (2, 3), (2, 4)] {
            let sl = EpiSlice::build(m, n, s, t);
            for mat in sl.differentials.values() {
                let dense: Vec<Vec<i64>> = mat.to_dense().iter().map(|r| r.iter().map(|v| v.to_integer().to_i64().unwrap()).collect()).collect();
                assert_eq!(rank(mat), dense_rank(&dense), "({m},{n}) s={s} t={t}");
            }
        }
    }
}

/// A connected graph with `legs[v]` univalent vertices on internal vertex
/// v and internal edges `edges` (a <= b).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct NaiveGraph {
    edges: Vec<(usize, usize)>,
    legs: Vec<usize>,
}

impl NaiveGraph {
    fn relabel(&self, p: &[usize]) -> NaiveGraph {
        let mut edges: Vec<(usize, usize)> = self.edges.iter().map(|&(a, b)| (p[a].min(p[b]), p[a].max(p[b]))).collect();
        edges.sort();
        let mut legs = vec![0; self.legs.len()];
        for (v, &c) in self.legs.iter().enumerate() {
            legs[p[v]] = c;
        }
        NaiveGraph { edges, legs }
    }

    fn canonical(&self) -> NaiveGraph {
        permutations(self.legs.len()).iter().map(|p| self.relabel(p)).min().unwrap()
    }

    fn connected(&self) -> bool {
        let k = self.legs.len();
        let mut seen = vec![false; k];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.edges {
                for (x, y) in [(a, b), (b, a)] {
                    if x == v && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        seen.iter().all(|&x| x)
    }

    /// Whether the orientation kills the graph: some automorphism acts by -1.
    fn is_zero(&self, m: i64, n: i64) -> bool {
        let odd = |x: i64| x.rem_euclid(2) == 1;
        // Automorphisms fixing all vertices. Swapping two legs moves two
        // external vertices and two edges.
        if self.legs.iter().any(|&c| c >= 2) && odd(m + n - 1) {
            return true;
        }
        let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for &e in &self.edges {
            *counts.entry(e).or_insert(0) += 1;
        }
        if counts.values().any(|&c| c >= 2) && !odd(n) {
            return true;
        }
        if self.edges.iter().any(|&(a, b)| a == b) && odd(n) {
            return true;
        }
        // One lift of each vertex automorphism: legs and parallel edges in order, loops kept.
        for p in permutations(self.legs.len()) {
            if self.relabel(&p) != *self {
                continue;
            }
            let mut ext_src = Vec::new();
            for (v, &c) in self.legs.iter().enumerate() {
                ext_src.extend(std::iter::repeat(v).take(c));
            }
            let ext_perm = stable_sort_perm(&ext_src.iter().map(|&v| p[v]).collect::<Vec<_>>());
            // Legs come first among the edges, then internal edges.
            let mut images: Vec<(usize, usize, usize)> = ext_src.iter().map(|&v| (0, p[v], 0)).collect();
            images.extend(self.edges.iter().map(|&(a, b)| (1, p[a].min(p[b]), p[a].max(p[b]))));
            let reversed = self.edges.iter().filter(|&&(a, b)| a != b && p[a] > p[b]).count() as i64;
            let edge_perm = stable_sort_perm(&images);
            let mut sign = 1;
            if odd(m) {
                sign *= perm_sign(&ext_perm);
            }
            if odd(n) {
                sign *= perm_sign(&p);
                if odd(reversed) {
                    sign = -sign;
                }
            } else {
                sign *= perm_sign(&edge_perm);
            }
            if sign < 0 {
                return true;
            }
        }
        false
    }
}

/// The permutation sending position i to the rank of `v[i]`, ties broken
/// by position.
fn stable_sort_perm<T: Ord>(v: &[T]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].cmp(&v[b]).then(a.cmp(&b)));
    let mut out = vec![0; v.len()];
    for (r, &i) in idx.iter().enumerate() {
        out[i] = r;
    }
    out
}

fn multisets<T: Clone>(items: &[T], size: usize) -> Vec<Vec<T>> {
    if size == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, x) in items.iter().enumerate() {
        for mut rest in multisets(&items[i..], size - 1) {
            rest.insert(0, x.clone());
            out.push(rest);
        }
    }
    out
}

/// Non-zero graphs per internal vertex count, generated as internal
/// multigraphs with legs attached.
fn naive_counts(m: i64, n: i64, s: usize, t: usize) -> BTreeMap<usize, usize> {
    let mut out = BTreeMap::new();
    if s == 2 && t == 1 && (m + n) % 2 == 0 {
        out.insert(0, 1);
    }
    for i in 1..=(2 * t).saturating_sub(s) {
        let e_int = (t + i).checked_sub(s);
        let Some(e_int) = e_int else { continue };
        let pairs: Vec<(usize, usize)> = (0..i).flat_map(|b| (0..=b).map(move |a| (a, b))).collect();
        let verts: Vec<usize> = (0..i).collect();
        let mut found = BTreeSet::new();
        for edges in multisets(&pairs, e_int) {
            for leg_list in multisets(&verts, s) {
                let mut legs = vec![0; i];
                for v in leg_list {
                    legs[v] += 1;
                }
                let g = NaiveGraph { edges: edges.clone(), legs };
                let valence_ok = (0..i).all(|v| g.legs[v] + g.edges.iter().map(|&(a, b)| (a == v) as usize + (b == v) as usize).sum::<usize>() >= 3);
                if valence_ok && g.connected() {
                    found.insert(g.canonical());
                }
            }
        }
        let nonzero = found.iter().filter(|g| !g.is_zero(m, n)).count();
        if nonzero > 0 {
            out.insert(i, nonzero);
        }
    }
    out
}

#[test]
fn epi_bases_match_naive_generation() {
    for (m, n) in [(3, 9), (3, 8), (2, 7), (2, 8)] {
        for t in 1..=3 {
            for s in 1..=t + 1 {
                let sl = EpiSlice::build(m, n, s, t);
                let got: BTreeMap<usize, usize> = sl
                    .bases
                    .iter()
                    .map(|(_, b)| (b[0].n_internal, b.len()))
                    .collect();
                assert_eq!(got, naive_counts(m, n, s, t), "({m},{n}) s={s} t={t}");
            }
        }
    }
}

/// The genfunc identity `F = 1` at complexity zero and the Euler
/// characteristic of connected HH slices against genfunc.
#[test]
fn hh_euler_matches_genfunc() {
    for (m, n) in [(3, 9), (3, 8), (2, 7), (2, 8)] {
        let (pi, _) = genfunc::tables(m, n, 4, 3).unwrap();
        for t in 1..=3 {
            for s in 1..=t + 1 {
                assert_eq!(embgraph::complex_hh::euler_hh(m, n, s, t, true), pi.get(s, t), "({m},{n}) s={s} t={t}");
            }
        }
    }
}
