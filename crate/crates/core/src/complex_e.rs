//! The complexes of connected uni-(>=3)-valent graphs (`E_pi`) and their
//! free graded-commutative hull (`E_H`), with the vertex-expansion
//! differential.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use thiserror::Error;

use crate::exactq::{q, rank, SparseMatrix};
use crate::graphs::{canonicalize_all, koszul_sign, OrientedGraph, Parity};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ComplexError {
    #[error("the 0-wheel does not exist")]
    ZeroWheel,
    #[error("no basis in degree {0}")]
    MissingBasis(i64),
}

/// One layer of a slice: all canonical graphs with a fixed number of
/// internal vertices, zero or not, and their expansions.
#[derive(Clone, Debug, Default)]
struct Layer {
    graphs: Vec<OrientedGraph>,
    /// Per graph, per parity index: 0 or 1.
    nonzero: Vec<[bool; 4]>,
    /// Per graph: expansion terms as (index in next layer, canonical signs).
    expansions: Vec<Vec<(u32, [i8; 4])>>,
}

/// Parity-free combinatorics of a slice (s, t): shared by all (m, n).
#[derive(Clone, Debug, Default)]
pub struct SliceStructure {
    pub s: usize,
    pub t: usize,
    layers: BTreeMap<usize, Layer>,
}

/// All ways to expand one internal vertex of `g` into an edge.
///
/// The first half-edge at the vertex stays put, so each unordered split is
/// produced once; both sides keep at least two half-edges. The new vertex
/// gets the next internal id and the new edge is appended, directed from the
/// old vertex to the new one.
pub fn expansions(g: &OrientedGraph) -> Vec<OrientedGraph> {
    let s = g.n_external;
    let w = (s + g.n_internal) as u8;
    let mut out = Vec::new();
    for v in s..s + g.n_internal {
        let v = v as u8;
        let mut halves: Vec<(usize, usize)> = Vec::new();
        for (k, &(a, b)) in g.edges.iter().enumerate() {
            if a == v {
                halves.push((k, 0));
            }
            if b == v {
                halves.push((k, 1));
            }
        }
        let l = halves.len();
        if l < 4 {
            continue;
        }
        let rest = &halves[1..];
        for mask in 1u32..(1 << (l - 1)) {
            let moved = mask.count_ones() as usize;
            if moved < 2 || l - moved < 2 {
                continue;
            }
            let mut edges = g.edges.clone();
            for (i, &(k, side)) in rest.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    if side == 0 {
                        edges[k].0 = w;
                    } else {
                        edges[k].1 = w;
                    }
                }
            }
            edges.push((v, w));
            out.push(OrientedGraph::new(s, g.n_internal + 1, edges));
        }
    }
    out
}

/// Sign of moving the prepended (new vertex, new edge) pair into standard
/// order: `[w, e, ext.., int.., edges..]` to `[ext.., int.., w, edges.., e]`.
pub fn expansion_sign(s: usize, n_internal: usize, n_edges: usize, p: Parity) -> i8 {
    let (m, n) = (p.m() as i64, p.n() as i64);
    let mut degrees = vec![n, 1 - n];
    degrees.extend(std::iter::repeat(m).take(s));
    degrees.extend(std::iter::repeat(n).take(n_internal));
    degrees.extend(std::iter::repeat(1 - n).take(n_edges));
    let mut perm: Vec<usize> = (2..2 + s + n_internal).collect();
    perm.push(0);
    perm.extend(2 + s + n_internal..2 + s + n_internal + n_edges);
    perm.push(1);
    koszul_sign(&perm, &degrees).expect("well-formed permutation")
}

fn signs_nonzero(signs: &[i8; 4]) -> [bool; 4] {
    [signs[0] != 0, signs[1] != 0, signs[2] != 0, signs[3] != 0]
}

/// Enumerates a slice by repeated expansion of the one-vertex graph with
/// `s` legs and `t - s + 1` loops. Every connected graph with internal
/// valences >= 3 contracts onto that graph, so nothing is missed.
pub fn slice_structure(s: usize, t: usize) -> SliceStructure {
    let mut out = SliceStructure { s, t, layers: BTreeMap::new() };
    if s == 0 || t == 0 || s > t + 1 {
        return out;
    }
    if (s, t) == (2, 1) {
        let (g, signs) = canonicalize_all(&OrientedGraph::segment());
        out.layers.insert(
            0,
            Layer { graphs: vec![g], nonzero: vec![signs_nonzero(&signs)], expansions: vec![Vec::new()] },
        );
        return out;
    }
    let loops = t + 1 - s;
    let mut edges: Vec<(u8, u8)> = (0..s).map(|e| (e as u8, s as u8)).collect();
    edges.extend(std::iter::repeat((s as u8, s as u8)).take(loops));
    let (start, signs) = canonicalize_all(&OrientedGraph::new(s, 1, edges));
    let mut layer = Layer { graphs: vec![start], nonzero: vec![signs_nonzero(&signs)], expansions: Vec::new() };
    let max_internal = 2 * t - s;
    let mut i = 1;
    loop {
        if i == max_internal {
            layer.expansions = vec![Vec::new(); layer.graphs.len()];
            out.layers.insert(i, layer);
            break;
        }
        let terms: Vec<Vec<(OrientedGraph, [i8; 4])>> =
            layer.graphs.par_iter().map(|g| expansions(g).iter().map(canonicalize_all).collect()).collect();
        let mut index: HashMap<&OrientedGraph, u32> = HashMap::new();
        let mut next_nonzero: Vec<[bool; 4]> = Vec::new();
        let mut order: Vec<&OrientedGraph> = Vec::new();
        for list in &terms {
            for (g, signs) in list {
                let k = *index.entry(g).or_insert_with(|| {
                    order.push(g);
                    next_nonzero.push([false; 4]);
                    (order.len() - 1) as u32
                });
                let nz = signs_nonzero(signs);
                for p in 0..4 {
                    next_nonzero[k as usize][p] |= nz[p];
                }
            }
        }
        // Sort the next layer so bases are deterministic.
        let mut sorted: Vec<u32> = (0..order.len() as u32).collect();
        sorted.sort_by(|&a, &b| order[a as usize].cmp(order[b as usize]));
        let mut rank_of = vec![0u32; order.len()];
        for (r, &k) in sorted.iter().enumerate() {
            rank_of[k as usize] = r as u32;
        }
        let next_graphs: Vec<OrientedGraph> = sorted.iter().map(|&k| order[k as usize].clone()).collect();
        let next_nz: Vec<[bool; 4]> = sorted.iter().map(|&k| next_nonzero[k as usize]).collect();
        layer.expansions = terms
            .iter()
            .map(|list| list.iter().map(|(g, signs)| (rank_of[index[g] as usize], *signs)).collect())
            .collect();
        drop(index);
        out.layers.insert(i, layer);
        if next_graphs.is_empty() {
            break;
        }
        layer = Layer { graphs: next_graphs, nonzero: next_nz, expansions: Vec::new() };
        i += 1;
    }
    out
}

impl SliceStructure {
    /// Number of canonical graphs per internal-vertex count, zero ones included.
    pub fn layer_sizes(&self) -> BTreeMap<usize, usize> {
        self.layers.iter().map(|(&i, l)| (i, l.graphs.len())).collect()
    }

    pub fn all_graphs(&self) -> impl Iterator<Item = &OrientedGraph> {
        self.layers.values().flat_map(|l| l.graphs.iter())
    }
}

/// Options for building an `E_pi` slice.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EpiOptions {
    /// For even n, drop graphs with loops. They span no subcomplex of
    /// their own, but loop-free graphs do, and it is quasi-isomorphic to
    /// the full slice in complexity >= 2.
    pub reduced: bool,
}

/// A slice of `E_pi` for fixed (m, n, s, t).
#[derive(Clone, Debug)]
pub struct EpiSlice {
    pub m: i64,
    pub n: i64,
    pub s: usize,
    pub t: usize,
    /// Degree -> canonical basis graphs.
    pub bases: BTreeMap<i64, Vec<OrientedGraph>>,
    /// Degree d -> matrix of the differential from degree d to d - 1.
    pub differentials: BTreeMap<i64, SparseMatrix>,
}

pub fn degree_of(m: i64, n: i64, s: usize, t: usize, n_internal: usize) -> i64 {
    (n - 1) * (t + n_internal) as i64 - n * n_internal as i64 - m * s as i64
}

impl EpiSlice {
    pub fn from_structure(st: &SliceStructure, m: i64, n: i64, opts: EpiOptions) -> EpiSlice {
        let p = Parity::of(m, n);
        let pi = p.index();
        let drop_loops = opts.reduced && !p.n_odd;
        let keep = |g: &OrientedGraph, nz: &[bool; 4]| nz[pi] && !(drop_loops && g.edges.iter().any(|e| e.0 == e.1));
        let mut bases = BTreeMap::new();
        let mut positions: BTreeMap<usize, Vec<Option<usize>>> = BTreeMap::new();
        for (&i, layer) in &st.layers {
            let mut pos = vec![None; layer.graphs.len()];
            let mut basis = Vec::new();
            for (k, g) in layer.graphs.iter().enumerate() {
                if keep(g, &layer.nonzero[k]) {
                    pos[k] = Some(basis.len());
                    basis.push(g.clone());
                }
            }
            positions.insert(i, pos);
            if !basis.is_empty() {
                bases.insert(degree_of(m, n, st.s, st.t, i), basis);
            }
        }
        let mut differentials = BTreeMap::new();
        for (&i, layer) in &st.layers {
            let d = degree_of(m, n, st.s, st.t, i);
            let Some(src) = bases.get(&d) else { continue };
            let Some(tgt) = bases.get(&(d - 1)) else { continue };
            let src_pos = &positions[&i];
            let tgt_pos = &positions[&(i + 1)];
            let n_edges = st.t + i;
            let outer = expansion_sign(st.s, i, n_edges, p);
            let mut trip = Vec::new();
            for (k, terms) in layer.expansions.iter().enumerate() {
                let Some(col) = src_pos[k] else { continue };
                for &(target, signs) in terms {
                    if signs[pi] == 0 {
                        continue;
                    }
                    if let Some(row) = tgt_pos[target as usize] {
                        trip.push((row, col, q((outer * signs[pi]) as i64)));
                    }
                }
            }
            let mat = SparseMatrix::from_triplets(tgt.len(), src.len(), trip).expect("indices in range");
            differentials.insert(d, mat);
        }
        EpiSlice { m, n, s: st.s, t: st.t, bases, differentials }
    }

    pub fn build(m: i64, n: i64, s: usize, t: usize) -> EpiSlice {
        EpiSlice::from_structure(&slice_structure(s, t), m, n, EpiOptions::default())
    }

    pub fn dim(&self, d: i64) -> usize {
        self.bases.get(&d).map_or(0, Vec::len)
    }

    /// Matrix of the differential out of degree `d`, zero if either side is empty.
    pub fn differential(&self, d: i64) -> SparseMatrix {
        self.differentials
            .get(&d)
            .cloned()
            .unwrap_or_else(|| SparseMatrix::zeros(self.dim(d - 1), self.dim(d)))
    }

    pub fn euler(&self) -> i64 {
        self.bases.iter().map(|(d, b)| if d.rem_euclid(2) == 0 { b.len() as i64 } else { -(b.len() as i64) }).sum()
    }

    /// Ranks of all differentials, keyed by source degree.
    pub fn differential_ranks(&self) -> BTreeMap<i64, usize> {
        self.differentials.par_iter().map(|(&d, mat)| (d, rank(mat))).collect()
    }

    pub fn homology(&self) -> BTreeMap<i64, usize> {
        homology_from(&self.bases.iter().map(|(&d, b)| (d, b.len())).collect(), &self.differential_ranks())
    }

    /// Every composite of consecutive differentials vanishes.
    pub fn d_squared_is_zero(&self) -> bool {
        self.differentials.iter().all(|(&d, a)| match self.differentials.get(&(d - 1)) {
            Some(b) => b.mul(a).expect("shapes agree").is_zero(),
            None => true,
        })
    }
}

/// `H_d = dim C_d - rank(d_d) - rank(d_{d+1})`, non-zero entries only.
pub fn homology_from(dims: &BTreeMap<i64, usize>, ranks: &BTreeMap<i64, usize>) -> BTreeMap<i64, usize> {
    let mut out = BTreeMap::new();
    for (&d, &dim) in dims {
        let h = dim - ranks.get(&d).copied().unwrap_or(0) - ranks.get(&(d + 1)).copied().unwrap_or(0);
        if h > 0 {
            out.insert(d, h);
        }
    }
    out
}

pub fn enumerate_epi_basis(m: i64, n: i64, s: usize, t: usize) -> BTreeMap<i64, Vec<OrientedGraph>> {
    EpiSlice::build(m, n, s, t).bases
}

pub fn differential_epi(slice: &EpiSlice, d: i64) -> Result<SparseMatrix, ComplexError> {
    if !slice.bases.contains_key(&d) {
        return Err(ComplexError::MissingBasis(d));
    }
    Ok(slice.differential(d))
}

pub fn homology_ranks_epi(m: i64, n: i64, s: usize, t: usize) -> BTreeMap<i64, usize> {
    EpiSlice::build(m, n, s, t).homology()
}

pub fn euler_epi(m: i64, n: i64, s: usize, t: usize) -> i64 {
    EpiSlice::build(m, n, s, t).euler()
}

/// The t-gon with one leg per corner; the 1-wheel is a leg on a looped
/// vertex and the 2-wheel has a double edge.
pub fn wheel_graph(t: usize) -> Result<OrientedGraph, ComplexError> {
    if t == 0 {
        return Err(ComplexError::ZeroWheel);
    }
    let mut edges: Vec<(u8, u8)> = (0..t).map(|e| (e as u8, (t + e) as u8)).collect();
    edges.extend((0..t).map(|i| ((t + i) as u8, (t + (i + 1) % t) as u8)));
    Ok(OrientedGraph::new(t, t, edges))
}

/// Degree of the t-wheel: `t(n - m - 2)`.
pub fn wheel_degree(m: i64, n: i64, t: usize) -> i64 {
    t as i64 * (n - m - 2)
}

/// A generator of `E_H`: basis element `index` of the `E_pi` slice (s, t)
/// in degree `degree`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator {
    pub s: usize,
    pub t: usize,
    pub degree: i64,
    pub index: usize,
}

/// A slice of `E_H`: graded-commutative monomials in `E_pi` basis graphs
/// (a product is a disjoint union), with the derivation differential.
#[derive(Clone, Debug)]
pub struct EhSlice {
    pub m: i64,
    pub n: i64,
    pub s: usize,
    pub t: usize,
    pub bases: BTreeMap<i64, Vec<Vec<Generator>>>,
    pub differentials: BTreeMap<i64, SparseMatrix>,
}

fn odd(d: i64) -> bool {
    d.rem_euclid(2) == 1
}

/// Sorts a monomial, returning the Koszul sign, or `None` if an odd
/// generator repeats.
fn sort_monomial(mut factors: Vec<Generator>) -> Option<(Vec<Generator>, i8)> {
    let mut sign = 1i8;
    for i in 1..factors.len() {
        let mut j = i;
        while j > 0 && factors[j - 1] > factors[j] {
            if odd(factors[j - 1].degree) && odd(factors[j].degree) {
                sign = -sign;
            }
            factors.swap(j - 1, j);
            j -= 1;
        }
    }
    if factors.windows(2).any(|w| w[0] == w[1] && odd(w[0].degree)) {
        return None;
    }
    Some((factors, sign))
}

impl EhSlice {
    /// Builds the slice from `E_pi` slices for all (s', t') <= (s, t).
    pub fn build(m: i64, n: i64, s: usize, t: usize) -> EhSlice {
        let mut pis: BTreeMap<(usize, usize), EpiSlice> = BTreeMap::new();
        for tt in 1..=t {
            for ss in 1..=s.min(tt + 1) {
                pis.insert((ss, tt), EpiSlice::build(m, n, ss, tt));
            }
        }
        EhSlice::from_pi(m, n, s, t, &pis)
    }

    pub fn from_pi(m: i64, n: i64, s: usize, t: usize, pis: &BTreeMap<(usize, usize), EpiSlice>) -> EhSlice {
        let mut gens: Vec<Generator> = Vec::new();
        for (&(ss, tt), sl) in pis {
            if ss > s || tt > t {
                continue;
            }
            for (&d, b) in &sl.bases {
                gens.extend((0..b.len()).map(|index| Generator { s: ss, t: tt, degree: d, index }));
            }
        }
        gens.sort();
        let mut monomials: Vec<Vec<Generator>> = Vec::new();
        fn rec(gens: &[Generator], from: usize, s: usize, t: usize, cur: &mut Vec<Generator>, out: &mut Vec<Vec<Generator>>) {
            if s == 0 && t == 0 {
                out.push(cur.clone());
                return;
            }
            for i in from..gens.len() {
                let g = gens[i];
                if g.s > s || g.t > t {
                    continue;
                }
                if cur.last() == Some(&g) && odd(g.degree) {
                    continue;
                }
                cur.push(g);
                rec(gens, i, s - g.s, t - g.t, cur, out);
                cur.pop();
            }
        }
        if s > 0 && t > 0 {
            rec(&gens, 0, s, t, &mut Vec::new(), &mut monomials);
        }
        let mut bases: BTreeMap<i64, Vec<Vec<Generator>>> = BTreeMap::new();
        for mono in monomials {
            let d = mono.iter().map(|g| g.degree).sum();
            bases.entry(d).or_default().push(mono);
        }
        for b in bases.values_mut() {
            b.sort();
        }
        let mut differentials = BTreeMap::new();
        for (&d, src) in &bases {
            let Some(tgt) = bases.get(&(d - 1)) else { continue };
            let index: HashMap<&Vec<Generator>, usize> = tgt.iter().enumerate().map(|(i, m)| (m, i)).collect();
            let mut trip = Vec::new();
            for (col, mono) in src.iter().enumerate() {
                let mut prefix = 0i64;
                for (i, g) in mono.iter().enumerate() {
                    let sl = &pis[&(g.s, g.t)];
                    if let Some(mat) = sl.differentials.get(&g.degree) {
                        let outer: i64 = if odd(prefix) { -1 } else { 1 };
                        for (row, c, v) in mat.entries() {
                            if *c != g.index {
                                continue;
                            }
                            let mut factors = mono.clone();
                            factors[i] = Generator { s: g.s, t: g.t, degree: g.degree - 1, index: *row };
                            if let Some((sorted, sign)) = sort_monomial(factors) {
                                let r = index[&sorted];
                                trip.push((r, col, v * q(outer * sign as i64)));
                            }
                        }
                    }
                    prefix += g.degree;
                }
            }
            let mat = SparseMatrix::from_triplets(tgt.len(), src.len(), trip).expect("indices in range");
            differentials.insert(d, mat);
        }
        EhSlice { m, n, s, t, bases, differentials }
    }

    pub fn euler(&self) -> i64 {
        self.bases.iter().map(|(d, b)| if odd(*d) { -(b.len() as i64) } else { b.len() as i64 }).sum()
    }

    pub fn homology(&self) -> BTreeMap<i64, usize> {
        let ranks = self.differentials.iter().map(|(&d, m)| (d, rank(m))).collect();
        homology_from(&self.bases.iter().map(|(&d, b)| (d, b.len())).collect(), &ranks)
    }

    pub fn d_squared_is_zero(&self) -> bool {
        self.differentials.iter().all(|(&d, a)| match self.differentials.get(&(d - 1)) {
            Some(b) => b.mul(a).expect("shapes agree").is_zero(),
            None => true,
        })
    }
}
