//! Bicolored graph complexes `HH` and `HH_pi`: full edges (degree n-1)
//! and dotted edges (degree m-1) on vertices of degree -m, each color a
//! forest, modulo the three-term relations, with the differential that
//! contracts dotted edges. Also the labeled side: admissible monomials and
//! straightening.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::canon::{for_each_leaf, perm_sign, Colored};
use crate::exactq::{q, rank, SparseMatrix};
use crate::graphs::{koszul_sign, Parity};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MonomialError {
    #[error("expected `F:<edges>|D:<edges>`")]
    Layout,
    #[error("bad edge `{0}`")]
    Edge(String),
    #[error("vertex labels start at 1")]
    ZeroLabel,
    #[error("too many vertices")]
    TooLarge,
}

/// A product of generators `a_ij` on labeled vertices `1..k`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub gens: Vec<(u8, u8)>,
}

fn sign_pow(odd: bool) -> i64 {
    if odd {
        -1
    } else {
        1
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(k: usize) -> Self {
        UnionFind((0..k).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    /// False if `a` and `b` were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra] = rb;
        true
    }
}

fn is_forest(k: usize, edges: &[(u8, u8)]) -> bool {
    let mut uf = UnionFind::new(k);
    edges.iter().all(|&(a, b)| (a as usize) < k && (b as usize) < k && uf.union(a as usize, b as usize))
}

fn components(k: usize, edges: impl Iterator<Item = (u8, u8)>) -> usize {
    let mut uf = UnionFind::new(k);
    k - edges.filter(|&(a, b)| uf.union(a as usize, b as usize)).count()
}

impl Monomial {
    pub fn new(gens: Vec<(u8, u8)>) -> Self {
        Monomial { gens }
    }

    /// Each generator `i < j`, second indices distinct and increasing.
    pub fn is_admissible(&self) -> bool {
        self.gens.iter().all(|&(i, j)| i < j) && self.gens.windows(2).all(|w| w[0].1 < w[1].1)
    }
}

/// Rewrites `mono` in the admissible basis, for generators of degree
/// `n - 1` with `a_ji = (-1)^n a_ij`. Uses `a_aj a_bj = a_ab a_bj - a_ab a_aj`
/// for `a < b < j`, which follows from the three-term relation in either
/// parity. Repeated generators and cycles give 0.
pub fn straighten(mono: &Monomial, n: i64) -> Vec<(Monomial, i64)> {
    let mut out: BTreeMap<Monomial, i64> = BTreeMap::new();
    straighten_into(mono.gens.clone(), 1, n.rem_euclid(2) == 1, &mut out);
    out.into_iter().filter(|(_, c)| *c != 0).collect()
}

fn straighten_into(mut gens: Vec<(u8, u8)>, mut coeff: i64, n_odd: bool, out: &mut BTreeMap<Monomial, i64>) {
    for g in gens.iter_mut() {
        if g.0 == g.1 {
            return;
        }
        if g.0 > g.1 {
            *g = (g.1, g.0);
            coeff *= sign_pow(n_odd);
        }
    }
    let k = gens.iter().map(|&(_, j)| j as usize + 1).max().unwrap_or(0);
    if !is_forest(k, &gens) {
        return;
    }
    // Sort by (j, i); generators have degree n - 1.
    for i in 1..gens.len() {
        let mut p = i;
        while p > 0 && (gens[p - 1].1, gens[p - 1].0) > (gens[p].1, gens[p].0) {
            gens.swap(p - 1, p);
            if !n_odd {
                coeff = -coeff;
            }
            p -= 1;
        }
    }
    if let Some(p) = (1..gens.len()).find(|&p| gens[p - 1].1 == gens[p].1) {
        let (a, j) = gens[p - 1];
        let b = gens[p].0;
        let mut first = gens.clone();
        first[p - 1] = (a, b);
        first[p] = (b, j);
        straighten_into(first, coeff, n_odd, out);
        let mut second = gens;
        second[p - 1] = (a, b);
        second[p] = (a, j);
        straighten_into(second, -coeff, n_odd, out);
        return;
    }
    *out.entry(Monomial { gens }).or_insert(0) += coeff;
}

/// All admissible monomials with `r` generators on vertices `1..=k`.
pub fn admissible_monomials(k: usize, r: usize) -> Vec<Monomial> {
    fn rec(k: usize, r: usize, j: usize, cur: &mut Vec<(u8, u8)>, out: &mut Vec<Monomial>) {
        if cur.len() == r {
            out.push(Monomial { gens: cur.clone() });
            return;
        }
        for jj in j..=k {
            if k - jj + 1 < r - cur.len() {
                break;
            }
            for i in 1..jj {
                cur.push((i as u8, jj as u8));
                rec(k, r, jj + 1, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    if r < k.max(1) {
        rec(k, r, 2, &mut Vec::new(), &mut out);
    }
    out
}

pub fn admissible_basis_dim(k: usize, r: usize) -> usize {
    admissible_monomials(k, r).len()
}

/// Admissible dotted forests on `1..=k` with `s` components. Components
/// carry degree m and edges degree 1 in the orientation data.
pub fn kq_basis(k: usize, s: usize) -> Vec<Monomial> {
    if s == 0 || s > k {
        return Vec::new();
    }
    admissible_monomials(k, k - s)
}

/// A bicolored graph on vertices `0..k`; edges are stored as written
/// (direction and order are part of the orientation).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BicolorGraph {
    pub k: usize,
    pub full: Vec<(u8, u8)>,
    pub dotted: Vec<(u8, u8)>,
}

impl BicolorGraph {
    pub fn new(k: usize, full: Vec<(u8, u8)>, dotted: Vec<(u8, u8)>) -> Self {
        BicolorGraph { k, full, dotted }
    }

    pub fn complexity(&self) -> usize {
        self.full.len()
    }

    /// Components after removing full edges.
    pub fn hodge(&self) -> usize {
        components(self.k, self.dotted.iter().copied())
    }

    pub fn is_connected(&self) -> bool {
        components(self.k, self.full.iter().chain(&self.dotted).copied()) == 1
    }

    /// Both colors are forests and full edges touch every vertex.
    pub fn is_valid(&self) -> bool {
        let mut covered = vec![false; self.k];
        for &(a, b) in &self.full {
            if a as usize >= self.k || b as usize >= self.k {
                return false;
            }
            covered[a as usize] = true;
            covered[b as usize] = true;
        }
        covered.iter().all(|&c| c) && is_forest(self.k, &self.full) && is_forest(self.k, &self.dotted)
    }

    /// `(n-1) t + (m-1)(k-s) - m k`.
    pub fn degree(&self, m: i64, n: i64) -> i64 {
        let (k, s, t) = (self.k as i64, self.hodge() as i64, self.complexity() as i64);
        (n - 1) * t + (m - 1) * (k - s) - m * k
    }
}

impl fmt::Display for BicolorGraph {
    /// `F:1-2,3-4|D:1-3`, vertices numbered from 1.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |e: &[(u8, u8)]| e.iter().map(|(a, b)| format!("{}-{}", a + 1, b + 1)).collect::<Vec<_>>().join(",");
        write!(f, "F:{}|D:{}", list(&self.full), list(&self.dotted))
    }
}

impl FromStr for BicolorGraph {
    type Err = MonomialError;

    /// The vertex count is the largest label.
    fn from_str(s: &str) -> Result<Self, MonomialError> {
        let (f, d) = s.trim().split_once('|').ok_or(MonomialError::Layout)?;
        let f = f.strip_prefix("F:").ok_or(MonomialError::Layout)?;
        let d = d.strip_prefix("D:").ok_or(MonomialError::Layout)?;
        let parse = |list: &str| -> Result<Vec<(u8, u8)>, MonomialError> {
            if list.is_empty() {
                return Ok(Vec::new());
            }
            list.split(',')
                .map(|e| {
                    let (a, b) = e.split_once('-').ok_or_else(|| MonomialError::Edge(e.to_string()))?;
                    let a: u8 = a.parse().map_err(|_| MonomialError::Edge(e.to_string()))?;
                    let b: u8 = b.parse().map_err(|_| MonomialError::Edge(e.to_string()))?;
                    if a == 0 || b == 0 {
                        return Err(MonomialError::ZeroLabel);
                    }
                    if a == b {
                        return Err(MonomialError::Edge(e.to_string()));
                    }
                    Ok((a - 1, b - 1))
                })
                .collect()
        };
        let (full, dotted) = (parse(f)?, parse(d)?);
        let k = full.iter().chain(&dotted).map(|&(a, b)| a.max(b) as usize + 1).max().unwrap_or(0);
        if k > 64 {
            return Err(MonomialError::TooLarge);
        }
        Ok(BicolorGraph { k, full, dotted })
    }
}

/// Canonical form and the relabeling sign for each parity class, 0 when an
/// automorphism acts by -1.
pub fn canonicalize_bicolor(g: &BicolorGraph) -> (BicolorGraph, [i8; 4]) {
    let mut adj = vec![Vec::new(); g.k];
    for &(a, b) in &g.full {
        adj[a as usize].push((b as usize, 1));
        adj[b as usize].push((a as usize, 1));
    }
    for &(a, b) in &g.dotted {
        adj[a as usize].push((b as usize, 2));
        adj[b as usize].push((a as usize, 2));
    }
    let init = (0..g.k).map(|v| adj[v].iter().map(|&(_, l)| 1u64 << (20 * (l - 1))).sum()).collect();
    let colored = Colored { init, adj };
    let mut best: Option<(Vec<(u8, u8)>, Vec<(u8, u8)>)> = None;
    let mut signs = [0i8; 4];
    let mut conflict = [false; 4];
    for_each_leaf(&colored, |pos| {
        let relabel = |edges: &[(u8, u8)]| -> (Vec<(u8, u8)>, bool, i8) {
            let mut rev = false;
            let mapped: Vec<(u8, u8)> = edges
                .iter()
                .map(|&(a, b)| {
                    let (x, y) = (pos[a as usize] as u8, pos[b as usize] as u8);
                    if x > y {
                        rev = !rev;
                        (y, x)
                    } else {
                        (x, y)
                    }
                })
                .collect();
            let mut order: Vec<u32> = (0..mapped.len() as u32).collect();
            order.sort_by_key(|&i| mapped[i as usize]);
            let sorted = order.iter().map(|&i| mapped[i as usize]).collect();
            (sorted, rev, perm_sign(&order))
        };
        let (full, f_rev, f_sort) = relabel(&g.full);
        let (dotted, d_rev, d_sort) = relabel(&g.dotted);
        let v = perm_sign(pos);
        let mut leaf = [0i8; 4];
        for p in Parity::all() {
            let mut s = 1i8;
            if f_rev && p.n_odd {
                s = -s;
            }
            if !p.n_odd {
                s *= f_sort;
            }
            if d_rev && p.m_odd {
                s = -s;
            }
            if !p.m_odd {
                s *= d_sort;
            }
            if p.m_odd {
                s *= v;
            }
            leaf[p.index()] = s;
        }
        let key = (full, dotted);
        match &best {
            Some(b) if key > *b => {}
            Some(b) if key == *b => {
                for i in 0..4 {
                    conflict[i] |= leaf[i] != signs[i];
                }
            }
            _ => {
                best = Some(key);
                signs = leaf;
                conflict = [false; 4];
            }
        }
    });
    let (full, dotted) = best.unwrap_or_default();
    for i in 0..4 {
        if conflict[i] {
            signs[i] = 0;
        }
    }
    (BicolorGraph { k: g.k, full, dotted }, signs)
}

fn pairs(k: usize) -> Vec<(u8, u8)> {
    let mut out = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            out.push((a as u8, b as u8));
        }
    }
    out
}

/// All forests with `r` edges drawn from `pairs`, edges in pair order.
fn forests(k: usize, r: usize, pairs: &[(u8, u8)]) -> Vec<Vec<(u8, u8)>> {
    fn rec(k: usize, r: usize, from: usize, pairs: &[(u8, u8)], cur: &mut Vec<(u8, u8)>, out: &mut Vec<Vec<(u8, u8)>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in from..pairs.len() {
            if pairs.len() - i < r - cur.len() {
                break;
            }
            cur.push(pairs[i]);
            if is_forest(k, cur) {
                rec(k, r, i + 1, pairs, cur, out);
            }
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, r, 0, pairs, &mut Vec::new(), &mut out);
    out
}

/// Parity-free generators of a slice: canonical graphs by vertex count,
/// each with its four relabeling signs.
#[derive(Clone, Debug)]
pub struct HhStructure {
    pub s: usize,
    pub t: usize,
    pub connected: bool,
    pub generators: BTreeMap<usize, Vec<(BicolorGraph, [i8; 4])>>,
}

pub fn hh_structure(s: usize, t: usize, connected: bool) -> HhStructure {
    let mut generators = BTreeMap::new();
    if s >= 1 && t >= 1 {
        for k in s.max(t + 1)..=2 * t {
            let all = pairs(k);
            let mut fulls: BTreeMap<BicolorGraph, ()> = BTreeMap::new();
            for f in forests(k, t, &all) {
                let g = BicolorGraph::new(k, f, Vec::new());
                if g.is_valid() {
                    fulls.insert(canonicalize_bicolor(&g).0, ());
                }
            }
            let dotted = forests(k, k - s, &all);
            let found: Vec<(BicolorGraph, [i8; 4])> = fulls
                .keys()
                .collect::<Vec<_>>()
                .par_iter()
                .flat_map_iter(|f| {
                    dotted.iter().filter_map(move |d| {
                        let g = BicolorGraph::new(k, f.full.clone(), d.clone());
                        if connected && !g.is_connected() {
                            return None;
                        }
                        Some(canonicalize_bicolor(&g))
                    })
                })
                .collect();
            let map: BTreeMap<BicolorGraph, [i8; 4]> = found.into_iter().collect();
            if !map.is_empty() {
                generators.insert(k, map.into_iter().collect());
            }
        }
    }
    HhStructure { s, t, connected, generators }
}

/// A slice of `HH` or `HH_pi` for fixed (m, n, s, t). The chain space in
/// each degree is the span of the generators modulo the relation rows.
#[derive(Clone, Debug)]
pub struct HHSlice {
    pub m: i64,
    pub n: i64,
    pub s: usize,
    pub t: usize,
    pub connected: bool,
    /// Degree -> canonical generators.
    pub bases: BTreeMap<i64, Vec<BicolorGraph>>,
    /// Degree -> relations, one row per three-term relation.
    pub relations: BTreeMap<i64, SparseMatrix>,
    /// Degree d -> differential on generators, from degree d to d + 1
    /// (contracting a dotted edge raises the degree).
    pub differentials: BTreeMap<i64, SparseMatrix>,
}

impl HHSlice {
    pub fn from_structure(st: &HhStructure, m: i64, n: i64) -> HHSlice {
        let p = Parity::of(m, n);
        let pi = p.index();
        let mut by_k: BTreeMap<usize, Vec<BicolorGraph>> = BTreeMap::new();
        for (&k, list) in &st.generators {
            let kept: Vec<BicolorGraph> = list.iter().filter(|(_, s)| s[pi] != 0).map(|(g, _)| g.clone()).collect();
            if !kept.is_empty() {
                by_k.insert(k, kept);
            }
        }
        let index: HashMap<&BicolorGraph, (usize, usize)> =
            by_k.iter().flat_map(|(&k, l)| l.iter().enumerate().map(move |(i, g)| (g, (k, i)))).collect();
        let lookup = |g: &BicolorGraph| -> Option<(usize, i8)> {
            let (c, signs) = canonicalize_bicolor(g);
            if signs[pi] == 0 {
                return None;
            }
            index.get(&c).map(|&(_, i)| (i, signs[pi]))
        };
        let deg = |k: usize| (n - 1) * st.t as i64 + (m - 1) * (k - st.s) as i64 - m * k as i64;

        let mut bases = BTreeMap::new();
        let mut relations = BTreeMap::new();
        let mut differentials = BTreeMap::new();
        for (&k, gens) in &by_k {
            bases.insert(deg(k), gens.clone());
            let mut rows: Vec<Vec<(usize, i64)>> = Vec::new();
            for g in gens {
                for color in 0..2 {
                    let edges = if color == 0 { &g.full } else { &g.dotted };
                    for p1 in 0..edges.len() {
                        for p2 in p1 + 1..edges.len() {
                            let (e1, e2) = (edges[p1], edges[p2]);
                            let common: Vec<u8> = [e1.0, e1.1].into_iter().filter(|v| *v == e2.0 || *v == e2.1).collect();
                            if common.len() != 1 {
                                continue;
                            }
                            let j = common[0];
                            let i = if e1.0 == j { e1.1 } else { e1.0 };
                            let kk = if e2.0 == j { e2.1 } else { e2.0 };
                            let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
                            for (x, y) in [((i, j), (j, kk)), ((j, kk), (kk, i)), ((kk, i), (i, j))] {
                                let mut h = g.clone();
                                let list = if color == 0 { &mut h.full } else { &mut h.dotted };
                                list[p1] = x;
                                list[p2] = y;
                                if let Some((idx, s)) = lookup(&h) {
                                    *acc.entry(idx).or_insert(0) += s as i64;
                                }
                            }
                            let row: Vec<(usize, i64)> = acc.into_iter().filter(|(_, c)| *c != 0).collect();
                            if !row.is_empty() {
                                rows.push(row);
                            }
                        }
                    }
                }
            }
            rows.sort();
            rows.dedup();
            let trip = rows.iter().enumerate().flat_map(|(r, row)| row.iter().map(move |&(c, v)| (r, c, q(v))));
            relations.insert(deg(k), SparseMatrix::from_triplets(rows.len(), gens.len(), trip.collect::<Vec<_>>()).expect("in range"));

            let Some(targets) = by_k.get(&(k - 1)) else { continue };
            let mut trip = Vec::new();
            for (col, g) in gens.iter().enumerate() {
                for (ei, &(a, b)) in g.dotted.iter().enumerate() {
                    if g.full.iter().any(|&(x, y)| (x, y) == (a, b) || (x, y) == (b, a)) {
                        continue;
                    }
                    let (nf, nd) = (g.full.len(), g.dotted.len());
                    let mut degrees = vec![n - 1; nf];
                    degrees.extend(std::iter::repeat(m - 1).take(nd));
                    degrees.extend(std::iter::repeat(m).take(k));
                    let (pos_e, pos_b) = (nf + ei, nf + nd + b as usize);
                    let mut perm = vec![pos_e, pos_b];
                    perm.extend((0..degrees.len()).filter(|&x| x != pos_e && x != pos_b));
                    let outer = koszul_sign(&perm, &degrees).expect("permutation");
                    let rl = |v: u8| {
                        let v = if v == b { a } else { v };
                        if v > b {
                            v - 1
                        } else {
                            v
                        }
                    };
                    let full: Vec<(u8, u8)> = g.full.iter().map(|&(x, y)| (rl(x), rl(y))).collect();
                    if !is_forest(k - 1, &full) {
                        continue;
                    }
                    let dotted = g
                        .dotted
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != ei)
                        .map(|(_, &(x, y))| (rl(x), rl(y)))
                        .collect();
                    if let Some((row, s)) = lookup(&BicolorGraph::new(k - 1, full, dotted)) {
                        trip.push((row, col, q((outer * s) as i64)));
                    }
                }
            }
            let mat = SparseMatrix::from_triplets(targets.len(), gens.len(), trip).expect("in range");
            differentials.insert(deg(k), mat);
        }
        HHSlice { m, n, s: st.s, t: st.t, connected: st.connected, bases, relations, differentials }
    }

    pub fn build(m: i64, n: i64, s: usize, t: usize, connected: bool) -> HHSlice {
        HHSlice::from_structure(&hh_structure(s, t, connected), m, n)
    }

    fn relation_rank(&self, d: i64) -> usize {
        self.relations.get(&d).map_or(0, rank)
    }

    /// Dimension of the quotient chain space in degree d.
    pub fn dim(&self, d: i64) -> usize {
        self.bases.get(&d).map_or(0, |b| b.len() - self.relation_rank(d))
    }

    pub fn dims(&self) -> BTreeMap<i64, usize> {
        self.bases.keys().map(|&d| (d, self.dim(d))).filter(|&(_, v)| v > 0).collect()
    }

    /// Relations stacked over the transposed differential: rows span
    /// relations plus images in degree d + 1.
    fn stacked(&self, d: i64) -> Option<SparseMatrix> {
        let mat = self.differentials.get(&d)?;
        let rel = &self.relations[&(d + 1)];
        let img = mat.transpose();
        let mut trip: Vec<_> = rel.entries().iter().cloned().collect();
        trip.extend(img.entries().iter().map(|(r, c, v)| (r + rel.rows(), *c, v.clone())));
        Some(SparseMatrix::from_triplets(rel.rows() + img.rows(), rel.cols(), trip).expect("in range"))
    }

    /// Rank of the induced differential out of degree d.
    pub fn induced_rank(&self, d: i64) -> usize {
        self.stacked(d).map_or(0, |m| rank(&m) - self.relation_rank(d + 1))
    }

    pub fn euler(&self) -> i64 {
        self.dims().iter().map(|(d, v)| if d.rem_euclid(2) == 0 { *v as i64 } else { -(*v as i64) }).sum()
    }

    pub fn homology(&self) -> BTreeMap<i64, usize> {
        let ranks: BTreeMap<i64, usize> = self.differentials.keys().map(|&d| (d, self.induced_rank(d))).collect();
        let mut out = BTreeMap::new();
        for (d, dim) in self.dims() {
            let h = dim - ranks.get(&d).copied().unwrap_or(0) - ranks.get(&(d - 1)).copied().unwrap_or(0);
            if h > 0 {
                out.insert(d, h);
            }
        }
        out
    }

    /// d d = 0 on generators, and d maps relations into relations.
    pub fn d_squared_is_zero(&self) -> bool {
        let squares = self.differentials.iter().all(|(&d, a)| match self.differentials.get(&(d + 1)) {
            Some(b) => b.mul(a).expect("shapes").is_zero(),
            None => true,
        });
        let relations_kept = self.differentials.iter().all(|(&d, dm)| {
            let rel = &self.relations[&d];
            let rel_t = &self.relations[&(d + 1)];
            let image = dm.mul(&rel.transpose()).expect("shapes").transpose();
            let mut trip: Vec<_> = rel_t.entries().iter().cloned().collect();
            trip.extend(image.entries().iter().map(|(r, c, v)| (r + rel_t.rows(), *c, v.clone())));
            let both = SparseMatrix::from_triplets(rel_t.rows() + image.rows(), rel_t.cols(), trip).expect("in range");
            rank(&both) == rank(rel_t)
        });
        squares && relations_kept
    }
}

pub fn enumerate_hh_basis(m: i64, n: i64, s: usize, t: usize) -> BTreeMap<i64, Vec<BicolorGraph>> {
    HHSlice::build(m, n, s, t, true).bases
}

/// The differential on generators; rows and columns index the bases.
pub fn differential_hh(slice: &HHSlice, d: i64) -> Option<SparseMatrix> {
    slice.differentials.get(&d).cloned()
}

pub fn homology_ranks_hh(m: i64, n: i64, s: usize, t: usize, connected: bool) -> BTreeMap<i64, usize> {
    HHSlice::build(m, n, s, t, connected).homology()
}

pub fn euler_hh(m: i64, n: i64, s: usize, t: usize, connected: bool) -> i64 {
    HHSlice::build(m, n, s, t, connected).euler()
}
