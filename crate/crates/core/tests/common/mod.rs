//! Linear algebra over a large prime field, independent of the library's
//! exact rational code.

#![allow(dead_code)]

use std::collections::BTreeMap;

pub const P: u64 = (1 << 61) - 1;

pub fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

pub fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

pub fn from_i64(v: i64) -> u64 {
    v.rem_euclid(P as i64) as u64
}

/// Symmetric lift back to a small integer.
pub fn to_i64(v: u64) -> i64 {
    if v > P / 2 {
        v as i64 - P as i64
    } else {
        v as i64
    }
}

pub type Row = BTreeMap<usize, u64>;

/// Row echelon form kept fully reduced, so `reduce` gives a canonical
/// remainder modulo the row span.
#[derive(Default)]
pub struct Echelon {
    rows: BTreeMap<usize, Row>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.rows.contains_key(&col)
    }

    pub fn reduce(&self, mut row: Row) -> Row {
        let pivots: Vec<usize> = row.keys().copied().filter(|c| self.rows.contains_key(c)).collect();
        for c in pivots {
            let Some(&f) = row.get(&c) else { continue };
            for (&k, &v) in &self.rows[&c] {
                let e = row.entry(k).or_insert(0);
                *e = (*e + P - mulmod(f, v)) % P;
                if *e == 0 {
                    row.remove(&k);
                }
            }
        }
        row
    }

    /// Adds a row; returns whether the rank grew.
    pub fn insert(&mut self, row: Row) -> bool {
        let row = self.reduce(row);
        let Some((&lead, &lv)) = row.iter().next() else { return false };
        let inv = powmod(lv, P - 2);
        let row: Row = row.into_iter().map(|(k, v)| (k, mulmod(v, inv))).collect();
        for other in self.rows.values_mut() {
            if let Some(&f) = other.get(&lead) {
                for (&k, &v) in &row {
                    let e = other.entry(k).or_insert(0);
                    *e = (*e + P - mulmod(f, v)) % P;
                    if *e == 0 {
                        other.remove(&k);
                    }
                }
            }
        }
        self.rows.insert(lead, row);
        true
    }
}

pub fn dense_rank(rows: &[Vec<i64>]) -> usize {
    let mut e = Echelon::default();
    for r in rows {
        e.insert(r.iter().enumerate().filter(|(_, v)| **v != 0).map(|(i, v)| (i, from_i64(*v))).collect());
    }
    e.rank()
}

pub fn factorial(k: usize) -> usize {
    (1..=k).product()
}

pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

pub fn perm_sign(p: &[usize]) -> i64 {
    let mut sign = 1;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// The cohomology algebra of k points in R^n as a quotient of the
/// algebra on generators `a_ij` (i < j) with `a_ij^2 = 0` by all Arnold
/// relations. Monomials are sets of pairs; for even n the generators
/// anticommute, and `a_ji = (-1)^n a_ij`.
pub struct ConfQuotient {
    pub k: usize,
    pub n: i64,
    pub r: usize,
    pub pairs: Vec<(usize, usize)>,
    pub monomials: Vec<Vec<usize>>,
    index: BTreeMap<Vec<usize>, usize>,
    pub relations: Echelon,
}

fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, r: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in from..n {
            cur.push(i);
            rec(n, r, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, r, 0, &mut Vec::new(), &mut out);
    out
}

impl ConfQuotient {
    pub fn new(k: usize, n: i64, r: usize) -> Self {
        let pairs: Vec<(usize, usize)> = (0..k).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
        let monomials = subsets(pairs.len(), r);
        let index = monomials.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let mut q = ConfQuotient { k, n, r, pairs, monomials, index, relations: Echelon::default() };
        if r >= 2 {
            let mut rows = Vec::new();
            for tri in subsets(k, 3) {
                let (i, j, l) = (tri[0], tri[1], tri[2]);
                let terms = [[(i, j), (j, l)], [(j, l), (l, i)], [(l, i), (i, j)]];
                for rest in subsets(q.pairs.len(), r - 2) {
                    let mut row = Row::new();
                    for t in &terms {
                        let mut word: Vec<(usize, usize)> = t.to_vec();
                        word.extend(rest.iter().map(|&p| q.pairs[p]));
                        if let Some((col, sign)) = q.normal_form(&word) {
                            let e = row.entry(col).or_insert(0);
                            *e = (*e + from_i64(sign)) % P;
                        }
                    }
                    row.retain(|_, v| *v != 0);
                    rows.push(row);
                }
            }
            for row in rows {
                q.relations.insert(row);
            }
        }
        q
    }

    /// Writes a word of generators as ± one basis monomial, or `None` if
    /// a generator repeats.
    pub fn normal_form(&self, word: &[(usize, usize)]) -> Option<(usize, i64)> {
        let odd_gens = self.n % 2 == 0;
        let mut sign = 1;
        let mut ids = Vec::with_capacity(word.len());
        for &(a, b) in word {
            if a > b && self.n % 2 == 1 {
                sign = -sign;
            }
            ids.push(self.pairs.iter().position(|&p| p == (a.min(b), a.max(b))).expect("distinct endpoints"));
        }
        for i in 0..ids.len() {
            for j in i + 1..ids.len() {
                if ids[i] == ids[j] {
                    return None;
                }
                if ids[i] > ids[j] && odd_gens {
                    sign = -sign;
                }
            }
        }
        ids.sort();
        Some((self.index[&ids], sign))
    }

    pub fn dim(&self) -> usize {
        self.monomials.len() - self.relations.rank()
    }

    /// Dimension of the part spanned by monomials whose graph has exactly
    /// `c` components. Relations never mix component partitions.
    pub fn dim_with_components(&self, c: usize) -> usize {
        (0..self.monomials.len()).filter(|&i| !self.relations.is_pivot(i) && self.components(i) == c).count()
    }

    pub fn components(&self, i: usize) -> usize {
        let mut parent: Vec<usize> = (0..self.k).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        let mut c = self.k;
        for &e in &self.monomials[i] {
            let (a, b) = self.pairs[e];
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
                c -= 1;
            }
        }
        c
    }

    /// Remainder of a signed word modulo the relations.
    pub fn reduce_word(&self, terms: &[(Vec<(usize, usize)>, i64)]) -> Row {
        let mut row = Row::new();
        for (w, c) in terms {
            if let Some((col, s)) = self.normal_form(w) {
                let e = row.entry(col).or_insert(0);
                *e = (*e + from_i64(s * c)) % P;
            }
        }
        row.retain(|_, v| *v != 0);
        self.relations.reduce(row)
    }

    /// Trace of a permutation of the points on the quotient.
    pub fn trace(&self, sigma: &[usize]) -> i64 {
        let mut tr = 0u64;
        for (j, mono) in self.monomials.iter().enumerate() {
            if self.relations.is_pivot(j) {
                continue;
            }
            let word: Vec<(usize, usize)> = mono.iter().map(|&p| (sigma[self.pairs[p].0], sigma[self.pairs[p].1])).collect();
            let red = self.reduce_word(&[(word, 1)]);
            tr = (tr + red.get(&j).copied().unwrap_or(0)) % P;
        }
        to_i64(tr)
    }
}
