//! Truncated series in x (Hodge degree), u (complexity), z (homological
//! degree, Laurent) and power-sum variables a_1, a_2, ..., plus the cycle
//! index sums of configuration-space homology and the hom-dimension pairing.

use std::collections::{BTreeMap, HashMap};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exactq::{q, q_frac, Rational};
use crate::tables::{EulerTable, TableKind};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeriesError {
    #[error("necklace polynomials start at 1")]
    ZeroIndex,
}

/// Exponents of one term. `a[l - 1]` is the exponent of `a_l`; trailing
/// zeros are trimmed so equal monomials compare equal.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub x: i32,
    pub u: i32,
    pub z: i32,
    pub a: Vec<u32>,
}

impl Monomial {
    pub fn xuz(x: i32, u: i32, z: i32) -> Self {
        Monomial { x, u, z, a: Vec::new() }
    }

    /// `sum l * j_l`, the number of points.
    pub fn weight(&self) -> u32 {
        self.a.iter().enumerate().map(|(i, j)| (i as u32 + 1) * j).sum()
    }

    fn mul(&self, o: &Monomial) -> Monomial {
        let n = self.a.len().max(o.a.len());
        let a = (0..n).map(|i| self.a.get(i).unwrap_or(&0) + o.a.get(i).unwrap_or(&0)).collect();
        Monomial { x: self.x + o.x, u: self.u + o.u, z: self.z + o.z, a }
    }

    fn trim(mut self) -> Self {
        while self.a.last() == Some(&0) {
            self.a.pop();
        }
        self
    }

    /// The `a`-part alone.
    pub fn cycle_type(&self) -> Monomial {
        Monomial { a: self.a.clone(), ..Default::default() }
    }

    /// `prod_l l^j_l j_l!`, the centralizer order of the cycle type.
    pub fn centralizer(&self) -> Rational {
        let mut out = num_bigint::BigInt::one();
        for (i, &j) in self.a.iter().enumerate() {
            for k in 1..=j {
                out *= (i as u64 + 1) * k as u64;
            }
        }
        Rational::from_integer(out)
    }
}

/// Truncation orders; `None` means unbounded.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Truncation {
    pub max_x: Option<i32>,
    pub max_u: Option<i32>,
    /// Cap on the `a`-weight.
    pub max_k: Option<u32>,
}

impl Truncation {
    pub fn new(max_x: Option<i32>, max_u: Option<i32>, max_k: Option<u32>) -> Self {
        Truncation { max_x, max_u, max_k }
    }

    fn keeps(&self, m: &Monomial) -> bool {
        self.max_x.map_or(true, |b| m.x <= b)
            && self.max_u.map_or(true, |b| m.u <= b)
            && self.max_k.map_or(true, |b| m.weight() <= b)
    }

    fn meet(&self, o: &Truncation) -> Truncation {
        fn min<T: Ord>(a: Option<T>, b: Option<T>) -> Option<T> {
            match (a, b) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, None) => a,
                (None, b) => b,
            }
        }
        Truncation { max_x: min(self.max_x, o.max_x), max_u: min(self.max_u, o.max_u), max_k: min(self.max_k, o.max_k) }
    }
}

/// A multivariate polynomial with rational coefficients, truncated after
/// every operation. Only nonzero coefficients are stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    pub trunc: Truncation,
    terms: BTreeMap<Monomial, Rational>,
}

/// A cycle index sum: a series whose `a`-part records cycle types.
pub type CycleIndex = TruncatedSeries;

impl TruncatedSeries {
    pub fn zero(trunc: Truncation) -> Self {
        TruncatedSeries { trunc, terms: BTreeMap::new() }
    }

    pub fn one(trunc: Truncation) -> Self {
        TruncatedSeries::term(trunc, Monomial::default(), q(1))
    }

    pub fn term(trunc: Truncation, m: Monomial, c: Rational) -> Self {
        let mut out = TruncatedSeries::zero(trunc);
        out.add_term(m, c);
        out
    }

    pub fn from_terms(trunc: Truncation, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut out = TruncatedSeries::zero(trunc);
        for (m, c) in terms {
            out.add_term(m, c);
        }
        out
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        let m = m.trim();
        if c.is_zero() || !self.trunc.keeps(&m) {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Coefficient of `x^s u^t`, summed over z, for a series without `a`.
    pub fn coeff_xu(&self, s: i32, t: i32) -> Rational {
        self.terms.iter().filter(|(m, _)| m.x == s && m.u == t && m.a.is_empty()).map(|(_, c)| c.clone()).sum()
    }

    pub fn add(&self, o: &TruncatedSeries) -> TruncatedSeries {
        let mut out = TruncatedSeries { trunc: self.trunc.meet(&o.trunc), terms: BTreeMap::new() };
        for (m, c) in self.terms.iter().chain(o.terms.iter()) {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> TruncatedSeries {
        TruncatedSeries::from_terms(self.trunc, self.terms.iter().map(|(m, v)| (m.clone(), v * c)))
    }

    pub fn sub(&self, o: &TruncatedSeries) -> TruncatedSeries {
        self.add(&o.scale(&q(-1)))
    }

    pub fn mul(&self, o: &TruncatedSeries) -> TruncatedSeries {
        let trunc = self.trunc.meet(&o.trunc);
        let mut acc: HashMap<Monomial, Rational> = HashMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let m = m1.mul(m2);
                if !trunc.keeps(&m) {
                    continue;
                }
                *acc.entry(m).or_insert_with(Rational::zero) += c1 * c2;
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        TruncatedSeries { trunc, terms }
    }

    /// Substitutes a rational value for z.
    pub fn specialize_z(&self, value: &Rational) -> TruncatedSeries {
        TruncatedSeries::from_terms(
            self.trunc,
            self.terms.iter().map(|(m, c)| (Monomial { z: 0, ..m.clone() }, c * pow(value, m.z))),
        )
    }

    /// Replaces z by 1/z.
    pub fn invert_z(&self) -> TruncatedSeries {
        TruncatedSeries::from_terms(self.trunc, self.terms.iter().map(|(m, c)| (Monomial { z: -m.z, ..m.clone() }, c.clone())))
    }

    /// Splits by cycle type: `a`-monomial -> coefficient series in x, u, z.
    pub fn by_cycle_type(&self) -> BTreeMap<Vec<u32>, TruncatedSeries> {
        let mut out: BTreeMap<Vec<u32>, TruncatedSeries> = BTreeMap::new();
        let trunc = Truncation { max_k: None, ..self.trunc };
        for (m, c) in &self.terms {
            out.entry(m.a.clone())
                .or_insert_with(|| TruncatedSeries::zero(trunc))
                .add_term(Monomial::xuz(m.x, m.u, m.z), c.clone());
        }
        out
    }
}

fn pow(v: &Rational, e: i32) -> Rational {
    if e >= 0 {
        num_traits::pow(v.clone(), e as usize)
    } else {
        num_traits::pow(v.recip(), (-e) as usize)
    }
}

pub fn mobius(n: u64) -> i64 {
    let mut n = n;
    let mut r = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            r = -r;
        }
        p += 1;
    }
    if n > 1 {
        r = -r;
    }
    r
}

pub fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n % d == 0).collect()
}

/// `E_l(y) = (1/l) sum_{d | l} mu(d) y^(l/d)`, as coefficients by exponent.
pub fn necklace(l: u64) -> Result<Vec<Rational>, SeriesError> {
    if l == 0 {
        return Err(SeriesError::ZeroIndex);
    }
    let mut out = vec![q(0); l as usize + 1];
    for d in divisors(l) {
        out[(l / d) as usize] += q_frac(mobius(d), l as i64);
    }
    Ok(out)
}

/// `(1/j!) prod_{r<j} (P - r Q)`, which equals `binom(g, j) w^j` when
/// `P = g w` and `Q = w`.
fn scaled_binomial(p: &TruncatedSeries, w: &TruncatedSeries, j: u32) -> TruncatedSeries {
    let mut out = TruncatedSeries::one(p.trunc);
    for r in 0..j {
        out = out.mul(&p.sub(&w.scale(&q(r as i64))));
    }
    let mut fact = num_bigint::BigInt::one();
    for k in 1..=j as u64 {
        fact *= k;
    }
    out.scale(&Rational::new(num_bigint::BigInt::one(), fact))
}

fn sign(e: i64) -> i64 {
    if e.is_odd() {
        -1
    } else {
        1
    }
}

fn a_power(l: u32, j: u32) -> Vec<u32> {
    let mut a = vec![0; l as usize];
    a[l as usize - 1] = j;
    a
}

/// Monomial `((-z)^(n-1) u)^e` with its sign.
fn conf_y(n: i64, e: i32) -> (Monomial, Rational) {
    (Monomial::xuz(0, e, (n as i32 - 1) * e), q(sign((n - 1) * e as i64)))
}

fn conf_factor(n: i64, l: u32, trunc: Truncation) -> TruncatedSeries {
    let k_max = trunc.max_k.unwrap_or(u32::MAX);
    // g y^l with g = (-1)^n E_l(1/y): sum_{d|l} (-1)^n mu(d)/l y^(l - l/d).
    let mut gw = TruncatedSeries::zero(Truncation { max_k: None, ..trunc });
    for d in divisors(l as u64) {
        let (m, c) = conf_y(n, (l as u64 - l as u64 / d) as i32);
        gw.add_term(m, c * q_frac(sign(n) * mobius(d), l as i64));
    }
    let (wm, wc) = conf_y(n, l as i32);
    let w = TruncatedSeries::term(gw.trunc, wm, wc);
    let mut out = TruncatedSeries::one(trunc);
    let mut j = 1;
    while l * j <= k_max {
        let coeff = scaled_binomial(&gw, &w, j).scale(&q(sign(n * j as i64)));
        for (m, c) in coeff.terms() {
            out.add_term(Monomial { a: a_power(l, j), ..m.clone() }, c.clone());
        }
        j += 1;
    }
    out
}

fn exp_factor(l: u32, trunc: Truncation) -> TruncatedSeries {
    let k_max = trunc.max_k.unwrap_or(u32::MAX);
    let mut out = TruncatedSeries::zero(trunc);
    let mut c = q(1);
    let mut j = 0;
    while l * j <= k_max {
        out.add_term(Monomial { a: a_power(l.max(1), j), ..Default::default() }.trim(), c.clone());
        j += 1;
        c = c * q_frac(-1, (l * j) as i64);
    }
    out
}

/// Graded cycle index sum of `H_*(C(k, R^n))` over all k, with u tracking
/// complexity: `prod_l (1 + (-1)^n ((-z)^(n-1) u)^l a_l)^((-1)^n E_l(1/((-z)^(n-1) u)))`.
pub fn cycle_index_conf(n: i64, k_max: u32, max_u: i32) -> CycleIndex {
    let trunc = Truncation::new(None, Some(max_u), Some(k_max));
    (1..=k_max).map(|l| conf_factor(n, l, trunc)).fold(TruncatedSeries::one(trunc), |acc, f| acc.mul(&f))
}

/// As [`cycle_index_conf`] with the extra factors `e^(-a_l / l)`: the
/// normalized homology (the cross-effect killing points of degree 0).
pub fn cycle_index_conf_normalized(n: i64, k_max: u32, max_u: i32) -> CycleIndex {
    let trunc = Truncation::new(None, Some(max_u), Some(k_max));
    (1..=k_max)
        .map(|l| conf_factor(n, l, trunc).mul(&exp_factor(l, trunc)))
        .fold(TruncatedSeries::one(trunc), |acc, f| acc.mul(&f))
}

/// Graded cycle index sum of the locally-compact homology of `C(k, R^m)`:
/// `prod_l (1 + (-z)^l a_l)^((-1)^m E_l((-z)^(m-1) x))`.
pub fn cycle_index_locally_compact(m: i64, k_max: u32, max_x: i32) -> CycleIndex {
    let trunc = Truncation::new(Some(max_x), None, Some(k_max));
    let inner = Truncation { max_k: None, ..trunc };
    let mut total = TruncatedSeries::one(trunc);
    for l in 1..=k_max {
        let neck = necklace(l as u64).expect("l >= 1");
        let mut beta = TruncatedSeries::zero(inner);
        for (e, c) in neck.iter().enumerate() {
            let e = e as i32;
            let s = sign(m) * sign((m - 1) * e as i64);
            beta.add_term(Monomial::xuz(e, 0, (m as i32 - 1) * e), c * q(s));
        }
        let one = TruncatedSeries::one(inner);
        let mut factor = TruncatedSeries::one(trunc);
        let mut binom = TruncatedSeries::one(inner);
        let mut j = 1;
        while l * j <= k_max {
            binom = binom.mul(&beta.sub(&one.scale(&q(j as i64 - 1)))).scale(&q_frac(1, j as i64));
            let zl = q(sign((l * j) as i64));
            for (mo, c) in binom.terms() {
                let mo = Monomial { z: mo.z + (l * j) as i32, a: a_power(l, j), ..mo.clone() };
                factor.add_term(mo, c * &zl);
            }
            j += 1;
        }
        total = total.mul(&factor);
    }
    total
}

/// `sum_lambda coeff_V(lambda) coeff_W(lambda) z_lambda`: the closed form of
/// applying `Z_V(a_l <- d/da_l)` to `Z_W(a_l <- l a_l)` at `a = 0`.
pub fn pair(zv: &CycleIndex, zw: &CycleIndex) -> TruncatedSeries {
    let trunc = Truncation { max_k: None, ..zv.trunc.meet(&zw.trunc) };
    let w = zw.by_cycle_type();
    let mut out = TruncatedSeries::zero(trunc);
    for (ct, cv) in zv.by_cycle_type() {
        let Some(cw) = w.get(&ct) else { continue };
        let z = Monomial { a: ct.clone(), ..Default::default() }.centralizer();
        out = out.add(&cv.mul(cw).scale(&z));
    }
    out
}

/// Graded pairing: the first argument is read with z replaced by 1/z.
pub fn pair_graded(zv: &CycleIndex, zw: &CycleIndex) -> TruncatedSeries {
    pair(&zv.invert_z(), zw)
}

/// `chi_st` for `1 <= s <= S`, `1 <= t <= T` by pairing the locally compact
/// cycle index of `R^m` with the normalized one of `R^n` at z = -1.
pub fn euler_table_via_pairing(m: i64, n: i64, max_s: usize, max_t: usize) -> EulerTable {
    let k_max = 2 * max_t as u32;
    let minus = q(-1);
    let zv = cycle_index_locally_compact(m, k_max, max_s as i32).specialize_z(&minus);
    let zw = cycle_index_conf_normalized(n, k_max, max_t as i32).specialize_z(&minus);
    let f = pair(&zv, &zw);
    let mut table = EulerTable::new(TableKind::Homology, "pairing", max_s, max_t);
    for s in 1..=max_s {
        for t in 1..=max_t {
            let c = f.coeff_xu(s as i32, t as i32);
            assert!(c.is_integer(), "non-integral Euler characteristic at ({s},{t})");
            table.set(s, t, i64::try_from(c.to_integer()).expect("fits in i64"));
        }
    }
    table
}

/// Total rank of a series, summing absolute values of coefficients.
pub fn abs_sum(s: &TruncatedSeries) -> Rational {
    s.terms().map(|(_, c)| c.abs()).sum()
}
