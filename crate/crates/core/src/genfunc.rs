//! The closed-form generating function `F_mn(x, u) = sum chi_st x^s u^t`
//! as a product over l of finite operator expansions, and the passage
//! between `chi` (all graphs) and `chi^pi` (connected graphs).

use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;
use thiserror::Error;

use crate::exactq::{q, q_frac, Rational};
use crate::symfunc::{divisors, mobius, necklace, Monomial, TruncatedSeries, Truncation};
use crate::tables::{EulerTable, TableKind};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenfuncError {
    #[error("constant term of F must be 1")]
    ConstantTerm,
    #[error("non-integral coefficient at (s,t) = ({0},{1})")]
    NonIntegral(usize, usize),
    #[error("input table covers s <= {have_s}, t <= {have_t}; need s <= {need_s}, t <= {need_t}")]
    Insufficient { have_s: usize, have_t: usize, need_s: usize, need_t: usize },
    #[error("entry at t = 0 has no connected meaning")]
    ZeroComplexity,
}

fn sign(e: i64) -> i64 {
    if e.is_odd() {
        -1
    } else {
        1
    }
}

/// Dense bivariate polynomial in x, u, truncated at (S, T).
#[derive(Clone)]
struct Dense {
    s: usize,
    t: usize,
    c: Vec<Rational>,
}

impl Dense {
    fn zero(s: usize, t: usize) -> Self {
        Dense { s, t, c: vec![Rational::zero(); (s + 1) * (t + 1)] }
    }

    fn one(s: usize, t: usize) -> Self {
        let mut d = Dense::zero(s, t);
        d.c[0] = q(1);
        d
    }

    fn at(&self, i: usize, j: usize) -> &Rational {
        &self.c[i * (self.t + 1) + j]
    }

    fn add_at(&mut self, i: usize, j: usize, v: &Rational) {
        if i <= self.s && j <= self.t {
            self.c[i * (self.t + 1) + j] += v;
        }
    }

    fn nonzero(&self) -> Vec<(usize, usize, &Rational)> {
        let mut out = Vec::new();
        for i in 0..=self.s {
            for j in 0..=self.t {
                let v = self.at(i, j);
                if !v.is_zero() {
                    out.push((i, j, v));
                }
            }
        }
        out
    }

    fn mul(&self, o: &Dense) -> Dense {
        let mut out = Dense::zero(self.s, self.t);
        let b = o.nonzero();
        for (i, j, v) in self.nonzero() {
            for &(k, l, w) in &b {
                if i + k <= self.s && j + l <= self.t {
                    out.c[(i + k) * (self.t + 1) + j + l] += v * w;
                }
            }
        }
        out
    }

    fn scale_add(&mut self, o: &Dense, c: &Rational) {
        for (a, b) in self.c.iter_mut().zip(&o.c) {
            if !b.is_zero() {
                *a += b * c;
            }
        }
    }

    fn is_one(&self) -> bool {
        self.c.iter().enumerate().all(|(k, v)| if k == 0 { *v == q(1) } else { v.is_zero() })
    }

    fn to_series(&self) -> TruncatedSeries {
        TruncatedSeries::from_terms(
            Truncation::new(Some(self.s as i32), Some(self.t as i32), None),
            self.nonzero().into_iter().map(|(i, j, v)| (Monomial::xuz(i as i32, j as i32, 0), v.clone())),
        )
    }

    fn from_series(f: &TruncatedSeries, s: usize, t: usize) -> Dense {
        let mut d = Dense::zero(s, t);
        for (m, c) in f.terms() {
            if m.a.is_empty() && m.x >= 0 && m.u >= 0 {
                d.add_at(m.x as usize, m.u as usize, c);
            }
        }
        d
    }
}

/// The l-th factor: `(1 + d/da)^beta e^(-a) (1 + gamma a)^alpha` at a = 0
/// with `beta = (-1)^m E_l(x)`, `alpha = (-1)^n E_l(1/u)`,
/// `gamma = (-1)^n l u^l`. Expanded as
/// `sum_j binom(beta, j) sum_i C(j, i) (-1)^(j-i) f(i)` where
/// `f(i) = prod_{r<i} (gamma alpha - r gamma)` is a polynomial in u.
fn factor_dense(l: usize, m: i64, n: i64, max_s: usize, max_t: usize) -> Dense {
    let mut beta = Dense::zero(max_s, max_t);
    for (e, c) in necklace(l as u64).expect("l >= 1").iter().enumerate() {
        beta.add_at(e, 0, &(c * q(sign(m))));
    }
    let mut ga = Dense::zero(max_s, max_t);
    for d in divisors(l as u64) {
        ga.add_at(0, l - l / d as usize, &q(mobius(d)));
    }
    let mut gamma = Dense::zero(max_s, max_t);
    gamma.add_at(0, l, &q(sign(n) * l as i64));

    let term = |j: usize, binb: &Dense, f: &[Dense]| -> Dense {
        let mut inner = Dense::zero(max_s, max_t);
        let mut c = num_bigint::BigInt::from(1);
        for i in 0..=j {
            // c = C(j, i)
            inner.scale_add(&f[i], &(Rational::from_integer(c.clone()) * q(sign((j - i) as i64))));
            c = c * (j - i) / (i + 1);
        }
        binb.mul(&inner)
    };

    let j_max = 2 * max_t / l + 2;
    let mut f = vec![Dense::one(max_s, max_t)];
    for i in 1..=j_max + 1 {
        let mut step = ga.clone();
        step.scale_add(&gamma, &q(-(i as i64 - 1)));
        let next = f[i - 1].mul(&step);
        f.push(next);
    }
    let mut out = Dense::one(max_s, max_t);
    let mut binb = Dense::one(max_s, max_t);
    let one = Dense::one(max_s, max_t);
    for j in 1..=j_max + 1 {
        let mut b = beta.clone();
        b.scale_add(&one, &q(-(j as i64 - 1)));
        binb = binb.mul(&b);
        binb.c.iter_mut().for_each(|v| *v /= Rational::from_integer(j.into()));
        let t = term(j, &binb, &f);
        if j == j_max + 1 {
            assert!(t.c.iter().all(Zero::is_zero), "factor {l} not yet stable at j = {j}");
        } else {
            out.scale_add(&t, &q(1));
        }
    }
    out
}

/// The l-th factor of `F_mn`, truncated at x-degree S and u-degree T.
pub fn factor(l: usize, m: i64, n: i64, max_s: usize, max_t: usize) -> TruncatedSeries {
    factor_dense(l, m, n, max_s, max_t).to_series()
}

fn f_dense(m: i64, n: i64, max_s: usize, max_t: usize) -> Dense {
    let ls: Vec<usize> = (1..=2 * max_t).collect();
    let factors: Vec<Dense> = ls.par_iter().map(|&l| factor_dense(l, m, n, max_s, max_t)).collect();
    assert!(factor_dense(2 * max_t + 1, m, n, max_s, max_t).is_one(), "factor beyond 2T is not trivial");
    factors.iter().fold(Dense::one(max_s, max_t), |acc, f| acc.mul(f))
}

/// `F_mn = prod_{l <= 2T} factor(l)`; larger l only contribute above u^T.
#[allow(non_snake_case)]
pub fn F(m: i64, n: i64, max_s: usize, max_t: usize) -> TruncatedSeries {
    f_dense(m, n, max_s, max_t).to_series()
}

/// log of a series with constant term 1, via `t L_t = t F_t - sum_{k<t} k L_k F_(t-k)`
/// on u-slices, followed by the same for the x-only part at u^0.
fn log_dense(f: &Dense) -> Dense {
    let (ms, mt) = (f.s, f.t);
    let slice = |d: &Dense, j: usize| -> Vec<Rational> { (0..=ms).map(|i| d.at(i, j).clone()).collect() };
    let pmul = |a: &[Rational], b: &[Rational]| -> Vec<Rational> {
        let mut out = vec![Rational::zero(); ms + 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (k, y) in b.iter().enumerate().take(ms + 1 - i) {
                out[i + k] += x * y;
            }
        }
        out
    };
    // Series in x with constant 1: log by the x-recursion.
    let f0 = slice(f, 0);
    let mut l0 = vec![Rational::zero(); ms + 1];
    for i in 1..=ms {
        let mut acc = f0[i].clone() * q(i as i64);
        for k in 1..i {
            acc -= &l0[k] * q(k as i64) * &f0[i - k];
        }
        l0[i] = acc / q(i as i64);
    }
    // Higher u-slices relative to F_0: t L_t = (t F_t - sum_{0<k<t} k L_k F_{t-k}) / F_0.
    let inv0 = {
        let mut inv = vec![Rational::zero(); ms + 1];
        inv[0] = q(1);
        for i in 1..=ms {
            let mut acc = Rational::zero();
            for k in 1..=i {
                acc -= &f0[k] * &inv[i - k];
            }
            inv[i] = acc;
        }
        inv
    };
    let mut ls: Vec<Vec<Rational>> = vec![l0];
    for t in 1..=mt {
        let mut acc: Vec<Rational> = slice(f, t).into_iter().map(|v| v * q(t as i64)).collect();
        for k in 1..t {
            let p = pmul(&ls[k], &slice(f, t - k));
            for (a, b) in acc.iter_mut().zip(p) {
                *a -= b * q(k as i64);
            }
        }
        let lt = pmul(&acc, &inv0).into_iter().map(|v| v / q(t as i64)).collect();
        ls.push(lt);
    }
    let mut out = Dense::zero(ms, mt);
    for (j, l) in ls.iter().enumerate() {
        for (i, v) in l.iter().enumerate() {
            out.add_at(i, j, v);
        }
    }
    out
}

/// exp of a series with zero constant term, the inverse of [`log_dense`].
fn exp_dense(l: &Dense) -> Dense {
    let mut out = Dense::one(l.s, l.t);
    let mut power = Dense::one(l.s, l.t);
    for k in 1..=(l.s + l.t) {
        power = power.mul(l);
        if power.c.iter().all(Zero::is_zero) {
            break;
        }
        let mut fact = num_bigint::BigInt::from(1);
        for i in 1..=k {
            fact *= i;
        }
        out.scale_add(&power, &Rational::new(1.into(), fact));
    }
    out
}

fn to_i64(v: &Rational, s: usize, t: usize) -> Result<i64, GenfuncError> {
    if !v.is_integer() {
        return Err(GenfuncError::NonIntegral(s, t));
    }
    i64::try_from(v.to_integer()).map_err(|_| GenfuncError::NonIntegral(s, t))
}

/// `chi^pi_st = sum_{r | gcd(s,t)} mu(r)/r c_(s/r, t/r)` with `c = log F`.
pub fn chi_pi_from_f(f: &TruncatedSeries, max_s: usize, max_t: usize) -> Result<EulerTable, GenfuncError> {
    let d = Dense::from_series(f, max_s, max_t);
    if *d.at(0, 0) != q(1) {
        return Err(GenfuncError::ConstantTerm);
    }
    let c = log_dense(&d);
    let mut table = EulerTable::new(TableKind::Homotopy, "genfunc", max_s, max_t);
    for t in 1..=max_t {
        for s in 0..=max_s {
            let g = s.gcd(&t) as u64;
            let mut v = Rational::zero();
            for r in divisors(g) {
                let r = r as usize;
                v += c.at(s / r, t / r) * q_frac(mobius(r as u64), r as i64);
            }
            table.set(s, t, to_i64(&v, s, t)?);
        }
    }
    Ok(table)
}

/// `F = prod_{s,t} (1 - x^s u^t)^(-chi^pi_st)`, read off for `s <= S`, `t <= T`.
pub fn euler_h_from_pi(chi_pi: &EulerTable, max_s: usize, max_t: usize) -> Result<EulerTable, GenfuncError> {
    if chi_pi.max_s < max_s || chi_pi.max_t < max_t {
        return Err(GenfuncError::Insufficient { have_s: chi_pi.max_s, have_t: chi_pi.max_t, need_s: max_s, need_t: max_t });
    }
    if chi_pi.entries.keys().any(|&(_, t)| t == 0) {
        return Err(GenfuncError::ZeroComplexity);
    }
    let mut log = Dense::zero(max_s, max_t);
    for (&(s, t), &v) in &chi_pi.entries {
        for k in 1.. {
            if s * k > max_s || t * k > max_t {
                break;
            }
            log.add_at(s * k, t * k, &q_frac(v, k as i64));
        }
    }
    let f = exp_dense(&log);
    let mut table = EulerTable::new(TableKind::Homology, &chi_pi.method, max_s, max_t);
    for t in 1..=max_t {
        for s in 0..=max_s {
            table.set(s, t, to_i64(f.at(s, t), s, t)?);
        }
    }
    Ok(table)
}

/// The `chi` table: coefficients of F for `t >= 1`.
pub fn chi_from_f(f: &TruncatedSeries, max_s: usize, max_t: usize) -> Result<EulerTable, GenfuncError> {
    let d = Dense::from_series(f, max_s, max_t);
    let mut table = EulerTable::new(TableKind::Homology, "genfunc", max_s, max_t);
    for t in 1..=max_t {
        for s in 0..=max_s {
            table.set(s, t, to_i64(d.at(s, t), s, t)?);
        }
    }
    Ok(table)
}

/// Both tables for one parity class: `(chi^pi, chi)`.
pub fn tables(m: i64, n: i64, max_s: usize, max_t: usize) -> Result<(EulerTable, EulerTable), GenfuncError> {
    let f = F(m, n, max_s, max_t);
    Ok((chi_pi_from_f(&f, max_s, max_t)?, chi_from_f(&f, max_s, max_t)?))
}

pub use crate::tables::Format;

/// Deterministic rendering; see [`EulerTable::render`].
pub fn emit_table(table: &EulerTable, format: Format) -> String {
    table.render(format)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(f: &TruncatedSeries, t: i32, max_s: i32) -> Vec<i64> {
        (0..=max_s).map(|s| i64::try_from(f.coeff_xu(s, t).to_integer()).unwrap()).collect()
    }

    #[test]
    fn head_of_f() {
        let f = F(1, 1, 6, 3);
        assert_eq!(poly(&f, 1, 6), vec![0, 0, 1, 0, 0, 0, 0]);
        assert_eq!(poly(&f, 2, 6), vec![0, -1, 1, 0, 1, 0, 0]);
        assert_eq!(poly(&f, 3, 6), vec![0, -1, 1, -1, 1, 0, 1]);
        let ee = F(2, 2, 4, 3);
        assert_eq!(poly(&ee, 1, 4), vec![0, 1, -1, 0, 0]);
        assert_eq!(poly(&ee, 3, 4), vec![0, -1, 0, 2, -1]);
    }

    #[test]
    fn factors_start_at_one() {
        for l in 1..6 {
            assert_eq!(factor(l, 3, 8, 4, 4).coeff(&Monomial::default()), q(1));
        }
    }

    #[test]
    fn single_factor_inverts() {
        let mut pi = EulerTable::new(TableKind::Homotopy, "t", 4, 2);
        pi.set(2, 1, 1);
        let h = euler_h_from_pi(&pi, 4, 2).unwrap();
        assert_eq!((h.get(2, 1), h.get(4, 2)), (1, 1));
        assert_eq!(h.entries.len(), 2);
    }

    #[test]
    fn insufficient_input() {
        let pi = EulerTable::new(TableKind::Homotopy, "t", 2, 2);
        assert!(euler_h_from_pi(&pi, 3, 2).is_err());
    }
}
