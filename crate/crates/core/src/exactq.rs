//! Exact rational arithmetic, sparse matrices and rank over Q.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Rationals are always reduced with a positive denominator.
pub type Rational = num_rational::BigRational;

pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("entry ({row}, {col}) out of range for a {rows}x{cols} matrix")]
    OutOfRange { row: usize, col: usize, rows: usize, cols: usize },
    #[error("duplicate entry at ({0}, {1})")]
    Duplicate(usize, usize),
    #[error("explicit zero at ({0}, {1})")]
    ExplicitZero(usize, usize),
    #[error("bad header: {0}")]
    Header(String),
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("expected {expected} entries, found {found}")]
    Count { expected: usize, found: usize },
    #[error("dimension mismatch: {0}x{1} times {2}x{3}")]
    Shape(usize, usize, usize, usize),
}

/// Sparse matrix in row-major triplet form, sorted by (row, col).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, Rational)>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, entries: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        let entries = (0..n).map(|i| (i, i, Rational::one())).collect();
        SparseMatrix { rows: n, cols: n, entries }
    }

    /// Strict constructor: rejects duplicates, zeros and out-of-range indices.
    pub fn from_entries(
        rows: usize,
        cols: usize,
        mut entries: Vec<(usize, usize, Rational)>,
    ) -> Result<Self, MatrixError> {
        for (r, c, v) in &entries {
            if *r >= rows || *c >= cols {
                return Err(MatrixError::OutOfRange { row: *r, col: *c, rows, cols });
            }
            if v.is_zero() {
                return Err(MatrixError::ExplicitZero(*r, *c));
            }
        }
        entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        for w in entries.windows(2) {
            if (w[0].0, w[0].1) == (w[1].0, w[1].1) {
                return Err(MatrixError::Duplicate(w[0].0, w[0].1));
            }
        }
        Ok(SparseMatrix { rows, cols, entries })
    }

    /// Accumulating constructor: sums repeated positions and drops zeros.
    pub fn from_triplets<I>(rows: usize, cols: usize, it: I) -> Result<Self, MatrixError>
    where
        I: IntoIterator<Item = (usize, usize, Rational)>,
    {
        let mut acc: HashMap<(usize, usize), Rational> = HashMap::new();
        for (r, c, v) in it {
            if r >= rows || c >= cols {
                return Err(MatrixError::OutOfRange { row: r, col: c, rows, cols });
            }
            *acc.entry((r, c)).or_insert_with(Rational::zero) += v;
        }
        let entries = acc.into_iter().filter(|(_, v)| !v.is_zero()).map(|((r, c), v)| (r, c, v)).collect();
        Self::from_entries(rows, cols, entries)
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut entries = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), ncols, "ragged dense matrix");
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    entries.push((i, j, q(v)));
                }
            }
        }
        SparseMatrix { rows: nrows, cols: ncols, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, usize, Rational)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, row: usize, col: usize) -> Rational {
        match self.entries.binary_search_by(|e| (e.0, e.1).cmp(&(row, col))) {
            Ok(i) => self.entries[i].2.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut entries: Vec<_> = self.entries.iter().map(|(r, c, v)| (*c, *r, v.clone())).collect();
        entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        SparseMatrix { rows: self.cols, cols: self.rows, entries }
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        let mut out = vec![vec![Rational::zero(); self.cols]; self.rows];
        for (r, c, v) in &self.entries {
            out[*r][*c] = v.clone();
        }
        out
    }

    pub fn mul(&self, other: &SparseMatrix) -> Result<SparseMatrix, MatrixError> {
        if self.cols != other.rows {
            return Err(MatrixError::Shape(self.rows, self.cols, other.rows, other.cols));
        }
        let mut by_row: Vec<Vec<(usize, &Rational)>> = vec![Vec::new(); other.rows];
        for (r, c, v) in &other.entries {
            by_row[*r].push((*c, v));
        }
        let mut acc: HashMap<(usize, usize), Rational> = HashMap::new();
        for (r, k, a) in &self.entries {
            for (c, b) in &by_row[*k] {
                *acc.entry((*r, *c)).or_insert_with(Rational::zero) += a * *b;
            }
        }
        let entries = acc.into_iter().filter(|(_, v)| !v.is_zero()).map(|((r, c), v)| (r, c, v)).collect();
        Self::from_entries(self.rows, other.cols, entries)
    }

    /// Rows as integer vectors, each scaled by the lcm of its denominators.
    fn integer_rows(&self) -> Vec<Vec<(usize, BigInt)>> {
        let mut rows: Vec<Vec<(usize, &Rational)>> = vec![Vec::new(); self.rows];
        for (r, c, v) in &self.entries {
            rows[*r].push((*c, v));
        }
        rows.into_iter()
            .filter(|r| !r.is_empty())
            .map(|r| {
                let l = r.iter().fold(BigInt::one(), |l, (_, v)| l.lcm(v.denom()));
                r.into_iter().map(|(c, v)| (c, v.numer() * (&l / v.denom()))).collect()
            })
            .collect()
    }

    /// Triplet text: `rows cols nnz` then `row col num/den` per entry.
    pub fn to_triplet_string(&self) -> String {
        let mut s = format!("{} {} {}\n", self.rows, self.cols, self.entries.len());
        for (r, c, v) in &self.entries {
            let _ = writeln!(s, "{} {} {}/{}", r, c, v.numer(), v.denom());
        }
        s
    }

    pub fn parse_triplets(text: &str) -> Result<Self, MatrixError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| MatrixError::Header("empty input".into()))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 3 {
            return Err(MatrixError::Header(header.to_string()));
        }
        let parse_usize = |s: &str| s.parse::<usize>().map_err(|_| MatrixError::Header(header.to_string()));
        let (rows, cols, nnz) = (parse_usize(h[0])?, parse_usize(h[1])?, parse_usize(h[2])?);
        let mut entries = Vec::new();
        for (ln, line) in lines {
            let bad = |msg: &str| MatrixError::Line { line: ln + 1, msg: msg.to_string() };
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(bad("expected `row col num/den`"));
            }
            let r = f[0].parse::<usize>().map_err(|_| bad("bad row index"))?;
            let c = f[1].parse::<usize>().map_err(|_| bad("bad column index"))?;
            let v = Rational::from_str(f[2]).map_err(|_| bad("bad rational"))?;
            entries.push((r, c, v));
            if entries.len() > nnz {
                break;
            }
        }
        if entries.len() != nnz {
            return Err(MatrixError::Count { expected: nnz, found: entries.len() });
        }
        Self::from_entries(rows, cols, entries)
    }
}

trait EchelonInt: Clone + PartialEq {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn neg(&self) -> Self;
    /// `a*x - b*y`, or `None` on overflow.
    fn mul_sub(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self>;
    fn gcd(&self, other: &Self) -> Self;
    fn div_exact(&self, d: &Self) -> Self;
    fn is_unit(&self) -> bool;
}

impl EchelonInt for i128 {
    fn zero() -> Self {
        0
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    fn neg(&self) -> Self {
        -*self
    }
    fn mul_sub(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        a.checked_mul(*x)?.checked_sub(b.checked_mul(*y)?)
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn div_exact(&self, d: &Self) -> Self {
        self / d
    }
    fn is_unit(&self) -> bool {
        self.abs() == 1
    }
}

impl EchelonInt for BigInt {
    fn zero() -> Self {
        <BigInt as Zero>::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul_sub(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        Some(a * x - b * y)
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn div_exact(&self, d: &Self) -> Self {
        self / d
    }
    fn is_unit(&self) -> bool {
        self.abs().is_one()
    }
}

type Row<T> = Vec<(usize, T)>;

fn normalize<T: EchelonInt>(row: &mut Row<T>) {
    if row.is_empty() {
        return;
    }
    let mut g = row[0].1.clone();
    for (_, v) in row.iter().skip(1) {
        if g.is_unit() {
            break;
        }
        g = g.gcd(v);
    }
    if row[0].1.is_negative() {
        g = g.neg();
    }
    if !(g.is_unit() && !g.is_negative()) {
        for (_, v) in row.iter_mut() {
            *v = v.div_exact(&g);
        }
    }
}

/// `p_lead * row - row_lead * piv`, which cancels the shared leading column.
fn eliminate<T: EchelonInt>(row: &Row<T>, piv: &Row<T>) -> Option<Row<T>> {
    let a = &piv[0].1;
    let b = &row[0].1;
    let zero = <T as EchelonInt>::zero();
    let mut out = Vec::with_capacity(row.len() + piv.len());
    let (mut i, mut j) = (1, 1);
    while i < row.len() || j < piv.len() {
        let ci = row.get(i).map_or(usize::MAX, |e| e.0);
        let cj = piv.get(j).map_or(usize::MAX, |e| e.0);
        let v = if ci < cj {
            let v = T::mul_sub(a, &row[i].1, b, &zero)?;
            i += 1;
            (ci, v)
        } else if cj < ci {
            let v = T::mul_sub(&zero, &zero, b, &piv[j].1)?;
            j += 1;
            (cj, v)
        } else {
            let v = T::mul_sub(a, &row[i].1, b, &piv[j].1)?;
            i += 1;
            j += 1;
            (ci, v)
        };
        if !v.1.is_zero() {
            out.push(v);
        }
    }
    normalize(&mut out);
    Some(out)
}

/// Fraction-free sparse echelon rank; `None` if the integer type overflows.
fn echelon_rank<T: EchelonInt>(mut rows: Vec<Row<T>>) -> Option<usize> {
    rows.sort_by_key(|r| r.len());
    let mut pivots: HashMap<usize, Row<T>> = HashMap::new();
    for mut row in rows {
        normalize(&mut row);
        while let Some(lead) = row.first().map(|e| e.0) {
            match pivots.get(&lead) {
                Some(p) => row = eliminate(&row, p)?,
                None => break,
            }
        }
        if let Some(lead) = row.first().map(|e| e.0) {
            pivots.insert(lead, row);
        }
    }
    Some(pivots.len())
}

/// Rank over Q, computed exactly.
///
/// Columns are relabelled sparsest-first so pivots land in short columns,
/// then rows are reduced against pivots by integer cross-multiplication with
/// content removal. An `i128` pass is tried first and redone with big
/// integers if it overflows.
pub fn rank(mat: &SparseMatrix) -> usize {
    if mat.is_zero() {
        return 0;
    }
    let (m, transposed);
    if mat.cols > mat.rows {
        transposed = mat.transpose();
        m = &transposed;
    } else {
        m = mat;
    }
    let mut count = vec![0usize; m.cols];
    for (_, c, _) in &m.entries {
        count[*c] += 1;
    }
    let mut order: Vec<usize> = (0..m.cols).collect();
    order.sort_by_key(|&c| (count[c], c));
    let mut relabel = vec![0usize; m.cols];
    for (new, &old) in order.iter().enumerate() {
        relabel[old] = new;
    }
    let int_rows: Vec<Row<BigInt>> = m
        .integer_rows()
        .into_iter()
        .map(|r| {
            let mut r: Row<BigInt> = r.into_iter().map(|(c, v)| (relabel[c], v)).collect();
            r.sort_by_key(|e| e.0);
            r
        })
        .collect();
    let small: Option<Vec<Row<i128>>> = int_rows
        .iter()
        .map(|r| r.iter().map(|(c, v)| v.to_i128().filter(|x| x.abs() < (1 << 60)).map(|x| (*c, x))).collect())
        .collect();
    if let Some(small) = small {
        if let Some(r) = echelon_rank(small) {
            return r;
        }
    }
    echelon_rank(int_rows).expect("big integer elimination cannot overflow")
}

pub fn kernel_dim(mat: &SparseMatrix) -> usize {
    mat.cols - rank(mat)
}
