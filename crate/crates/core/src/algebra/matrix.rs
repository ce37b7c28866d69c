//! Square matrices over truncated series with a common precision and
//! coordinate.

use std::ops::{Add, Mul, Neg, Sub};

use crate::algebra::field::{Fe, FieldSpec};
use crate::algebra::series::{TruncSeries, Var};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SeriesMatrix {
    n: usize,
    field: FieldSpec,
    var: Var,
    /// Row-major, every entry at the same precision.
    entries: Vec<TruncSeries>,
}

/// Division-free determinant by Laplace expansion along rows, memoized over
/// column subsets: `2^n * n` ring multiplications.
pub(crate) fn laplace_det<T: Clone>(
    n: usize,
    entry: impl Fn(usize, usize) -> T,
    one: T,
    mul: impl Fn(&T, &T) -> T,
    add: impl Fn(&T, &T) -> T,
    neg: impl Fn(&T) -> T,
) -> T {
    // minors[S] = det of rows n-|S|.. against the columns in S
    let mut minors: Vec<Option<T>> = vec![None; 1 << n];
    minors[0] = Some(one);
    for set in 1usize..(1 << n) {
        let size = set.count_ones() as usize;
        let row = n - size;
        let mut acc: Option<T> = None;
        let mut below = 0;
        for col in 0..n {
            if set & (1 << col) == 0 {
                continue;
            }
            let minor = minors[set & !(1 << col)].as_ref().expect("smaller subsets come first");
            let mut term = mul(&entry(row, col), minor);
            if below % 2 == 1 {
                term = neg(&term);
            }
            acc = Some(match acc {
                None => term,
                Some(a) => add(&a, &term),
            });
            below += 1;
        }
        minors[set] = acc;
    }
    minors[(1 << n) - 1].take().expect("full set computed")
}

impl SeriesMatrix {
    /// Builds a matrix from rows, truncating every entry to the smallest
    /// precision present.
    pub fn from_rows(rows: Vec<Vec<TruncSeries>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: bad.len() });
        }
        let first = rows[0][0].clone();
        for s in rows.iter().flatten() {
            first.check_compatible(s)?;
        }
        let precision = rows.iter().flatten().map(TruncSeries::precision).min().unwrap_or(0);
        let entries = rows.into_iter().flatten().map(|s| s.truncate(precision)).collect();
        Ok(SeriesMatrix { n, field: first.field(), var: first.var(), entries })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> TruncSeries) -> Result<Self> {
        let rows = (0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect();
        Self::from_rows(rows)
    }

    pub fn zero(n: usize, field: FieldSpec, var: Var, precision: usize) -> Self {
        SeriesMatrix { n, field, var, entries: vec![TruncSeries::zero(field, var, precision); n * n] }
    }

    pub fn identity(n: usize, field: FieldSpec, var: Var, precision: usize) -> Self {
        let mut m = Self::zero(n, field, var, precision);
        for i in 0..n {
            m.entries[i * n + i] = TruncSeries::one(field, var, precision);
        }
        m
    }

    pub fn diagonal(diag: &[TruncSeries]) -> Result<Self> {
        let n = diag.len();
        let first = diag.first().ok_or(Error::DimensionMismatch { expected: 1, found: 0 })?;
        Self::from_fn(n, |i, j| {
            if i == j {
                diag[i].clone()
            } else {
                TruncSeries::zero(first.field(), first.var(), first.precision())
            }
        })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<TruncSeries>]) -> Result<Self> {
        let n = cols.len();
        Self::from_fn(n, |i, j| cols[j][i].clone())
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn precision(&self) -> usize {
        self.entries[0].precision()
    }

    pub fn get(&self, i: usize, j: usize) -> &TruncSeries {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[TruncSeries] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<TruncSeries>> {
        (0..self.n).map(|i| self.entries[i * self.n..(i + 1) * self.n].to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<TruncSeries> {
        (0..self.n).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn diagonal_entries(&self) -> Vec<TruncSeries> {
        (0..self.n).map(|i| self.get(i, i).clone()).collect()
    }

    pub fn map(&self, f: impl Fn(&TruncSeries) -> TruncSeries) -> Result<Self> {
        Self::from_fn(self.n, |i, j| f(self.get(i, j)))
    }

    pub fn try_map(&self, f: impl Fn(&TruncSeries) -> Result<TruncSeries>) -> Result<Self> {
        let mut rows = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let mut row = Vec::with_capacity(self.n);
            for j in 0..self.n {
                row.push(f(self.get(i, j))?);
            }
            rows.push(row);
        }
        Self::from_rows(rows)
    }

    pub fn truncate(&self, precision: usize) -> Self {
        SeriesMatrix {
            n: self.n,
            field: self.field,
            var: self.var,
            entries: self.entries.iter().map(|s| s.truncate(precision)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(TruncSeries::is_zero)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.get(i, j).is_zero()))
    }

    /// Entrywise equality of the coefficients both matrices know.
    pub fn eq_within(&self, other: &Self) -> bool {
        self.n == other.n && self.entries.iter().zip(&other.entries).all(|(a, b)| a.eq_within(b))
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        self.entries[0].check_compatible(&other.entries[0])
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Self::from_fn(self.n, |i, j| self.get(i, j) + other.get(i, j))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Self::from_fn(self.n, |i, j| self.get(i, j) - other.get(i, j))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let n = self.n;
        let prec = self.precision().min(other.precision());
        Self::from_fn(n, |i, j| {
            let mut acc = TruncSeries::zero(self.field, self.var, prec);
            for k in 0..n {
                acc = &acc + &(self.get(i, k) * other.get(k, j));
            }
            acc
        })
    }

    /// Matrix times column vector.
    pub fn mul_vec(&self, v: &[TruncSeries]) -> Result<Vec<TruncSeries>> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: v.len() });
        }
        for s in v {
            self.entries[0].check_compatible(s)?;
        }
        let prec = v.iter().map(TruncSeries::precision).min().unwrap_or(0).min(self.precision());
        Ok((0..self.n)
            .map(|i| {
                let mut acc = TruncSeries::zero(self.field, self.var, prec);
                for (k, vk) in v.iter().enumerate() {
                    acc = &acc + &(self.get(i, k) * vk);
                }
                acc
            })
            .collect())
    }

    pub fn scale(&self, s: &TruncSeries) -> Result<Self> {
        self.entries[0].check_compatible(s)?;
        self.map(|e| e * s)
    }

    pub fn scale_fe(&self, c: Fe) -> Self {
        SeriesMatrix {
            n: self.n,
            field: self.field,
            var: self.var,
            entries: self.entries.iter().map(|s| s.scale(c)).collect(),
        }
    }

    pub fn negate(&self) -> Self {
        SeriesMatrix {
            n: self.n,
            field: self.field,
            var: self.var,
            entries: self.entries.iter().map(TruncSeries::negate).collect(),
        }
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.try_mul(other)?.try_sub(&other.try_mul(self)?)
    }

    pub fn derive(&self) -> Result<Self> {
        self.try_map(TruncSeries::derive)
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(self.get(j, i).clone());
            }
        }
        SeriesMatrix { n, field: self.field, var: self.var, entries }
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut acc = Self::identity(self.n, self.field, self.var, self.precision());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Constant terms, row-major.
    pub fn residue(&self) -> Vec<Fe> {
        self.entries.iter().map(TruncSeries::residue).collect()
    }

    /// Division-free determinant.
    pub fn det(&self) -> TruncSeries {
        let prec = self.precision();
        laplace_det(
            self.n,
            |i, j| self.get(i, j).clone(),
            TruncSeries::one(self.field, self.var, prec),
            |a, b| a * b,
            |a, b| a + b,
            TruncSeries::negate,
        )
    }

    /// Inverse by Gauss-Jordan elimination with unit pivots. Fails exactly
    /// when the residue matrix is singular.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let f = self.field;
        let mut left = self.rows();
        let mut right = Self::identity(n, f, self.var, self.precision()).rows();
        for col in 0..n {
            let pivot = (col..n).find(|&r| left[r][col].is_unit()).ok_or(Error::SingularGauge)?;
            left.swap(col, pivot);
            right.swap(col, pivot);
            let inv = left[col][col].inv()?;
            for s in left[col].iter_mut().chain(right[col].iter_mut()) {
                *s = &*s * &inv;
            }
            for r in 0..n {
                if r == col || left[r][col].is_zero() {
                    continue;
                }
                let factor = left[r][col].clone();
                for c in 0..n {
                    left[r][c] = &left[r][c] - &(&factor * &left[col][c]);
                    right[r][c] = &right[r][c] - &(&factor * &right[col][c]);
                }
            }
        }
        Self::from_rows(right)
    }

    /// Solves `self * x = b` for `x` (residue matrix must be invertible).
    pub fn solve(&self, b: &[TruncSeries]) -> Result<Vec<TruncSeries>> {
        self.inverse()?.mul_vec(b)
    }

    /// Entrywise `F*` of a `z'`-matrix.
    pub fn pullback(&self) -> Result<Self> {
        self.try_map(TruncSeries::pullback)
    }

    /// Entrywise descent of a `z`-matrix whose entries are `p`-th powers.
    pub fn descend_pth_power(&self) -> Result<Self> {
        self.try_map(TruncSeries::descend_pth_power)
    }
}

fn expect<T>(r: Result<T>) -> T {
    match r {
        Ok(v) => v,
        Err(e) => panic!("matrix operands are incompatible: {e}"),
    }
}

impl Add for &SeriesMatrix {
    type Output = SeriesMatrix;
    fn add(self, rhs: &SeriesMatrix) -> SeriesMatrix {
        expect(self.try_add(rhs))
    }
}

impl Sub for &SeriesMatrix {
    type Output = SeriesMatrix;
    fn sub(self, rhs: &SeriesMatrix) -> SeriesMatrix {
        expect(self.try_sub(rhs))
    }
}

impl Mul for &SeriesMatrix {
    type Output = SeriesMatrix;
    fn mul(self, rhs: &SeriesMatrix) -> SeriesMatrix {
        expect(self.try_mul(rhs))
    }
}

impl Neg for &SeriesMatrix {
    type Output = SeriesMatrix;
    fn neg(self) -> SeriesMatrix {
        self.negate()
    }
}
