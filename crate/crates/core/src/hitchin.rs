//! Chart-level Hitchin base for `gl_n`: characteristic invariants, the
//! p-Hitchin map, the Frobenius base map, the companion section and the
//! tautological element.
//!
//! Invariants are the elementary symmetric functions of the eigenvalues:
//! `det(λ - M) = Σ_i (-1)^i b_i λ^{n-i}`, so `b_1` is the trace and `b_n`
//! the determinant. They are computed as sums of principal minors, which
//! never divides and so stays valid for `p <= n`.

use crate::algebra::matrix::laplace_det;
use crate::algebra::{FieldSpec, SeriesMatrix, TruncSeries, Var};
use crate::connection::{pcurv, Connection};
use crate::error::{Error, Result};
use crate::spectral::{build_spectral, SpectralElement};
use crate::MAX_RANK;

/// A point `(b_1, ..., b_n)` of the Hitchin base over the chart. Entry
/// `b_i` is a section of `ω^{i·w}` where `w` is the twist weight (1 for
/// Higgs fields, `p` for F-Higgs fields).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InvariantTuple {
    entries: Vec<TruncSeries>,
    twist_weight: u32,
}

impl InvariantTuple {
    /// Entries are truncated to their common precision.
    pub fn new(entries: Vec<TruncSeries>, twist_weight: u32) -> Result<Self> {
        let first = entries.first().ok_or(Error::DimensionMismatch { expected: 1, found: 0 })?;
        if entries.len() > MAX_RANK {
            return Err(Error::RankTooLarge { rank: entries.len(), max: MAX_RANK });
        }
        for e in &entries {
            first.check_compatible(e)?;
        }
        let precision = entries.iter().map(TruncSeries::precision).min().unwrap_or(0);
        let entries = entries.iter().map(|e| e.truncate(precision)).collect();
        Ok(InvariantTuple { entries, twist_weight })
    }

    pub fn zero(rank: usize, field: FieldSpec, var: Var, precision: usize) -> Self {
        InvariantTuple { entries: vec![TruncSeries::zero(field, var, precision); rank], twist_weight: 1 }
    }

    pub fn entries(&self) -> &[TruncSeries] {
        &self.entries
    }

    /// `b_i` for `1 <= i <= n`.
    pub fn b(&self, i: usize) -> &TruncSeries {
        &self.entries[i - 1]
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn field(&self) -> FieldSpec {
        self.entries[0].field()
    }

    pub fn var(&self) -> Var {
        self.entries[0].var()
    }

    pub fn precision(&self) -> usize {
        self.entries[0].precision()
    }

    pub fn twist_weight(&self) -> u32 {
        self.twist_weight
    }

    pub fn with_twist_weight(mut self, w: u32) -> Self {
        self.twist_weight = w;
        self
    }

    pub fn truncate(&self, precision: usize) -> Self {
        InvariantTuple {
            entries: self.entries.iter().map(|e| e.truncate(precision)).collect(),
            twist_weight: self.twist_weight,
        }
    }

    /// Equality on the common known precision (twist weights must agree).
    pub fn eq_within(&self, other: &Self) -> bool {
        self.rank() == other.rank()
            && self.twist_weight == other.twist_weight
            && self.entries.iter().zip(&other.entries).all(|(a, b)| a.eq_within(b))
    }

    /// Coefficients of `χ_b(λ) = Σ (-1)^i b_i λ^{n-i}` in ascending powers
    /// of `λ`; the last one is `1`.
    pub fn char_poly(&self) -> Vec<TruncSeries> {
        let n = self.rank();
        let mut c = vec![TruncSeries::one(self.field(), self.var(), self.precision()); n + 1];
        for i in 1..=n {
            let b = self.b(i);
            c[n - i] = if i % 2 == 1 { b.negate() } else { b.clone() };
        }
        c
    }

    pub fn map(&self, f: impl Fn(&TruncSeries) -> Result<TruncSeries>) -> Result<Self> {
        let entries = self.entries.iter().map(f).collect::<Result<Vec<_>>>()?;
        InvariantTuple::new(entries, self.twist_weight)
    }
}

/// Elementary symmetric functions of the eigenvalues: `b_i` is the sum of
/// the principal `i × i` minors.
pub fn char_invariants(m: &SeriesMatrix) -> Result<InvariantTuple> {
    let n = m.rank();
    if n > MAX_RANK {
        return Err(Error::RankTooLarge { rank: n, max: MAX_RANK });
    }
    let (field, var, prec) = (m.field(), m.var(), m.precision());
    let mut b = vec![TruncSeries::zero(field, var, prec); n];
    for set in 1usize..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| set & (1 << i) != 0).collect();
        let minor = laplace_det(
            idx.len(),
            |i, j| m.get(idx[i], idx[j]).clone(),
            TruncSeries::one(field, var, prec),
            |a, b| a * b,
            |a, b| a + b,
            TruncSeries::negate,
        );
        let slot = &mut b[idx.len() - 1];
        *slot = &*slot + &minor;
    }
    InvariantTuple::new(b, 1)
}

/// `h_p(∇)`: the invariants of the p-curvature, descended to `z'`.
pub fn phitchin(nabla: &Connection) -> Result<InvariantTuple> {
    let p = nabla.p() as usize;
    if nabla.precision() < p + 2 {
        return Err(Error::InsufficientPrecision { required: p + 2, actual: nabla.precision() });
    }
    let psi = pcurv(nabla)?;
    let b = char_invariants(psi.psi())?;
    descend_invariants(&b)
}

/// Descends every entry of a `z`-tuple whose entries are `p`-th powers.
/// A failure here contradicts the descent theorem and is reported as an
/// internal inconsistency.
pub fn descend_invariants(b: &InvariantTuple) -> Result<InvariantTuple> {
    let p = b.field().p() as usize;
    let mut out = Vec::with_capacity(b.rank());
    for (i, e) in b.entries().iter().enumerate() {
        match e.descend_pth_power() {
            Ok(t) => out.push(t),
            Err(Error::NotAPthPower { exponent, coefficient }) => {
                if e.precision() < p {
                    return Err(Error::InsufficientPrecision { required: p, actual: e.precision() });
                }
                return Err(Error::internal(
                    "phitchin",
                    format!("b_{} has coefficient {coefficient} at exponent {exponent}", i + 1),
                ));
            }
            Err(other) => return Err(other),
        }
    }
    InvariantTuple::new(out, 1)
}

/// `F^p: B' -> B_{ω^p}`, substituting `z' -> z^p` in every entry.
pub fn frobenius_base_pullback(bp: &InvariantTuple) -> Result<InvariantTuple> {
    let p = bp.field().p();
    InvariantTuple::new(bp.entries().iter().map(|e| e.pullback()).collect::<Result<Vec<_>>>()?, bp.twist_weight * p)
}

/// Companion matrix of `χ_b`: ones on the subdiagonal, last column
/// `((-1)^{n+1} b_n, ..., -b_2, b_1)` from the top.
pub fn companion_section(b: &InvariantTuple) -> Result<SeriesMatrix> {
    let n = b.rank();
    if n > MAX_RANK {
        return Err(Error::RankTooLarge { rank: n, max: MAX_RANK });
    }
    let (field, var, prec) = (b.field(), b.var(), b.precision());
    SeriesMatrix::from_fn(n, |i, j| {
        if j == n - 1 {
            let e = b.b(n - i);
            if (n - i) % 2 == 1 {
                e.clone()
            } else {
                e.negate()
            }
        } else if i == j + 1 {
            TruncSeries::one(field, var, prec)
        } else {
            TruncSeries::zero(field, var, prec)
        }
    })
}

/// The tautological element `τ(b) = λ` of `R_b`.
pub type TautElement = SpectralElement;

pub fn tau(b: &InvariantTuple) -> TautElement {
    build_spectral(b).lambda()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ser(p: u64, c: &[i64], n: usize) -> TruncSeries {
        TruncSeries::from_ints(FieldSpec::prime(p).unwrap(), Var::Z, c, n)
    }

    fn mat(p: u64, rows: &[&[&[i64]]], n: usize) -> SeriesMatrix {
        SeriesMatrix::from_rows(rows.iter().map(|r| r.iter().map(|c| ser(p, c, n)).collect()).collect()).unwrap()
    }

    fn tuple(p: u64, var: Var, entries: &[&[i64]], n: usize) -> InvariantTuple {
        let f = FieldSpec::prime(p).unwrap();
        InvariantTuple::new(entries.iter().map(|c| TruncSeries::from_ints(f, var, c, n)).collect(), 1).unwrap()
    }

    #[test]
    fn char_invariants_examples() {
        let zero = SeriesMatrix::zero(3, FieldSpec::prime(5).unwrap(), Var::Z, 4);
        assert!(char_invariants(&zero).unwrap().entries().iter().all(TruncSeries::is_zero));
        let m2 = mat(2, &[&[&[0, 1], &[0]], &[&[1], &[0, 1]]], 7);
        assert_eq!(char_invariants(&m2).unwrap(), tuple(2, Var::Z, &[&[0], &[0, 0, 1]], 7));
        let m3 = mat(3, &[&[&[2], &[0, 1]], &[&[0, 0, 1], &[1]]], 6);
        assert_eq!(char_invariants(&m3).unwrap(), tuple(3, Var::Z, &[&[0], &[2, 0, 0, 2]], 6));
    }

    #[test]
    fn char_invariants_of_triangular_matrix() {
        // eigenvalues 1, 2, 3 over F_7: e1 = 6, e2 = 11, e3 = 6
        let m = mat(7, &[&[&[1], &[5], &[0, 1]], &[&[0], &[2], &[3]], &[&[0], &[0], &[3]]], 3);
        assert_eq!(char_invariants(&m).unwrap(), tuple(7, Var::Z, &[&[6], &[4], &[6]], 3));
    }

    #[test]
    fn phitchin_examples() {
        let f = FieldSpec::prime(3).unwrap();
        let b = phitchin(&Connection::trivial(2, f, 6)).unwrap();
        assert_eq!(b, InvariantTuple::zero(2, f, Var::ZPrime, 2));
        let a2 = Connection::new(mat(2, &[&[&[0], &[1]], &[&[0, 1], &[0]]], 8)).unwrap();
        assert_eq!(phitchin(&a2).unwrap(), tuple(2, Var::ZPrime, &[&[0], &[0, 1]], 4));
        let a1 = Connection::new(mat(3, &[&[&[0, 1]]], 7)).unwrap();
        assert_eq!(phitchin(&a1).unwrap(), tuple(3, Var::ZPrime, &[&[0, 1]], 2));
        let a3 = Connection::new(mat(3, &[&[&[0], &[1]], &[&[0, 1], &[0]]], 8)).unwrap();
        assert_eq!(phitchin(&a3).unwrap(), tuple(3, Var::ZPrime, &[&[0], &[2, 2]], 2));
        assert!(matches!(phitchin(&Connection::trivial(1, f, 4)), Err(Error::InsufficientPrecision { .. })));
    }

    #[test]
    fn descent_failure_is_internal() {
        let b = tuple(3, Var::Z, &[&[0, 1]], 6);
        assert!(descend_invariants(&b).unwrap_err().is_internal());
        let short = tuple(3, Var::Z, &[&[0, 1]], 2);
        assert!(matches!(descend_invariants(&short), Err(Error::InsufficientPrecision { .. })));
    }

    #[test]
    fn frobenius_base_examples() {
        let b = frobenius_base_pullback(&tuple(2, Var::ZPrime, &[&[0], &[0, 1]], 3)).unwrap();
        assert_eq!(b.entries(), tuple(2, Var::Z, &[&[0], &[0, 0, 1]], 6).entries());
        assert_eq!(b.twist_weight(), 2);
        let c = frobenius_base_pullback(&tuple(2, Var::ZPrime, &[&[1], &[0]], 3)).unwrap();
        assert_eq!(c.entries(), tuple(2, Var::Z, &[&[1], &[0]], 6).entries());
        let d = frobenius_base_pullback(&tuple(3, Var::ZPrime, &[&[0], &[2, 2]], 2)).unwrap();
        assert_eq!(d.entries(), tuple(3, Var::Z, &[&[0], &[2, 0, 0, 2]], 6).entries());
    }

    #[test]
    fn companion_examples() {
        let f = FieldSpec::prime(5).unwrap();
        let nil = companion_section(&InvariantTuple::zero(3, f, Var::Z, 4)).unwrap();
        assert_eq!(nil, mat(5, &[&[&[0], &[0], &[0]], &[&[1], &[0], &[0]], &[&[0], &[1], &[0]]], 4));
        let one = tuple(5, Var::Z, &[&[1, 2]], 4);
        assert_eq!(companion_section(&one).unwrap(), mat(5, &[&[&[1, 2]]], 4));
        let two = tuple(2, Var::Z, &[&[0], &[0, 0, 1]], 4);
        assert_eq!(companion_section(&two).unwrap(), mat(2, &[&[&[0], &[0, 0, 1]], &[&[1], &[0]]], 4));
        let b = tuple(7, Var::Z, &[&[1, 2], &[3], &[0, 5], &[6, 0, 1]], 5);
        assert_eq!(char_invariants(&companion_section(&b).unwrap()).unwrap(), b);
    }
}
