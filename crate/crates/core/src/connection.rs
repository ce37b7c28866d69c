//! Matrix connections `∇ = ∂_z + A` on the trivial rank-`n` bundle over the
//! truncated disk, gauge transformations, and p-curvature.
//!
//! The p-curvature is the `O`-linear operator `(∂_z + A)^p - ∂_z^p`; its
//! matrix is obtained by applying `∇` `p` times to the constant basis
//! vectors. With this sign convention it satisfies the horizontality
//! identity `∂Ψ + [A, Ψ] = 0`.

use crate::algebra::{FieldSpec, SeriesMatrix, TruncSeries, Var};
use crate::error::{Error, Result};
use crate::MAX_RANK;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Connection {
    matrix: SeriesMatrix,
}

impl Connection {
    /// `∂_z + matrix`; the matrix must be a `z`-matrix of rank `1..=8`.
    pub fn new(matrix: SeriesMatrix) -> Result<Self> {
        if matrix.var() != Var::Z {
            return Err(Error::VarMismatch { left: matrix.var(), right: Var::Z });
        }
        if matrix.rank() > MAX_RANK {
            return Err(Error::RankTooLarge { rank: matrix.rank(), max: MAX_RANK });
        }
        Ok(Connection { matrix })
    }

    /// The canonical connection `∂_z`.
    pub fn trivial(rank: usize, field: FieldSpec, precision: usize) -> Self {
        Connection { matrix: SeriesMatrix::zero(rank, field, Var::Z, precision) }
    }

    pub fn matrix(&self) -> &SeriesMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> SeriesMatrix {
        self.matrix
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    pub fn field(&self) -> FieldSpec {
        self.matrix.field()
    }

    pub fn p(&self) -> u32 {
        self.field().p()
    }

    pub fn precision(&self) -> usize {
        self.matrix.precision()
    }

    /// `∇ + B` for an endomorphism `B`.
    pub fn twist(&self, b: &SeriesMatrix) -> Result<Connection> {
        Connection::new(self.matrix.try_add(b)?)
    }

    /// `∂v + A v`, at precision `min(N, prec(v) - 1)`.
    pub fn apply(&self, v: &[TruncSeries]) -> Result<Vec<TruncSeries>> {
        apply(self, v)
    }
}

pub fn apply(nabla: &Connection, v: &[TruncSeries]) -> Result<Vec<TruncSeries>> {
    if v.len() != nabla.rank() {
        return Err(Error::DimensionMismatch { expected: nabla.rank(), found: v.len() });
    }
    let av = nabla.matrix.mul_vec(v)?;
    v.iter().zip(av).map(|(vi, avi)| vi.derive()?.try_add(&avi)).collect()
}

/// Transports `∇` along `g`: `A -> g A g^{-1} + g ∂(g^{-1})`, so that
/// `gauge(g, ∇)(g v) = g ∇(v)`. Precision drops by one through `∂g`.
pub fn gauge(g: &SeriesMatrix, nabla: &Connection) -> Result<Connection> {
    if g.rank() != nabla.rank() {
        return Err(Error::DimensionMismatch { expected: nabla.rank(), found: g.rank() });
    }
    let g_inv = g.inverse()?;
    let conj = g.try_mul(nabla.matrix())?.try_mul(&g_inv)?;
    let shift = g.try_mul(&g_inv.derive()?)?;
    Connection::new(conj.try_add(&shift)?)
}

/// The p-curvature `Ψ ⊗ (dz)^p` of a connection.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FHiggs {
    psi: SeriesMatrix,
}

impl FHiggs {
    pub fn new(psi: SeriesMatrix) -> Result<Self> {
        if psi.var() != Var::Z {
            return Err(Error::VarMismatch { left: psi.var(), right: Var::Z });
        }
        Ok(FHiggs { psi })
    }

    pub fn psi(&self) -> &SeriesMatrix {
        &self.psi
    }

    pub fn into_psi(self) -> SeriesMatrix {
        self.psi
    }

    /// Values lie in `(dz)^p = F*(dz')`.
    pub fn twist_weight(&self) -> u32 {
        self.psi.field().p()
    }

    pub fn precision(&self) -> usize {
        self.psi.precision()
    }
}

/// p-curvature by `p`-fold application of `∇` to each constant basis vector.
///
/// The first application is exact (`∇ e_j` is column `j` of `A`), the
/// remaining `p - 1` each lose one order, so the result has precision
/// `N - p + 1`. Needs `N >= p + 1`.
pub fn pcurv(nabla: &Connection) -> Result<FHiggs> {
    let p = nabla.p() as usize;
    let n = nabla.precision();
    if n < p + 1 {
        return Err(Error::InsufficientPrecision { required: p + 1, actual: n });
    }
    let columns = (0..nabla.rank())
        .map(|j| {
            let mut v = nabla.matrix().column(j);
            for _ in 1..p {
                v = apply(nabla, &v)?;
            }
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;
    FHiggs::new(SeriesMatrix::from_columns(&columns)?)
}

#[derive(Clone, Debug)]
pub struct HorizontalityReport {
    pub psi: SeriesMatrix,
    /// `∂Ψ + AΨ - ΨA`.
    pub residual: SeriesMatrix,
}

impl HorizontalityReport {
    pub fn passed(&self) -> bool {
        self.residual.is_zero()
    }
}

/// Residual of `∂Ψ + [A, Ψ] = 0`. Needs `N >= p + 2` so that `∂Ψ` has
/// at least one known coefficient.
pub fn check_horizontality(nabla: &Connection) -> Result<HorizontalityReport> {
    let p = nabla.p() as usize;
    if nabla.precision() < p + 2 {
        return Err(Error::InsufficientPrecision { required: p + 2, actual: nabla.precision() });
    }
    let psi = pcurv(nabla)?.into_psi();
    let residual = psi.derive()?.try_add(&nabla.matrix().commutator(&psi)?)?;
    Ok(HorizontalityReport { psi, residual })
}

/// `g^{-1} ∂g` for a unit series, at precision `N - 1`.
pub fn dlog(g: &TruncSeries) -> Result<TruncSeries> {
    if !g.is_unit() {
        return Err(Error::NonUnit);
    }
    let inv = g.inv()?;
    inv.try_mul(&g.derive()?)
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

    #[test]
    fn apply_examples() {
        let trivial = Connection::trivial(1, FieldSpec::prime(3).unwrap(), 5);
        assert_eq!(trivial.apply(&[ser(3, &[0, 1], 5)]).unwrap(), vec![ser(3, &[1], 4)]);
        let nabla = Connection::new(mat(3, &[&[&[0, 1]]], 5)).unwrap();
        assert_eq!(nabla.apply(&[ser(3, &[1], 6)]).unwrap(), vec![ser(3, &[0, 1], 5)]);
        assert_eq!(nabla.apply(&[ser(3, &[0, 1], 5)]).unwrap(), vec![ser(3, &[1, 0, 1], 4)]);
        assert!(nabla.apply(&[ser(3, &[1], 5), ser(3, &[1], 5)]).is_err());
    }

    #[test]
    fn pcurv_rank_one_z_at_p3() {
        let nabla = Connection::new(mat(3, &[&[&[0, 1]]], 7)).unwrap();
        let psi = pcurv(&nabla).unwrap();
        assert_eq!(psi.precision(), 5);
        assert_eq!(psi.psi().get(0, 0), &ser(3, &[0, 0, 0, 1], 5));
        assert_eq!(psi.twist_weight(), 3);
    }

    #[test]
    fn pcurv_rank_two_examples() {
        let a3 = Connection::new(mat(3, &[&[&[0], &[1]], &[&[0, 1], &[0]]], 8)).unwrap();
        assert_eq!(pcurv(&a3).unwrap().into_psi(), mat(3, &[&[&[2], &[0, 1]], &[&[0, 0, 1], &[1]]], 6));
        let a2 = Connection::new(mat(2, &[&[&[0], &[1]], &[&[0, 1], &[0]]], 8)).unwrap();
        assert_eq!(pcurv(&a2).unwrap().into_psi(), mat(2, &[&[&[0, 1], &[0]], &[&[1], &[0, 1]]], 7));
    }

    #[test]
    fn pcurv_needs_precision() {
        let nabla = Connection::trivial(2, FieldSpec::prime(5).unwrap(), 5);
        assert_eq!(pcurv(&nabla), Err(Error::InsufficientPrecision { required: 6, actual: 5 }));
        assert!(pcurv(&Connection::trivial(2, FieldSpec::prime(5).unwrap(), 6)).unwrap().psi().is_zero());
    }

    #[test]
    fn horizontality_examples() {
        let a3 = Connection::new(mat(3, &[&[&[0], &[1]], &[&[0, 1], &[0]]], 8)).unwrap();
        let report = check_horizontality(&a3).unwrap();
        assert_eq!(report.psi.derive().unwrap(), mat(3, &[&[&[0], &[1]], &[&[0, 2], &[0]]], 5));
        assert!(report.passed());
        let a2 = Connection::new(mat(2, &[&[&[0], &[1]], &[&[0, 1], &[0]]], 8)).unwrap();
        assert!(check_horizontality(&a2).unwrap().passed());
        // constant A: Ψ = A^p
        let c = Connection::new(mat(5, &[&[&[1], &[2]], &[&[3], &[4]]], 8)).unwrap();
        let report = check_horizontality(&c).unwrap();
        assert_eq!(report.psi, c.matrix().pow(5).truncate(4));
        assert!(report.passed());
    }

    #[test]
    fn gauge_examples() {
        let f = FieldSpec::prime(2).unwrap();
        let nabla = Connection::trivial(1, f, 6);
        let g = mat(2, &[&[&[1, 1]]], 6);
        let moved = gauge(&g, &nabla).unwrap();
        assert_eq!(moved.matrix().get(0, 0), &ser(2, &[1, 1, 1, 1, 1], 5));
        let id = SeriesMatrix::identity(2, f, Var::Z, 6);
        let a = Connection::new(mat(2, &[&[&[0], &[1]], &[&[0, 1], &[0]]], 6)).unwrap();
        assert_eq!(gauge(&id, &a).unwrap().matrix(), &a.matrix().truncate(5));
        let singular = mat(2, &[&[&[0, 1], &[0]], &[&[0], &[1]]], 6);
        assert_eq!(gauge(&singular, &a), Err(Error::SingularGauge));
    }

    #[test]
    fn dlog_examples() {
        assert!(dlog(&ser(2, &[1], 5)).unwrap().is_zero());
        assert_eq!(dlog(&ser(2, &[1, 1], 5)).unwrap(), ser(2, &[1, 1, 1, 1], 4));
        assert!(dlog(&ser(5, &[3], 5)).unwrap().is_zero());
        assert_eq!(dlog(&ser(5, &[0, 1], 5)), Err(Error::NonUnit));
    }
}
