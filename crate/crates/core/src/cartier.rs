//! The Cartier operator, the additive map `h_p` from one-forms to twisted
//! one-forms, its section, and Cartier descent of connections with zero
//! p-curvature.
//!
//! On the chart, `C(Σ c_m z^m dz) = Σ_j c_{jp+p-1} z'^j dz'` and
//! `h_p(ζ ⊗ ω) = ζ^p π*(ω) - ζ C(ω)`. For `ζ = 1` this is the descent of
//! the p-curvature of the rank-one connection `∂ + f`.

use crate::algebra::{Fe, FieldSpec, SeriesMatrix, TruncSeries, Var};
use crate::connection::Connection;
use crate::error::{Error, Result};
use crate::spectral::SpectralElement;

/// `f dz` on the curve chart.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OneForm {
    coefficient: TruncSeries,
}

/// `g dz'` on the twist.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TwistOneForm {
    coefficient: TruncSeries,
}

impl OneForm {
    pub fn new(coefficient: TruncSeries) -> Result<Self> {
        if coefficient.var() != Var::Z {
            return Err(Error::VarMismatch { left: coefficient.var(), right: Var::Z });
        }
        Ok(OneForm { coefficient })
    }

    pub fn coefficient(&self) -> &TruncSeries {
        &self.coefficient
    }

    pub fn precision(&self) -> usize {
        self.coefficient.precision()
    }

    pub fn field(&self) -> FieldSpec {
        self.coefficient.field()
    }
}

impl TwistOneForm {
    pub fn new(coefficient: TruncSeries) -> Result<Self> {
        if coefficient.var() != Var::ZPrime {
            return Err(Error::VarMismatch { left: coefficient.var(), right: Var::ZPrime });
        }
        Ok(TwistOneForm { coefficient })
    }

    pub fn coefficient(&self) -> &TruncSeries {
        &self.coefficient
    }

    pub fn precision(&self) -> usize {
        self.coefficient.precision()
    }
}

/// `C(ω)`, at precision `ceil((N - p + 1) / p)`.
pub fn cartier_op(w: &OneForm) -> TwistOneForm {
    let s = &w.coefficient;
    let p = s.field().p() as usize;
    let coeffs: Vec<Fe> = s.coeffs().iter().skip(p - 1).step_by(p).copied().collect();
    TwistOneForm { coefficient: TruncSeries::new(s.field(), Var::ZPrime, coeffs) }
}

/// Coefficient ring for `h_p`: scalars on the twist, or elements of a
/// spectral ring over `z'`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum LieCoefficient {
    Scalar(TruncSeries),
    Spectral(SpectralElement),
}

/// `h_p(ζ ⊗ ω) = ζ^p π*(ω) - ζ C(ω)`; the result is the coefficient of `dz'`.
pub fn hp_map(zeta: &LieCoefficient, w: &OneForm) -> Result<LieCoefficient> {
    let pi = w.coefficient.pi_star()?;
    let c = cartier_op(w).coefficient;
    let p = w.field().p() as u64;
    match zeta {
        LieCoefficient::Scalar(z) => {
            if z.var() != Var::ZPrime {
                return Err(Error::VarMismatch { left: z.var(), right: Var::ZPrime });
            }
            Ok(LieCoefficient::Scalar(z.pow(p).try_mul(&pi)?.try_sub(&z.try_mul(&c)?)?))
        }
        LieCoefficient::Spectral(z) => {
            if z.ring().var() != Var::ZPrime {
                return Err(Error::VarMismatch { left: z.ring().var(), right: Var::ZPrime });
            }
            Ok(LieCoefficient::Spectral(z.pow(p).scale(&pi)?.try_sub(&z.scale(&c)?)?))
        }
    }
}

/// `h_p(1 ⊗ ω) = π*(ω) - C(ω)`.
pub fn hp(w: &OneForm) -> Result<TwistOneForm> {
    let pi = w.coefficient.pi_star()?;
    TwistOneForm::new(pi.try_sub(&cartier_op(w).coefficient)?)
}

/// A preimage of `η` under `h_p(1 ⊗ -)` with every unconstrained
/// coefficient set to zero. The result has precision `p N'`.
pub fn solve_hp(target: &TwistOneForm) -> Result<OneForm> {
    solve_hp_with(target, |_| Fe::ZERO)
}

/// Like [`solve_hp`], taking the free coefficients `u_m`, `m ≢ p-1 (mod p)`,
/// from `free(m)`.
///
/// The equation at `z'^j` reads `u_j^p - u_{jp+p-1} = η_j`; since
/// `jp + p - 1 > j` it is solved in increasing `j`.
pub fn solve_hp_with(target: &TwistOneForm, mut free: impl FnMut(usize) -> Fe) -> Result<OneForm> {
    let eta = &target.coefficient;
    let f = eta.field();
    let p = f.p() as usize;
    let len = p * eta.precision();
    let mut u = vec![Fe::ZERO; len];
    for (m, slot) in u.iter_mut().enumerate() {
        if m % p != p - 1 {
            *slot = free(m);
        }
    }
    for (j, &e) in eta.coeffs().iter().enumerate() {
        u[j * p + p - 1] = f.sub(f.frobenius(u[j]), e);
    }
    let w = OneForm::new(TruncSeries::new(f, Var::Z, u))?;
    if hp(&w)?.coefficient.truncate(eta.precision()) != *eta {
        return Err(Error::internal("solve_hp", "triangular solution does not reproduce the target"));
    }
    Ok(w)
}

/// Flat sections of a connection with zero p-curvature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatSections {
    /// `v^{(j)}` with `v^{(j)}(0) = e_j`, at precision `N + 1`.
    pub basis: Vec<Vec<TruncSeries>>,
    /// `(v^{(1)} | ... | v^{(n)})`; `gauge(g^{-1}, ∇)` is the canonical connection.
    pub gauge: SeriesMatrix,
}

/// Solves `∂v + Av = 0` order by order for `v(0) = e_j`, all columns in
/// lockstep. The recursion `(m+1) v_{m+1} = -(Av)_m` is obstructed when
/// `p | m+1`; there the residual `(Av)_m` must vanish (and `v_{m+1}` is
/// set to zero). The first nonvanishing residual is reported.
pub fn flat_sections(nabla: &Connection) -> Result<FlatSections> {
    let p = nabla.p() as usize;
    let n_prec = nabla.precision();
    if n_prec < p + 1 {
        return Err(Error::InsufficientPrecision { required: p + 1, actual: n_prec });
    }
    let f = nabla.field();
    let n = nabla.rank();
    let a = nabla.matrix();
    // v[j][m][i]: coefficient of z^m in entry i of column j
    let mut v: Vec<Vec<Vec<Fe>>> = (0..n)
        .map(|j| {
            let mut e = vec![Fe::ZERO; n];
            e[j] = f.one();
            vec![e]
        })
        .collect();
    for m in 0..n_prec {
        let mut next = Vec::with_capacity(n);
        for (j, col) in v.iter().enumerate() {
            let mut r = vec![Fe::ZERO; n];
            for (k, vk) in col.iter().enumerate().take(m + 1) {
                for (i, slot) in r.iter_mut().enumerate() {
                    for (l, &x) in vk.iter().enumerate() {
                        if !x.is_zero() {
                            let aik = a.get(i, l).coeffs()[m - k];
                            *slot = f.add(*slot, f.mul(aik, x));
                        }
                    }
                }
            }
            if (m + 1) % p == 0 {
                if r.iter().any(|c| !c.is_zero()) {
                    return Err(Error::NonzeroPCurvature {
                        order: m,
                        column: j,
                        residual: r.iter().map(|&c| crate::algebra::text::format_fe(f, c)).collect(),
                    });
                }
                next.push(vec![Fe::ZERO; n]);
            } else {
                let inv = f.inv(f.from_u64((m + 1) as u64)).expect("m + 1 is prime to p");
                next.push(r.iter().map(|&c| f.neg(f.mul(c, inv))).collect());
            }
        }
        for (col, x) in v.iter_mut().zip(next) {
            col.push(x);
        }
    }
    let basis: Vec<Vec<TruncSeries>> = v
        .iter()
        .map(|col| (0..n).map(|i| TruncSeries::new(f, Var::Z, col.iter().map(|c| c[i]).collect())).collect())
        .collect();
    let gauge = SeriesMatrix::from_columns(&basis)?;
    Ok(FlatSections { basis, gauge })
}

/// A unit `g` with `g(0) = 1` and `dlog g = ω`, which exists exactly when
/// `h_p(ω) = 0`. It is the flat section of `∂ - ω` through `1`.
pub fn kernel_unit(w: &OneForm) -> Result<TruncSeries> {
    let a = SeriesMatrix::from_rows(vec![vec![w.coefficient.negate()]])?;
    let flat = flat_sections(&Connection::new(a)?)?;
    Ok(flat.basis[0][0].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::{dlog, gauge, pcurv};

    fn ser(p: u64, c: &[i64], n: usize) -> TruncSeries {
        TruncSeries::from_ints(FieldSpec::prime(p).unwrap(), Var::Z, c, n)
    }

    fn twist(p: u64, c: &[i64], n: usize) -> TruncSeries {
        TruncSeries::from_ints(FieldSpec::prime(p).unwrap(), Var::ZPrime, c, n)
    }

    fn form(p: u64, c: &[i64], n: usize) -> OneForm {
        OneForm::new(ser(p, c, n)).unwrap()
    }

    #[test]
    fn cartier_examples() {
        assert!(cartier_op(&form(3, &[1], 7)).coefficient().is_zero());
        assert_eq!(cartier_op(&form(5, &[0, 0, 0, 0, 1], 6)).coefficient(), &twist(5, &[1], 1));
        assert_eq!(cartier_op(&form(3, &[1, 0, 1, 0, 0, 1], 7)).coefficient(), &twist(3, &[1, 1], 2));
        assert_eq!(cartier_op(&form(3, &[1, 2], 2)).precision(), 0);
    }

    #[test]
    fn hp_examples() {
        assert!(hp(&form(2, &[0], 6)).unwrap().coefficient().is_zero());
        assert_eq!(hp(&form(2, &[0, 1], 8)).unwrap().coefficient(), &twist(2, &[1, 1], 4));
        let g = ser(2, &[1, 1], 9);
        let w = OneForm::new(dlog(&g).unwrap()).unwrap();
        assert!(hp(&w).unwrap().coefficient().is_zero());
    }

    #[test]
    fn hp_matches_descended_pcurv() {
        let f = ser(5, &[1, 2, 0, 4, 3, 1, 0, 2, 1, 1, 3, 4], 12);
        let nabla = Connection::new(SeriesMatrix::from_rows(vec![vec![f.clone()]]).unwrap()).unwrap();
        let psi = pcurv(&nabla).unwrap().into_psi();
        let descended = psi.get(0, 0).descend_pth_power().unwrap();
        assert_eq!(hp(&OneForm::new(f).unwrap()).unwrap().coefficient(), &descended);
    }

    #[test]
    fn hp_with_scalar_coefficient() {
        let zeta = twist(3, &[2, 1], 3);
        let w = form(3, &[1, 0, 2, 1, 0, 1, 2, 2, 1], 9);
        let pulled = OneForm::new(zeta.pullback().unwrap().try_mul(w.coefficient()).unwrap()).unwrap();
        match hp_map(&LieCoefficient::Scalar(zeta), &w).unwrap() {
            LieCoefficient::Scalar(s) => assert!(s.eq_within(hp(&pulled).unwrap().coefficient())),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn solve_hp_examples() {
        let zero = solve_hp(&TwistOneForm::new(twist(2, &[0], 3)).unwrap()).unwrap();
        assert!(zero.coefficient().is_zero());
        let one = solve_hp(&TwistOneForm::new(twist(2, &[1], 4)).unwrap()).unwrap();
        assert_eq!(one.coefficient(), &ser(2, &[0, 1, 0, 1, 0, 0, 0, 1], 8));
        let zp = solve_hp(&TwistOneForm::new(twist(2, &[0, 1], 4)).unwrap()).unwrap();
        assert_eq!(zp.coefficient(), &ser(2, &[0, 0, 0, 1, 0, 0, 0, 1], 8));
    }

    #[test]
    fn flat_section_examples() {
        let f2 = FieldSpec::prime(2).unwrap();
        let flat = flat_sections(&Connection::trivial(2, f2, 4)).unwrap();
        assert_eq!(flat.gauge, SeriesMatrix::identity(2, f2, Var::Z, 5));
        let one = Connection::new(SeriesMatrix::from_rows(vec![vec![ser(2, &[1], 4)]]).unwrap()).unwrap();
        assert_eq!(
            flat_sections(&one),
            Err(Error::NonzeroPCurvature { order: 1, column: 0, residual: vec!["1".into()] })
        );
        let g = ser(3, &[1, 1], 9);
        let a = SeriesMatrix::from_rows(vec![vec![dlog(&g).unwrap()]]).unwrap();
        let nabla = Connection::new(a).unwrap();
        let flat = flat_sections(&nabla).unwrap();
        // (1+z)^{-1} up to a unit of the p-th-power subring
        let v = &flat.basis[0][0];
        assert!(nabla.apply(&flat.basis[0]).unwrap()[0].is_zero());
        assert!((v * &g).descend_pth_power().is_ok());
    }

    #[test]
    fn flat_sections_trivialize() {
        let p = 3;
        let g = SeriesMatrix::from_rows(vec![
            vec![ser(p, &[1, 2, 0, 1, 1, 2, 0, 1, 2, 1], 10), ser(p, &[0, 1, 1], 10)],
            vec![ser(p, &[2, 0, 1, 1], 10), ser(p, &[1, 0, 0, 2, 1], 10)],
        ])
        .unwrap();
        let nabla = gauge(&g, &Connection::trivial(2, FieldSpec::prime(p).unwrap(), 10)).unwrap();
        let flat = flat_sections(&nabla).unwrap();
        let inv = flat.gauge.inverse().unwrap();
        assert!(gauge(&inv, &nabla).unwrap().matrix().is_zero());
        let back = gauge(&flat.gauge, &Connection::trivial(2, FieldSpec::prime(p).unwrap(), 10)).unwrap();
        assert!(back.matrix().eq_within(nabla.matrix()));
    }

    #[test]
    fn kernel_unit_rebuilds_dlog() {
        let g = ser(5, &[1, 3, 0, 2, 4, 1, 1, 0, 3, 2, 2, 1, 0, 4], 14);
        let w = OneForm::new(dlog(&g).unwrap()).unwrap();
        let u = kernel_unit(&w).unwrap();
        assert_eq!(dlog(&u).unwrap(), *w.coefficient());
    }
}
