//! Truncated power series with explicit precision.
//!
//! A [`TruncSeries`] of precision `N` knows the coefficients of `z^0 ..
//! z^{N-1}` exactly and nothing beyond. Every operation states its precision
//! law and never reports coefficients it does not know:
//!
//! | operation | result precision |
//! |-----------|------------------|
//! | add, sub, mul | `min(N_a, N_b)` |
//! | inv | `N` |
//! | derive | `N - 1` |
//! | descend (z to z') | `ceil(N / p)` |
//! | pullback (z' to z) | `p * N` |
//! | pi_star | `N` |
//!
//! Frobenius conventions on the chart: `F*(z') = z^p` and `F*` fixes
//! coefficients; `pi*(z) = z'` and `pi*` raises coefficients to the `p`-th
//! power.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::algebra::field::{Fe, FieldSpec};
use crate::error::{Error, Result};

/// Coordinate tag: the curve coordinate `z` or the Frobenius-twist
/// coordinate `z'`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Var {
    Z,
    ZPrime,
}

impl Var {
    pub fn as_str(&self) -> &'static str {
        match self {
            Var::Z => "z",
            Var::ZPrime => "z'",
        }
    }

    pub fn parse(s: &str) -> Option<Var> {
        match s {
            "z" => Some(Var::Z),
            "z'" => Some(Var::ZPrime),
            _ => None,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruncSeries {
    field: FieldSpec,
    var: Var,
    coeffs: Vec<Fe>,
}

impl fmt::Debug for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} + O({}^{}) over {:?}",
            crate::algebra::text::format_series(self),
            self.var,
            self.precision(),
            self.field
        )
    }
}

impl TruncSeries {
    /// Series with coefficients `c_0..c_{N-1}`; precision is `coeffs.len()`.
    pub fn new(field: FieldSpec, var: Var, coeffs: Vec<Fe>) -> Self {
        TruncSeries { field, var, coeffs }
    }

    pub fn zero(field: FieldSpec, var: Var, precision: usize) -> Self {
        Self::new(field, var, vec![Fe::ZERO; precision])
    }

    pub fn constant(field: FieldSpec, var: Var, c: Fe, precision: usize) -> Self {
        let mut s = Self::zero(field, var, precision);
        if precision > 0 {
            s.coeffs[0] = c;
        }
        s
    }

    pub fn one(field: FieldSpec, var: Var, precision: usize) -> Self {
        Self::constant(field, var, field.one(), precision)
    }

    /// `c * var^exp`, dropped if `exp >= precision`.
    pub fn monomial(field: FieldSpec, var: Var, c: Fe, exp: usize, precision: usize) -> Self {
        let mut s = Self::zero(field, var, precision);
        if exp < precision {
            s.coeffs[exp] = c;
        }
        s
    }

    /// Series from small integer coefficients (reduced mod `p`).
    pub fn from_ints(field: FieldSpec, var: Var, coeffs: &[i64], precision: usize) -> Self {
        let mut s = Self::zero(field, var, precision);
        for (slot, &c) in s.coeffs.iter_mut().zip(coeffs) {
            *slot = field.from_i64(c);
        }
        s
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    /// Coefficient of `var^m`, or `None` when `m` is beyond the precision.
    pub fn coeff(&self, m: usize) -> Option<Fe> {
        self.coeffs.get(m).copied()
    }

    /// Constant term; zero for a precision-0 series.
    pub fn residue(&self) -> Fe {
        self.coeffs.first().copied().unwrap_or(Fe::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Fe::is_zero)
    }

    /// Index of the first nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn is_unit(&self) -> bool {
        !self.residue().is_zero()
    }

    pub fn truncate(&self, precision: usize) -> Self {
        let n = precision.min(self.precision());
        Self::new(self.field, self.var, self.coeffs[..n].to_vec())
    }

    /// Same coefficients, reinterpreted in another coordinate.
    pub fn with_var(mut self, var: Var) -> Self {
        self.var = var;
        self
    }

    /// Equality of the coefficients both series know.
    pub fn eq_within(&self, other: &Self) -> bool {
        let n = self.precision().min(other.precision());
        self.field == other.field && self.var == other.var && self.coeffs[..n] == other.coeffs[..n]
    }

    pub(crate) fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.var != other.var {
            return Err(Error::VarMismatch { left: self.var, right: other.var });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let f = self.field;
        let c = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(Self::new(f, self.var, c))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let f = self.field;
        let c = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| f.sub(a, b)).collect();
        Ok(Self::new(f, self.var, c))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let f = self.field;
        let n = self.precision().min(other.precision());
        let mut c = vec![Fe::ZERO; n];
        for (i, &a) in self.coeffs[..n].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs[..n - i].iter().enumerate() {
                if !b.is_zero() {
                    c[i + j] = f.add(c[i + j], f.mul(a, b));
                }
            }
        }
        Ok(Self::new(f, self.var, c))
    }

    pub fn negate(&self) -> Self {
        let f = self.field;
        Self::new(f, self.var, self.coeffs.iter().map(|&c| f.neg(c)).collect())
    }

    pub fn scale(&self, s: Fe) -> Self {
        let f = self.field;
        Self::new(f, self.var, self.coeffs.iter().map(|&c| f.mul(c, s)).collect())
    }

    /// Multiplicative inverse at the same precision.
    pub fn inv(&self) -> Result<Self> {
        let f = self.field;
        if self.precision() == 0 {
            return Err(Error::ZeroPrecision);
        }
        let c0_inv = f.inv(self.residue()).ok_or(Error::NonUnitConstantTerm)?;
        let n = self.precision();
        let mut out = vec![Fe::ZERO; n];
        out[0] = c0_inv;
        for m in 1..n {
            let mut acc = Fe::ZERO;
            for i in 1..=m {
                acc = f.add(acc, f.mul(self.coeffs[i], out[m - i]));
            }
            out[m] = f.neg(f.mul(acc, c0_inv));
        }
        Ok(Self::new(f, self.var, out))
    }

    /// Formal derivative in the series' own coordinate; precision drops by one.
    pub fn derive(&self) -> Result<Self> {
        if self.precision() == 0 {
            return Err(Error::ZeroPrecision);
        }
        let f = self.field;
        let c = (0..self.precision() - 1)
            .map(|m| f.scale(self.coeffs[m + 1], (m + 1) as u64))
            .collect();
        Ok(Self::new(f, self.var, c))
    }

    /// `derive` applied `times` times.
    pub fn derive_n(&self, times: usize) -> Result<Self> {
        let mut s = self.clone();
        for _ in 0..times {
            s = s.derive()?;
        }
        Ok(s)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.field, self.var, self.precision());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Coefficientwise absolute Frobenius `c_m -> c_m^p`, coordinate unchanged.
    pub fn frobenius_coeffs(&self) -> Self {
        let f = self.field;
        Self::new(f, self.var, self.coeffs.iter().map(|&c| f.frobenius(c)).collect())
    }

    /// `pi*`: a `z`-series to a `z'`-series, `c_m z^m -> c_m^p z'^m`.
    pub fn pi_star(&self) -> Result<Self> {
        if self.var != Var::Z {
            return Err(Error::VarMismatch { left: self.var, right: Var::Z });
        }
        Ok(self.frobenius_coeffs().with_var(Var::ZPrime))
    }

    /// Writes `s = F*(t)` and returns `t`, or reports the first coefficient
    /// at an exponent prime to `p` that is nonzero.
    pub fn descend_pth_power(&self) -> Result<Self> {
        if self.var != Var::Z {
            return Err(Error::VarMismatch { left: self.var, right: Var::Z });
        }
        if self.precision() == 0 {
            return Err(Error::ZeroPrecision);
        }
        let p = self.field.p() as usize;
        if let Some((m, c)) = self.coeffs.iter().enumerate().find(|(m, c)| m % p != 0 && !c.is_zero()) {
            return Err(Error::NotAPthPower {
                exponent: m,
                coefficient: crate::algebra::text::format_fe(self.field, *c),
            });
        }
        let c = self.coeffs.iter().step_by(p).copied().collect();
        Ok(Self::new(self.field, Var::ZPrime, c))
    }

    /// `F*`: a `z'`-series to a `z`-series, `t(z') -> t(z^p)`.
    pub fn pullback(&self) -> Result<Self> {
        if self.var != Var::ZPrime {
            return Err(Error::VarMismatch { left: self.var, right: Var::ZPrime });
        }
        let p = self.field.p() as usize;
        let mut c = vec![Fe::ZERO; self.precision() * p];
        for (i, &t) in self.coeffs.iter().enumerate() {
            c[i * p] = t;
        }
        Ok(Self::new(self.field, Var::Z, c))
    }
}

fn expect<T>(r: Result<T>) -> T {
    match r {
        Ok(v) => v,
        Err(e) => panic!("series operands are incompatible: {e}"),
    }
}

impl Add for &TruncSeries {
    type Output = TruncSeries;
    /// Panics if the operands live over different fields or coordinates;
    /// use [`TruncSeries::try_add`] for the fallible form.
    fn add(self, rhs: &TruncSeries) -> TruncSeries {
        expect(self.try_add(rhs))
    }
}

impl Sub for &TruncSeries {
    type Output = TruncSeries;
    fn sub(self, rhs: &TruncSeries) -> TruncSeries {
        expect(self.try_sub(rhs))
    }
}

impl Mul for &TruncSeries {
    type Output = TruncSeries;
    fn mul(self, rhs: &TruncSeries) -> TruncSeries {
        expect(self.try_mul(rhs))
    }
}

impl Neg for &TruncSeries {
    type Output = TruncSeries;
    fn neg(self) -> TruncSeries {
        self.negate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ser(p: u64, c: &[i64], n: usize) -> TruncSeries {
        TruncSeries::from_ints(FieldSpec::prime(p).unwrap(), Var::Z, c, n)
    }

    /// Convolution written out index by index.
    fn convolve(a: &[i64], b: &[i64], p: i64, n: usize) -> Vec<i64> {
        let mut out = vec![0i64; n];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                if i + j < n {
                    out[i + j] = (out[i + j] + x * y).rem_euclid(p);
                }
            }
        }
        out
    }

    #[test]
    fn derive_drops_one_order() {
        let d = ser(3, &[0, 0, 0, 1], 5).derive().unwrap();
        assert_eq!(d.precision(), 4);
        assert!(d.is_zero());
    }

    #[test]
    fn geometric_inverse() {
        let inv = ser(2, &[1, 1], 4).inv().unwrap();
        assert_eq!(inv, ser(2, &[1, 1, 1, 1], 4));
        assert_eq!(ser(2, &[0, 1], 4).inv(), Err(Error::NonUnitConstantTerm));
    }

    #[test]
    fn product_against_convolution() {
        let prod = &ser(2, &[1, 1], 4) * &ser(2, &[1, 1], 4);
        assert_eq!(prod, ser(2, &convolve(&[1, 1], &[1, 1], 2, 4), 4));
        assert_eq!(prod, ser(2, &[1, 0, 1], 4));
    }

    #[test]
    fn mixed_precision_takes_minimum() {
        let s = &ser(5, &[1, 2, 3], 6) + &ser(5, &[1], 3);
        assert_eq!(s.precision(), 3);
        let m = &ser(5, &[1, 2, 3], 6) * &ser(5, &[1], 2);
        assert_eq!(m, ser(5, &[1, 2], 2));
    }

    #[test]
    fn var_mismatch_is_reported() {
        let a = ser(3, &[1], 3);
        let b = a.clone().with_var(Var::ZPrime);
        assert_eq!(a.try_add(&b), Err(Error::VarMismatch { left: Var::Z, right: Var::ZPrime }));
    }

    #[test]
    fn descend_examples() {
        let t = ser(3, &[1, 0, 0, 1, 0, 0, 1], 7).descend_pth_power().unwrap();
        assert_eq!(t.var(), Var::ZPrime);
        assert_eq!(t.coeffs(), ser(3, &[1, 1, 1], 3).coeffs());
        let err = ser(2, &[0, 1], 3).descend_pth_power().unwrap_err();
        assert_eq!(err, Error::NotAPthPower { exponent: 1, coefficient: "1".into() });
        let t = ser(3, &[2, 0, 0, 2], 6).descend_pth_power().unwrap();
        assert_eq!(t.coeffs(), ser(3, &[2, 2], 2).coeffs());
    }

    #[test]
    fn pi_star_examples() {
        let f4 = FieldSpec::extension(2, &[1, 1, 1]).unwrap();
        let alpha = f4.from_digits(&[0, 1]).unwrap();
        let s = TruncSeries::monomial(f4, Var::Z, alpha, 1, 3);
        let t = s.pi_star().unwrap();
        assert_eq!(t.var(), Var::ZPrime);
        assert_eq!(t.coeff(1), f4.from_digits(&[1, 1]));
        assert!(ser(2, &[], 4).pi_star().unwrap().is_zero());
    }

    #[test]
    fn pullback_scales_exponents() {
        let t = ser(3, &[2, 2], 2).with_var(Var::ZPrime);
        let s = t.pullback().unwrap();
        assert_eq!(s, ser(3, &[2, 0, 0, 2], 6));
    }
}
