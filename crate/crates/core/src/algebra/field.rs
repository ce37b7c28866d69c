//! Finite fields `F_{p^k}` with `k <= 8`, presented as `F_p[x]/(m(x))` for a
//! user-supplied monic irreducible `m`.
//!
//! Elements are stored as fixed-size digit arrays in the basis
//! `1, x, ..., x^{k-1}`, so they are `Copy` and never allocate. The field
//! description itself is a small `Copy` value carried by every series.

use std::fmt;

use crate::algebra::poly::Poly;
use crate::error::{Error, Result};

/// Largest supported extension degree.
pub const MAX_EXT_DEGREE: usize = 8;

/// An element of `F_{p^k}`: digits `a_0 + a_1 x + ... + a_{k-1} x^{k-1}`.
///
/// Digits at positions `>= k` are always zero, so derived equality is field
/// equality.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Fe(pub(crate) [u32; MAX_EXT_DEGREE]);

impl Fe {
    pub const ZERO: Fe = Fe([0; MAX_EXT_DEGREE]);

    pub fn digits(&self) -> &[u32; MAX_EXT_DEGREE] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&d| d == 0)
    }
}

impl fmt::Debug for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.0.iter().rposition(|&d| d != 0).unwrap_or(0);
        write!(f, "Fe{:?}", &self.0[..=last])
    }
}

/// `F_{p^k}` given by a prime `p` and a monic modulus of degree `k`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    p: u32,
    k: usize,
    /// Low coefficients `m_0..m_{k-1}` of the monic modulus.
    modulus: [u32; MAX_EXT_DEGREE],
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k == 1 {
            write!(f, "F_{}", self.p)
        } else {
            write!(f, "F_{}^{}[{:?}]", self.p, self.k, self.modulus_coefficients())
        }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldSpec {
    /// The prime field `F_p`.
    pub fn prime(p: u64) -> Result<Self> {
        if p > u32::MAX as u64 || !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not a supported prime")));
        }
        Ok(Self::prime_unchecked(p as u32))
    }

    pub(crate) fn prime_unchecked(p: u32) -> Self {
        FieldSpec { p, k: 1, modulus: [0; MAX_EXT_DEGREE] }
    }

    /// `F_p[x]/(m)` where `modulus` lists `m_0, ..., m_k` in ascending order
    /// and `m_k = 1`. The modulus is checked for irreducibility.
    pub fn extension(p: u64, modulus: &[u64]) -> Result<Self> {
        let base = Self::prime(p)?;
        if modulus.len() < 2 {
            return Err(Error::InvalidField("modulus must have degree at least 1".into()));
        }
        let k = modulus.len() - 1;
        if k > MAX_EXT_DEGREE {
            return Err(Error::InvalidField(format!(
                "extension degree {k} exceeds the supported maximum {MAX_EXT_DEGREE}"
            )));
        }
        if modulus[k] != 1 {
            return Err(Error::InvalidField("modulus must be monic".into()));
        }
        if let Some(&c) = modulus.iter().find(|&&c| c >= p) {
            return Err(Error::InvalidField(format!("modulus coefficient {c} is not reduced mod {p}")));
        }
        if k == 1 {
            return Ok(base);
        }
        let poly = Poly::new(base, modulus.iter().map(|&c| base.from_u64(c)).collect());
        if !poly.is_irreducible() {
            return Err(Error::InvalidField(format!("modulus {modulus:?} is reducible over F_{p}")));
        }
        let mut m = [0u32; MAX_EXT_DEGREE];
        for (slot, &c) in m.iter_mut().zip(modulus) {
            *slot = c as u32;
        }
        Ok(FieldSpec { p: p as u32, k, modulus: m })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn ext_degree(&self) -> usize {
        self.k
    }

    /// Full monic modulus `m_0..m_k`, or `None` for a prime field.
    pub fn modulus_coefficients(&self) -> Option<Vec<u64>> {
        if self.k == 1 {
            return None;
        }
        let mut v: Vec<u64> = self.modulus[..self.k].iter().map(|&c| c as u64).collect();
        v.push(1);
        Some(v)
    }

    /// Field order `p^k`.
    pub fn order(&self) -> u128 {
        (self.p as u128).pow(self.k as u32)
    }

    pub fn zero(&self) -> Fe {
        Fe::ZERO
    }

    pub fn one(&self) -> Fe {
        let mut d = [0; MAX_EXT_DEGREE];
        d[0] = 1;
        Fe(d)
    }

    /// Image of an integer in the prime subfield.
    pub fn from_u64(&self, n: u64) -> Fe {
        let mut d = [0; MAX_EXT_DEGREE];
        d[0] = (n % self.p as u64) as u32;
        Fe(d)
    }

    pub fn from_i64(&self, n: i64) -> Fe {
        let p = self.p as i64;
        self.from_u64(n.rem_euclid(p) as u64)
    }

    /// Element with the given modulus-basis digits; `None` if a digit is
    /// out of range or too many digits are given.
    pub fn from_digits(&self, digits: &[u64]) -> Option<Fe> {
        if digits.len() > self.k {
            return None;
        }
        let mut d = [0; MAX_EXT_DEGREE];
        for (slot, &c) in d.iter_mut().zip(digits) {
            if c >= self.p as u64 {
                return None;
            }
            *slot = c as u32;
        }
        Some(Fe(d))
    }

    /// Enumeration index `a_0 + a_1 p + ... + a_{k-1} p^{k-1}`.
    pub fn index(&self, a: Fe) -> u128 {
        a.0[..self.k]
            .iter()
            .rev()
            .fold(0u128, |acc, &d| acc * self.p as u128 + d as u128)
    }

    /// Inverse of [`FieldSpec::index`].
    pub fn from_index(&self, mut idx: u128) -> Fe {
        let mut d = [0; MAX_EXT_DEGREE];
        for slot in d.iter_mut().take(self.k) {
            *slot = (idx % self.p as u128) as u32;
            idx /= self.p as u128;
        }
        Fe(d)
    }

    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        let p = self.p as u64;
        let mut d = [0; MAX_EXT_DEGREE];
        for i in 0..self.k {
            d[i] = ((a.0[i] as u64 + b.0[i] as u64) % p) as u32;
        }
        Fe(d)
    }

    pub fn neg(&self, a: Fe) -> Fe {
        let mut d = [0; MAX_EXT_DEGREE];
        for i in 0..self.k {
            if a.0[i] != 0 {
                d[i] = self.p - a.0[i];
            }
        }
        Fe(d)
    }

    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        let p = self.p as u64;
        if self.k == 1 {
            let mut d = [0; MAX_EXT_DEGREE];
            d[0] = ((a.0[0] as u64 * b.0[0] as u64) % p) as u32;
            return Fe(d);
        }
        let k = self.k;
        let mut t = [0u64; 2 * MAX_EXT_DEGREE - 1];
        for i in 0..k {
            if a.0[i] == 0 {
                continue;
            }
            for j in 0..k {
                t[i + j] = (t[i + j] + a.0[i] as u64 * b.0[j] as u64) % p;
            }
        }
        // x^k = -(m_0 + ... + m_{k-1} x^{k-1})
        for deg in (k..2 * k - 1).rev() {
            let c = t[deg];
            if c == 0 {
                continue;
            }
            t[deg] = 0;
            for i in 0..k {
                let m = self.modulus[i] as u64;
                t[deg - k + i] = (t[deg - k + i] + (p - m) % p * c) % p;
            }
        }
        let mut d = [0; MAX_EXT_DEGREE];
        for i in 0..k {
            d[i] = t[i] as u32;
        }
        Fe(d)
    }

    /// Multiplication by an integer.
    pub fn scale(&self, a: Fe, n: u64) -> Fe {
        self.mul(a, self.from_u64(n))
    }

    pub fn pow(&self, a: Fe, mut e: u128) -> Fe {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Fe) -> Option<Fe> {
        if a.is_zero() {
            return None;
        }
        if self.k == 1 {
            // extended Euclid on u64
            let (mut r0, mut r1) = (self.p as i64, a.0[0] as i64);
            let (mut s0, mut s1) = (0i64, 1i64);
            while r1 != 0 {
                let q = r0 / r1;
                (r0, r1) = (r1, r0 - q * r1);
                (s0, s1) = (s1, s0 - q * s1);
            }
            return Some(self.from_i64(s0));
        }
        Some(self.pow(a, self.order() - 2))
    }

    /// Absolute Frobenius `a -> a^p`.
    pub fn frobenius(&self, a: Fe) -> Fe {
        if self.k == 1 {
            return a;
        }
        self.pow(a, self.p as u128)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f4() -> FieldSpec {
        FieldSpec::extension(2, &[1, 1, 1]).unwrap()
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = FieldSpec::prime(7).unwrap();
        let a = f.from_u64(3);
        let b = f.from_u64(5);
        assert_eq!(f.add(a, b), f.from_u64(1));
        assert_eq!(f.mul(a, b), f.from_u64(1));
        assert_eq!(f.inv(a), Some(b));
        assert_eq!(f.sub(a, b), f.from_u64(5));
        assert_eq!(f.inv(f.zero()), None);
    }

    #[test]
    fn rejects_composites_and_reducible_moduli() {
        assert!(FieldSpec::prime(1).is_err());
        assert!(FieldSpec::prime(9).is_err());
        // x^2 + 1 = (x + 1)^2 over F_2
        assert!(FieldSpec::extension(2, &[1, 0, 1]).is_err());
        // x^2 + 1 is irreducible over F_3
        assert!(FieldSpec::extension(3, &[1, 0, 1]).is_ok());
        assert!(FieldSpec::extension(2, &[1, 1, 0]).is_err());
    }

    #[test]
    fn f4_multiplication_table() {
        let f = f4();
        let alpha = f.from_digits(&[0, 1]).unwrap();
        let alpha_sq = f.mul(alpha, alpha);
        assert_eq!(alpha_sq, f.from_digits(&[1, 1]).unwrap());
        assert_eq!(f.frobenius(alpha), alpha_sq);
        assert_eq!(f.mul(alpha, alpha_sq), f.one());
        assert_eq!(f.inv(alpha), Some(alpha_sq));
    }

    #[test]
    fn frobenius_has_order_k() {
        let f =FieldSpec::extension(3, &[1, 2, 0, 1]).unwrap(); // x^3 + 2x + 1
        for idx in 0..f.order() {
            let a = f.from_index(idx);
            let mut b = a;
            for _ in 0..f.ext_degree() {
                b = f.frobenius(b);
            }
            assert_eq!(a, b);
            assert_eq!(f.index(a), idx);
        }
    }

    #[test]
    fn inverses_in_extension() {
        let f = FieldSpec::extension(5, &[2, 0, 1]).unwrap(); // x^2 + 2 irreducible mod 5
        for idx in 1..f.order() {
            let a = f.from_index(idx);
            let inv = f.inv(a).unwrap();
            assert_eq!(f.mul(a, inv), f.one());
        }
    }
}
