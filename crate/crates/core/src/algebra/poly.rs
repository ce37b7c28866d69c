//! Dense univariate polynomials over a finite field.
//!
//! Used for the modulus irreducibility test and for residue-level root
//! finding in the spectral module. Coefficients are ascending and trailing
//! zeros are trimmed, so the zero polynomial has no coefficients.

use crate::algebra::field::{Fe, FieldSpec};
use crate::rng::SplitMix64;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly {
    field: FieldSpec,
    coeffs: Vec<Fe>,
}

impl Poly {
    pub fn new(field: FieldSpec, mut coeffs: Vec<Fe>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { field, coeffs }
    }

    pub fn zero(field: FieldSpec) -> Self {
        Poly { field, coeffs: Vec::new() }
    }

    pub fn constant(field: FieldSpec, c: Fe) -> Self {
        Poly::new(field, vec![c])
    }

    /// The polynomial `x`.
    pub fn x(field: FieldSpec) -> Self {
        Poly::new(field, vec![field.zero(), field.one()])
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Fe {
        self.coeffs.last().copied().unwrap_or(Fe::ZERO)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let f = self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(Fe::ZERO);
                let b = other.coeffs.get(i).copied().unwrap_or(Fe::ZERO);
                f.add(a, b)
            })
            .collect();
        Poly::new(f, c)
    }

    pub fn neg(&self) -> Poly {
        let f = self.field;
        Poly::new(f, self.coeffs.iter().map(|&c| f.neg(c)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let f = self.field;
        if self.is_zero() || other.is_zero() {
            return Poly::zero(f);
        }
        let mut c = vec![Fe::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                c[i + j] = f.add(c[i + j], f.mul(a, b));
            }
        }
        Poly::new(f, c)
    }

    pub fn scale(&self, s: Fe) -> Poly {
        let f = self.field;
        Poly::new(f, self.coeffs.iter().map(|&c| f.mul(c, s)).collect())
    }

    pub fn monic(&self) -> Poly {
        match self.field.inv(self.lead()) {
            Some(inv) => self.scale(inv),
            None => self.clone(),
        }
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let f = self.field;
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead_inv = f.inv(divisor.lead()).expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(f), self.clone());
        }
        let mut quot = vec![Fe::ZERO; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = f.mul(rem[i], lead_inv);
            if c.is_zero() {
                continue;
            }
            quot[i - dd] = c;
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[i - dd + j] = f.sub(rem[i - dd + j], f.mul(c, d));
            }
        }
        rem.truncate(dd);
        (Poly::new(f, quot), Poly::new(f, rem))
    }

    pub fn rem(&self, divisor: &Poly) -> Poly {
        self.div_rem(divisor).1
    }

    /// Monic gcd (zero if both inputs are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `self^e mod modulus`.
    pub fn pow_mod(&self, mut e: u128, modulus: &Poly) -> Poly {
        let f = self.field;
        let mut base = self.rem(modulus);
        let mut acc = Poly::constant(f, f.one()).rem(modulus);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(modulus);
            }
            base = base.mul(&base).rem(modulus);
            e >>= 1;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        let f = self.field;
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| f.scale(c, i as u64))
            .collect();
        Poly::new(f, c)
    }

    pub fn eval(&self, x: Fe) -> Fe {
        let f = self.field;
        self.coeffs.iter().rev().fold(Fe::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn is_squarefree(&self) -> bool {
        match self.degree() {
            None => false,
            Some(0) => true,
            Some(_) => self.gcd(&self.derivative()).degree() == Some(0),
        }
    }

    /// `x^{q^j} mod self` for `q` the field order.
    fn frobenius_power_of_x(&self, j: usize) -> Poly {
        let q = self.field.order();
        let mut h = Poly::x(self.field).rem(self);
        for _ in 0..j {
            h = h.pow_mod(q, self);
        }
        h
    }

    /// Rabin's irreducibility test.
    pub fn is_irreducible(&self) -> bool {
        let k = match self.degree() {
            None | Some(0) => return false,
            Some(1) => return true,
            Some(k) => k,
        };
        let x = Poly::x(self.field);
        if self.frobenius_power_of_x(k).sub(&x).rem(self) != Poly::zero(self.field) {
            return false;
        }
        prime_divisors(k).into_iter().all(|r| {
            let h = self.frobenius_power_of_x(k / r).sub(&x);
            self.gcd(&h).degree() == Some(0)
        })
    }

    /// Degrees of the irreducible factors of a squarefree polynomial, with
    /// multiplicity, in ascending order.
    pub fn factor_degrees(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut rest = self.monic();
        let x = Poly::x(self.field);
        let q = self.field.order();
        let mut h = x.clone();
        let mut d = 0;
        while let Some(deg) = rest.degree() {
            if deg == 0 {
                break;
            }
            d += 1;
            if deg < 2 * d {
                out.push(deg);
                break;
            }
            h = h.pow_mod(q, &rest);
            let g = rest.gcd(&h.sub(&x));
            if let Some(gd) = g.degree().filter(|&gd| gd > 0) {
                out.extend(std::iter::repeat_n(d, gd / d));
                rest = rest.div_rem(&g).0;
                h = h.rem(&rest);
            }
        }
        out
    }

    /// Roots in the base field of a polynomial, without multiplicity,
    /// sorted by enumeration index.
    pub fn roots(&self) -> Vec<Fe> {
        let f = self.field;
        if self.degree().is_none_or(|d| d == 0) {
            return Vec::new();
        }
        let x = Poly::x(f);
        let split = self.monic().gcd(&x.pow_mod(f.order(), self).sub(&x));
        let mut rng = SplitMix64::new(0x05EE_D0FF_1E1D);
        let mut roots = Vec::new();
        split_linear(&split, &mut rng, &mut roots);
        roots.sort_by_key(|&r| f.index(r));
        roots
    }
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Equal-degree splitting of a monic squarefree product of distinct linear
/// factors.
fn split_linear(g: &Poly, rng: &mut SplitMix64, out: &mut Vec<Fe>) {
    let f = g.field();
    match g.degree() {
        None | Some(0) => return,
        Some(1) => {
            out.push(f.neg(g.coeffs()[0]));
            return;
        }
        _ => {}
    }
    let q = f.order();
    loop {
        let a = f.from_index(rng.below_u128(q));
        let b = f.from_index(rng.below_u128(q));
        let r = Poly::new(f, vec![b, a]);
        let candidate = if f.p() == 2 {
            // absolute trace to F_2: r + r^2 + ... + r^{2^{k-1}}
            let mut t = r.rem(g);
            let mut acc = t.clone();
            for _ in 1..f.ext_degree() {
                t = t.mul(&t).rem(g);
                acc = acc.add(&t);
            }
            acc
        } else {
            r.pow_mod((q - 1) / 2, g).sub(&Poly::constant(f, f.one()))
        };
        let h = g.gcd(&candidate);
        if let Some(hd) = h.degree() {
            if hd > 0 && hd < g.degree().unwrap() {
                let other = g.div_rem(&h).0.monic();
                split_linear(&h, rng, out);
                split_linear(&other, rng, out);
                return;
            }
        }
    }
}
