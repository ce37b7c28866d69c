//! Spectral rings `R_b = O[λ]/(χ_b)` over the truncated disk, their
//! extended derivation, Hensel eigen-decomposition of regular-semisimple
//! matrices, and the regular representation `R_b -> gl_n`.
//!
//! Elements are stored as `λ`-polynomials of degree `< n` with series
//! coefficients. When `χ_b'(λ)` is a unit the derivation `∂_z` extends
//! uniquely to `R_b` by `∂λ = -χ_b^{∂}(λ) / χ_b'(λ)`, where `χ_b^{∂}` is
//! `χ_b` with its coefficients differentiated.

use std::sync::Arc;

use crate::algebra::poly::Poly;
use crate::algebra::{Fe, FieldSpec, SeriesMatrix, TruncSeries, Var};
use crate::error::{Error, Result};
use crate::hitchin::{char_invariants, InvariantTuple};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RingData {
    b: InvariantTuple,
    /// Ascending coefficients of the monic `χ_b`.
    chi: Vec<TruncSeries>,
    /// `∂λ` in the cyclic basis, when the derivation extends.
    d_lambda: Option<Vec<TruncSeries>>,
}

/// An element `Σ c_k λ^k` of a spectral ring, `k < n`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SpectralElement {
    ring: SpectralRing,
    coeffs: Vec<TruncSeries>,
}

pub fn build_spectral(b: &InvariantTuple) -> SpectralRing {
    SpectralRing(RingData::new(b))
}

/// Handle to a shared spectral ring, producing its elements.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SpectralRing(Arc<RingData>);

impl std::ops::Deref for SpectralRing {
    type Target = RingData;
    fn deref(&self) -> &RingData {
        &self.0
    }
}

impl SpectralRing {
    pub fn element(&self, coeffs: Vec<TruncSeries>) -> Result<SpectralElement> {
        SpectralElement::new(self.clone(), coeffs)
    }

    pub fn zero(&self) -> SpectralElement {
        self.from_base(&TruncSeries::zero(self.field(), self.var(), self.precision()))
    }

    pub fn one(&self) -> SpectralElement {
        self.from_base(&TruncSeries::one(self.field(), self.var(), self.precision()))
    }

    /// The image of a base series.
    pub fn from_base(&self, s: &TruncSeries) -> SpectralElement {
        let mut coeffs = vec![TruncSeries::zero(s.field(), s.var(), s.precision()); self.rank()];
        coeffs[0] = s.clone();
        SpectralElement { ring: self.clone(), coeffs }
    }

    /// The class of `λ`; for `n = 1` this is `b_1`.
    pub fn lambda(&self) -> SpectralElement {
        let f = self.field();
        let prec = self.precision();
        let x = vec![TruncSeries::zero(f, self.var(), prec), TruncSeries::one(f, self.var(), prec)];
        SpectralElement { ring: self.clone(), coeffs: self.reduce(x) }
    }

    /// The element of degree `< n` taking the value `values[i]` at the root
    /// `mu[i]` of `χ_b`; the roots must have pairwise distinct residues.
    pub fn interpolate(&self, mu: &[TruncSeries], values: &[TruncSeries]) -> Result<SpectralElement> {
        let n = self.rank();
        if mu.len() != n || values.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: mu.len().min(values.len()) });
        }
        let prec = mu.iter().chain(values).map(TruncSeries::precision).min().unwrap_or(0).min(self.precision());
        let (f, var) = (self.field(), self.var());
        let mut acc = vec![TruncSeries::zero(f, var, prec); n];
        for i in 0..n {
            // Π_{j≠i} (λ - μ_j) / (μ_i - μ_j)
            let mut basis = vec![TruncSeries::one(f, var, prec)];
            let mut denom = TruncSeries::one(f, var, prec);
            for j in (0..n).filter(|&j| j != i) {
                let mut next = vec![TruncSeries::zero(f, var, prec); basis.len() + 1];
                for (k, c) in basis.iter().enumerate() {
                    next[k + 1] = next[k + 1].try_add(c)?;
                    next[k] = next[k].try_sub(&c.try_mul(&mu[j])?)?;
                }
                basis = next;
                denom = denom.try_mul(&mu[i].try_sub(&mu[j])?)?;
            }
            let scale = values[i].try_mul(&denom.inv().map_err(|_| Error::RepeatedResidueRoot)?)?;
            for (slot, c) in acc.iter_mut().zip(&basis) {
                *slot = slot.try_add(&c.try_mul(&scale)?)?;
            }
        }
        self.element(acc)
    }
}

fn eval_poly(coeffs: &[TruncSeries], x: &TruncSeries) -> Result<TruncSeries> {
    let mut acc = TruncSeries::zero(x.field(), x.var(), x.precision());
    for c in coeffs.iter().rev() {
        acc = acc.try_mul(x)?.try_add(c)?;
    }
    Ok(acc)
}

impl RingData {
    fn new(b: &InvariantTuple) -> Arc<RingData> {
        let chi = b.char_poly();
        let mut ring = RingData { b: b.clone(), chi, d_lambda: None };
        ring.d_lambda = ring.extend_derivation();
        Arc::new(ring)
    }

    fn extend_derivation(&self) -> Option<Vec<TruncSeries>> {
        let n = self.rank();
        if self.precision() < 2 {
            return None;
        }
        let f = self.field();
        let lambda = self.reduce(vec![TruncSeries::zero(f, self.var(), self.precision()), TruncSeries::one(f, self.var(), self.precision())]);
        let chi_prime: Vec<TruncSeries> = (1..=n).map(|k| self.chi[k].scale(f.from_u64(k as u64))).collect();
        let chi_partial: Vec<TruncSeries> = self.chi.iter().map(|c| c.derive().ok()).collect::<Option<_>>()?;
        let dp = self.eval_at_class(&chi_prime, &lambda).ok()?;
        let dz = self.eval_at_class(&chi_partial, &lambda).ok()?;
        let inv = self.inverse_coords(&dp).ok()?;
        let prod = self.mul_coords(&dz, &inv).ok()?;
        Some(prod.iter().map(TruncSeries::negate).collect())
    }

    pub fn invariants(&self) -> &InvariantTuple {
        &self.b
    }

    pub fn char_poly(&self) -> &[TruncSeries] {
        &self.chi
    }

    pub fn rank(&self) -> usize {
        self.b.rank()
    }

    pub fn field(&self) -> FieldSpec {
        self.b.field()
    }

    pub fn var(&self) -> Var {
        self.b.var()
    }

    pub fn precision(&self) -> usize {
        self.b.precision()
    }

    pub fn has_derivation(&self) -> bool {
        self.d_lambda.is_some()
    }

    /// `∂λ` in the cyclic basis.
    pub fn d_lambda(&self) -> Option<&[TruncSeries]> {
        self.d_lambda.as_deref()
    }

    /// Reduces a `λ`-polynomial modulo `χ_b` to `n` coefficients.
    fn reduce(&self, mut poly: Vec<TruncSeries>) -> Vec<TruncSeries> {
        let n = self.rank();
        let prec = poly.iter().map(TruncSeries::precision).min().unwrap_or(self.precision()).min(self.precision());
        let (f, var) = (self.field(), self.var());
        for c in poly.iter_mut() {
            *c = c.truncate(prec);
        }
        while poly.len() > n {
            let top = poly.pop().expect("nonempty");
            let d = poly.len() - n;
            for k in 0..n {
                poly[d + k] = &poly[d + k] - &(&top * &self.chi[k].truncate(prec));
            }
        }
        poly.resize(n, TruncSeries::zero(f, var, prec));
        poly
    }

    fn mul_coords(&self, a: &[TruncSeries], b: &[TruncSeries]) -> Result<Vec<TruncSeries>> {
        let prec = a.iter().chain(b).map(TruncSeries::precision).min().unwrap_or(0);
        let mut prod = vec![TruncSeries::zero(self.field(), self.var(), prec); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                prod[i + j] = prod[i + j].try_add(&x.try_mul(y)?)?;
            }
        }
        Ok(self.reduce(prod))
    }

    /// `Σ c_k x^k` for a class `x`, by Horner.
    fn eval_at_class(&self, coeffs: &[TruncSeries], x: &[TruncSeries]) -> Result<Vec<TruncSeries>> {
        let prec = coeffs.iter().chain(x).map(TruncSeries::precision).min().unwrap_or(0);
        let mut acc = vec![TruncSeries::zero(self.field(), self.var(), prec); self.rank()];
        for c in coeffs.iter().rev() {
            acc = self.mul_coords(&acc, x)?;
            acc[0] = acc[0].try_add(c)?;
        }
        Ok(acc)
    }

    /// Matrix of multiplication by `a` on `1, λ, ..., λ^{n-1}`.
    fn mult_matrix(&self, a: &[TruncSeries]) -> Result<SeriesMatrix> {
        let n = self.rank();
        let prec = a.iter().map(TruncSeries::precision).min().unwrap_or(0);
        let (f, var) = (self.field(), self.var());
        let mut cols = Vec::with_capacity(n);
        let mut basis = vec![TruncSeries::zero(f, var, prec); n];
        basis[0] = TruncSeries::one(f, var, prec);
        let lambda = self.reduce(vec![TruncSeries::zero(f, var, prec), TruncSeries::one(f, var, prec)]);
        for _ in 0..n {
            cols.push(self.mul_coords(a, &basis)?);
            basis = self.mul_coords(&basis, &lambda)?;
        }
        SeriesMatrix::from_columns(&cols)
    }

    fn inverse_coords(&self, a: &[TruncSeries]) -> Result<Vec<TruncSeries>> {
        let m = self.mult_matrix(a)?;
        let prec = m.precision();
        let mut e0 = vec![TruncSeries::zero(self.field(), self.var(), prec); self.rank()];
        e0[0] = TruncSeries::one(self.field(), self.var(), prec);
        m.solve(&e0).map_err(|e| if e == Error::SingularGauge { Error::NonUnit } else { e })
    }
}

impl SpectralElement {
    pub fn new(ring: SpectralRing, coeffs: Vec<TruncSeries>) -> Result<Self> {
        if coeffs.len() != ring.rank() {
            return Err(Error::DimensionMismatch { expected: ring.rank(), found: coeffs.len() });
        }
        let probe = TruncSeries::zero(ring.field(), ring.var(), 0);
        for c in &coeffs {
            probe.check_compatible(c)?;
        }
        let prec = coeffs.iter().map(TruncSeries::precision).min().unwrap_or(0).min(ring.precision());
        let coeffs = coeffs.iter().map(|c| c.truncate(prec)).collect();
        Ok(SpectralElement { ring, coeffs })
    }

    pub fn ring(&self) -> &SpectralRing {
        &self.ring
    }

    /// Coefficients of `1, λ, ..., λ^{n-1}`.
    pub fn coeffs(&self) -> &[TruncSeries] {
        &self.coeffs
    }

    pub fn precision(&self) -> usize {
        self.coeffs[0].precision()
    }

    pub fn field(&self) -> FieldSpec {
        self.ring.field()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(TruncSeries::is_zero)
    }

    pub fn truncate(&self, precision: usize) -> Self {
        SpectralElement { ring: self.ring.clone(), coeffs: self.coeffs.iter().map(|c| c.truncate(precision)).collect() }
    }

    pub fn eq_within(&self, other: &Self) -> bool {
        self.ring.b.eq_within(&other.ring.b) && self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a.eq_within(b))
    }

    fn same_ring(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.ring.0, &other.ring.0) || self.ring.b.eq_within(&other.ring.b) {
            Ok(())
        } else {
            Err(Error::BaseMismatch)
        }
    }

    fn with(&self, coeffs: Vec<TruncSeries>) -> Self {
        SpectralElement { ring: self.ring.clone(), coeffs }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_ring(other)?;
        let c = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.try_add(b)).collect::<Result<_>>()?;
        Ok(self.with(c))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.same_ring(other)?;
        let c = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.try_sub(b)).collect::<Result<_>>()?;
        Ok(self.with(c))
    }

    pub fn negate(&self) -> Self {
        self.with(self.coeffs.iter().map(TruncSeries::negate).collect())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.same_ring(other)?;
        Ok(self.with(self.ring.mul_coords(&self.coeffs, &other.coeffs)?))
    }

    /// Multiplication by a base series.
    pub fn scale(&self, s: &TruncSeries) -> Result<Self> {
        Ok(self.with(self.coeffs.iter().map(|c| c.try_mul(s)).collect::<Result<_>>()?))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = self.ring.one().truncate(self.precision());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.try_mul(&base).expect("same ring");
            }
            base = base.try_mul(&base).expect("same ring");
            e >>= 1;
        }
        acc
    }

    pub fn is_unit(&self) -> bool {
        self.ring.mult_matrix(&self.coeffs).map(|m| m.det().is_unit()).unwrap_or(false)
    }

    pub fn inv(&self) -> Result<Self> {
        Ok(self.with(self.ring.inverse_coords(&self.coeffs)?))
    }

    /// The extended derivation, at precision one lower.
    pub fn derive(&self) -> Result<Self> {
        let d_lambda = self
            .ring
            .d_lambda
            .as_ref()
            .ok_or_else(|| Error::FrameUnavailable("spectral ring has no derivation: χ' is not a unit".into()))?;
        let mut out: Vec<TruncSeries> = self.coeffs.iter().map(|c| c.derive()).collect::<Result<_>>()?;
        // Σ k c_k λ^{k-1} · ∂λ
        let mut chain: Vec<TruncSeries> = (1..self.coeffs.len())
            .map(|k| self.coeffs[k].scale(self.field().from_u64(k as u64)))
            .collect();
        if chain.is_empty() {
            return Ok(self.with(out));
        }
        chain.push(TruncSeries::zero(self.field(), self.ring.var(), self.precision()));
        let chain = self.ring.reduce(chain);
        let term = self.ring.mul_coords(&chain, d_lambda)?;
        for (slot, t) in out.iter_mut().zip(&term) {
            *slot = slot.try_add(t)?;
        }
        Ok(self.with(out))
    }

    pub fn derive_n(&self, times: usize) -> Result<Self> {
        let mut s = self.clone();
        for _ in 0..times {
            s = s.derive()?;
        }
        Ok(s)
    }

    /// p-curvature of the rank-one `R`-connection `∂ + θ`: `θ^p + ∂^{p-1} θ`.
    pub fn pcurv(&self) -> Result<Self> {
        let p = self.field().p() as usize;
        if self.precision() < p {
            return Err(Error::InsufficientPrecision { required: p, actual: self.precision() });
        }
        self.pow(p as u64).try_add(&self.derive_n(p - 1)?)
    }

    /// The same p-curvature by `p`-fold application of `∂ + θ` to `1`.
    pub fn pcurv_by_application(&self) -> Result<Self> {
        let p = self.field().p() as usize;
        let mut v = self.clone();
        for _ in 1..p {
            v = v.derive()?.try_add(&v.try_mul(self)?)?;
        }
        Ok(v)
    }

    /// `u^{-1} ∂u` for a unit.
    pub fn dlog(&self) -> Result<Self> {
        let inv = self.inv()?;
        inv.try_mul(&self.derive()?)
    }

    /// Image under `R -> O, λ -> μ` for a root `μ` of `χ_b`.
    pub fn evaluate_at(&self, mu: &TruncSeries) -> Result<TruncSeries> {
        eval_poly(&self.coeffs, mu)
    }

    /// Matrix of multiplication on the cyclic basis `1, λ, ..., λ^{n-1}`.
    pub fn cyclic_matrix(&self) -> Result<SeriesMatrix> {
        self.ring.mult_matrix(&self.coeffs)
    }
}

/// Eigenvalues, spectral projectors and eigenbasis of a matrix whose
/// characteristic polynomial has simple, split residue roots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenData {
    mu: Vec<TruncSeries>,
    projectors: Vec<SeriesMatrix>,
    g: SeriesMatrix,
    g_inv: SeriesMatrix,
}

impl EigenData {
    /// Eigenvalues, ordered by the enumeration index of their residues.
    pub fn mu(&self) -> &[TruncSeries] {
        &self.mu
    }

    pub fn projectors(&self) -> &[SeriesMatrix] {
        &self.projectors
    }

    /// Columns are eigenvectors; `g^{-1} Ψ g = diag(μ)`.
    pub fn g(&self) -> &SeriesMatrix {
        &self.g
    }

    pub fn g_inv(&self) -> &SeriesMatrix {
        &self.g_inv
    }

    pub fn rank(&self) -> usize {
        self.mu.len()
    }

    pub fn precision(&self) -> usize {
        self.g.precision()
    }
}

/// Newton lift of a simple residue root of `χ`.
fn newton_lift(chi: &[TruncSeries], root: Fe) -> Result<TruncSeries> {
    let lead = &chi[0];
    let (f, var, prec) = (lead.field(), lead.var(), lead.precision());
    let dchi: Vec<TruncSeries> = (1..chi.len()).map(|k| chi[k].scale(f.from_u64(k as u64))).collect();
    let mut mu = TruncSeries::constant(f, var, root, prec);
    let mut known = 1;
    while known < prec {
        let step = eval_poly(chi, &mu)?.try_mul(&eval_poly(&dchi, &mu)?.inv()?)?;
        mu = mu.try_sub(&step)?;
        known *= 2;
    }
    if !eval_poly(chi, &mu)?.is_zero() {
        return Err(Error::internal("hensel_eigen", "Newton iteration did not converge"));
    }
    Ok(mu)
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// Eigen-decomposition of `psi` with characteristic invariants `bp`.
pub fn hensel_eigen(psi: &SeriesMatrix, bp: &InvariantTuple) -> Result<EigenData> {
    let n = psi.rank();
    if bp.rank() != n {
        return Err(Error::DimensionMismatch { expected: n, found: bp.rank() });
    }
    if !char_invariants(psi)?.with_twist_weight(bp.twist_weight()).eq_within(bp) {
        return Err(Error::BaseMismatch);
    }
    let prec = psi.precision().min(bp.precision());
    let f = psi.field();
    let chi: Vec<TruncSeries> = bp.truncate(prec).char_poly();
    let residue = Poly::new(f, chi.iter().map(TruncSeries::residue).collect());
    if !residue.is_squarefree() {
        return Err(Error::RepeatedResidueRoot);
    }
    let roots = residue.roots();
    if roots.len() < n {
        let degrees = residue.factor_degrees();
        let ext = degrees.iter().copied().fold(1, lcm);
        return Err(Error::NonSplitResidue { factor_degrees: degrees, suggested_ext_degree: ext * f.ext_degree() });
    }
    let mu = roots.iter().map(|&r| newton_lift(&chi, r)).collect::<Result<Vec<_>>>()?;
    let psi = psi.truncate(prec);
    let id = SeriesMatrix::identity(n, f, psi.var(), prec);

    let mut projectors = Vec::with_capacity(n);
    for i in 0..n {
        let mut p_i = id.clone();
        for j in (0..n).filter(|&j| j != i) {
            let shifted = psi.try_sub(&id.scale(&mu[j])?)?;
            let denom = mu[i].try_sub(&mu[j])?.inv()?;
            p_i = p_i.try_mul(&shifted)?.scale(&denom)?;
        }
        projectors.push(p_i);
    }

    let mut sum = SeriesMatrix::zero(n, f, psi.var(), prec);
    let mut weighted = sum.clone();
    for (i, p_i) in projectors.iter().enumerate() {
        sum = sum.try_add(p_i)?;
        weighted = weighted.try_add(&p_i.scale(&mu[i])?)?;
        for (j, p_j) in projectors.iter().enumerate() {
            let prod = p_i.try_mul(p_j)?;
            let ok = if i == j { prod == *p_i } else { prod.is_zero() };
            if !ok {
                return Err(Error::internal("hensel_eigen", format!("projectors {i} and {j} are not orthogonal idempotents")));
            }
        }
    }
    if sum != id || weighted != psi {
        return Err(Error::internal("hensel_eigen", "spectral decomposition does not reassemble Ψ"));
    }

    let columns = projectors
        .iter()
        .map(|p_i| {
            (0..n)
                .map(|k| p_i.column(k))
                .find(|col| col.iter().any(TruncSeries::is_unit))
                .ok_or_else(|| Error::internal("hensel_eigen", "projector has no unit column"))
        })
        .collect::<Result<Vec<_>>>()?;
    let g = SeriesMatrix::from_columns(&columns)?;
    let g_inv = g.inverse().map_err(|_| Error::internal("hensel_eigen", "eigenbasis is not a basis"))?;
    if g_inv.try_mul(&psi)?.try_mul(&g)? != SeriesMatrix::diagonal(&mu)? {
        return Err(Error::internal("hensel_eigen", "eigenbasis does not diagonalize Ψ"));
    }
    Ok(EigenData { mu, projectors, g, g_inv })
}

/// Where to realize an element of `R_b` as a matrix.
#[derive(Clone, Copy, Debug)]
pub enum Frame<'a> {
    /// The basis `1, λ, ..., λ^{n-1}`.
    Cyclic,
    /// The basis of eigenvectors of a matrix with invariants `b`.
    Eigen(&'a EigenData),
}

/// The embedding `R_b -> gl_n` as multiplication by `s` in the given frame.
pub fn regular_rep(s: &SpectralElement, frame: Frame<'_>) -> Result<SeriesMatrix> {
    match frame {
        Frame::Cyclic => s.cyclic_matrix(),
        Frame::Eigen(data) => {
            if data.rank() != s.ring.rank() {
                return Err(Error::FrameUnavailable(format!(
                    "eigen frame of rank {} for an element of rank {}",
                    data.rank(),
                    s.ring.rank()
                )));
            }
            let values = data.mu.iter().map(|m| s.evaluate_at(m)).collect::<Result<Vec<_>>>()?;
            data.g.try_mul(&SeriesMatrix::diagonal(&values)?)?.try_mul(&data.g_inv)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> FieldSpec {
        FieldSpec::prime(p).unwrap()
    }

    fn ser(p: u64, c: &[i64], n: usize) -> TruncSeries {
        TruncSeries::from_ints(f(p), Var::Z, c, n)
    }

    fn tuple(p: u64, entries: &[&[i64]], n: usize) -> InvariantTuple {
        InvariantTuple::new(entries.iter().map(|c| ser(p, c, n)).collect(), 1).unwrap()
    }

    #[test]
    fn rank_one_ring() {
        let r = build_spectral(&tuple(5, &[&[1, 2, 3]], 6));
        assert_eq!(r.lambda().coeffs(), &[ser(5, &[1, 2, 3], 6)]);
        assert_eq!(r.d_lambda().unwrap(), &[ser(5, &[2, 6], 5)]);
        assert_eq!(r.lambda().derive().unwrap().coeffs(), &[ser(5, &[2, 6], 5)]);
    }

    #[test]
    fn artin_schreier_ring() {
        // χ = λ^2 + λ + z^2 over F_2
        let r = build_spectral(&tuple(2, &[&[1], &[0, 0, 1]], 8));
        assert!(r.has_derivation());
        assert!(r.d_lambda().unwrap().iter().all(TruncSeries::is_zero));
        let l = r.lambda();
        let sq = l.try_mul(&l).unwrap();
        assert_eq!(sq.coeffs(), &[ser(2, &[0, 0, 1], 8), ser(2, &[1], 8)]);
    }

    #[test]
    fn inseparable_ring_has_no_derivation() {
        let r = build_spectral(&tuple(2, &[&[0], &[0, 0, 1]], 8));
        assert!(!r.has_derivation());
        assert!(r.lambda().derive().is_err());
    }

    #[test]
    fn derivation_satisfies_leibniz_and_kills_chi() {
        // χ = λ^2 - (1+z) λ + 2z over F_5, residue roots 0, 1
        let r = build_spectral(&tuple(5, &[&[1, 1], &[0, 2]], 10));
        let l = r.lambda();
        let a = r.element(vec![ser(5, &[1, 3, 0, 4], 10), ser(5, &[0, 1, 1], 10)]).unwrap();
        let b = r.element(vec![ser(5, &[2, 0, 1], 10), ser(5, &[3, 0, 0, 2], 10)]).unwrap();
        let lhs = a.try_mul(&b).unwrap().derive().unwrap();
        let rhs = a.derive().unwrap().try_mul(&b).unwrap().try_add(&a.try_mul(&b.derive().unwrap()).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
        let inv = a.inv().unwrap();
        assert_eq!(inv.try_mul(&a).unwrap(), r.one());
        // ∂ commutes with the ring structure: ∂(λ^2) = 2 λ ∂λ
        let d2 = l.try_mul(&l).unwrap().derive().unwrap();
        let two = r.from_base(&ser(5, &[2], 10));
        assert_eq!(d2, two.try_mul(&l).unwrap().try_mul(&l.derive().unwrap()).unwrap());
        assert_eq!(a.pcurv().unwrap(), a.pcurv_by_application().unwrap());
    }

    #[test]
    fn hensel_diagonal() {
        let psi = SeriesMatrix::diagonal(&[ser(5, &[3], 6), ser(5, &[1], 6)]).unwrap();
        let bp = char_invariants(&psi).unwrap();
        let e = hensel_eigen(&psi, &bp).unwrap();
        assert_eq!(e.mu(), &[ser(5, &[1], 6), ser(5, &[3], 6)]);
        let swap = SeriesMatrix::from_rows(vec![vec![ser(5, &[0], 6), ser(5, &[1], 6)], vec![ser(5, &[1], 6), ser(5, &[0], 6)]]).unwrap();
        assert_eq!(e.g(), &swap);
        assert_eq!(e.projectors()[0], SeriesMatrix::diagonal(&[ser(5, &[0], 6), ser(5, &[1], 6)]).unwrap());
    }

    #[test]
    fn hensel_artin_schreier() {
        let bp = tuple(2, &[&[1], &[0, 0, 1]], 12);
        let psi = crate::hitchin::companion_section(&bp).unwrap();
        let e = hensel_eigen(&psi, &bp).unwrap();
        // μ^2 + μ = z^2: μ_1 = z^2 + z^4 + z^8
        assert_eq!(e.mu()[0], ser(2, &[0, 0, 1, 0, 1, 0, 0, 0, 1], 12));
        assert_eq!(e.mu()[1], ser(2, &[1, 0, 1, 0, 1, 0, 0, 0, 1], 12));
        let rep = regular_rep(&build_spectral(&bp).lambda(), Frame::Eigen(&e)).unwrap();
        assert_eq!(char_invariants(&rep).unwrap(), bp);
        assert_eq!(rep, psi);
    }

    #[test]
    fn hensel_refusals() {
        let bp = tuple(2, &[&[0], &[0, 0, 1]], 8);
        let psi = crate::hitchin::companion_section(&bp).unwrap();
        assert_eq!(hensel_eigen(&psi, &bp), Err(Error::RepeatedResidueRoot));
        // λ^2 + λ + 1 is irreducible over F_2
        let bp = tuple(2, &[&[1], &[1]], 8);
        let psi = crate::hitchin::companion_section(&bp).unwrap();
        assert_eq!(hensel_eigen(&psi, &bp), Err(Error::NonSplitResidue { factor_degrees: vec![2], suggested_ext_degree: 2 }));
        let other = tuple(2, &[&[1], &[0, 1]], 8);
        assert_eq!(hensel_eigen(&psi, &other), Err(Error::BaseMismatch));
    }

    #[test]
    fn regular_rep_examples() {
        let bp = tuple(3, &[&[1, 1], &[2], &[0, 1]], 6);
        let r = build_spectral(&bp);
        assert_eq!(regular_rep(&r.lambda(), Frame::Cyclic).unwrap(), crate::hitchin::companion_section(&bp).unwrap());
        assert_eq!(regular_rep(&r.one(), Frame::Cyclic).unwrap(), SeriesMatrix::identity(3, f(3), Var::Z, 6));
        let s = r.element(vec![ser(3, &[1, 2], 6), ser(3, &[0, 1], 6), ser(3, &[2], 6)]).unwrap();
        let t = r.element(vec![ser(3, &[0, 0, 1], 6), ser(3, &[1], 6), ser(3, &[1, 1], 6)]).unwrap();
        let st = regular_rep(&s.try_mul(&t).unwrap(), Frame::Cyclic).unwrap();
        assert_eq!(st, regular_rep(&s, Frame::Cyclic).unwrap().try_mul(&regular_rep(&t, Frame::Cyclic).unwrap()).unwrap());
    }

    #[test]
    fn interpolation_hits_values() {
        let dp = SeriesMatrix::diagonal(&[ser(7, &[1, 1], 6), ser(7, &[2], 6), ser(7, &[5, 0, 3], 6)]).unwrap();
        let bp = char_invariants(&dp).unwrap();
        let e = hensel_eigen(&dp, &bp).unwrap();
        let values = [ser(7, &[0, 1], 6), ser(7, &[3], 6), ser(7, &[1, 2, 3], 6)];
        let r = build_spectral(&bp);
        let theta = r.interpolate(e.mu(), &values).unwrap();
        for (m, v) in e.mu().iter().zip(&values) {
            assert_eq!(&theta.evaluate_at(m).unwrap(), v);
        }
    }
}
