//! Harmonic data and the correspondence between flat connections and Higgs
//! fields on the chart, for rank one and for split regular-semisimple
//! p-curvature.
//!
//! A harmonic datum over `b'` is an element `θ` of the spectral ring
//! `R = R_{b^p}`, `b^p = F^p(b')`, whose rank-one p-curvature
//! `θ^p + ∂^{p-1} θ` equals the tautological element `λ`. Given a
//! connection `∇` with `h_p(∇) = b'`, the embedding `a: R -> gl_n`,
//! `λ -> Ψ(∇)`, turns `∇ - a(θ)` into a connection with zero p-curvature
//! commuting with `Ψ(∇)`. Conversely `θ` and a Higgs field `φ'` give the
//! connection `∂ + a_{F*φ'}(θ)`.

use crate::algebra::{SeriesMatrix, TruncSeries, Var};
use crate::cartier::{flat_sections, solve_hp, TwistOneForm};
use crate::connection::{gauge, pcurv, Connection};
use crate::error::{Error, Result};
use crate::hitchin::{char_invariants, descend_invariants, frobenius_base_pullback, phitchin, InvariantTuple};
use crate::spectral::{build_spectral, hensel_eigen, regular_rep, EigenData, Frame, SpectralElement, SpectralRing};

/// Which frame a harmonic datum was produced in.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FrameKind {
    Rank1,
    Cyclic,
    Eigen,
}

impl FrameKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            FrameKind::Rank1 => "rank1",
            FrameKind::Cyclic => "cyclic",
            FrameKind::Eigen => "eigen",
        }
    }

    pub fn parse(s: &str) -> Option<FrameKind> {
        match s {
            "rank1" => Some(FrameKind::Rank1),
            "cyclic" => Some(FrameKind::Cyclic),
            "eigen" => Some(FrameKind::Eigen),
            _ => None,
        }
    }
}

/// `θ ∈ R_{b^p}` with p-curvature `λ` (or `-λ` for an inverse datum).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HarmonicDatum {
    b_prime: InvariantTuple,
    theta: SpectralElement,
    frame: FrameKind,
    inverse: bool,
}

/// A Higgs field `φ' ⊗ dz'` on the trivial bundle over the twist.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Higgs {
    phi: SeriesMatrix,
}

impl Higgs {
    pub fn new(phi: SeriesMatrix) -> Result<Self> {
        if phi.var() != Var::ZPrime {
            return Err(Error::VarMismatch { left: phi.var(), right: Var::ZPrime });
        }
        Ok(Higgs { phi })
    }

    pub fn phi(&self) -> &SeriesMatrix {
        &self.phi
    }

    pub fn rank(&self) -> usize {
        self.phi.rank()
    }

    pub fn precision(&self) -> usize {
        self.phi.precision()
    }

    pub fn invariants(&self) -> Result<InvariantTuple> {
        char_invariants(&self.phi)
    }
}

/// Spectral ring over `F^p(b')`, cut to the given precision.
fn ring_over(b_prime: &InvariantTuple, precision: usize) -> Result<SpectralRing> {
    let bp = frobenius_base_pullback(b_prime)?;
    Ok(build_spectral(&bp.truncate(precision.min(bp.precision()))))
}

impl HarmonicDatum {
    /// Checks that `θ` lives over `F^p(b')` and that its p-curvature is
    /// `±λ`, and that `a(θ)` commutes with `a(λ)` in the cyclic frame.
    pub fn new(b_prime: InvariantTuple, theta: SpectralElement, frame: FrameKind, inverse: bool) -> Result<Self> {
        if b_prime.var() != Var::ZPrime {
            return Err(Error::VarMismatch { left: b_prime.var(), right: Var::ZPrime });
        }
        let bp = frobenius_base_pullback(&b_prime)?;
        if !theta.ring().invariants().eq_within(&bp.with_twist_weight(theta.ring().invariants().twist_weight())) {
            return Err(Error::BaseMismatch);
        }
        let curvature = theta.pcurv()?;
        let lambda = theta.ring().lambda();
        let expected = if inverse { lambda.negate() } else { lambda };
        if !curvature.eq_within(&expected) {
            let residual = curvature.try_sub(&expected.truncate(curvature.precision()))?;
            return Err(Error::CurvatureNonzero {
                residual: residual.coeffs().iter().map(crate::algebra::text::format_series).collect::<Vec<_>>().join(", "),
            });
        }
        let a_theta = regular_rep(&theta, Frame::Cyclic)?;
        let a_lambda = regular_rep(&theta.ring().lambda(), Frame::Cyclic)?;
        if !a_lambda.commutator(&a_theta)?.is_zero() {
            return Err(Error::internal("harmonic datum", "a(θ) does not commute with a(λ)"));
        }
        Ok(HarmonicDatum { b_prime, theta, frame, inverse })
    }

    pub fn b_prime(&self) -> &InvariantTuple {
        &self.b_prime
    }

    pub fn theta(&self) -> &SpectralElement {
        &self.theta
    }

    pub fn frame(&self) -> FrameKind {
        self.frame
    }

    /// True for a datum with p-curvature `-λ`.
    pub fn is_inverse(&self) -> bool {
        self.inverse
    }

    pub fn rank(&self) -> usize {
        self.b_prime.rank()
    }
}

/// The datum with element `-θ` and p-curvature `-λ`. Since the rank-one
/// p-curvature is additive, this is the solution of the inverse equation.
pub fn inverse(h: &HarmonicDatum) -> HarmonicDatum {
    HarmonicDatum { b_prime: h.b_prime.clone(), theta: h.theta.negate(), frame: h.frame, inverse: !h.inverse }
}

/// Output of [`solve_harmonic`]: both sides of the correspondence and the
/// gauge linking them, `gauge(g^{-1}, ∇) = cmap(harmonic, higgs)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrespondencePackage {
    pub connection: Connection,
    pub higgs: Higgs,
    pub harmonic: HarmonicDatum,
    pub gauge: SeriesMatrix,
}

/// The embedding `a_M: R -> gl_n`, `λ -> M`, for `M` with characteristic
/// invariants those of `R` and simple split residue roots.
fn embed(theta: &SpectralElement, m: &SeriesMatrix) -> Result<(SeriesMatrix, Option<EigenData>)> {
    if m.rank() == 1 {
        let c = theta.coeffs()[0].clone();
        return Ok((SeriesMatrix::from_rows(vec![vec![c]])?, None));
    }
    let eigen = hensel_eigen(m, theta.ring().invariants())?;
    Ok((regular_rep(theta, Frame::Eigen(&eigen))?, Some(eigen)))
}

/// Solves `Ψ(∇ - a(θ)) = 0`, `[Ψ(∇), a(θ)] = 0` for `θ ∈ R_{b^p}`.
///
/// In rank one `θ = A`. Otherwise the connection is moved to the eigen
/// frame of `Ψ(∇)`, where it is diagonal, and `θ` is the element of `R`
/// taking the diagonal entry `a_i` at the eigenvalue `μ_i`.
pub fn solve_harmonic(nabla: &Connection) -> Result<CorrespondencePackage> {
    let p = nabla.p() as usize;
    if nabla.precision() < 2 * p + 2 {
        return Err(Error::InsufficientPrecision { required: 2 * p + 2, actual: nabla.precision() });
    }
    let n = nabla.rank();
    let psi = pcurv(nabla)?.into_psi();
    let b_prime = phitchin(nabla)?;
    let ring = ring_over(&b_prime, psi.precision())?;
    let (theta, higgs, g, frame) = if n == 1 {
        let theta = ring.element(vec![nabla.matrix().get(0, 0).clone()])?;
        let phi = SeriesMatrix::from_rows(vec![vec![b_prime.b(1).clone()]])?;
        let g = SeriesMatrix::identity(1, nabla.field(), Var::Z, nabla.precision());
        (theta, Higgs::new(phi)?, g, FrameKind::Rank1)
    } else {
        let eigen = hensel_eigen(&psi, ring.invariants())?;
        let diag = gauge(eigen.g_inv(), nabla)?;
        if !diag.matrix().is_diagonal() {
            return Err(Error::internal("solve_harmonic", "connection is not diagonal in the eigen frame of Ψ"));
        }
        let theta = ring.interpolate(eigen.mu(), &diag.matrix().diagonal_entries())?;
        let mu_prime = eigen.mu().iter().map(TruncSeries::descend_pth_power).collect::<Result<Vec<_>>>();
        let mu_prime = mu_prime.map_err(|e| Error::internal("solve_harmonic", format!("eigenvalue does not descend: {e}")))?;
        (theta, Higgs::new(SeriesMatrix::diagonal(&mu_prime)?)?, eigen.g().clone(), FrameKind::Eigen)
    };
    let harmonic = HarmonicDatum::new(b_prime, theta, frame, false)
        .map_err(|e| Error::internal("solve_harmonic", format!("harmonic certificate failed: {e}")))?;
    let package = CorrespondencePackage { connection: nabla.clone(), higgs, harmonic, gauge: g };
    let report = check_equations(&package)?;
    if !report.all_hold() {
        return Err(Error::internal("solve_harmonic", format!("Hitchin equations fail on output: {report:?}")));
    }
    Ok(package)
}

/// The equations of a harmonic solution, checked on a package.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationReport {
    /// `Ψ(∇ - a(θ)) = 0`, certified by flat sections.
    pub curvature_vanishes: bool,
    /// `[Ψ(∇), a(θ)] = 0`.
    pub commutes: bool,
    /// `Ψ(∇)` transported to the flat frame of `∇ - a(θ)` descends.
    pub horizontal: bool,
    /// `gauge(g^{-1}, ∇) = cmap(θ, φ')` and `χ(φ') = b'`.
    pub linked: bool,
}

impl EquationReport {
    pub fn all_hold(&self) -> bool {
        self.curvature_vanishes && self.commutes && self.horizontal && self.linked
    }
}

pub fn check_equations(package: &CorrespondencePackage) -> Result<EquationReport> {
    let nabla = &package.connection;
    let psi = pcurv(nabla)?.into_psi();
    let (a, _) = embed(package.harmonic.theta(), &psi)?;
    let commutes = psi.commutator(&a)?.is_zero();
    let twisted = Connection::new(nabla.matrix().try_sub(&a)?)?;
    let (curvature_vanishes, horizontal) = match flat_sections(&twisted) {
        Ok(flat) => {
            let g = &flat.gauge;
            let moved = g.inverse()?.try_mul(&psi)?.try_mul(g)?;
            (pcurv(&twisted)?.psi().is_zero(), moved.descend_pth_power().is_ok())
        }
        Err(Error::NonzeroPCurvature { .. }) => (false, false),
        Err(e) => return Err(e),
    };
    let back = cmap(&package.harmonic, &package.higgs)?;
    let linked = gauge(&package.gauge.inverse()?, nabla)?.matrix().eq_within(back.matrix())
        && package.higgs.invariants()?.eq_within(package.harmonic.b_prime());
    Ok(EquationReport { curvature_vanishes, commutes, horizontal, linked })
}

/// `𝔠(θ, φ') = ∂ + a_{F*φ'}(θ)` on `F*E'` with its canonical connection.
pub fn cmap(h: &HarmonicDatum, higgs: &Higgs) -> Result<Connection> {
    if h.is_inverse() || higgs.rank() != h.rank() || !higgs.invariants()?.eq_within(h.b_prime()) {
        return Err(Error::BaseMismatch);
    }
    let m = higgs.phi().pullback()?;
    let (a, _) = embed(h.theta(), &m)?;
    Connection::new(a)
}

/// Output of [`cinv`]: the frame in which the twisted connection is
/// canonical, and the descended Higgs field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CinvOutput {
    pub frame: SeriesMatrix,
    pub higgs: Higgs,
}

/// Inverse correspondence: twists `∇` by `a_Ψ(θ̃)` for an inverse datum
/// `θ̃`, takes flat sections of the result and descends `Ψ(∇)` in that
/// frame.
pub fn cinv(nabla: &Connection, inverse_h: &HarmonicDatum) -> Result<CinvOutput> {
    if !inverse_h.is_inverse() || nabla.rank() != inverse_h.rank() {
        return Err(Error::BaseMismatch);
    }
    let b_prime = phitchin(nabla)?;
    if !b_prime.eq_within(inverse_h.b_prime()) {
        return Err(Error::BaseMismatch);
    }
    let psi = pcurv(nabla)?.into_psi();
    let (a, _) = embed(inverse_h.theta(), &psi)?;
    let twisted = nabla.twist(&a)?;
    let flat = flat_sections(&twisted).map_err(|e| match e {
        Error::NonzeroPCurvature { order, column, residual } => Error::CurvatureNotCancelled { order, column, residual },
        other => other,
    })?;
    let g = flat.gauge;
    let moved = g.inverse()?.try_mul(&psi)?.try_mul(&g)?;
    let phi = moved
        .descend_pth_power()
        .map_err(|e| Error::internal("cinv", format!("transported p-curvature does not descend: {e}")))?;
    let higgs = Higgs::new(phi)?;
    if !higgs.invariants()?.eq_within(&b_prime) {
        return Err(Error::internal("cinv", "descended Higgs field has the wrong invariants"));
    }
    Ok(CinvOutput { frame: g, higgs })
}

/// A harmonic datum over `b'` built without a connection: with `μ'_i` the
/// roots of `χ_{b'}`, take `θ_i = solve_hp(μ'_i)` and interpolate.
pub fn canonical_harmonic(b_prime: &InvariantTuple) -> Result<HarmonicDatum> {
    if b_prime.var() != Var::ZPrime {
        return Err(Error::VarMismatch { left: b_prime.var(), right: Var::ZPrime });
    }
    let ring = ring_over(b_prime, usize::MAX)?;
    if b_prime.rank() == 1 {
        let theta = solve_hp(&TwistOneForm::new(b_prime.b(1).clone())?)?;
        let theta = ring.element(vec![theta.coefficient().clone()])?;
        return HarmonicDatum::new(b_prime.clone(), theta, FrameKind::Rank1, false);
    }
    let companion = crate::hitchin::companion_section(b_prime)?;
    let eigen = hensel_eigen(&companion, b_prime)?;
    let mut mu = Vec::new();
    let mut values = Vec::new();
    for m in eigen.mu() {
        let theta_i = solve_hp(&TwistOneForm::new(m.clone())?)?;
        mu.push(m.pullback()?);
        values.push(theta_i.coefficient().clone());
    }
    let theta = ring.interpolate(&mu, &values)?;
    HarmonicDatum::new(b_prime.clone(), theta, FrameKind::Eigen, false)
}

/// Difference of two harmonic data over the same base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsorDifference {
    /// `θ_1 - θ_2`, with vanishing p-curvature.
    pub delta: SpectralElement,
    /// A unit with `dlog(u) = δ`.
    pub unit: SpectralElement,
}

/// `δ = θ_1 - θ_2` and a unit `u ∈ R` with `dlog u = δ`, found as the flat
/// section through `1` of the `R`-connection `∂ - δ` written in the basis
/// `1, λ, ..., λ^{n-1}`.
pub fn torsor_difference(h1: &HarmonicDatum, h2: &HarmonicDatum) -> Result<TorsorDifference> {
    if h1.rank() != h2.rank() || h1.is_inverse() != h2.is_inverse() || !h1.b_prime().eq_within(h2.b_prime()) {
        return Err(Error::BaseMismatch);
    }
    let prec = h1.theta().precision().min(h2.theta().precision());
    let t2 = h1.theta().ring().element(h2.theta().coeffs().to_vec())?;
    let delta = h1.theta().truncate(prec).try_sub(&t2)?;
    let curvature = delta.pcurv()?;
    if !curvature.is_zero() {
        return Err(Error::CurvatureNonzero {
            residual: curvature.coeffs().iter().map(crate::algebra::text::format_series).collect::<Vec<_>>().join(", "),
        });
    }
    let ring = delta.ring();
    let n = ring.rank();
    // matrix of the derivation of R on the cyclic basis
    let cols = (0..n)
        .map(|k| Ok(ring.lambda().truncate(delta.precision()).pow(k as u64).derive()?.coeffs().to_vec()))
        .collect::<Result<Vec<_>>>()?;
    let d = SeriesMatrix::from_columns(&cols)?;
    let a = d.try_sub(&delta.cyclic_matrix()?)?;
    let flat = flat_sections(&Connection::new(a)?)?;
    let unit = ring.element(flat.basis[0].clone())?;
    let check = unit.dlog()?;
    if !check.eq_within(&delta) {
        return Err(Error::internal("torsor_difference", "constructed unit does not have dlog δ"));
    }
    Ok(TorsorDifference { delta, unit })
}

/// `b'` of a Higgs field descends the invariants of its pullback.
pub fn higgs_base(higgs: &Higgs) -> Result<InvariantTuple> {
    descend_invariants(&char_invariants(&higgs.phi().pullback()?)?)
}
