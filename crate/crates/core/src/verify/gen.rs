//! Random instances for the verification suites.

use crate::algebra::{Fe, FieldSpec, SeriesMatrix, TruncSeries, Var};
use crate::connection::{gauge, Connection};
use crate::error::Result;
use crate::rng::SplitMix64;

pub fn fe(field: FieldSpec, rng: &mut SplitMix64) -> Fe {
    field.from_index(rng.below_u128(field.order()))
}

pub fn nonzero_fe(field: FieldSpec, rng: &mut SplitMix64) -> Fe {
    field.from_index(1 + rng.below_u128(field.order() - 1))
}

/// A series whose coefficients are zero with probability 1/2 and uniform
/// otherwise, so that sparse and dense inputs both occur.
pub fn series(field: FieldSpec, var: Var, precision: usize, rng: &mut SplitMix64) -> TruncSeries {
    let dense = rng.coin();
    let coeffs = (0..precision).map(|_| if dense || rng.coin() { fe(field, rng) } else { Fe::ZERO }).collect();
    TruncSeries::new(field, var, coeffs)
}

pub fn unit(field: FieldSpec, var: Var, precision: usize, rng: &mut SplitMix64) -> TruncSeries {
    let mut s = series(field, var, precision, rng).coeffs().to_vec();
    if let Some(c) = s.first_mut() {
        *c = nonzero_fe(field, rng);
    }
    TruncSeries::new(field, var, s)
}

pub fn matrix(field: FieldSpec, n: usize, var: Var, precision: usize, rng: &mut SplitMix64) -> SeriesMatrix {
    SeriesMatrix::from_fn(n, |_, _| series(field, var, precision, rng)).expect("uniform entries")
}

/// A matrix whose residue is invertible, by rejection.
pub fn unit_matrix(field: FieldSpec, n: usize, precision: usize, rng: &mut SplitMix64) -> SeriesMatrix {
    loop {
        let g = matrix(field, n, Var::Z, precision, rng);
        if !g.det().residue().is_zero() {
            return g;
        }
    }
}

pub fn connection(field: FieldSpec, n: usize, precision: usize, rng: &mut SplitMix64) -> Connection {
    Connection::new(matrix(field, n, Var::Z, precision, rng)).expect("rank within bounds")
}

/// `gauge(g, ∂)` for a random unit `g`: a connection with zero p-curvature.
pub fn pullback_connection(field: FieldSpec, n: usize, precision: usize, rng: &mut SplitMix64) -> Result<Connection> {
    let g = unit_matrix(field, n, precision + 1, rng);
    gauge(&g, &Connection::trivial(n, field, precision + 1))
}

/// Residue of the rank-one p-curvature of `∂ + f`: `f_0^p - f_{p-1}`.
pub fn psi_residue(f: &TruncSeries) -> Fe {
    let field = f.field();
    let p = field.p() as usize;
    let c = |m: usize| f.coeff(m).unwrap_or(Fe::ZERO);
    field.sub(field.frobenius(c(0)), c(p - 1))
}

/// `gauge(g, ∂ + diag(f_1, ..., f_n))` where the `f_i` have pairwise
/// distinct p-curvature residues, so the p-curvature is regular
/// semisimple with a split spectral cover. `None` if the field is too
/// small to hold `n` distinct residues.
pub fn split_semisimple(field: FieldSpec, n: usize, precision: usize, rng: &mut SplitMix64) -> Option<Result<Connection>> {
    if field.order() < n as u128 {
        return None;
    }
    let mut diag: Vec<TruncSeries> = Vec::with_capacity(n);
    while diag.len() < n {
        let f = series(field, Var::Z, precision + 1, rng);
        let r = psi_residue(&f);
        if diag.iter().all(|d| psi_residue(d) != r) {
            diag.push(f);
        }
    }
    let base = match SeriesMatrix::diagonal(&diag).and_then(Connection::new) {
        Ok(c) => c,
        Err(e) => return Some(Err(e)),
    };
    if n == 1 {
        return Some(Ok(Connection::new(base.matrix().truncate(precision)).expect("rank one")));
    }
    let g = unit_matrix(field, n, precision + 1, rng);
    Some(gauge(&g, &base))
}
