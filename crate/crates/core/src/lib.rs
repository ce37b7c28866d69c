//! Exact computer algebra for flat connections and Higgs fields on the
//! trivial bundle over a truncated formal disk in characteristic `p`.
//!
//! The crate computes p-curvature, the p-Hitchin map, Cartier operators and
//! descent, the four-term exact sequence for `G_m` and spectral units, and
//! the correspondence between flat connections and Higgs fields for `GL_1`
//! and split regular-semisimple `GL_n`, all with explicit precision
//! tracking and constructive certificates.
//!
//! Chart conventions used throughout:
//! * a connection is `∂_z + A`;
//! * `F*(z') = z^p` with coefficients fixed, `π*(z) = z'` with coefficients
//!   raised to the `p`-th power;
//! * Hitchin invariants of a matrix are the elementary symmetric functions
//!   of its eigenvalues, `det(λ - M) = Σ (-1)^i b_i λ^{n-i}`.

pub mod algebra;
pub mod cartier;
pub mod connection;
pub mod error;
pub mod harmonic;
pub mod hitchin;
pub mod json;
pub mod rng;
pub mod spectral;
pub mod verify;

pub use algebra::{Fe, FieldSpec, SeriesMatrix, TruncSeries, Var};
pub use error::{Error, Result};

/// Largest supported rank.
pub const MAX_RANK: usize = 8;
