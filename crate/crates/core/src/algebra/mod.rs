//! Exact arithmetic: finite fields, truncated series, dense matrices over
//! series, and the text form used by every file format.

pub mod field;
pub mod matrix;
pub mod poly;
pub mod series;
pub mod text;

pub use field::{Fe, FieldSpec, MAX_EXT_DEGREE};
pub use matrix::SeriesMatrix;
pub use poly::Poly;
pub use series::{TruncSeries, Var};
