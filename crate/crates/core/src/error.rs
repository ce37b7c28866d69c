use serde_json::{json, Value};

use crate::algebra::series::Var;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("coordinate mismatch: {left} against {right}")]
    VarMismatch { left: Var, right: Var },
    #[error("operands live over different fields")]
    FieldMismatch,
    #[error("constant term is not a unit")]
    NonUnitConstantTerm,
    #[error("operation needs precision at least 1")]
    ZeroPrecision,
    #[error("not a p-th power: coefficient {coefficient} at exponent {exponent}")]
    NotAPthPower { exponent: usize, coefficient: String },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("gauge matrix is not invertible")]
    SingularGauge,
    #[error("insufficient precision: need {required}, have {actual}")]
    InsufficientPrecision { required: usize, actual: usize },
    #[error("element is not a unit")]
    NonUnit,
    #[error("rank {rank} exceeds the supported maximum {max}")]
    RankTooLarge { rank: usize, max: usize },
    #[error("internal inconsistency in {context}: {detail}")]
    InternalInconsistency { context: String, detail: String },
    #[error("nonzero p-curvature: flat-section recursion obstructed at order {order} (column {column})")]
    NonzeroPCurvature { order: usize, column: usize, residual: Vec<String> },
    #[error("residue characteristic polynomial does not split (factor degrees {factor_degrees:?}); retry over an extension of degree {suggested_ext_degree}")]
    NonSplitResidue { factor_degrees: Vec<usize>, suggested_ext_degree: usize },
    #[error("residue characteristic polynomial has a repeated root")]
    RepeatedResidueRoot,
    #[error("frame unavailable: {0}")]
    FrameUnavailable(String),
    #[error("Hitchin base points differ")]
    BaseMismatch,
    #[error("twisted connection still has p-curvature (obstruction at order {order})")]
    CurvatureNotCancelled { order: usize, column: usize, residual: Vec<String> },
    #[error("difference of harmonic data has nonzero p-curvature: {residual}")]
    CurvatureNonzero { residual: String },
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::VarMismatch { .. } => "VarMismatch",
            Error::FieldMismatch => "FieldMismatch",
            Error::NonUnitConstantTerm => "NonUnitConstantTerm",
            Error::ZeroPrecision => "ZeroPrecision",
            Error::NotAPthPower { .. } => "NotAPthPower",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::SingularGauge => "SingularGauge",
            Error::InsufficientPrecision { .. } => "InsufficientPrecision",
            Error::NonUnit => "NonUnit",
            Error::RankTooLarge { .. } => "RankTooLarge",
            Error::InternalInconsistency { .. } => "InternalInconsistency",
            Error::NonzeroPCurvature { .. } => "NonzeroPCurvature",
            Error::NonSplitResidue { .. } => "NonSplitResidue",
            Error::RepeatedResidueRoot => "RepeatedResidueRoot",
            Error::FrameUnavailable(_) => "FrameUnavailable",
            Error::BaseMismatch => "BaseMismatch",
            Error::CurvatureNotCancelled { .. } => "CurvatureNotCancelled",
            Error::CurvatureNonzero { .. } => "CurvatureNonzero",
            Error::InvalidField(_) => "InvalidField",
            Error::Schema { .. } => "SchemaError",
        }
    }

    /// Structured payload for certificates.
    pub fn details(&self) -> Value {
        match self {
            Error::VarMismatch { left, right } => json!({"left": left.as_str(), "right": right.as_str()}),
            Error::NotAPthPower { exponent, coefficient } => {
                json!({"exponent": exponent, "coefficient": coefficient})
            }
            Error::DimensionMismatch { expected, found } => json!({"expected": expected, "found": found}),
            Error::InsufficientPrecision { required, actual } => json!({"required": required, "actual": actual}),
            Error::RankTooLarge { rank, max } => json!({"rank": rank, "max": max}),
            Error::InternalInconsistency { context, detail } => json!({"context": context, "detail": detail}),
            Error::NonzeroPCurvature { order, column, residual }
            | Error::CurvatureNotCancelled { order, column, residual } => {
                json!({"order": order, "column": column, "residual": residual})
            }
            Error::NonSplitResidue { factor_degrees, suggested_ext_degree } => {
                json!({"factor_degrees": factor_degrees, "suggested_ext_degree": suggested_ext_degree})
            }
            Error::FrameUnavailable(why) | Error::InvalidField(why) => json!({"reason": why}),
            Error::CurvatureNonzero { residual } => json!({"residual": residual}),
            Error::Schema { path, message } => json!({"path": path, "message": message}),
            _ => json!({}),
        }
    }

    /// Errors that certify a violated theorem rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::InternalInconsistency { .. })
    }

    pub(crate) fn internal(context: &str, detail: impl Into<String>) -> Self {
        Error::InternalInconsistency { context: context.to_string(), detail: detail.into() }
    }
}
