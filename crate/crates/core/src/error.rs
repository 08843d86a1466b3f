use thiserror::Error;

/// Domain errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("not full-dimensional: affine span has dimension {dim} (basis {basis})")]
    NotFullDimensional { dim: usize, basis: String },
    #[error("polar undefined: origin is not an interior point")]
    PolarUndefined,
    #[error("not reflexive: fractional polar vertices {vertices}")]
    NotReflexive { vertices: String },
    #[error("not a nef-partition: {0}")]
    NotNefPartition(String),
    #[error("incompatible fan morphism: image of cone {cone} is not contained in a codomain cone")]
    Incompatible { cone: String },
    #[error("ray {0} lies outside the support of the fan")]
    OutsideSupport(String),
    #[error("fan is not complete")]
    NotComplete,
    #[error("no monomial form: image of ray {0} lies in the interior of a higher-dimensional cone")]
    NoMonomialForm(String),
    #[error("negative exponent: ray {0} is not crepant")]
    NegativeExponent(String),
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("division by zero: {0}")]
    ZeroDenominator(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("non-reduced family: discriminant vanishes identically")]
    NonReducedFamily,
    #[error("continuation failure at path parameter {t}: {reason}")]
    ContinuationFailure { t: String, reason: String },
    #[error("not a Kodaira local monodromy of finite type here: {0}")]
    NotKodaira(String),
    #[error("integer overflow in a fixed-width fast path")]
    Overflow,
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::NotFullDimensional { .. } => "not_full_dimensional",
            Error::PolarUndefined => "polar_undefined",
            Error::NotReflexive { .. } => "not_reflexive",
            Error::NotNefPartition(_) => "not_nef_partition",
            Error::Incompatible { .. } => "incompatible",
            Error::OutsideSupport(_) => "outside_support",
            Error::NotComplete => "not_complete",
            Error::NoMonomialForm(_) => "no_monomial_form",
            Error::NegativeExponent(_) => "negative_exponent",
            Error::UnknownVariable(_) => "unknown_variable",
            Error::ZeroDenominator(_) => "zero_denominator",
            Error::ShapeMismatch(_) => "shape_mismatch",
            Error::NonReducedFamily => "non_reduced_family",
            Error::ContinuationFailure { .. } => "continuation_failure",
            Error::NotKodaira(_) => "not_kodaira",
            Error::Overflow => "overflow",
            Error::Parse(_) => "parse_error",
        }
    }

    /// Structured context accompanying the message.
    pub fn context(&self) -> serde_json::Value {
        use serde_json::json;
        match self {
            Error::NotFullDimensional { dim, basis } => json!({"dim": dim, "span_basis": basis}),
            Error::NotReflexive { vertices } => json!({"fractional_vertices": vertices}),
            Error::Incompatible { cone } => json!({"cone": cone}),
            Error::OutsideSupport(r) | Error::NoMonomialForm(r) | Error::NegativeExponent(r) => {
                json!({"ray": r})
            }
            Error::ContinuationFailure { t, reason } => json!({"t": t, "reason": reason}),
            Error::UnknownVariable(v) => json!({"variable": v}),
            _ => json!({}),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
