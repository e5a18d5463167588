use thiserror::Error;

use crate::frac::Flavor;
use crate::setfn::SubsetMask;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the library.
///
/// Variants split into two groups: input validation (malformed data, size
/// limits, shape mismatches) and unmet preconditions of a checked
/// operation. [`Error::is_precondition`] tells them apart.
#[derive(Debug, Error)]
pub enum Error {
    #[error("ground set size {0} exceeds the supported maximum of {1}")]
    GroundSetTooLarge(usize, usize),

    #[error("subset mask {mask:#b} is out of range for a ground set of size {n}")]
    MaskOutOfRange { mask: u32, n: usize },

    #[error("element {element} is outside the ground set [1:{n}]")]
    ElementOutOfRange { element: usize, n: usize },

    #[error("value table has {got} entries, expected 2^{n} = {expected}")]
    TableLength { n: usize, got: usize, expected: usize },

    #[error("ground set sizes differ: {0} vs {1}")]
    SizeMismatch(usize, usize),

    #[error("set function is not grounded: f(empty set) = {0}")]
    NotGrounded(String),

    #[error("weight of member {index} must be positive, got {weight}")]
    NonPositiveWeight { index: usize, weight: String },

    #[error("family must be a fractional {expected}, but it classifies as {got}")]
    WrongFlavor { expected: &'static str, got: Flavor },

    #[error("family weight total {0} must exceed 1")]
    WeightTotalTooSmall(String),

    #[error("full ground set carries weight {0} >= 1; the family cannot be normalized")]
    FullSetWeight(String),

    #[error("family is empty")]
    EmptyFamily,

    #[error("element {0} is not covered by any member")]
    Uncovered(usize),

    #[error("sigma is zero: elements {0} and {1} are never separated by the family")]
    SigmaZero(usize, usize),

    #[error("no fractional partition exists on this family")]
    Infeasible,

    #[error("function is not submodular: witness ({:?}, {:?})", .0.to_elements(), .1.to_elements())]
    NotSubmodular(SubsetMask, SubsetMask),

    #[error("function is not non-decreasing: f({:?}) > f({:?})", .0.to_elements(), .1.to_elements())]
    NotNondecreasing(SubsetMask, SubsetMask),

    #[error("function is not prefix non-decreasing")]
    NotPrefixNondecreasing,

    #[error("missing value for subset {0:?}")]
    MissingEntry(Vec<usize>),

    #[error("invalid probability table: {0}")]
    InvalidDistribution(String),

    #[error("absolute continuity fails: Q assigns zero mass where P does not (variables {0:?})")]
    AbsoluteContinuity(Vec<usize>),

    #[error("matrix is not positive definite (pivot {0} is {1})")]
    NotPositiveDefinite(usize, f64),

    #[error("matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),

    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },

    #[error("invalid rational `{0}`")]
    InvalidRational(String),

    #[error("{0}")]
    Invalid(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True when the input was well-formed but fails a mathematical
    /// precondition of the requested operation.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::NotGrounded(_)
                | Error::WrongFlavor { .. }
                | Error::WeightTotalTooSmall(_)
                | Error::FullSetWeight(_)
                | Error::SigmaZero(..)
                | Error::Infeasible
                | Error::NotSubmodular(..)
                | Error::NotNondecreasing(..)
                | Error::NotPrefixNondecreasing
                | Error::AbsoluteContinuity(_)
                | Error::NotPositiveDefinite(..)
        )
    }
}
