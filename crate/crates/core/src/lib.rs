//! Fractional subadditivity of submodular set functions.
//!
//! Set functions on `[1:n]` are dense tables indexed by bitmask (element `i`
//! is bit `i − 1`), over exact rationals or binary64. For a fractional
//! partition `γ` of a family `F`, a grounded submodular `f` satisfies
//!
//! ```text
//! Σ γ(S) f(S | S^c)  <=  f([1:n])  <=  Σ γ(S) f(S)
//! ```
//!
//! and this crate computes both gaps, their duality, the stability bound,
//! the equality (modularity) cases, and the information-theoretic, matroid
//! and determinantal specializations.
//!
//! ```
//! use fracsub::{gaps, SetFunction, WeightedFamily};
//! use fracsub::scalar::int;
//!
//! // rank of the uniform matroid U_{2,3}
//! let f = SetFunction::from_fn(3, "u23", |s| int(s.len().min(2) as i64)).unwrap();
//! let gap = gaps::gap_upper(&f, &WeightedFamily::singletons(3)).unwrap();
//! assert_eq!(gap, int(1));
//! ```

pub mod error;
pub mod frac;
pub mod gaps;
pub mod gauss;
pub mod generate;
pub mod info;
pub mod io;
pub mod lp;
pub mod matroid;
pub mod scalar;
pub mod setfn;

pub use error::{Error, Result};
pub use frac::{Flavor, Member, WeightedFamily};
pub use scalar::{Rational, Scalar, ScalarKind, ScalarValue};
pub use setfn::{generate_submodular, DynSetFunction, SetFunction, SubsetMask};
