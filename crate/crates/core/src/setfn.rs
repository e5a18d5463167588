//! Set functions on a ground set `[1:n]`, stored as dense tables over all
//! `2^n` subsets.
//!
//! Elements are 1-indexed at the I/O boundary and 0-indexed inside masks:
//! element `i` lives in bit `i - 1`.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar, ScalarKind};

pub const MAX_GROUND: usize = 24;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SubsetMask(pub u32);

impl SubsetMask {
    pub const EMPTY: SubsetMask = SubsetMask(0);

    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_GROUND);
        SubsetMask(((1u64 << n) - 1) as u32)
    }

    /// Singleton of the 0-indexed element `i`.
    pub fn singleton(i: usize) -> Self {
        SubsetMask(1 << i)
    }

    /// Builds a mask from 1-indexed elements, validating each against `n`.
    pub fn from_elements(elements: &[usize], n: usize) -> Result<Self> {
        let mut bits = 0u32;
        for &e in elements {
            if e == 0 || e > n {
                return Err(Error::ElementOutOfRange { element: e, n });
            }
            bits |= 1 << (e - 1);
        }
        Ok(SubsetMask(bits))
    }

    /// 1-indexed elements in increasing order.
    pub fn to_elements(self) -> Vec<usize> {
        self.iter().map(|i| i + 1).collect()
    }

    /// 0-indexed elements in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |i| bits >> i & 1 == 1)
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Self) -> Self {
        SubsetMask(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        SubsetMask(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        SubsetMask(self.0 & !other.0)
    }

    pub fn with(self, i: usize) -> Self {
        SubsetMask(self.0 | 1 << i)
    }

    pub fn without(self, i: usize) -> Self {
        SubsetMask(self.0 & !(1 << i))
    }

    pub fn complement(self, n: usize) -> Self {
        SubsetMask(Self::full(n).0 ^ self.0)
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// All masks over a ground set of size `n`, in table order.
    pub fn all(n: usize) -> impl Iterator<Item = SubsetMask> {
        (0..1u32 << n).map(SubsetMask)
    }

    /// All subsets of `self`, including the empty set and `self`.
    pub fn subsets(self) -> impl Iterator<Item = SubsetMask> {
        let full = self.0;
        let mut next = Some(0u32);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full { None } else { Some((cur | !full).wrapping_add(1) & full) };
            Some(SubsetMask(cur))
        })
    }
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_elements())
    }
}

impl Serialize for SubsetMask {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_elements().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SubsetMask {
    /// Deserializes without a ground-set bound; callers validate against `n`.
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let elements = Vec::<usize>::deserialize(d)?;
        SubsetMask::from_elements(&elements, MAX_GROUND).map_err(serde::de::Error::custom)
    }
}

/// A set function with one scalar kind per instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SetFunction<T> {
    n: usize,
    values: Vec<T>,
    label: String,
}

impl<T: Scalar> SetFunction<T> {
    pub fn new(n: usize, values: Vec<T>, label: impl Into<String>) -> Result<Self> {
        if n > MAX_GROUND {
            return Err(Error::GroundSetTooLarge(n, MAX_GROUND));
        }
        let expected = 1usize << n;
        if values.len() != expected {
            return Err(Error::TableLength { n, got: values.len(), expected });
        }
        Ok(SetFunction { n, values, label: label.into() })
    }

    pub fn from_fn(n: usize, label: impl Into<String>, f: impl FnMut(SubsetMask) -> T) -> Result<Self> {
        if n > MAX_GROUND {
            return Err(Error::GroundSetTooLarge(n, MAX_GROUND));
        }
        Self::new(n, SubsetMask::all(n).map(f).collect(), label)
    }

    /// The modular function with the given singleton values.
    pub fn modular(singletons: &[T], label: impl Into<String>) -> Result<Self> {
        Self::from_fn(singletons.len(), label, |s| s.iter().fold(T::zero(), |acc, i| acc + singletons[i].clone()))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn full(&self) -> SubsetMask {
        SubsetMask::full(self.n)
    }

    pub fn check_mask(&self, s: SubsetMask) -> Result<()> {
        if s.index() >= self.values.len() {
            return Err(Error::MaskOutOfRange { mask: s.0, n: self.n });
        }
        Ok(())
    }

    pub fn evaluate(&self, s: SubsetMask) -> Result<&T> {
        self.check_mask(s)?;
        Ok(&self.values[s.index()])
    }

    /// Unchecked lookup for internal loops over valid masks.
    #[inline]
    pub fn at(&self, s: SubsetMask) -> &T {
        &self.values[s.index()]
    }

    /// `f(S | T) = f(S ∪ T) − f(T)`.
    pub fn conditional(&self, s: SubsetMask, t: SubsetMask) -> Result<T> {
        self.check_mask(s)?;
        self.check_mask(t)?;
        Ok(self.at(s.union(t)).clone() - self.at(t).clone())
    }

    pub fn is_grounded(&self) -> bool {
        self.values[0].is_zero_tol(0.0)
    }

    pub fn require_grounded(&self) -> Result<()> {
        if self.is_grounded() {
            Ok(())
        } else {
            Err(Error::NotGrounded(self.values[0].to_string()))
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> SetFunction<U> {
        SetFunction { n: self.n, values: self.values.iter().map(f).collect(), label: self.label.clone() }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn largest_magnitude(&self) -> f64 {
        self.values.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max)
    }

    /// Local exchange check: `f(S+i) + f(S+j) >= f(S+i+j) + f(S)` for all `S`
    /// and distinct `i, j` outside `S`.
    pub fn is_submodular(&self, tol: f64) -> SubmodularVerdict {
        for s in SubsetMask::all(self.n) {
            for i in 0..self.n {
                if s.contains(i) {
                    continue;
                }
                for j in i + 1..self.n {
                    if s.contains(j) {
                        continue;
                    }
                    let (si, sj) = (s.with(i), s.with(j));
                    let lhs = self.at(si).clone() + self.at(sj).clone();
                    let rhs = self.at(si.with(j)).clone() + self.at(s).clone();
                    if !rhs.le_tol(&lhs, tol) {
                        return SubmodularVerdict { holds: false, witness: Some((si, sj)) };
                    }
                }
            }
        }
        SubmodularVerdict { holds: true, witness: None }
    }

    /// `|f(A) − Σ_{i∈A} f({i})| <= tol` for every `A`.
    pub fn is_modular(&self, tol: f64) -> Result<ModularVerdict> {
        self.require_grounded()?;
        for a in SubsetMask::all(self.n) {
            let sum = a.iter().fold(T::zero(), |acc, i| acc + self.at(SubsetMask::singleton(i)).clone());
            if !self.at(a).approx_eq(&sum, tol) {
                return Ok(ModularVerdict { holds: false, witness: Some(a) });
            }
        }
        Ok(ModularVerdict { holds: true, witness: None })
    }

    /// `f(S) <= f(S ∪ {i}) + tol` for every covering pair; by transitivity this
    /// is the full subset condition. The witness is the first violating
    /// covering pair in table order.
    pub fn is_nondecreasing(&self, tol: f64) -> MonotoneVerdict {
        for s in SubsetMask::all(self.n) {
            for i in 0..self.n {
                if s.contains(i) {
                    continue;
                }
                let t = s.with(i);
                if !self.at(s).le_tol(self.at(t), tol) {
                    return MonotoneVerdict { holds: false, witness: Some((s, t)) };
                }
            }
        }
        MonotoneVerdict { holds: true, witness: None }
    }

    /// Whether `f(S) > f(T) + tol` for the given pair with `S ⊆ T`.
    pub fn violates_monotonicity(&self, s: SubsetMask, t: SubsetMask, tol: f64) -> Result<bool> {
        self.check_mask(s)?;
        self.check_mask(t)?;
        Ok(s.is_subset_of(t) && !self.at(s).le_tol(self.at(t), tol))
    }

    /// `f([1:j]) <= f([1:j+1]) + tol` for `j = 1..n−1`. The chain starts at
    /// `{1}`, so `f({1}) < f(∅)` is allowed.
    pub fn is_prefix_nondecreasing(&self, tol: f64) -> bool {
        (1..self.n).all(|j| self.at(SubsetMask::full(j)).le_tol(self.at(SubsetMask::full(j + 1)), tol))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SubmodularVerdict {
    pub holds: bool,
    pub witness: Option<(SubsetMask, SubsetMask)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ModularVerdict {
    pub holds: bool,
    pub witness: Option<SubsetMask>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MonotoneVerdict {
    pub holds: bool,
    pub witness: Option<(SubsetMask, SubsetMask)>,
}

/// A set function of either scalar kind, as loaded from JSON or produced by
/// a generator.
#[derive(Debug, Clone, PartialEq)]
pub enum DynSetFunction {
    Rational(SetFunction<Rational>),
    Float(SetFunction<f64>),
}

impl DynSetFunction {
    pub fn n(&self) -> usize {
        match self {
            DynSetFunction::Rational(f) => f.n(),
            DynSetFunction::Float(f) => f.n(),
        }
    }

    pub fn kind(&self) -> ScalarKind {
        match self {
            DynSetFunction::Rational(_) => ScalarKind::Rational,
            DynSetFunction::Float(_) => ScalarKind::Float,
        }
    }

    pub fn is_submodular(&self, tol: f64) -> SubmodularVerdict {
        match self {
            DynSetFunction::Rational(f) => f.is_submodular(0.0),
            DynSetFunction::Float(f) => f.is_submodular(tol),
        }
    }

    pub fn is_grounded(&self) -> bool {
        match self {
            DynSetFunction::Rational(f) => f.is_grounded(),
            DynSetFunction::Float(f) => f.is_grounded(),
        }
    }

    pub fn to_f64(&self) -> SetFunction<f64> {
        match self {
            DynSetFunction::Rational(f) => f.map(Scalar::to_f64),
            DynSetFunction::Float(f) => f.clone(),
        }
    }
}

/// Generates a grounded submodular function by generator name.
///
/// See [`crate::generate::GeneratorRegistry`] for the available kinds.
pub fn generate_submodular(n: usize, seed: u64, kind: &str) -> Result<DynSetFunction> {
    crate::generate::GeneratorRegistry::with_builtins().generate(kind, n, seed)
}
