//! Fractional subadditivity gaps and the results built on them.
//!
//! For a grounded set function `f` and weights `γ` on a family `F`:
//!
//! ```text
//! Gap_U(f, F, γ) = Σ γ(S) f(S) − f([1:n])
//! Gap_L(f, F, γ) = f([1:n]) − Σ γ(S) f(S | S^c)
//! ```
//!
//! Both are nonnegative when `γ` is a fractional partition and `f` is
//! submodular; `Gap_U` stays nonnegative for coverings and `Gap_L` for
//! packings once `f([1:j])` is non-decreasing in `j`. Either gap vanishes
//! exactly when `f` is modular, and small gaps force every element to be
//! nearly separable from the rest (the stability bound `ε/σ`).
//!
//! Float instances compare with an explicit tolerance that is recorded in
//! every report. Rational instances always compare exactly.

use std::collections::BTreeMap;

use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frac::{min_multiplicity, FamilyClassification, Flavor, WeightedFamily};
use crate::scalar::{format_rational, Rational, Scalar, ScalarValue, DEFAULT_TOL};
use crate::setfn::{SetFunction, SubsetMask};

/// `2^-30` of the largest `|f|` value, or `2^-30` for the zero function.
pub fn default_tolerance<T: Scalar>(f: &SetFunction<T>) -> f64 {
    let scale = f.largest_magnitude();
    if scale > 0.0 {
        DEFAULT_TOL * scale
    } else {
        DEFAULT_TOL
    }
}

fn effective_tol<T: Scalar>(tol: f64) -> f64 {
    if T::EXACT {
        0.0
    } else {
        tol
    }
}

fn check_inputs<T: Scalar>(f: &SetFunction<T>, wf: &WeightedFamily) -> Result<()> {
    if f.n() != wf.n() {
        return Err(Error::SizeMismatch(f.n(), wf.n()));
    }
    f.require_grounded()
}

fn weighted_sum<T: Scalar>(wf: &WeightedFamily, mut term: impl FnMut(SubsetMask) -> T) -> T {
    wf.members().iter().fold(T::zero(), |acc, m| acc + term(m.set).scale(&m.weight))
}

pub fn gap_upper<T: Scalar>(f: &SetFunction<T>, wf: &WeightedFamily) -> Result<T> {
    check_inputs(f, wf)?;
    Ok(weighted_sum(wf, |s| f.at(s).clone()) - f.at(f.full()).clone())
}

pub fn gap_lower<T: Scalar>(f: &SetFunction<T>, wf: &WeightedFamily) -> Result<T> {
    check_inputs(f, wf)?;
    let n = f.n();
    let conditional_sum = weighted_sum(wf, |s| f.conditional(s, s.complement(n)).expect("masks in range"));
    Ok(f.at(f.full()).clone() - conditional_sum)
}

/// `Gap_U(f, F, γ)/w(γ) − Gap_L(f, F̄, γ̄)/w(γ̄)`, which vanishes for every
/// fractional partition with `w(γ) > 1`.
pub fn duality_residual<T: Scalar>(f: &SetFunction<T>, wf: &WeightedFamily) -> Result<T> {
    check_inputs(f, wf)?;
    wf.require_partition()?;
    let dual = wf.dual()?;
    let upper = gap_upper(f, wf)?.scale(&wf.weight_total().recip());
    let lower = gap_lower(f, &dual)?.scale(&dual.weight_total().recip());
    Ok(upper - lower)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundStatus {
    pub upper: bool,
    pub lower: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub gap_upper: ScalarValue,
    pub gap_lower: ScalarValue,
    pub weight_total: String,
    pub classification: FamilyClassification,
    /// Whether each gap is `>= −tol`.
    pub bounds_hold: BoundStatus,
    /// Whether the hypotheses guaranteeing each bound are met.
    pub bounds_guaranteed: BoundStatus,
    pub submodular: bool,
    pub modular: bool,
    pub prefix_nondecreasing: bool,
    pub duality_residual: Option<ScalarValue>,
    pub tolerance: f64,
    pub preconditions_used: Vec<String>,
    /// Guaranteed properties that failed on this instance.
    pub violations: Vec<String>,
}

/// Both gaps plus everything needed to judge them.
pub fn gap_report<T: Scalar>(f: &SetFunction<T>, wf: &WeightedFamily, tol: f64) -> Result<GapReport> {
    let tol = effective_tol::<T>(tol);
    let upper = gap_upper(f, wf)?;
    let lower = gap_lower(f, wf)?;
    let classification = wf.classify();
    let submodular = f.is_submodular(tol).holds;
    let prefix = f.is_prefix_nondecreasing(tol);
    let modular = f.is_modular(tol)?.holds;

    let mut notes = Vec::new();
    let guaranteed = match classification.flavor {
        Flavor::Partition if submodular => {
            notes.push("partition with submodular f: both bounds hold".to_string());
            BoundStatus { upper: true, lower: true }
        }
        Flavor::Covering if submodular && prefix => {
            notes.push("covering with submodular, prefix non-decreasing f: upper bound holds".to_string());
            BoundStatus { upper: true, lower: false }
        }
        Flavor::Packing if submodular && prefix => {
            notes.push("packing with submodular, prefix non-decreasing f: lower bound holds".to_string());
            BoundStatus { upper: false, lower: true }
        }
        flavor => {
            notes.push(format!(
                "no bound guaranteed (flavor {flavor}, submodular {submodular}, prefix non-decreasing {prefix})"
            ));
            BoundStatus { upper: false, lower: false }
        }
    };
    let zero = T::zero();
    let holds = BoundStatus { upper: zero.le_tol(&upper, tol), lower: zero.le_tol(&lower, tol) };

    let mut violations = Vec::new();
    if guaranteed.upper && !holds.upper {
        violations.push(format!("upper gap {upper} is negative"));
    }
    if guaranteed.lower && !holds.lower {
        violations.push(format!("lower gap {lower} is negative"));
    }
    if submodular && classification.flavor == Flavor::Partition {
        let upper_zero = upper.is_zero_tol(tol);
        let lower_zero = lower.is_zero_tol(tol);
        if upper_zero != modular || lower_zero != modular {
            violations.push(format!(
                "modularity {modular} disagrees with vanishing gaps (upper {upper_zero}, lower {lower_zero})"
            ));
        }
    }

    let residual = if classification.flavor == Flavor::Partition && wf.weight_total() > Rational::one() {
        let r = duality_residual(f, wf)?;
        if !r.is_zero_tol(tol) {
            violations.push(format!("duality residual {r} is not zero"));
        }
        Some(r.to_value())
    } else {
        None
    };

    Ok(GapReport {
        gap_upper: upper.to_value(),
        gap_lower: lower.to_value(),
        weight_total: format_rational(&wf.weight_total()),
        classification,
        bounds_hold: holds,
        bounds_guaranteed: guaranteed,
        submodular,
        modular,
        prefix_nondecreasing: prefix,
        duality_residual: residual,
        tolerance: tol,
        preconditions_used: notes,
        violations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub sigma: String,
    pub epsilon: ScalarValue,
    /// `f({i}) + f([1:n] \ {i}) − f([1:n])` for each element.
    pub defects: Vec<ScalarValue>,
    /// `ε/σ`.
    pub bound: ScalarValue,
    pub satisfied: bool,
    /// Whether `ε` bounds one of the applicable gaps.
    pub hypothesis_holds: bool,
    pub gap_upper: Option<ScalarValue>,
    pub gap_lower: Option<ScalarValue>,
    pub submodular: bool,
    pub tolerance: f64,
    pub warnings: Vec<String>,
}

/// Checks every element defect against `ε/σ`.
///
/// Partitions use both gaps. Coverings (with `Gap_U`) and packings (with
/// `Gap_L`) additionally require `f([1:j])` non-decreasing in `j`.
pub fn stability_check<T: Scalar>(
    f: &SetFunction<T>,
    wf: &WeightedFamily,
    epsilon: &T,
    tol: f64,
) -> Result<StabilityReport> {
    check_inputs(f, wf)?;
    let tol = effective_tol::<T>(tol);
    if epsilon.le_tol(&T::zero(), 0.0) && !epsilon.is_zero_tol(0.0) {
        return Err(Error::Invalid(format!("epsilon must be nonnegative, got {epsilon}")));
    }
    let flavor = wf.flavor();
    let (use_upper, use_lower) = match flavor {
        Flavor::Partition => (true, true),
        Flavor::Covering | Flavor::Packing => {
            if !f.is_prefix_nondecreasing(tol) {
                return Err(Error::NotPrefixNondecreasing);
            }
            (flavor == Flavor::Covering, flavor == Flavor::Packing)
        }
        Flavor::None => return Err(Error::WrongFlavor { expected: "partition, covering or packing", got: flavor }),
    };
    let sigma = wf.sigma()?;
    let n = f.n();
    let full = f.full();
    let defects: Vec<T> = (0..n)
        .map(|i| f.at(SubsetMask::singleton(i)).clone() + f.at(full.without(i)).clone() - f.at(full).clone())
        .collect();
    let bound = epsilon.scale(&sigma.recip());
    let satisfied = defects.iter().all(|d| d.le_tol(&bound, tol));

    let upper = if use_upper { Some(gap_upper(f, wf)?) } else { None };
    let lower = if use_lower { Some(gap_lower(f, wf)?) } else { None };
    let hypothesis_holds = upper.iter().chain(lower.iter()).any(|g| g.le_tol(epsilon, tol));
    let submodular = f.is_submodular(tol).holds;

    let mut warnings = Vec::new();
    if !hypothesis_holds {
        warnings.push(format!("epsilon {epsilon} is below every applicable gap; the bound is not guaranteed"));
    }
    if !submodular {
        warnings.push("f is not submodular; the bound is not guaranteed".to_string());
    }

    Ok(StabilityReport {
        sigma: format_rational(&sigma),
        epsilon: epsilon.to_value(),
        defects: defects.iter().map(Scalar::to_value).collect(),
        bound: bound.to_value(),
        satisfied,
        hypothesis_holds,
        gap_upper: upper.map(|g| g.to_value()),
        gap_lower: lower.map(|g| g.to_value()),
        submodular,
        tolerance: tol,
        warnings,
    })
}

/// Set-function values known on some subsets only.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialSetFunction<T> {
    pub n: usize,
    pub entries: BTreeMap<SubsetMask, T>,
}

impl<T: Scalar> PartialSetFunction<T> {
    pub fn new(n: usize, entries: impl IntoIterator<Item = (SubsetMask, T)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (s, v) in entries {
            if s.index() >= 1 << n {
                return Err(Error::MaskOutOfRange { mask: s.0, n });
            }
            if map.insert(s, v).is_some() {
                return Err(Error::Invalid(format!("duplicate entry for {:?}", s.to_elements())));
            }
        }
        Ok(PartialSetFunction { n, entries: map })
    }

    pub fn get(&self, s: SubsetMask) -> Result<&T> {
        self.entries.get(&s).ok_or_else(|| Error::MissingEntry(s.to_elements()))
    }
}

/// What the caller vouches for about the unseen parts of `f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Assumptions {
    /// `f` is submodular with `f(∅) = 0`.
    pub submodular_grounded: bool,
    /// `f` is non-decreasing; needed for coverings.
    pub nondecreasing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateVerdict {
    Modular,
    NotModular,
    InsufficientData,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroSetCondition {
    /// Over-covered elements, on which `f` must vanish.
    pub set: SubsetMask,
    /// `None` when some singleton value on the set is unknown.
    pub singletons_zero: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModularityCertificate {
    pub verdict: CertificateVerdict,
    pub checked_sum: ScalarValue,
    pub target: ScalarValue,
    pub flavor: Flavor,
    pub witness: Option<SubsetMask>,
    pub zero_set_condition: Option<ZeroSetCondition>,
    pub assumptions: Assumptions,
    pub tolerance: f64,
    pub notes: Vec<String>,
}

/// Decides modularity of a submodular `f` from its values on the members of
/// a fractional partition and on `[1:n]` alone.
///
/// A covering is also accepted when `f` is vouched non-decreasing; equality
/// then means `f` is modular and vanishes on the over-covered elements.
pub fn certify_modular_partial<T: Scalar>(
    partial: &PartialSetFunction<T>,
    wf: &WeightedFamily,
    assumptions: Assumptions,
    tol: f64,
) -> Result<ModularityCertificate> {
    if partial.n != wf.n() {
        return Err(Error::SizeMismatch(partial.n, wf.n()));
    }
    let tol = effective_tol::<T>(tol);
    if let Some(v) = partial.entries.get(&SubsetMask::EMPTY) {
        if !v.is_zero_tol(0.0) {
            return Err(Error::NotGrounded(v.to_string()));
        }
    }
    let classification = wf.classify();
    let covering = match classification.flavor {
        Flavor::Partition => false,
        Flavor::Covering if assumptions.nondecreasing => true,
        got => return Err(Error::WrongFlavor { expected: "partition", got }),
    };
    let full = SubsetMask::full(partial.n);
    let target = partial.get(full)?.clone();
    let mut sum = T::zero();
    for m in wf.members() {
        sum = sum + partial.get(m.set)?.scale(&m.weight);
    }
    let equal = sum.approx_eq(&target, tol);

    let mut notes = vec![format!(
        "verdict relies on the caller's assumptions: submodular and grounded = {}, non-decreasing = {}",
        assumptions.submodular_grounded, assumptions.nondecreasing
    )];
    let verdict = if !assumptions.submodular_grounded {
        notes.push("submodularity not asserted; the partial data alone cannot decide modularity".to_string());
        CertificateVerdict::InsufficientData
    } else if equal {
        CertificateVerdict::Modular
    } else {
        if sum.le_tol(&target, tol) {
            notes.push("weighted sum falls below f([1:n]), contradicting the asserted submodularity".to_string());
        }
        CertificateVerdict::NotModular
    };

    let witness = if verdict == CertificateVerdict::NotModular && is_singleton_family(wf) { Some(full) } else { None };

    let zero_set_condition = covering.then(|| {
        let z = classification.over_covered;
        let known: Option<Vec<&T>> = z.iter().map(|i| partial.entries.get(&SubsetMask::singleton(i))).collect();
        ZeroSetCondition { set: z, singletons_zero: known.map(|vals| vals.iter().all(|v| v.is_zero_tol(tol))) }
    });
    if covering {
        notes.push("covering: equality also requires f to vanish on the over-covered elements".to_string());
    }

    Ok(ModularityCertificate {
        verdict,
        checked_sum: sum.to_value(),
        target: target.to_value(),
        flavor: classification.flavor,
        witness,
        zero_set_condition,
        assumptions,
        tolerance: tol,
        notes,
    })
}

fn is_singleton_family(wf: &WeightedFamily) -> bool {
    wf.members().iter().all(|m| m.set.len() == 1) && wf.len() == wf.n()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GapKind {
    Upper,
    Lower,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringEquality {
    pub gap_kind: GapKind,
    pub gap: ScalarValue,
    pub gap_zero: bool,
    pub modular: bool,
    /// Over-covered elements (coverings) or under-covered ones (packings).
    pub zero_set: SubsetMask,
    /// `f(Z) = 0` for every `Z` inside `zero_set`.
    pub zero_on_set: bool,
    /// `modular && zero_on_set`.
    pub predicted_zero: bool,
    pub agree: bool,
    pub tolerance: f64,
}

/// Evaluates both sides of the covering/packing equality characterization:
/// `Gap_U(f, F, α) = 0` iff `f` is modular and vanishes on every subset of
/// the over-covered elements (with `Gap_L`, `β` and under-covered elements
/// for packings).
///
/// `f` must be grounded, submodular and non-decreasing. Prefix monotonicity
/// is not enough: a submodular, non-modular `f` can have a zero covering gap.
pub fn equality_conditions_covering<T: Scalar>(
    f: &SetFunction<T>,
    wf: &WeightedFamily,
    tol: f64,
) -> Result<CoveringEquality> {
    check_inputs(f, wf)?;
    let tol = effective_tol::<T>(tol);
    let sub = f.is_submodular(tol);
    if let Some((a, b)) = sub.witness {
        return Err(Error::NotSubmodular(a, b));
    }
    if let Some((a, b)) = f.is_nondecreasing(tol).witness {
        return Err(Error::NotNondecreasing(a, b));
    }
    let classification = wf.classify();
    let (gap_kind, gap, zero_set) = match classification.flavor {
        Flavor::Partition | Flavor::Covering => (GapKind::Upper, gap_upper(f, wf)?, classification.over_covered),
        Flavor::Packing => (GapKind::Lower, gap_lower(f, wf)?, classification.under_covered),
        got => return Err(Error::WrongFlavor { expected: "covering or packing", got }),
    };
    let gap_zero = gap.is_zero_tol(tol);
    let modular = f.is_modular(tol)?.holds;
    let zero_on_set = zero_set.subsets().all(|z| f.at(z).is_zero_tol(tol));
    let predicted_zero = modular && zero_on_set;
    Ok(CoveringEquality {
        gap_kind,
        gap: gap.to_value(),
        gap_zero,
        modular,
        zero_set,
        zero_on_set,
        predicted_zero,
        agree: gap_zero == predicted_zero,
        tolerance: tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShearerVerdict {
    pub k: usize,
    /// `Σ_{S∈F} f(S)`.
    pub member_sum: ScalarValue,
    /// `k · f([1:n])`.
    pub scaled_total: ScalarValue,
    pub equality: bool,
    pub conditions: CoveringEquality,
}

/// The integer form of Shearer's inequality, `Σ f(S) >= k f([1:n])` with
/// `k = k(F)`, and its equality conditions via the covering `α = 1/k`.
pub fn shearer_integer_check<T: Scalar>(f: &SetFunction<T>, family: &[SubsetMask], tol: f64) -> Result<ShearerVerdict> {
    let k = min_multiplicity(f.n(), family)?;
    let alpha = WeightedFamily::uniform(f.n(), family, Rational::new(1.into(), (k as i64).into()))?;
    let conditions = equality_conditions_covering(f, &alpha, tol)?;
    let member_sum = family.iter().fold(T::zero(), |acc, &s| acc + f.at(s).clone());
    let scaled_total = f.at(f.full()).clone() * T::from_i64(k as i64);
    let tol = effective_tol::<T>(tol);
    Ok(ShearerVerdict {
        k,
        equality: member_sum.approx_eq(&scaled_total, tol * k as f64),
        member_sum: member_sum.to_value(),
        scaled_total: scaled_total.to_value(),
        conditions,
    })
}

/// `|gap|` for reporting, as a float.
pub fn magnitude(v: &ScalarValue) -> f64 {
    v.to_f64().abs()
}

impl GapReport {
    pub fn is_consistent(&self) -> bool {
        self.violations.is_empty()
    }
}

impl ModularityCertificate {
    pub fn is_modular(&self) -> bool {
        self.verdict == CertificateVerdict::Modular
    }
}
