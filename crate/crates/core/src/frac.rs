//! Weighted families of subsets: fractional partitions, coverings and
//! packings.
//!
//! Families are multisets; repeated members stay distinct and keep their
//! input order. All weights are exact rationals.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::binomial;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp;
use crate::scalar::{format_rational, serde_rational, Rational};
use crate::setfn::{SubsetMask, MAX_GROUND};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Member {
    pub set: SubsetMask,
    #[serde(with = "serde_rational")]
    pub weight: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedFamily {
    n: usize,
    members: Vec<Member>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Partition,
    Covering,
    Packing,
    None,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Flavor::Partition => "partition",
            Flavor::Covering => "covering",
            Flavor::Packing => "packing",
            Flavor::None => "none",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyClassification {
    pub flavor: Flavor,
    #[serde(serialize_with = "serialize_rationals")]
    pub coverage: Vec<Rational>,
    pub over_covered: SubsetMask,
    pub under_covered: SubsetMask,
}

fn serialize_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(format_rational))
}

/// Output of [`WeightedFamily::normalize`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Normalized {
    pub family: WeightedFamily,
    /// `merge_map[i]` is the 0-indexed super-element holding original element `i`.
    pub merge_map: Vec<usize>,
    /// Original elements grouped into each super-element.
    pub groups: Vec<SubsetMask>,
    /// Total weight of the removed full-set members, if any.
    #[serde(serialize_with = "serialize_opt_rational")]
    pub removed_full_weight: Option<Rational>,
    pub dropped_zero_weight: usize,
}

fn serialize_opt_rational<S: serde::Serializer>(v: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(r) => s.serialize_some(&format_rational(r)),
        None => s.serialize_none(),
    }
}

impl Normalized {
    pub fn is_identity(&self) -> bool {
        self.merge_map.iter().enumerate().all(|(i, &g)| i == g)
            && self.removed_full_weight.is_none()
            && self.dropped_zero_weight == 0
    }

    /// Expands a mask over super-elements back to the original ground set.
    pub fn expand(&self, merged: SubsetMask) -> SubsetMask {
        merged.iter().fold(SubsetMask::EMPTY, |acc, g| acc.union(self.groups[g]))
    }
}

impl WeightedFamily {
    /// Builds a family with strictly positive weights.
    pub fn new(n: usize, members: Vec<Member>) -> Result<Self> {
        let wf = Self::from_raw(n, members)?;
        for (index, m) in wf.members.iter().enumerate() {
            if !m.weight.is_positive() {
                return Err(Error::NonPositiveWeight { index, weight: format_rational(&m.weight) });
            }
        }
        Ok(wf)
    }

    /// Builds a family that may still carry zero weights (raw input awaiting
    /// [`normalize`](Self::normalize)). Negative weights are rejected.
    pub fn from_raw(n: usize, members: Vec<Member>) -> Result<Self> {
        if n > MAX_GROUND {
            return Err(Error::GroundSetTooLarge(n, MAX_GROUND));
        }
        for (index, m) in members.iter().enumerate() {
            if m.set.index() >= 1 << n {
                return Err(Error::MaskOutOfRange { mask: m.set.0, n });
            }
            if m.weight.is_negative() {
                return Err(Error::NonPositiveWeight { index, weight: format_rational(&m.weight) });
            }
        }
        Ok(WeightedFamily { n, members })
    }

    pub fn uniform(n: usize, sets: &[SubsetMask], weight: Rational) -> Result<Self> {
        Self::new(n, sets.iter().map(|&set| Member { set, weight: weight.clone() }).collect())
    }

    /// `{{i}}` with weight 1 each.
    pub fn singletons(n: usize) -> Self {
        let sets: Vec<_> = (0..n).map(SubsetMask::singleton).collect();
        Self::uniform(n, &sets, Rational::one()).expect("valid singleton family")
    }

    /// `{{[1:n] \ {i}}}` with weight `1/(n−1)` each.
    pub fn co_singletons(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Invalid("co-singleton family needs n >= 2".into()));
        }
        let sets: Vec<_> = (0..n).map(|i| SubsetMask::full(n).without(i)).collect();
        Self::uniform(n, &sets, Rational::new(1.into(), ((n - 1) as i64).into()))
    }

    /// All `k`-subsets of `[1:n]` with weight `1/C(n−1, k−1)`.
    pub fn k_subsets(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::Invalid(format!("k = {k} must lie in [1:{n}]")));
        }
        let sets: Vec<_> = SubsetMask::all(n).filter(|s| s.len() == k).collect();
        let c = binomial((n - 1) as u64, (k - 1) as u64);
        Self::uniform(n, &sets, Rational::new(1.into(), (c as i64).into()))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn sets(&self) -> Vec<SubsetMask> {
        self.members.iter().map(|m| m.set).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Coverage sums `c_i = Σ_{S∋i} weight(S)`, 0-indexed.
    pub fn coverage(&self) -> Vec<Rational> {
        let mut c = vec![Rational::zero(); self.n];
        for m in &self.members {
            for i in m.set.iter() {
                c[i] += &m.weight;
            }
        }
        c
    }

    pub fn classify(&self) -> FamilyClassification {
        let coverage = self.coverage();
        let one = Rational::one();
        let mut over = SubsetMask::EMPTY;
        let mut under = SubsetMask::EMPTY;
        for (i, c) in coverage.iter().enumerate() {
            if *c > one {
                over = over.with(i);
            } else if *c < one {
                under = under.with(i);
            }
        }
        let flavor = match (over.is_empty(), under.is_empty()) {
            (true, true) => Flavor::Partition,
            (false, true) => Flavor::Covering,
            (true, false) => Flavor::Packing,
            (false, false) => Flavor::None,
        };
        FamilyClassification { flavor, coverage, over_covered: over, under_covered: under }
    }

    pub fn flavor(&self) -> Flavor {
        self.classify().flavor
    }

    pub fn is_partition(&self) -> bool {
        self.flavor() == Flavor::Partition
    }

    pub fn require_partition(&self) -> Result<()> {
        match self.flavor() {
            Flavor::Partition => Ok(()),
            got => Err(Error::WrongFlavor { expected: "partition", got }),
        }
    }

    pub fn weight_total(&self) -> Rational {
        self.members.iter().map(|m| &m.weight).sum()
    }

    /// Complement family with weights `γ(S)/(w(γ)−1)`.
    pub fn dual(&self) -> Result<Self> {
        let flavor = self.flavor();
        if flavor == Flavor::None {
            return Err(Error::WrongFlavor { expected: "partition, covering or packing", got: flavor });
        }
        let w = self.weight_total();
        if w <= Rational::one() {
            return Err(Error::WeightTotalTooSmall(format_rational(&w)));
        }
        let scale = (w - Rational::one()).recip();
        let members =
            self.members.iter().map(|m| Member { set: m.set.complement(self.n), weight: &m.weight * &scale }).collect();
        Self::new(self.n, members)
    }

    /// Minimum over ordered pairs `i ≠ j` of the weight of members containing
    /// `i` but not `j`.
    pub fn sigma(&self) -> Result<Rational> {
        if self.n < 2 {
            return Err(Error::Invalid("sigma needs at least two ground elements".into()));
        }
        let mut best: Option<(Rational, usize, usize)> = None;
        for i in 0..self.n {
            for j in 0..self.n {
                if i == j {
                    continue;
                }
                let sep: Rational =
                    self.members.iter().filter(|m| m.set.contains(i) && !m.set.contains(j)).map(|m| &m.weight).sum();
                if best.as_ref().is_none_or(|(b, _, _)| sep < *b) {
                    best = Some((sep, i, j));
                }
            }
        }
        let (sigma, i, j) = best.expect("n >= 2 gives at least one pair");
        if sigma.is_zero() {
            return Err(Error::SigmaZero(i + 1, j + 1));
        }
        Ok(sigma)
    }

    /// Brings the family into the standard form: positive weights, no
    /// full-set member, and no two elements that co-occur in every member.
    ///
    /// Full-set members of total weight `δ < 1` are removed and the rest
    /// rescaled by `1/(1−δ)`. Co-occurring elements become one super-element,
    /// ordered by smallest original element.
    pub fn normalize(&self) -> Result<Normalized> {
        let flavor = self.flavor();
        if flavor == Flavor::None {
            return Err(Error::WrongFlavor { expected: "partition, covering or packing", got: flavor });
        }
        let full = SubsetMask::full(self.n);
        let before = self.members.len();
        let mut members: Vec<Member> = self.members.iter().filter(|m| !m.weight.is_zero()).cloned().collect();
        let dropped_zero_weight = before - members.len();

        let delta: Rational = members.iter().filter(|m| m.set == full).map(|m| &m.weight).sum();
        let removed_full_weight = if delta.is_zero() {
            None
        } else {
            if delta >= Rational::one() {
                return Err(Error::FullSetWeight(format_rational(&delta)));
            }
            let scale = (Rational::one() - &delta).recip();
            members.retain(|m| m.set != full);
            for m in &mut members {
                m.weight = &m.weight * &scale;
            }
            Some(delta)
        };
        if members.is_empty() {
            return Err(Error::EmptyFamily);
        }

        // Elements with identical membership signatures always co-occur.
        let mut group_of_signature: BTreeMap<Vec<bool>, usize> = BTreeMap::new();
        let mut merge_map = Vec::with_capacity(self.n);
        let mut groups: Vec<SubsetMask> = Vec::new();
        for i in 0..self.n {
            let signature: Vec<bool> = members.iter().map(|m| m.set.contains(i)).collect();
            let next = groups.len();
            let g = *group_of_signature.entry(signature).or_insert(next);
            if g == next {
                groups.push(SubsetMask::EMPTY);
            }
            groups[g] = groups[g].with(i);
            merge_map.push(g);
        }
        let merged_n = groups.len();
        let members = members
            .into_iter()
            .map(|m| {
                let set = m.set.iter().fold(SubsetMask::EMPTY, |acc, i| acc.with(merge_map[i]));
                Member { set, weight: m.weight }
            })
            .collect();
        let family = WeightedFamily::new(merged_n, members)?;
        Ok(Normalized { family, merge_map, groups, removed_full_weight, dropped_zero_weight })
    }

    /// Members intersected with `[1:n−1]`; members that become empty are
    /// dropped and their weights returned separately.
    pub fn project_last(&self) -> Result<(WeightedFamily, Vec<Rational>)> {
        if self.n < 2 {
            return Err(Error::Invalid("projection needs n >= 2".into()));
        }
        let keep = SubsetMask::full(self.n - 1);
        let mut members = Vec::new();
        let mut dropped = Vec::new();
        for m in &self.members {
            let set = m.set.intersection(keep);
            if set.is_empty() {
                dropped.push(m.weight.clone());
            } else {
                members.push(Member { set, weight: m.weight.clone() });
            }
        }
        Ok((WeightedFamily::new(self.n - 1, members)?, dropped))
    }
}

impl Serialize for WeightedFamily {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            n: usize,
            members: &'a [Member],
        }
        Repr { n: self.n, members: &self.members }.serialize(s)
    }
}

/// Finds positive weights making `family` a fractional partition, if any.
///
/// Solves the exact LP maximizing `Σγ(S)` over the partition polytope; the
/// objective is only a deterministic tie-break among feasible points. The
/// full set is excluded since it may not appear in a normalized family.
pub fn find_fractional_partition(family: &[SubsetMask], n: usize) -> Result<Option<WeightedFamily>> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let full = SubsetMask::full(n);
    for s in family {
        if s.index() > full.index() {
            return Err(Error::MaskOutOfRange { mask: s.0, n });
        }
    }
    let candidates: Vec<SubsetMask> = family.iter().copied().filter(|&s| s != full && !s.is_empty()).collect();
    if candidates.is_empty() {
        return Ok(None);
    }
    let objective = vec![Rational::one(); candidates.len()];
    let outcome = lp::partition_lp(n, &candidates, objective).solve();
    match outcome.status {
        lp::LpStatus::Optimal => {
            let members = candidates
                .iter()
                .zip(outcome.solution)
                .filter(|(_, w)| w.is_positive())
                .map(|(&set, weight)| Member { set, weight })
                .collect();
            Ok(Some(WeightedFamily::new(n, members)?))
        }
        _ => Ok(None),
    }
}

/// `k(F)`: the largest `k` such that every element lies in at least `k`
/// members, counting repetitions.
pub fn min_multiplicity(n: usize, family: &[SubsetMask]) -> Result<usize> {
    (0..n)
        .map(|i| {
            let count = family.iter().filter(|s| s.contains(i)).count();
            if count == 0 {
                Err(Error::Uncovered(i + 1))
            } else {
                Ok(count)
            }
        })
        .try_fold(usize::MAX, |acc, c| c.map(|c| acc.min(c)))
        .map(|k| if n == 0 { 0 } else { k })
}
