//! Discrete information measures as set functions.
//!
//! All quantities are in bits. Probability tables are dense and row-major by
//! variable order (the last variable varies fastest); marginals are computed
//! by direct summation.
//!
//! The entropy set function `e(F) = H(X_F)` is grounded, submodular and
//! non-decreasing, so every gap result applies to it. Its upper gap under a
//! fractional partition is the (F,γ)-mutual information
//! `Σ γ(F) H(X_F) − H(X_[1:n])`, which recovers total correlation (singleton
//! family), dual total correlation over `n−1` (co-singletons) and, after
//! optimizing over partitions of all proper subsets, shared information.
//!
//! Independence checks compare the pmf with the product of its marginals in
//! max-norm against `√(2·tol·ln 2)`, the Pinsker-style translation of an
//! entropy tolerance into a probability tolerance.

use num_integer::binomial;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frac::{Flavor, WeightedFamily};
use crate::gaps::{self, GapKind, StabilityReport};
use crate::lp;
use crate::scalar::{format_rational, Rational};
use crate::setfn::{SetFunction, SubsetMask};

pub const MAX_VARIABLES: usize = 8;
pub const MAX_ALPHABET: usize = 8;
/// Largest `n` for the optimizations over all proper subsets.
pub const MAX_LP_VARIABLES: usize = 6;
const SUM_TOL: f64 = 9.094947017729282e-13; // 2^-40

/// Probability tolerance matching an entropy tolerance.
pub fn distance_tolerance(tol: f64) -> f64 {
    (2.0 * tol * std::f64::consts::LN_2).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistributionRepr", into = "DistributionRepr")]
pub struct JointDistribution {
    alphabets: Vec<usize>,
    pmf: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct DistributionRepr {
    alphabets: Vec<usize>,
    pmf: Vec<f64>,
}

impl TryFrom<DistributionRepr> for JointDistribution {
    type Error = Error;
    fn try_from(r: DistributionRepr) -> Result<Self> {
        JointDistribution::new(r.alphabets, r.pmf)
    }
}

impl From<JointDistribution> for DistributionRepr {
    fn from(d: JointDistribution) -> Self {
        DistributionRepr { alphabets: d.alphabets, pmf: d.pmf }
    }
}

fn validate_pmf(pmf: &[f64], what: &str) -> Result<()> {
    if let Some(p) = pmf.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(Error::InvalidDistribution(format!("{what} has entry {p}")));
    }
    let total: f64 = pmf.iter().sum();
    if (total - 1.0).abs() > SUM_TOL {
        return Err(Error::InvalidDistribution(format!("{what} sums to {total}")));
    }
    Ok(())
}

fn plogp_sum(probs: &[f64]) -> f64 {
    -probs.iter().filter(|&&p| p > 0.0).map(|&p| p * p.log2()).sum::<f64>()
}

/// Odometer over assignments of `sizes`, last coordinate fastest.
fn for_each_assignment(sizes: &[usize], mut visit: impl FnMut(usize, &[usize])) {
    let total: usize = sizes.iter().product();
    let mut digits = vec![0usize; sizes.len()];
    for cell in 0..total {
        visit(cell, &digits);
        for v in (0..sizes.len()).rev() {
            digits[v] += 1;
            if digits[v] < sizes[v] {
                break;
            }
            digits[v] = 0;
        }
    }
}

/// Row-major index of the `mask` coordinates of a full assignment.
fn sub_index(alphabets: &[usize], mask: SubsetMask, assignment: &[usize]) -> usize {
    mask.iter().fold(0, |acc, v| acc * alphabets[v] + assignment[v])
}

impl JointDistribution {
    pub fn new(alphabets: Vec<usize>, pmf: Vec<f64>) -> Result<Self> {
        if alphabets.is_empty() || alphabets.len() > MAX_VARIABLES {
            return Err(Error::InvalidDistribution(format!(
                "{} variables; expected 1..={MAX_VARIABLES}",
                alphabets.len()
            )));
        }
        if let Some(a) = alphabets.iter().find(|&&a| a == 0 || a > MAX_ALPHABET) {
            return Err(Error::InvalidDistribution(format!("alphabet size {a}; expected 1..={MAX_ALPHABET}")));
        }
        let cells: usize = alphabets.iter().product();
        if pmf.len() != cells {
            return Err(Error::InvalidDistribution(format!("pmf has {} cells, expected {cells}", pmf.len())));
        }
        validate_pmf(&pmf, "pmf")?;
        Ok(JointDistribution { alphabets, pmf })
    }

    pub fn n(&self) -> usize {
        self.alphabets.len()
    }

    pub fn alphabets(&self) -> &[usize] {
        &self.alphabets
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn full(&self) -> SubsetMask {
        SubsetMask::full(self.n())
    }

    /// Marginal pmf of the variables in `mask`, row-major in variable order.
    pub fn marginal(&self, mask: SubsetMask) -> Vec<f64> {
        let size: usize = mask.iter().map(|v| self.alphabets[v]).product();
        let mut out = vec![0.0; size];
        for_each_assignment(&self.alphabets, |cell, digits| {
            out[sub_index(&self.alphabets, mask, digits)] += self.pmf[cell];
        });
        out
    }

    /// Marginal joint distribution of the variables in `mask`, renumbered
    /// in increasing order.
    pub fn marginalize(&self, mask: SubsetMask) -> Result<JointDistribution> {
        let alphabets = mask.iter().map(|v| self.alphabets[v]).collect();
        JointDistribution::new(alphabets, self.marginal(mask))
    }

    /// `H(X_F)` in bits.
    pub fn entropy(&self, mask: SubsetMask) -> f64 {
        if mask.is_empty() {
            return 0.0;
        }
        plogp_sum(&self.marginal(mask))
    }

    /// `I(X_A; X_B | X_C)` by direct summation over the joint marginal.
    pub fn conditional_mutual_information(&self, a: SubsetMask, b: SubsetMask, c: SubsetMask) -> f64 {
        let u = a.union(b).union(c);
        let p_u = self.marginal(u);
        let p_c = self.marginal(c);
        let p_ac = self.marginal(a.union(c));
        let p_bc = self.marginal(b.union(c));
        let sizes: Vec<usize> = u.iter().map(|v| self.alphabets[v]).collect();
        let mut assignment = vec![0usize; self.n()];
        let mut total = 0.0;
        for_each_assignment(&sizes, |cell, digits| {
            let p = p_u[cell];
            if p <= 0.0 {
                return;
            }
            for (slot, v) in u.iter().enumerate() {
                assignment[v] = digits[slot];
            }
            let pc = p_c[sub_index(&self.alphabets, c, &assignment)];
            let pac = p_ac[sub_index(&self.alphabets, a.union(c), &assignment)];
            let pbc = p_bc[sub_index(&self.alphabets, b.union(c), &assignment)];
            total += p * (p * pc / (pac * pbc)).log2();
        });
        total
    }

    pub fn product_of_marginals(&self) -> ProductDistribution {
        let marginals = (0..self.n()).map(|v| self.marginal(SubsetMask::singleton(v))).collect();
        ProductDistribution { marginals }
    }

    /// `max_x |p(x) − Π_v p_v(x_v)|`.
    pub fn max_product_distance(&self) -> f64 {
        let q = self.product_of_marginals();
        let mut worst = 0.0f64;
        for_each_assignment(&self.alphabets, |cell, digits| {
            worst = worst.max((self.pmf[cell] - q.prob(digits)).abs());
        });
        worst
    }

    /// The distribution of `(Y_1..Y_n)` with `Y_v` drawn from `channels[v]`
    /// given `X_v`, independently across coordinates.
    pub fn push_through(&self, channels: &[Channel]) -> Result<JointDistribution> {
        if channels.len() != self.n() {
            return Err(Error::Invalid(format!("{} channels for {} variables", channels.len(), self.n())));
        }
        let mut current = self.clone();
        for (v, ch) in channels.iter().enumerate() {
            if ch.inputs() != current.alphabets[v] {
                return Err(Error::Invalid(format!(
                    "channel {} expects {} inputs, variable has alphabet {}",
                    v + 1,
                    ch.inputs(),
                    current.alphabets[v]
                )));
            }
            let mut alphabets = current.alphabets.clone();
            alphabets[v] = ch.outputs;
            let mut pmf = vec![0.0; alphabets.iter().product()];
            for_each_assignment(&current.alphabets, |cell, digits| {
                let p = current.pmf[cell];
                if p == 0.0 {
                    return;
                }
                let mut out = digits.to_vec();
                for (y, w) in ch.rows[digits[v]].iter().enumerate() {
                    out[v] = y;
                    let idx = out.iter().zip(&alphabets).fold(0, |acc, (d, a)| acc * a + d);
                    pmf[idx] += p * w;
                }
            });
            let total: f64 = pmf.iter().sum();
            pmf.iter_mut().for_each(|p| *p /= total);
            current = JointDistribution::new(alphabets, pmf)?;
        }
        Ok(current)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProductRepr", into = "ProductRepr")]
pub struct ProductDistribution {
    marginals: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct ProductRepr {
    marginals: Vec<Vec<f64>>,
}

impl TryFrom<ProductRepr> for ProductDistribution {
    type Error = Error;
    fn try_from(r: ProductRepr) -> Result<Self> {
        ProductDistribution::new(r.marginals)
    }
}

impl From<ProductDistribution> for ProductRepr {
    fn from(d: ProductDistribution) -> Self {
        ProductRepr { marginals: d.marginals }
    }
}

impl ProductDistribution {
    pub fn new(marginals: Vec<Vec<f64>>) -> Result<Self> {
        if marginals.is_empty() || marginals.len() > MAX_VARIABLES {
            return Err(Error::InvalidDistribution(format!("{} marginals", marginals.len())));
        }
        for (v, m) in marginals.iter().enumerate() {
            if m.is_empty() || m.len() > MAX_ALPHABET {
                return Err(Error::InvalidDistribution(format!("marginal {} has {} outcomes", v + 1, m.len())));
            }
            validate_pmf(m, &format!("marginal {}", v + 1))?;
        }
        Ok(ProductDistribution { marginals })
    }

    pub fn n(&self) -> usize {
        self.marginals.len()
    }

    pub fn marginals(&self) -> &[Vec<f64>] {
        &self.marginals
    }

    /// Probability of a full assignment.
    pub fn prob(&self, assignment: &[usize]) -> f64 {
        self.marginals.iter().zip(assignment).map(|(m, &x)| m[x]).product()
    }

    pub fn joint(&self) -> JointDistribution {
        let alphabets: Vec<usize> = self.marginals.iter().map(Vec::len).collect();
        let mut pmf = vec![0.0; alphabets.iter().product()];
        for_each_assignment(&alphabets, |cell, digits| pmf[cell] = self.prob(digits));
        let total: f64 = pmf.iter().sum();
        pmf.iter_mut().for_each(|p| *p /= total);
        JointDistribution::new(alphabets, pmf).expect("product of valid marginals")
    }
}

/// A per-coordinate stochastic map; rows are indexed by input symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    pub outputs: usize,
    pub rows: Vec<Vec<f64>>,
}

impl Channel {
    pub fn deterministic(map: &[usize], outputs: usize) -> Result<Self> {
        let rows = map
            .iter()
            .map(|&y| {
                if y >= outputs {
                    return Err(Error::Invalid(format!("output {y} out of range {outputs}")));
                }
                let mut row = vec![0.0; outputs];
                row[y] = 1.0;
                Ok(row)
            })
            .collect::<Result<_>>()?;
        Ok(Channel { outputs, rows })
    }

    pub fn stochastic(rows: Vec<Vec<f64>>) -> Result<Self> {
        let outputs = rows.first().map_or(0, Vec::len);
        for (x, r) in rows.iter().enumerate() {
            if r.len() != outputs {
                return Err(Error::Invalid(format!("channel row {x} has {} outputs, expected {outputs}", r.len())));
            }
            validate_pmf(r, &format!("channel row {x}"))?;
        }
        Ok(Channel { outputs, rows })
    }

    pub fn identity(size: usize) -> Self {
        Self::deterministic(&(0..size).collect::<Vec<_>>(), size).expect("identity map")
    }

    pub fn inputs(&self) -> usize {
        self.rows.len()
    }

    /// `H(Y | X)` for input marginal `px`.
    pub fn equivocation(&self, px: &[f64]) -> f64 {
        px.iter().zip(&self.rows).map(|(p, row)| p * plogp_sum(row)).sum()
    }
}

/// `e(F) = H(X_F)` over all subsets.
pub fn entropy_setfn(dist: &JointDistribution) -> SetFunction<f64> {
    SetFunction::from_fn(dist.n(), "entropy", |s| dist.entropy(s)).expect("n <= 8")
}

/// `d(F) = −D(P_F ‖ Q_F)`.
pub fn relative_entropy_setfn(p: &JointDistribution, q: &ProductDistribution) -> Result<SetFunction<f64>> {
    if p.n() != q.n() {
        return Err(Error::SizeMismatch(p.n(), q.n()));
    }
    for (v, m) in q.marginals.iter().enumerate() {
        if m.len() != p.alphabets[v] {
            return Err(Error::InvalidDistribution(format!(
                "variable {} has alphabet {} under P but {} under Q",
                v + 1,
                p.alphabets[v],
                m.len()
            )));
        }
    }
    let mut values = Vec::with_capacity(1 << p.n());
    for mask in SubsetMask::all(p.n()) {
        if mask.is_empty() {
            values.push(0.0);
            continue;
        }
        let pf = p.marginal(mask);
        let sizes: Vec<usize> = mask.iter().map(|v| p.alphabets[v]).collect();
        let vars: Vec<usize> = mask.iter().collect();
        let mut divergence = 0.0;
        let mut violation = false;
        for_each_assignment(&sizes, |cell, digits| {
            let pv = pf[cell];
            if pv <= 0.0 {
                return;
            }
            let qv: f64 = vars.iter().zip(digits).map(|(&v, &x)| q.marginals[v][x]).product();
            if qv <= 0.0 {
                violation = true;
                return;
            }
            divergence += pv * (pv / qv).log2();
        });
        if violation {
            return Err(Error::AbsoluteContinuity(mask.to_elements()));
        }
        values.push(-divergence);
    }
    SetFunction::new(p.n(), values, "negative relative entropy")
}

pub fn total_correlation(dist: &JointDistribution) -> f64 {
    (0..dist.n()).map(|i| dist.entropy(SubsetMask::singleton(i))).sum::<f64>() - dist.entropy(dist.full())
}

pub fn dual_total_correlation(dist: &JointDistribution) -> f64 {
    let full = dist.full();
    let joint = dist.entropy(full);
    let erasure: f64 = (0..dist.n()).map(|i| joint - dist.entropy(full.without(i))).sum();
    joint - erasure
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MmiResult {
    pub value: f64,
    pub family: WeightedFamily,
    /// `γ(F) H(X_F)` per member.
    pub components: Vec<f64>,
    pub joint_entropy: f64,
}

/// `(F,γ)-MI = Σ γ(F) H(X_F) − H(X_[1:n])` for a fractional partition `γ`.
pub fn fg_mutual_information(dist: &JointDistribution, wf: &WeightedFamily) -> Result<MmiResult> {
    if dist.n() != wf.n() {
        return Err(Error::SizeMismatch(dist.n(), wf.n()));
    }
    wf.require_partition()?;
    let components: Vec<f64> =
        wf.members().iter().map(|m| crate::scalar::Scalar::to_f64(&m.weight) * dist.entropy(m.set)).collect();
    let joint_entropy = dist.entropy(dist.full());
    Ok(MmiResult {
        value: components.iter().sum::<f64>() - joint_entropy,
        family: wf.clone(),
        components,
        joint_entropy,
    })
}

fn proper_subsets(n: usize) -> Vec<SubsetMask> {
    let full = SubsetMask::full(n);
    SubsetMask::all(n).filter(|&s| !s.is_empty() && s != full).collect()
}

fn check_lp_size(n: usize) -> Result<()> {
    if !(2..=MAX_LP_VARIABLES).contains(&n) {
        return Err(Error::Invalid(format!("this optimization supports 2 <= n <= {MAX_LP_VARIABLES}, got {n}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharedInformation {
    pub value: f64,
    /// Maximizer of `Σ γ(F) H(X_F | X_F^c)` over partitions of proper subsets.
    pub argmax: WeightedFamily,
    /// `(F,γ̄)-MI/(w(γ̄)−1)` at the dual of `argmax`.
    pub dual_ratio: f64,
    pub joint_entropy: f64,
}

/// `SI = H(X_[1:n]) − max_γ Σ γ(F) H(X_F | X_F^c)` over fractional partitions
/// of all proper nonempty subsets, solved exactly.
pub fn shared_information(dist: &JointDistribution) -> Result<SharedInformation> {
    check_lp_size(dist.n())?;
    let n = dist.n();
    let h = entropy_setfn(dist);
    let joint = *h.at(h.full());
    let sets = proper_subsets(n);
    let costs: Vec<f64> = sets.iter().map(|&s| joint - h.at(s.complement(n))).collect();
    let opt = lp::maximize_partition_weighted_sum(n, &sets, &costs)?;
    let dual = opt.weights.dual()?;
    let dual_mi = fg_mutual_information(dist, &dual)?.value;
    let dual_ratio = dual_mi / crate::scalar::Scalar::to_f64(&(dual.weight_total() - Rational::one()));
    Ok(SharedInformation { value: joint - opt.value, argmax: opt.weights, dual_ratio, joint_entropy: joint })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MmiMaximum {
    pub value: f64,
    pub argmax: WeightedFamily,
    pub total_correlation: f64,
    /// The singleton family always attains the maximum.
    pub witness: WeightedFamily,
    pub witness_value: f64,
}

/// Maximizes the (F,γ)-MI over all fractional partitions of proper subsets.
pub fn mmi_max_over_partitions(dist: &JointDistribution) -> Result<MmiMaximum> {
    check_lp_size(dist.n())?;
    let n = dist.n();
    let h = entropy_setfn(dist);
    let joint = *h.at(h.full());
    let sets = proper_subsets(n);
    let costs: Vec<f64> = sets.iter().map(|&s| *h.at(s)).collect();
    let opt = lp::maximize_partition_weighted_sum(n, &sets, &costs)?;
    let witness = WeightedFamily::singletons(n);
    let witness_value = fg_mutual_information(dist, &witness)?.value;
    Ok(MmiMaximum {
        value: opt.value - joint,
        argmax: opt.weights,
        total_correlation: total_correlation(dist),
        witness,
        witness_value,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectedFamily {
    pub family: WeightedFamily,
    /// Weights of members equal to `{n}`, which project to the empty set.
    pub dropped_weights: Vec<String>,
    pub warnings: Vec<String>,
}

/// `F̃ = {{F ∩ [1:n−1]}}` with `γ̃(F̃) = γ(F)`.
pub fn project_family(wf: &WeightedFamily) -> Result<ProjectedFamily> {
    let (family, dropped) = wf.project_last()?;
    let warnings = if dropped.is_empty() {
        Vec::new()
    } else {
        vec![format!("dropped {} member(s) equal to {{{}}}", dropped.len(), wf.n())]
    };
    Ok(ProjectedFamily { family, dropped_weights: dropped.iter().map(format_rational).collect(), warnings })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecursionReport {
    pub full_mi: f64,
    pub projected_mi: f64,
    /// `γ(F) I(X_n; X_{[1:n−1]∖F} | X_{[1:n−1]∩F})` for each member containing `n`.
    pub terms: Vec<f64>,
    pub residual: f64,
    /// `I(X_n; X_[1:n−1])`.
    pub last_vs_rest: f64,
    pub sandwich_holds: bool,
}

/// Checks the one-variable-at-a-time decomposition of the (F,γ)-MI and the
/// sandwich `MI(F̃) <= MI(F) <= MI(F̃) + I(X_n; X_[1:n−1])`.
pub fn mmi_recursion_residual(dist: &JointDistribution, wf: &WeightedFamily, tol: f64) -> Result<RecursionReport> {
    let n = dist.n();
    let full_mi = fg_mutual_information(dist, wf)?.value;
    let projected = project_family(wf)?;
    let head = SubsetMask::full(n - 1);
    let head_dist = dist.marginalize(head)?;
    let projected_mi = fg_mutual_information(&head_dist, &projected.family)?.value;
    let last = SubsetMask::singleton(n - 1);
    let terms: Vec<f64> = wf
        .members()
        .iter()
        .filter(|m| m.set.contains(n - 1))
        .map(|m| {
            let inside = m.set.intersection(head);
            let outside = head.difference(m.set);
            crate::scalar::Scalar::to_f64(&m.weight) * dist.conditional_mutual_information(last, outside, inside)
        })
        .collect();
    let residual = (full_mi - projected_mi - terms.iter().sum::<f64>()).abs();
    let last_vs_rest = dist.conditional_mutual_information(last, head, SubsetMask::EMPTY);
    let sandwich_holds = projected_mi <= full_mi + tol && full_mi <= projected_mi + last_vs_rest + tol;
    Ok(RecursionReport { full_mi, projected_mi, terms, residual, last_vs_rest, sandwich_holds })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DataProcessingReport {
    pub mi_input: f64,
    pub mi_output: f64,
    /// `Σ H(Y_i | X_i)`.
    pub slack: f64,
    pub holds: bool,
}

/// `(F,γ)-MI(Y) <= (F,γ)-MI(X) + Σ H(Y_i | X_i)` for per-coordinate channels.
pub fn mmi_data_processing_check(
    dist: &JointDistribution,
    wf: &WeightedFamily,
    channels: &[Channel],
    tol: f64,
) -> Result<DataProcessingReport> {
    let out = dist.push_through(channels)?;
    let mi_input = fg_mutual_information(dist, wf)?.value;
    let mi_output = fg_mutual_information(&out, wf)?.value;
    let slack: f64 =
        channels.iter().enumerate().map(|(v, ch)| ch.equivocation(&dist.marginal(SubsetMask::singleton(v)))).sum();
    Ok(DataProcessingReport { mi_input, mi_output, slack, holds: mi_output <= mi_input + slack + tol })
}

/// Cardinality-profile weights `(γ_1, …, γ_{n−1})` when the aggregated weight
/// of each subset depends only on its size and every subset of each used
/// size is present; `None` otherwise.
pub fn symmetric_form(wf: &WeightedFamily) -> Option<Vec<Rational>> {
    if !wf.is_partition() {
        return None;
    }
    let n = wf.n();
    let mut aggregated = vec![Rational::zero(); 1 << n];
    for m in wf.members() {
        aggregated[m.set.index()] += &m.weight;
    }
    let mut profile = vec![Rational::zero(); n.saturating_sub(1)];
    for k in 1..=n {
        let weights: Vec<&Rational> =
            SubsetMask::all(n).filter(|s| s.len() == k).map(|s| &aggregated[s.index()]).collect();
        if weights.iter().all(|w| w.is_zero()) {
            continue;
        }
        if k == n || weights.iter().any(|w| *w != weights[0]) {
            return None;
        }
        profile[k - 1] = weights[0].clone();
    }
    let check: Rational = profile
        .iter()
        .enumerate()
        .map(|(i, g)| g * Rational::from_integer((binomial((n - 1) as u64, i as u64) as i64).into()))
        .sum();
    (check == Rational::one()).then_some(profile)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Corollary1Report {
    /// `I(X_i; X_[1:n]∖{i})` computed directly from the pmf.
    pub mutual_informations: Vec<f64>,
    pub bound: f64,
    pub satisfied: bool,
    pub stability: StabilityReport,
}

/// Small gaps of the entropy set function bound every `I(X_i; rest)` by `ε/σ`.
pub fn corollary1_stability(
    dist: &JointDistribution,
    wf: &WeightedFamily,
    epsilon: f64,
    tol: f64,
) -> Result<Corollary1Report> {
    wf.require_partition()?;
    let stability = gaps::stability_check(&entropy_setfn(dist), wf, &epsilon, tol)?;
    let full = dist.full();
    let mutual_informations: Vec<f64> = (0..dist.n())
        .map(|i| dist.conditional_mutual_information(SubsetMask::singleton(i), full.without(i), SubsetMask::EMPTY))
        .collect();
    let bound = stability.bound.to_f64();
    let satisfied = mutual_informations.iter().all(|&mi| mi <= bound + tol);
    Ok(Corollary1Report { mutual_informations, bound, satisfied, stability })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Corollary2Verdict {
    pub flavor: Flavor,
    pub gap_kind: GapKind,
    pub gap: f64,
    pub gap_zero: bool,
    pub max_product_distance: f64,
    pub distance_tolerance: f64,
    pub independent: bool,
    /// Elements whose variables must be constant for a zero gap.
    pub constant_set: SubsetMask,
    pub constants_hold: bool,
    pub predicted_zero: bool,
    pub agree: bool,
}

/// Zero entropy gap versus independence (plus constancy of over-covered
/// variables for coverings, under-covered for packings).
pub fn corollary2_verdict(dist: &JointDistribution, wf: &WeightedFamily, tol: f64) -> Result<Corollary2Verdict> {
    if dist.n() != wf.n() {
        return Err(Error::SizeMismatch(dist.n(), wf.n()));
    }
    let h = entropy_setfn(dist);
    let c = wf.classify();
    let (gap_kind, gap, constant_set) = match c.flavor {
        Flavor::Partition | Flavor::Covering => (GapKind::Upper, gaps::gap_upper(&h, wf)?, c.over_covered),
        Flavor::Packing => (GapKind::Lower, gaps::gap_lower(&h, wf)?, c.under_covered),
        got => return Err(Error::WrongFlavor { expected: "partition, covering or packing", got }),
    };
    let distance = dist.max_product_distance();
    let dtol = distance_tolerance(tol);
    let independent = distance <= dtol;
    let constants_hold = constant_set.iter().all(|i| *h.at(SubsetMask::singleton(i)) <= tol);
    let gap_zero = gap.abs() <= tol;
    let predicted_zero = independent && constants_hold;
    Ok(Corollary2Verdict {
        flavor: c.flavor,
        gap_kind,
        gap,
        gap_zero,
        max_product_distance: distance,
        distance_tolerance: dtol,
        independent,
        constant_set,
        constants_hold,
        predicted_zero,
        agree: gap_zero == predicted_zero,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Corollary3Verdict {
    pub flavor: Flavor,
    pub gap: f64,
    pub gap_zero: bool,
    pub product: bool,
    pub over_covered: SubsetMask,
    /// `P_{X_Z} = Q_{X_Z}` on the over-covered set; `None` for partitions.
    pub marginals_match: Option<bool>,
    pub predicted_zero: bool,
    pub agree: bool,
    /// Observed monotonicity of `d` on this instance.
    pub d_nondecreasing: bool,
    pub d_nonincreasing: bool,
}

/// Zero relative-entropy gap versus `P` being a product distribution (and
/// agreeing with `Q` on the over-covered variables for coverings).
pub fn corollary3_verdict(
    p: &JointDistribution,
    q: &ProductDistribution,
    wf: &WeightedFamily,
    tol: f64,
) -> Result<Corollary3Verdict> {
    if p.n() != wf.n() {
        return Err(Error::SizeMismatch(p.n(), wf.n()));
    }
    let d = relative_entropy_setfn(p, q)?;
    let c = wf.classify();
    if !matches!(c.flavor, Flavor::Partition | Flavor::Covering) {
        return Err(Error::WrongFlavor { expected: "partition or covering", got: c.flavor });
    }
    let gap = gaps::gap_upper(&d, wf)?;
    let dtol = distance_tolerance(tol);
    let product = p.max_product_distance() <= dtol;
    let z = c.over_covered;
    let marginals_match = (c.flavor == Flavor::Covering).then(|| {
        let pz = p.marginal(z);
        let vars: Vec<usize> = z.iter().collect();
        let sizes: Vec<usize> = vars.iter().map(|&v| p.alphabets[v]).collect();
        let mut ok = true;
        for_each_assignment(&sizes, |cell, digits| {
            let qv: f64 = vars.iter().zip(digits).map(|(&v, &x)| q.marginals[v][x]).product();
            ok &= (pz[cell] - qv).abs() <= dtol;
        });
        ok
    });
    let gap_zero = gap.abs() <= tol;
    let predicted_zero = product && marginals_match.unwrap_or(true);
    let mirrored = d.map(|v| -v);
    Ok(Corollary3Verdict {
        flavor: c.flavor,
        gap,
        gap_zero,
        product,
        over_covered: z,
        marginals_match,
        predicted_zero,
        agree: gap_zero == predicted_zero,
        d_nondecreasing: d.is_nondecreasing(tol).holds,
        d_nonincreasing: mirrored.is_nondecreasing(tol).holds,
    })
}
