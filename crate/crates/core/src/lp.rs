//! Exact rational linear programming.
//!
//! Two-phase primal simplex on a dense tableau with Bland's rule. Variables
//! are implicitly nonnegative and the objective is maximized. No floating
//! point arithmetic happens inside the solver.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frac::{Member, WeightedFamily};
use crate::scalar::{rational_from_f64, Rational, Scalar};
use crate::setfn::SubsetMask;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coefficients: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RationalLp {
    objective: Vec<Rational>,
    rows: Vec<Constraint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpOutcome {
    pub status: LpStatus,
    /// Empty unless `status` is `Optimal`.
    pub solution: Vec<Rational>,
    pub value: Rational,
    pub pivots: usize,
}

impl RationalLp {
    /// A problem maximizing `objective · x` over `x >= 0` with no rows yet.
    pub fn maximize(objective: Vec<Rational>) -> Self {
        RationalLp { objective, rows: Vec::new() }
    }

    pub fn variables(&self) -> usize {
        self.objective.len()
    }

    pub fn rows(&self) -> &[Constraint] {
        &self.rows
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }

    pub fn add_row(&mut self, coefficients: Vec<Rational>, relation: Relation, rhs: Rational) -> Result<()> {
        if coefficients.len() != self.variables() {
            return Err(Error::Invalid(format!(
                "row has {} coefficients, expected {}",
                coefficients.len(),
                self.variables()
            )));
        }
        self.rows.push(Constraint { coefficients, relation, rhs });
        Ok(())
    }

    /// Per-row `a·x − b`.
    pub fn residuals(&self, x: &[Rational]) -> Vec<Rational> {
        self.rows.iter().map(|r| r.coefficients.iter().zip(x).map(|(a, v)| a * v).sum::<Rational>() - &r.rhs).collect()
    }

    /// Whether `x` is nonnegative and satisfies every row exactly.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.variables()
            && x.iter().all(|v| !v.is_negative())
            && self.rows.iter().zip(self.residuals(x)).all(|(row, res)| match row.relation {
                Relation::Eq => res.is_zero(),
                Relation::Le => !res.is_positive(),
                Relation::Ge => !res.is_negative(),
            })
    }

    pub fn value_at(&self, x: &[Rational]) -> Rational {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).solve(self)
    }
}

struct Tableau {
    /// `rows × (cols + 1)`; the last column holds the right-hand side.
    cells: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    cols: usize,
    originals: usize,
    first_artificial: usize,
    pivots: usize,
}

impl Tableau {
    fn build(lp: &RationalLp) -> Self {
        let m = lp.variables();
        let normalized: Vec<(Vec<Rational>, Relation, Rational)> = lp
            .rows
            .iter()
            .map(|r| {
                if r.rhs.is_negative() {
                    let flipped = match r.relation {
                        Relation::Eq => Relation::Eq,
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                    };
                    (r.coefficients.iter().map(|a| -a).collect(), flipped, -&r.rhs)
                } else {
                    (r.coefficients.clone(), r.relation, r.rhs.clone())
                }
            })
            .collect();
        let slacks = normalized.iter().filter(|r| r.1 != Relation::Eq).count();
        let artificials = normalized.iter().filter(|r| r.1 != Relation::Le).count();
        let first_artificial = m + slacks;
        let cols = first_artificial + artificials;

        let mut cells = Vec::with_capacity(normalized.len());
        let mut basis = Vec::with_capacity(normalized.len());
        let (mut next_slack, mut next_art) = (m, first_artificial);
        for (coeffs, rel, rhs) in normalized {
            let mut row = coeffs;
            row.resize(cols + 1, Rational::zero());
            row[cols] = rhs;
            match rel {
                Relation::Le => {
                    row[next_slack] = Rational::one();
                    basis.push(next_slack);
                    next_slack += 1;
                }
                Relation::Ge => {
                    row[next_slack] = -Rational::one();
                    next_slack += 1;
                    row[next_art] = Rational::one();
                    basis.push(next_art);
                    next_art += 1;
                }
                Relation::Eq => {
                    row[next_art] = Rational::one();
                    basis.push(next_art);
                    next_art += 1;
                }
            }
            cells.push(row);
        }
        Tableau { cells, basis, cols, originals: m, first_artificial, pivots: 0 }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.cells[r][c].recip();
        for v in self.cells[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = self.cells[r].clone();
        for (i, row) in self.cells.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Maximizes `cost · x` over columns `< limit`. Returns `false` when
    /// unbounded.
    fn optimize(&mut self, cost: &[Rational], limit: usize) -> bool {
        loop {
            // Bland: lowest-index column with positive reduced cost enters.
            let entering = (0..limit).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let z: Rational = self.basis.iter().zip(&self.cells).map(|(&b, row)| &cost[b] * &row[j]).sum();
                (&cost[j] - z).is_positive()
            });
            let Some(j) = entering else { return true };
            // Minimum ratio, ties to the lowest-index basic variable.
            let mut leaving: Option<(usize, Rational)> = None;
            for (r, row) in self.cells.iter().enumerate() {
                if !row[j].is_positive() {
                    continue;
                }
                let ratio = &row[self.cols] / &row[j];
                let better = match &leaving {
                    None => true,
                    Some((lr, lratio)) => ratio < *lratio || (ratio == *lratio && self.basis[r] < self.basis[*lr]),
                };
                if better {
                    leaving = Some((r, ratio));
                }
            }
            match leaving {
                Some((r, _)) => self.pivot(r, j),
                None => return false,
            }
        }
    }

    fn solve(mut self, lp: &RationalLp) -> LpOutcome {
        let infeasible =
            |pivots| LpOutcome { status: LpStatus::Infeasible, solution: Vec::new(), value: Rational::zero(), pivots };

        if self.first_artificial < self.cols {
            let mut phase1 = vec![Rational::zero(); self.cols];
            for c in phase1.iter_mut().skip(self.first_artificial) {
                *c = -Rational::one();
            }
            self.optimize(&phase1, self.cols);
            let artificial_sum: Rational = self
                .basis
                .iter()
                .zip(&self.cells)
                .filter(|(&b, _)| b >= self.first_artificial)
                .map(|(_, row)| row[self.cols].clone())
                .sum();
            if !artificial_sum.is_zero() {
                return infeasible(self.pivots);
            }
            // Drive zero-level artificials out of the basis; drop redundant rows.
            let mut r = 0;
            while r < self.cells.len() {
                if self.basis[r] >= self.first_artificial {
                    match (0..self.first_artificial).find(|&j| !self.cells[r][j].is_zero()) {
                        Some(j) => self.pivot(r, j),
                        None => {
                            self.cells.remove(r);
                            self.basis.remove(r);
                            continue;
                        }
                    }
                }
                r += 1;
            }
        }

        let mut phase2 = vec![Rational::zero(); self.cols];
        phase2[..self.originals].clone_from_slice(&lp.objective);
        if !self.optimize(&phase2, self.first_artificial) {
            return LpOutcome {
                status: LpStatus::Unbounded,
                solution: Vec::new(),
                value: Rational::zero(),
                pivots: self.pivots,
            };
        }
        let mut solution = vec![Rational::zero(); self.originals];
        for (&b, row) in self.basis.iter().zip(&self.cells) {
            if b < self.originals {
                solution[b] = row[self.cols].clone();
            }
        }
        let value = lp.value_at(&solution);
        LpOutcome { status: LpStatus::Optimal, solution, value, pivots: self.pivots }
    }
}

/// The partition polytope `{γ >= 0 : Σ_{S∋i} γ(S) = 1 ∀i}` over `sets`, with
/// the given objective.
pub fn partition_lp(n: usize, sets: &[SubsetMask], objective: Vec<Rational>) -> RationalLp {
    let mut lp = RationalLp::maximize(objective);
    for i in 0..n {
        let row = sets.iter().map(|s| if s.contains(i) { Rational::one() } else { Rational::zero() }).collect();
        lp.add_row(row, Relation::Eq, Rational::one()).expect("row width matches");
    }
    lp
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionOptimum {
    pub weights: WeightedFamily,
    pub value: f64,
    #[serde(skip)]
    pub exact_value: Rational,
}

/// Maximizes `Σ γ(S)·cost(S)` over fractional partitions supported on `sets`.
///
/// Costs are embedded exactly as rationals; only the reported value is
/// rounded back to binary64.
pub fn maximize_partition_weighted_sum(n: usize, sets: &[SubsetMask], costs: &[f64]) -> Result<PartitionOptimum> {
    if sets.len() != costs.len() {
        return Err(Error::Invalid(format!("{} sets but {} costs", sets.len(), costs.len())));
    }
    let objective = costs.iter().map(|&c| rational_from_f64(c)).collect::<Result<Vec<_>>>()?;
    let outcome = partition_lp(n, sets, objective).solve();
    if outcome.status != LpStatus::Optimal {
        return Err(Error::Infeasible);
    }
    let members = sets
        .iter()
        .zip(&outcome.solution)
        .filter(|(_, w)| w.is_positive())
        .map(|(&set, w)| Member { set, weight: w.clone() })
        .collect();
    Ok(PartitionOptimum {
        weights: WeightedFamily::new(n, members)?,
        value: Scalar::to_f64(&outcome.value),
        exact_value: outcome.value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    #[test]
    fn single_upper_bound() {
        let mut lp = RationalLp::maximize(vec![int(1)]);
        lp.add_row(vec![int(1)], Relation::Le, int(3)).unwrap();
        let out = lp.solve();
        assert_eq!(out.status, LpStatus::Optimal);
        assert_eq!(out.solution, vec![int(3)]);
        assert_eq!(out.value, int(3));
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        let mut lp = RationalLp::maximize(vec![int(1)]);
        lp.add_row(vec![int(1)], Relation::Ge, int(1)).unwrap();
        lp.add_row(vec![int(1)], Relation::Le, int(0)).unwrap();
        assert_eq!(lp.solve().status, LpStatus::Infeasible);
    }

    #[test]
    fn missing_upper_bound_is_unbounded() {
        let mut lp = RationalLp::maximize(vec![int(1), int(0)]);
        lp.add_row(vec![int(1), int(-1)], Relation::Le, int(2)).unwrap();
        assert_eq!(lp.solve().status, LpStatus::Unbounded);
    }

    #[test]
    fn negative_rhs_rows_are_flipped() {
        // maximize -x s.t. -x <= -2  (x >= 2)
        let mut lp = RationalLp::maximize(vec![int(-1)]);
        lp.add_row(vec![int(-1)], Relation::Le, int(-2)).unwrap();
        let out = lp.solve();
        assert_eq!(out.solution, vec![int(2)]);
        assert_eq!(out.value, int(-2));
    }

    #[test]
    fn redundant_equalities_are_dropped() {
        let mut lp = RationalLp::maximize(vec![int(1), int(2)]);
        lp.add_row(vec![int(1), int(1)], Relation::Eq, int(1)).unwrap();
        lp.add_row(vec![int(2), int(2)], Relation::Eq, int(2)).unwrap();
        let out = lp.solve();
        assert_eq!(out.status, LpStatus::Optimal);
        assert_eq!(out.solution, vec![int(0), int(1)]);
        assert!(lp.is_feasible(&out.solution));
    }

    #[test]
    fn row_width_is_checked() {
        let mut lp = RationalLp::maximize(vec![int(1)]);
        assert!(lp.add_row(vec![int(1), int(2)], Relation::Le, int(1)).is_err());
    }

    #[test]
    fn pair_family_partition() {
        let sets: Vec<_> = [0b011u32, 0b110, 0b101].into_iter().map(SubsetMask).collect();
        let lp = partition_lp(3, &sets, vec![int(1); 3]);
        let out = lp.solve();
        assert_eq!(out.status, LpStatus::Optimal);
        assert_eq!(out.solution, vec![ratio(1, 2); 3]);
        assert!(lp.residuals(&out.solution).iter().all(Zero::is_zero));
    }

    #[test]
    fn weighted_sum_examples() {
        let singles = [SubsetMask(1), SubsetMask(2)];
        let opt = maximize_partition_weighted_sum(2, &singles, &[0.75, 1.5]).unwrap();
        assert_eq!(opt.value, 2.25);
        assert!(opt.weights.members().iter().all(|m| m.weight == int(1)));

        // Independent bits: H(X_F) = |F| over all proper nonempty subsets.
        let sets: Vec<_> = (1..7u32).map(SubsetMask).collect();
        let costs: Vec<f64> = sets.iter().map(|s| s.len() as f64).collect();
        let opt = maximize_partition_weighted_sum(3, &sets, &costs).unwrap();
        assert_eq!(opt.value, 3.0);
        assert!(opt.weights.is_partition());
    }

    #[test]
    fn infeasible_family_is_reported() {
        let err = maximize_partition_weighted_sum(2, &[SubsetMask(1)], &[1.0]);
        assert!(matches!(err, Err(Error::Infeasible)));
    }

    #[test]
    fn solve_is_deterministic() {
        let sets: Vec<_> = (1..15u32).map(SubsetMask).collect();
        let obj: Vec<_> = sets.iter().map(|s| ratio(s.0 as i64 % 5, 3)).collect();
        let lp = partition_lp(4, &sets, obj);
        assert_eq!(lp.solve(), lp.solve());
    }
}
