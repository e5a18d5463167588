//! Brute-force oracles used to cross-check the library. Each one follows a
//! textbook definition directly and shares no code with the implementation
//! beyond the data types.
#![allow(dead_code)]

use std::collections::HashMap;

use fracsub::{Rational, SetFunction, SubsetMask};
use num_traits::{One, Signed, Zero};

/// Submodularity over every pair `(S, T)`.
pub fn submodular_all_pairs(values: &[f64], tol: f64) -> bool {
    let size = values.len();
    (0..size).all(|s| (0..size).all(|t| values[s | t] + values[s & t] <= values[s] + values[t] + tol))
}

pub fn submodular_all_pairs_exact(values: &[Rational]) -> bool {
    let size = values.len();
    (0..size).all(|s| (0..size).all(|t| &values[s | t] + &values[s & t] <= &values[s] + &values[t]))
}

/// `f(S) = Σ_{i∈S} f({i})` for every `S`, with `f(∅) = 0`.
pub fn modular_by_sum(values: &[Rational]) -> bool {
    (0..values.len()).all(|s| {
        let sum: Rational = (0..32).filter(|b| s >> b & 1 == 1).map(|b| values[1 << b].clone()).sum();
        values[s] == sum
    })
}

pub fn to_f64(f: &SetFunction<Rational>) -> Vec<f64> {
    f.values().iter().map(|v| num_traits::ToPrimitive::to_f64(v).unwrap()).collect()
}

/// Unique solution of `A x = b` by Gauss-Jordan elimination, if `A` has full
/// column rank and the system is consistent.
pub fn solve_unique(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<Rational>> =
        a.iter().zip(b).map(|(r, v)| r.iter().cloned().chain([v.clone()]).collect()).collect();
    let mut pivot_row = 0;
    for c in 0..cols {
        let p = (pivot_row..rows).find(|&r| !m[r][c].is_zero())?;
        m.swap(pivot_row, p);
        let inv = m[pivot_row][c].recip();
        for x in m[pivot_row].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..rows {
            if r != pivot_row && !m[r][c].is_zero() {
                let factor = m[r][c].clone();
                let pivot = m[pivot_row].clone();
                for (x, p) in m[r].iter_mut().zip(&pivot) {
                    *x = &*x - &factor * p;
                }
            }
        }
        pivot_row += 1;
    }
    if m[pivot_row..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    Some((0..cols).map(|c| m[c][cols].clone()).collect())
}

/// Every vertex of `{γ >= 0 : Σ_{S∋i} γ(S) = 1 ∀i}` by enumerating supports.
pub fn partition_vertices(n: usize, sets: &[SubsetMask]) -> Vec<Vec<Rational>> {
    let m = sets.len();
    let mut vertices: Vec<Vec<Rational>> = Vec::new();
    for support in 1u32..(1 << m) {
        let cols: Vec<usize> = (0..m).filter(|j| support >> j & 1 == 1).collect();
        let a: Vec<Vec<Rational>> = (0..n)
            .map(|i| {
                cols.iter().map(|&j| if sets[j].contains(i) { Rational::one() } else { Rational::zero() }).collect()
            })
            .collect();
        let b = vec![Rational::one(); n];
        let Some(x) = solve_unique(&a, &b) else { continue };
        if x.iter().any(|v| v.is_negative()) {
            continue;
        }
        let mut full = vec![Rational::zero(); m];
        for (k, &j) in cols.iter().enumerate() {
            full[j] = x[k].clone();
        }
        if !vertices.contains(&full) {
            vertices.push(full);
        }
    }
    vertices
}

pub fn best_vertex(n: usize, sets: &[SubsetMask], costs: &[Rational]) -> Option<Rational> {
    partition_vertices(n, sets).iter().map(|v| v.iter().zip(costs).map(|(a, b)| a * b).sum::<Rational>()).max()
}

/// `H(X_F)` in bits by grouping full assignments on their `F` coordinates.
pub fn entropy_direct(alphabets: &[usize], pmf: &[f64], mask: SubsetMask) -> f64 {
    let mut groups: HashMap<Vec<usize>, f64> = HashMap::new();
    for (cell, &p) in pmf.iter().enumerate() {
        let mut rest = cell;
        let mut digits = vec![0; alphabets.len()];
        for v in (0..alphabets.len()).rev() {
            digits[v] = rest % alphabets[v];
            rest /= alphabets[v];
        }
        let key: Vec<usize> = mask.iter().map(|v| digits[v]).collect();
        *groups.entry(key).or_default() += p;
    }
    -groups.values().filter(|&&p| p > 0.0).map(|p| p * p.log2()).sum::<f64>()
}

/// Joint pmf of independent marginals.
pub fn product_pmf(marginals: &[Vec<f64>]) -> Vec<f64> {
    marginals.iter().fold(vec![1.0], |acc, m| acc.iter().flat_map(|a| m.iter().map(move |b| a * b)).collect())
}

pub fn rational(p: i64, q: i64) -> Rational {
    Rational::new(p.into(), q.into())
}
