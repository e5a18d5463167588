mod common;

use std::collections::VecDeque;

use fracsub::generate::random_partition;
use fracsub::matroid::{
    corollary4_verdict, loops, rank_setfn, Free, Graphic, Linear, MatroidRegistry, RankOracle, Uniform,
};
use fracsub::{Rational, SubsetMask, WeightedFamily};
use num_traits::Zero;
use proptest::prelude::*;

fn linear_strategy() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=4, 1usize..=8)
        .prop_flat_map(|(rows, cols)| prop::collection::vec(prop::collection::vec(-2i64..=2, cols), rows))
}

fn graph_strategy() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (2usize..=5).prop_flat_map(|v| (Just(v), prop::collection::vec((1..=v, 1..=v), 1..=8)))
}

/// Columns in `s` are independent iff `A_S x = 0` has only the zero solution.
fn independent_by_elimination(matrix: &[Vec<i64>], s: SubsetMask) -> bool {
    let a: Vec<Vec<Rational>> =
        matrix.iter().map(|row| s.iter().map(|c| Rational::from_integer(row[c].into())).collect()).collect();
    let zeros = vec![Rational::zero(); matrix.len()];
    common::solve_unique(&a, &zeros).is_some()
}

/// Edges in `s` form a forest iff `|E_S| = |V| − #components(V, E_S)`.
fn acyclic_by_search(vertices: usize, edges: &[(usize, usize)], s: SubsetMask) -> bool {
    let chosen: Vec<(usize, usize)> = s.iter().map(|e| edges[e]).collect();
    let mut seen = vec![false; vertices + 1];
    let mut components = 0;
    for start in 1..=vertices {
        if seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &(a, b) in &chosen {
                for (x, y) in [(a, b), (b, a)] {
                    if x == u && !seen[y] {
                        seen[y] = true;
                        queue.push_back(y);
                    }
                }
            }
        }
    }
    chosen.len() == vertices - components
}

fn check_axioms(m: &dyn RankOracle) -> Result<(), TestCaseError> {
    let n = m.n();
    prop_assert_eq!(m.rank(SubsetMask::EMPTY), 0);
    for s in SubsetMask::all(n) {
        let r = m.rank(s);
        prop_assert!(r <= s.len());
        for i in 0..n {
            let grown = m.rank(s.with(i));
            prop_assert!(grown == r || grown == r + 1);
        }
    }
    let f = rank_setfn(m).unwrap();
    prop_assert!(common::submodular_all_pairs_exact(f.values()));
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn linear_rank_axioms_and_independence(matrix in linear_strategy()) {
        let m = Linear::from_integers(&matrix).unwrap();
        check_axioms(&m)?;
        for s in SubsetMask::all(m.n()) {
            prop_assert_eq!(m.is_independent(s), independent_by_elimination(&matrix, s), "set {:?}", s);
        }
    }

    #[test]
    fn graphic_rank_axioms_and_independence((v, edges) in graph_strategy()) {
        let m = Graphic::new(v, edges.clone()).unwrap();
        check_axioms(&m)?;
        let as_matrix = Linear::from_integers(&m.incidence_matrix()).unwrap();
        for s in SubsetMask::all(m.n()) {
            prop_assert_eq!(m.is_independent(s), acyclic_by_search(v, &edges, s), "set {:?}", s);
            prop_assert_eq!(m.rank(s), as_matrix.rank(s));
        }
    }

    #[test]
    fn matroid_equality_three_ways(matrix in linear_strategy(), seed in any::<u64>()) {
        let m = Linear::from_integers(&matrix).unwrap();
        prop_assume!(m.n() >= 2);
        let wf = random_partition(m.n(), seed).unwrap();
        let v = corollary4_verdict(&m, &wf).unwrap();
        prop_assert!(v.agree, "{:?}", v);
        let b = loops(&m);
        let structural = SubsetMask::all(m.n()).all(|s| m.is_independent(s) == s.intersection(b).is_empty());
        prop_assert_eq!(structural, v.equality);
    }

    #[test]
    fn uniform_matroids(n in 2usize..=8, k in 0usize..=8, seed in any::<u64>()) {
        let k = k.min(n);
        let m = Uniform { n, k };
        check_axioms(&m)?;
        let v = corollary4_verdict(&m, &random_partition(n, seed).unwrap()).unwrap();
        prop_assert!(v.agree);
        // U_{k,n} is free exactly when k = n, and all loops when k = 0
        prop_assert_eq!(v.free_outside_loops, k == n || k == 0);
    }
}

#[test]
fn free_matroid_equality() {
    for n in 2..=8 {
        let m = Free { n };
        for wf in [WeightedFamily::singletons(n), WeightedFamily::k_subsets(n, n - 1).unwrap()] {
            let v = corollary4_verdict(&m, &wf).unwrap();
            assert!(v.equality && v.agree && v.free_outside_loops);
            assert_eq!(v.gap, "0");
        }
    }
}

#[test]
fn uniform_two_three_gap_is_one() {
    let m = Uniform { n: 3, k: 2 };
    let v = corollary4_verdict(&m, &WeightedFamily::singletons(3)).unwrap();
    assert_eq!(v.gap, "1");
    assert!(!v.equality && v.agree);
}

#[test]
fn one_loop_independent_sets_avoid_the_loop() {
    for n in 2..=8 {
        for l in 0..n {
            // identity columns with column `l` zeroed
            let matrix: Vec<Vec<i64>> = (0..n).map(|r| (0..n).map(|c| i64::from(r == c && c != l)).collect()).collect();
            let m = Linear::from_integers(&matrix).unwrap();
            let b = loops(&m);
            assert_eq!(b, SubsetMask::singleton(l));
            for s in SubsetMask::all(n) {
                assert_eq!(m.is_independent(s), !s.contains(l));
                assert_eq!(m.is_independent(s), independent_by_elimination(&matrix, s));
            }
            let wf = random_partition(n, l as u64).unwrap();
            let v = corollary4_verdict(&m, &wf).unwrap();
            assert!(v.equality && v.free_outside_loops && v.modular && v.agree);
        }
    }
}

#[test]
fn registry_builds_every_kind() {
    let reg = MatroidRegistry::with_builtins();
    assert_eq!(reg.kinds(), vec!["free", "graphic", "linear", "uniform"]);
    let m = reg.from_json(r#"{"kind":"linear","matrix":[["1/2",0,1],[0,"2/3",1]]}"#).unwrap();
    assert_eq!(m.rank(SubsetMask::full(3)), 2);
    let m = reg.from_json(r#"{"kind":"graphic","vertices":3,"edges":[[1,2],[2,3],[3,1]]}"#).unwrap();
    assert_eq!(m.rank(SubsetMask::full(3)), 2);
    assert!(reg.from_json(r#"{"kind":"uniform","n":2,"k":3}"#).is_err());
    assert!(reg.from_json(r#"{"kind":"transversal"}"#).is_err());
}
