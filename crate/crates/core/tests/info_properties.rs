mod common;

use fracsub::generate::{random_distribution, random_partition, random_product};
use fracsub::info::{
    self, dual_total_correlation, entropy_setfn, fg_mutual_information, mmi_data_processing_check,
    mmi_max_over_partitions, mmi_recursion_residual, relative_entropy_setfn, shared_information, total_correlation,
    Channel, JointDistribution,
};
use fracsub::{Rational, SubsetMask, WeightedFamily};
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1.0 / (1u64 << 30) as f64;

fn alphabets(n: usize, seed: u64) -> Vec<usize> {
    (0..n).map(|v| 2 + ((seed >> v) as usize % 2)).collect()
}

fn co_singletons(n: usize) -> WeightedFamily {
    WeightedFamily::k_subsets(n, n - 1).unwrap()
}

#[test]
fn entropy_matches_direct_grouping() {
    for seed in 0..40 {
        let n = 1 + seed as usize % 4;
        let a = alphabets(n, seed);
        let dist = random_distribution(&a, seed).unwrap();
        let h = entropy_setfn(&dist);
        for s in SubsetMask::all(n) {
            let direct = common::entropy_direct(&a, dist.pmf(), s);
            assert!((h.at(s) - direct).abs() <= 1e-12, "seed {seed} set {s:?}");
        }
    }
}

#[test]
fn singleton_and_co_singleton_families() {
    for seed in 0..100 {
        let n = 3 + seed as usize % 2;
        let dist = random_distribution(&alphabets(n, seed * 31), seed).unwrap();
        let tc = total_correlation(&dist);
        let dtc = dual_total_correlation(&dist);
        let h = entropy_setfn(&dist);
        let direct_tc: f64 = (0..n).map(|i| h.at(SubsetMask::singleton(i))).sum::<f64>() - h.at(h.full());
        assert!((tc - direct_tc).abs() <= TOL);
        let single = fg_mutual_information(&dist, &WeightedFamily::singletons(n)).unwrap().value;
        assert!((single - tc).abs() <= TOL, "seed {seed}");
        let co = fg_mutual_information(&dist, &co_singletons(n)).unwrap().value;
        assert!((co - dtc / (n - 1) as f64).abs() <= TOL, "seed {seed}");
    }
}

#[test]
fn product_distributions_have_zero_mi_and_conversely() {
    for seed in 0..50 {
        let n = 3 + seed as usize % 2;
        let a = alphabets(n, seed);
        let q = random_product(&a, seed).unwrap();
        let joint = q.joint();
        let expected = common::product_pmf(q.marginals());
        assert!(joint.pmf().iter().zip(&expected).all(|(x, y)| (x - y).abs() <= 1e-15));
        let wf = random_partition(n, seed).unwrap();
        let mi = fg_mutual_information(&joint, &wf).unwrap().value;
        assert!(mi.abs() <= TOL, "product seed {seed}: {mi}");

        // a dependent pmf has positive MI, and its product of marginals has none
        let p = random_distribution(&a, seed + 1000).unwrap();
        assert!(p.max_product_distance() > 1e-3);
        assert!(fg_mutual_information(&p, &wf).unwrap().value > TOL);
        let back = p.product_of_marginals().joint();
        assert!(fg_mutual_information(&back, &wf).unwrap().value.abs() <= TOL);
        for v in 0..n {
            let m = SubsetMask::singleton(v);
            assert!(p.marginal(m).iter().zip(back.marginal(m)).all(|(x, y)| (x - y).abs() <= 1e-12));
        }
    }
}

#[test]
fn shared_information_of_two_variables() {
    for seed in 0..60 {
        let dist = random_distribution(&alphabets(2, seed), seed).unwrap();
        let si = shared_information(&dist).unwrap();
        let direct = dist.conditional_mutual_information(SubsetMask(1), SubsetMask(2), SubsetMask::EMPTY);
        assert!((si.value - direct).abs() <= TOL, "seed {seed}");
    }
}

#[test]
fn shared_information_of_identical_bits() {
    let mut pmf = vec![0.0; 8];
    pmf[0] = 0.5;
    pmf[7] = 0.5;
    let dist = JointDistribution::new(vec![2, 2, 2], pmf).unwrap();
    let si = shared_information(&dist).unwrap();
    assert_eq!(si.value, 1.0);

    // every proper subset determines the rest, so all conditional entropies vanish
    let sets: Vec<SubsetMask> = (1..7).map(SubsetMask).collect();
    let h = entropy_setfn(&dist);
    let costs: Vec<Rational> = sets
        .iter()
        .map(|&s| {
            let c = h.at(h.full()) - h.at(s.complement(3));
            assert_eq!(c, 0.0);
            Rational::zero()
        })
        .collect();
    let best = common::best_vertex(3, &sets, &costs).unwrap();
    let oracle = 1.0 - num_traits::ToPrimitive::to_f64(&best).unwrap();
    assert_eq!(si.value, oracle);
    assert!(!common::partition_vertices(3, &sets).is_empty());
}

#[test]
fn shared_information_lies_between_dual_ratio_and_mi() {
    for seed in 0..30 {
        let n = 3;
        let dist = random_distribution(&alphabets(n, seed), seed).unwrap();
        let si = shared_information(&dist).unwrap();
        assert!(si.value >= -TOL);
        assert!(si.value <= total_correlation(&dist) + TOL);
        assert!((si.value - si.dual_ratio).abs() <= 1e-9, "seed {seed}: {} vs {}", si.value, si.dual_ratio);
    }
}

#[test]
fn maximum_over_partitions_is_total_correlation() {
    for seed in 0..40 {
        let n = 3 + seed as usize % 2;
        let dist = random_distribution(&alphabets(n, seed), seed).unwrap();
        let max = mmi_max_over_partitions(&dist).unwrap();
        assert!((max.value - max.total_correlation).abs() <= TOL, "seed {seed}");
        assert!((max.witness_value - max.total_correlation).abs() <= TOL);
    }
}

fn random_channels(alphabets: &[usize], rng: &mut ChaCha8Rng) -> Vec<Channel> {
    alphabets
        .iter()
        .map(|&a| {
            if rng.gen_bool(0.5) {
                let map: Vec<usize> = (0..a).map(|_| rng.gen_range(0..2)).collect();
                Channel::deterministic(&map, 2).unwrap()
            } else {
                let rows: Vec<Vec<f64>> = (0..a)
                    .map(|_| {
                        let w: Vec<f64> = (0..3).map(|_| rng.gen_range(0.05..1.0)).collect();
                        let s: f64 = w.iter().sum();
                        w.iter().map(|x| x / s).collect()
                    })
                    .collect();
                Channel::stochastic(rows).unwrap()
            }
        })
        .collect()
}

#[test]
fn recursion_sandwich_and_data_processing() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for seed in 0..100 {
        let n = 2 + seed as usize % 3;
        let a = alphabets(n, seed);
        let dist = random_distribution(&a, seed).unwrap();
        let wf = random_partition(n, seed ^ 0x55).unwrap();
        let r = mmi_recursion_residual(&dist, &wf, TOL).unwrap();
        assert!(r.residual <= TOL, "seed {seed}: residual {}", r.residual);
        assert!(r.sandwich_holds, "seed {seed}");
        let channels = random_channels(&a, &mut rng);
        let dp = mmi_data_processing_check(&dist, &wf, &channels, TOL).unwrap();
        assert!(dp.holds, "seed {seed}: {dp:?}");
    }
}

#[test]
fn deterministic_channels_never_increase_mi() {
    for seed in 0..40 {
        let n = 3;
        let a = vec![3; n];
        let dist = random_distribution(&a, seed).unwrap();
        let wf = random_partition(n, seed).unwrap();
        let channels: Vec<Channel> = (0..n).map(|_| Channel::deterministic(&[0, 1, 1], 2).unwrap()).collect();
        let dp = mmi_data_processing_check(&dist, &wf, &channels, TOL).unwrap();
        assert!(dp.slack.abs() <= TOL);
        assert!(dp.mi_output <= dp.mi_input + TOL);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn relative_entropy_to_a_product_is_supermodular_negated(n in 2usize..=4, seed in any::<u64>()) {
        let a = alphabets(n, seed);
        let p = random_distribution(&a, seed).unwrap();
        let q = random_product(&a, seed ^ 9).unwrap();
        let d = relative_entropy_setfn(&p, &q).unwrap();
        prop_assert!(d.is_grounded());
        prop_assert!(d.is_submodular(1e-9).holds);
        prop_assert!(common::submodular_all_pairs(d.values(), 1e-9));
        prop_assert!(d.values().iter().all(|&v| v <= 1e-12));
    }

    #[test]
    fn independence_verdicts_agree(n in 2usize..=4, seed in any::<u64>(), independent in any::<bool>()) {
        let a = alphabets(n, seed);
        let dist = if independent {
            random_product(&a, seed).unwrap().joint()
        } else {
            random_distribution(&a, seed).unwrap()
        };
        let wf = random_partition(n, seed ^ 4).unwrap();
        let v = info::corollary2_verdict(&dist, &wf, TOL).unwrap();
        prop_assert!(v.agree, "{:?}", v);
        prop_assert_eq!(v.gap_zero, independent);
        let q = random_product(&a, seed ^ 2).unwrap();
        let v3 = info::corollary3_verdict(&dist, &q, &wf, TOL).unwrap();
        prop_assert!(v3.agree, "{:?}", v3);
    }

    #[test]
    fn small_gaps_bound_each_variables_mi(n in 2usize..=4, seed in any::<u64>()) {
        let dist = random_distribution(&alphabets(n, seed), seed).unwrap();
        let wf = random_partition(n, seed ^ 8).unwrap();
        let eps = fracsub::gaps::gap_upper(&entropy_setfn(&dist), &wf).unwrap();
        let r = info::corollary1_stability(&dist, &wf, eps, 1e-9).unwrap();
        prop_assert!(r.satisfied, "{:?}", r);
    }
}
