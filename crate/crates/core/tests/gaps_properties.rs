mod common;

use fracsub::gaps::{self, Assumptions, CertificateVerdict, PartialSetFunction};
use fracsub::generate::{random_covering, random_packing, random_partition, GeneratorRegistry};
use fracsub::{DynSetFunction, Flavor, Rational, Scalar, SetFunction, SubsetMask, WeightedFamily};
use num_traits::{One, Zero};
use proptest::prelude::*;

const KINDS: [&str; 3] = ["coverage", "entropy", "matroid-plus-modular"];

fn generated(kind: usize, n: usize, seed: u64) -> DynSetFunction {
    GeneratorRegistry::with_builtins().generate(KINDS[kind], n, seed).unwrap()
}

fn exact(n: usize, seed: u64) -> SetFunction<Rational> {
    let kind = if seed.is_multiple_of(2) { "coverage" } else { "matroid-plus-modular" };
    match GeneratorRegistry::with_builtins().generate(kind, n, seed).unwrap() {
        DynSetFunction::Rational(f) => f,
        DynSetFunction::Float(_) => unreachable!(),
    }
}

fn check_bounds<T: Scalar>(f: &SetFunction<T>, wf: &WeightedFamily, tol: f64) -> Result<(), TestCaseError> {
    let zero = T::zero();
    match wf.flavor() {
        Flavor::Partition => {
            prop_assert!(zero.le_tol(&gaps::gap_upper(f, wf).unwrap(), tol));
            prop_assert!(zero.le_tol(&gaps::gap_lower(f, wf).unwrap(), tol));
        }
        Flavor::Covering => prop_assert!(zero.le_tol(&gaps::gap_upper(f, wf).unwrap(), tol)),
        Flavor::Packing => prop_assert!(zero.le_tol(&gaps::gap_lower(f, wf).unwrap(), tol)),
        Flavor::None => unreachable!(),
    }
    let report = gaps::gap_report(f, wf, tol).unwrap();
    prop_assert!(report.is_consistent(), "{:?}", report.violations);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn fractional_subadditivity_sandwich(n in 2usize..=8, seed in any::<u64>(), kind in 0usize..3, variant in 0usize..3) {
        let wf = match variant {
            0 => random_partition(n, seed ^ 1).unwrap(),
            1 => random_covering(n, seed ^ 1).unwrap(),
            _ => random_packing(n, seed ^ 1).unwrap(),
        };
        match generated(kind, n, seed) {
            DynSetFunction::Rational(f) => check_bounds(&f, &wf, 0.0)?,
            DynSetFunction::Float(f) => check_bounds(&f, &wf, 1e-9)?,
        }
    }

    #[test]
    fn duality_is_exact(n in 2usize..=8, seed in any::<u64>()) {
        let f = exact(n, seed);
        let wf = random_partition(n, seed ^ 7).unwrap();
        prop_assume!(wf.weight_total() > Rational::one());
        prop_assert!(gaps::duality_residual(&f, &wf).unwrap().is_zero());
        let dual = wf.dual().unwrap();
        let lhs = gaps::gap_upper(&f, &wf).unwrap() / wf.weight_total();
        let rhs = gaps::gap_lower(&f, &dual).unwrap() / dual.weight_total();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn stability_bound_at_the_gap(n in 2usize..=7, seed in any::<u64>()) {
        let f = exact(n, seed);
        let wf = random_partition(n, seed ^ 3).unwrap();
        for eps in [gaps::gap_upper(&f, &wf).unwrap(), gaps::gap_lower(&f, &wf).unwrap()] {
            let r = gaps::stability_check(&f, &wf, &eps, 0.0).unwrap();
            prop_assert!(r.hypothesis_holds);
            prop_assert!(r.satisfied, "{:?}", r);
        }
    }

    #[test]
    fn equality_iff_modular_for_partitions(n in 2usize..=5, seed in any::<u64>(), make_modular in any::<bool>()) {
        let f = if make_modular {
            let singles: Vec<Rational> = (0..n).map(|i| common::rational((seed >> (4 * i)) as i64 % 7 - 3, 2)).collect();
            SetFunction::modular(&singles, "modular").unwrap()
        } else {
            exact(n, seed)
        };
        let wf = random_partition(n, seed ^ 11).unwrap();
        let modular = f.is_modular(0.0).unwrap().holds;
        prop_assert_eq!(modular, common::modular_by_sum(f.values()));
        prop_assert_eq!(gaps::gap_upper(&f, &wf).unwrap().is_zero(), modular);
        prop_assert_eq!(gaps::gap_lower(&f, &wf).unwrap().is_zero(), modular);
    }

    #[test]
    fn covering_equality_conditions(n in 2usize..=5, seed in any::<u64>(), shape in 0usize..3) {
        let wf = random_covering(n, seed).unwrap();
        let z = wf.classify().over_covered;
        let f = match shape {
            // modular, vanishing on the over-covered elements
            0 => {
                let s: Vec<Rational> = (0..n).map(|i| if z.contains(i) { Rational::zero() } else { common::rational(1 + i as i64, 3) }).collect();
                SetFunction::modular(&s, "m").unwrap()
            }
            // modular but positive somewhere on the over-covered elements
            1 => {
                let s: Vec<Rational> = (0..n).map(|i| common::rational(1 + i as i64, 3)).collect();
                SetFunction::modular(&s, "m").unwrap()
            }
            _ => exact(n, seed),
        };
        let r = gaps::equality_conditions_covering(&f, &wf, 0.0).unwrap();
        let zero_on_z = z.iter().all(|i| f.at(SubsetMask::singleton(i)).is_zero());
        let expected = common::modular_by_sum(f.values()) && zero_on_z;
        prop_assert_eq!(r.gap_zero, expected);
        prop_assert!(r.agree);
        if shape == 0 {
            prop_assert!(r.gap_zero);
        }
    }

    #[test]
    fn certificates_match_full_knowledge(n in 2usize..=6, seed in any::<u64>(), make_modular in any::<bool>()) {
        let f = if make_modular {
            let singles: Vec<Rational> = (0..n).map(|i| common::rational(i as i64 * 3 - 4, 5)).collect();
            SetFunction::modular(&singles, "modular").unwrap()
        } else {
            exact(n, seed)
        };
        let wf = random_partition(n, seed ^ 5).unwrap();
        let known = wf.sets().into_iter().chain([f.full()]).map(|s| (s, f.at(s).clone()));
        let partial = PartialSetFunction::new(n, known).unwrap();
        let assume = Assumptions { submodular_grounded: true, nondecreasing: false };
        let cert = gaps::certify_modular_partial(&partial, &wf, assume, 0.0).unwrap();
        let expected = if f.is_modular(0.0).unwrap().holds { CertificateVerdict::Modular } else { CertificateVerdict::NotModular };
        prop_assert_eq!(cert.verdict, expected);
    }
}

#[test]
fn correlated_bits_attain_the_stability_bound() {
    // H of two copies of a fair bit: singletons 1, pair 1
    let h = SetFunction::new(2, vec![0.0, 1.0, 1.0, 1.0], "entropy").unwrap();
    let wf = WeightedFamily::singletons(2);
    let eps = gaps::gap_upper(&h, &wf).unwrap();
    assert_eq!(eps, 1.0);
    let r = gaps::stability_check(&h, &wf, &eps, 2f64.powi(-30)).unwrap();
    assert_eq!(r.sigma, "1");
    assert!(r.defects.iter().all(|d| (d.to_f64() - 1.0).abs() <= 2f64.powi(-30)));
    assert!((r.bound.to_f64() - 1.0).abs() <= 2f64.powi(-30));
}
