//! Seeded test-instance generators.
//!
//! Set-function generators implement [`Generator`] and are looked up by name
//! in a [`GeneratorRegistry`]. All output is a deterministic function of the
//! seed (ChaCha8).

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::frac::{Member, WeightedFamily};
use crate::info::{JointDistribution, ProductDistribution};
use crate::matroid::{rank_setfn, Linear};
use crate::scalar::{ratio, Rational};
use crate::setfn::{DynSetFunction, SetFunction, SubsetMask};

pub trait Generator: Send + Sync {
    fn name(&self) -> &'static str;
    fn max_n(&self) -> usize;
    fn generate(&self, n: usize, rng: &mut ChaCha8Rng) -> Result<DynSetFunction>;
}

/// Weighted coverage: each element covers a random set of weighted items.
struct Coverage;

impl Generator for Coverage {
    fn name(&self) -> &'static str {
        "coverage"
    }
    fn max_n(&self) -> usize {
        16
    }
    fn generate(&self, n: usize, rng: &mut ChaCha8Rng) -> Result<DynSetFunction> {
        let items = 2 * n + 2;
        let weights: Vec<Rational> = (0..items).map(|_| ratio(rng.gen_range(1..=12), rng.gen_range(1..=4))).collect();
        let covers: Vec<u64> =
            (0..n).map(|_| (0..items).filter(|_| rng.gen_bool(0.4)).fold(0u64, |acc, t| acc | 1 << t)).collect();
        let f = SetFunction::from_fn(n, "coverage", |s| {
            let covered = s.iter().fold(0u64, |acc, i| acc | covers[i]);
            (0..items).filter(|t| covered >> t & 1 == 1).map(|t| weights[t].clone()).sum()
        })?;
        Ok(DynSetFunction::Rational(f))
    }
}

/// Entropy (bits) of random binary variables with a sparse random pmf.
struct Entropy;

impl Generator for Entropy {
    fn name(&self) -> &'static str {
        "entropy"
    }
    fn max_n(&self) -> usize {
        12
    }
    fn generate(&self, n: usize, rng: &mut ChaCha8Rng) -> Result<DynSetFunction> {
        let cells = 1usize << n;
        let support = cells.min(4 * n + 4);
        let mut pmf: BTreeMap<usize, f64> = BTreeMap::new();
        while pmf.len() < support {
            pmf.insert(rng.gen_range(0..cells), rng.gen_range(0.05..1.0));
        }
        let total: f64 = pmf.values().sum();
        let sorted: Vec<(usize, f64)> = pmf.into_iter().map(|(c, p)| (c, p / total)).collect();
        let f = SetFunction::from_fn(n, "entropy", |s| {
            if s.is_empty() {
                return 0.0;
            }
            let mut marginal: BTreeMap<usize, f64> = BTreeMap::new();
            for &(c, p) in &sorted {
                *marginal.entry(c & s.index()).or_default() += p;
            }
            -marginal.values().filter(|&&p| p > 0.0).map(|p| p * p.log2()).sum::<f64>()
        })?;
        Ok(DynSetFunction::Float(f))
    }
}

/// Rank of a random integer matrix plus a random nonnegative modular part.
struct MatroidPlusModular;

impl Generator for MatroidPlusModular {
    fn name(&self) -> &'static str {
        "matroid-plus-modular"
    }
    fn max_n(&self) -> usize {
        12
    }
    fn generate(&self, n: usize, rng: &mut ChaCha8Rng) -> Result<DynSetFunction> {
        let rows = rng.gen_range(1..=n.max(1));
        let matrix: Vec<Vec<i64>> = (0..rows).map(|_| (0..n).map(|_| rng.gen_range(-2..=2)).collect()).collect();
        let rank = rank_setfn(&Linear::from_integers(&matrix)?)?;
        let singletons: Vec<Rational> = (0..n).map(|_| ratio(rng.gen_range(0..=6), rng.gen_range(1..=3))).collect();
        let modular = SetFunction::modular(&singletons, "modular")?;
        let values = rank.values().iter().zip(modular.values()).map(|(a, b)| a + b).collect();
        Ok(DynSetFunction::Rational(SetFunction::new(n, values, "matroid-plus-modular")?))
    }
}

pub struct GeneratorRegistry {
    generators: BTreeMap<&'static str, Box<dyn Generator>>,
}

impl GeneratorRegistry {
    pub fn empty() -> Self {
        GeneratorRegistry { generators: BTreeMap::new() }
    }

    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(Coverage));
        r.register(Box::new(Entropy));
        r.register(Box::new(MatroidPlusModular));
        r
    }

    pub fn register(&mut self, g: Box<dyn Generator>) {
        self.generators.insert(g.name(), g);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.generators.keys().copied().collect()
    }

    pub fn generate(&self, kind: &str, n: usize, seed: u64) -> Result<DynSetFunction> {
        let g = self
            .generators
            .get(kind)
            .ok_or_else(|| Error::UnknownName { kind: "generator", name: kind.to_string() })?;
        if n > g.max_n() {
            return Err(Error::GroundSetTooLarge(n, g.max_n()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        g.generate(n, &mut rng)
    }
}

impl Default for GeneratorRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

fn random_set_partition(n: usize, rng: &mut ChaCha8Rng) -> Vec<SubsetMask> {
    let mut blocks = vec![SubsetMask::EMPTY; n];
    for i in 0..n {
        let b = rng.gen_range(0..n);
        blocks[b] = blocks[b].with(i);
    }
    blocks.retain(|b| !b.is_empty());
    blocks
}

fn separates_all_pairs(n: usize, components: &[Vec<SubsetMask>]) -> bool {
    (0..n).all(|i| (0..n).all(|j| i == j || components.iter().flatten().any(|s| s.contains(i) && !s.contains(j))))
}

fn collect_members(n: usize, weighted: impl IntoIterator<Item = (SubsetMask, Rational)>) -> Result<WeightedFamily> {
    let mut merged: BTreeMap<SubsetMask, Rational> = BTreeMap::new();
    for (s, w) in weighted {
        *merged.entry(s).or_insert_with(Rational::zero) += w;
    }
    WeightedFamily::new(n, merged.into_iter().map(|(set, weight)| Member { set, weight }).collect())
}

/// A random normalized fractional partition: a rational mixture of random
/// set partitions, never containing `[1:n]` and separating every pair.
pub fn random_partition(n: usize, seed: u64) -> Result<WeightedFamily> {
    if n < 2 {
        return Err(Error::Invalid("random partitions need n >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let full = SubsetMask::full(n);
    let count = rng.gen_range(1..=3);
    let mut components: Vec<Vec<SubsetMask>> =
        (0..count).map(|_| random_set_partition(n, &mut rng)).filter(|c| !c.contains(&full)).collect();
    if !separates_all_pairs(n, &components) {
        components.push((0..n).map(SubsetMask::singleton).collect());
    }
    let raw: Vec<i64> = components.iter().map(|_| rng.gen_range(1..=6)).collect();
    let total: i64 = raw.iter().sum();
    collect_members(n, components.iter().zip(&raw).flat_map(|(c, &w)| c.iter().map(move |&s| (s, ratio(w, total)))))
}

fn random_proper_subset(n: usize, rng: &mut ChaCha8Rng) -> SubsetMask {
    loop {
        let s = SubsetMask(rng.gen_range(1..(1u32 << n) - 1));
        if !s.is_empty() {
            return s;
        }
    }
}

/// A random partition plus extra weighted members.
pub fn random_covering(n: usize, seed: u64) -> Result<WeightedFamily> {
    let base = random_partition(n, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let extra: Vec<(SubsetMask, Rational)> = (0..rng.gen_range(1..=2))
        .map(|_| (random_proper_subset(n, &mut rng), ratio(1, rng.gen_range(1..=4))))
        .collect();
    collect_members(n, base.members().iter().map(|m| (m.set, m.weight.clone())).chain(extra))
}

/// A random partition with some weight removed.
pub fn random_packing(n: usize, seed: u64) -> Result<WeightedFamily> {
    let base = random_partition(n, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5851_f42d_4c95_7f2d);
    let shrink = ratio(rng.gen_range(1..=3), 4);
    let victim = rng.gen_range(0..base.len());
    let scaled = base.members().iter().enumerate().map(|(k, m)| {
        let w = if k == victim { &m.weight * &shrink } else { m.weight.clone() };
        (m.set, w)
    });
    let packing = collect_members(n, scaled)?;
    debug_assert!(packing.coverage().iter().all(|c| *c <= Rational::one()));
    Ok(packing)
}

fn random_pmf(len: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut p: Vec<f64> = (0..len).map(|_| if rng.gen_bool(0.15) { 0.0 } else { rng.gen_range(0.01..1.0) }).collect();
    if p.iter().all(|&x| x == 0.0) {
        p[0] = 1.0;
    }
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= total);
    p
}

/// A random joint pmf with the given alphabet sizes; some cells are zero.
pub fn random_distribution(alphabets: &[usize], seed: u64) -> Result<JointDistribution> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    JointDistribution::new(alphabets.to_vec(), random_pmf(alphabets.iter().product(), &mut rng))
}

/// Random independent marginals with full support.
pub fn random_product(alphabets: &[usize], seed: u64) -> Result<ProductDistribution> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ProductDistribution::new(
        alphabets
            .iter()
            .map(|&a| {
                let p: Vec<f64> = (0..a).map(|_| rng.gen_range(0.05..1.0)).collect();
                let t: f64 = p.iter().sum();
                p.into_iter().map(|x| x / t).collect()
            })
            .collect(),
    )
}
