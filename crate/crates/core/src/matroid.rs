//! Matroid rank oracles and the equality case for rank functions.
//!
//! Every kind implements [`RankOracle`] and is built from its JSON spec by a
//! [`MatroidRegistry`] keyed on the `"kind"` field, so new kinds can be added
//! without touching the analyses.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::frac::WeightedFamily;
use crate::scalar::{format_rational, parse_rational, Rational};
use crate::setfn::{SetFunction, SubsetMask, MAX_GROUND};

/// Largest ground set for which a full rank table is built.
pub const MAX_RANK_TABLE: usize = 20;

pub trait RankOracle: fmt::Debug + Send + Sync {
    fn kind(&self) -> &'static str;
    fn n(&self) -> usize;
    fn rank(&self, s: SubsetMask) -> usize;

    fn is_independent(&self, s: SubsetMask) -> bool {
        self.rank(s) == s.len()
    }
}

/// Column matroid of a rational matrix. Rows are scaled to integers on
/// construction (which leaves column dependencies unchanged) so that ranks
/// come from fraction-free elimination.
#[derive(Debug, Clone, PartialEq)]
pub struct Linear {
    rows: Vec<Vec<BigInt>>,
    n: usize,
}

impl Linear {
    pub fn new(matrix: &[Vec<Rational>]) -> Result<Self> {
        let n = matrix.first().map_or(0, Vec::len);
        if n > MAX_GROUND {
            return Err(Error::GroundSetTooLarge(n, MAX_GROUND));
        }
        let mut rows = Vec::with_capacity(matrix.len());
        for (r, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Invalid(format!("matrix row {} has {} entries, expected {n}", r + 1, row.len())));
            }
            let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            rows.push(row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect());
        }
        Ok(Linear { rows, n })
    }

    pub fn from_integers(matrix: &[Vec<i64>]) -> Result<Self> {
        let rational: Vec<Vec<Rational>> =
            matrix.iter().map(|row| row.iter().map(|&x| Rational::from_integer(x.into())).collect()).collect();
        Self::new(&rational)
    }
}

/// Rank of an integer matrix by Bareiss elimination; every intermediate
/// entry is a minor of the input, so divisions are exact.
fn bareiss_rank(mut a: Vec<Vec<BigInt>>) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, pivot);
        for i in rank + 1..rows {
            for j in col + 1..cols {
                let num = &a[rank][col] * &a[i][j] - &a[i][col] * &a[rank][j];
                debug_assert!((&num % &prev).is_zero());
                a[i][j] = num / &prev;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    rank
}

impl RankOracle for Linear {
    fn kind(&self) -> &'static str {
        "linear"
    }
    fn n(&self) -> usize {
        self.n
    }
    fn rank(&self, s: SubsetMask) -> usize {
        let cols: Vec<usize> = s.iter().collect();
        let sub = self.rows.iter().map(|row| cols.iter().map(|&c| row[c].clone()).collect()).collect();
        bareiss_rank(sub)
    }
}

/// Cycle matroid of a multigraph; element `i` is edge `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Graphic {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl Graphic {
    /// Vertices are numbered `1..=vertices`.
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if edges.len() > MAX_GROUND {
            return Err(Error::GroundSetTooLarge(edges.len(), MAX_GROUND));
        }
        for &(u, v) in &edges {
            if u == 0 || v == 0 || u > vertices || v > vertices {
                return Err(Error::Invalid(format!("edge ({u},{v}) has a vertex outside 1..={vertices}")));
            }
        }
        let edges = edges.into_iter().map(|(u, v)| (u - 1, v - 1)).collect();
        Ok(Graphic { vertices, edges })
    }

    /// The signed vertex-edge incidence matrix, which represents the same
    /// matroid over the rationals.
    pub fn incidence_matrix(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0i64; self.edges.len()]; self.vertices];
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            if u != v {
                m[u][e] = 1;
                m[v][e] = -1;
            }
        }
        m
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

impl RankOracle for Graphic {
    fn kind(&self) -> &'static str {
        "graphic"
    }
    fn n(&self) -> usize {
        self.edges.len()
    }
    fn rank(&self, s: SubsetMask) -> usize {
        let mut parent: Vec<usize> = (0..self.vertices).collect();
        let mut merged = 0;
        for e in s.iter() {
            let (u, v) = self.edges[e];
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru != rv {
                parent[ru] = rv;
                merged += 1;
            }
        }
        merged
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Uniform {
    pub n: usize,
    pub k: usize,
}

impl RankOracle for Uniform {
    fn kind(&self) -> &'static str {
        "uniform"
    }
    fn n(&self) -> usize {
        self.n
    }
    fn rank(&self, s: SubsetMask) -> usize {
        s.len().min(self.k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Free {
    pub n: usize,
}

impl RankOracle for Free {
    fn kind(&self) -> &'static str {
        "free"
    }
    fn n(&self) -> usize {
        self.n
    }
    fn rank(&self, s: SubsetMask) -> usize {
        s.len()
    }
}

pub type MatroidBuilder = fn(&Value) -> Result<Box<dyn RankOracle>>;

/// Builds rank oracles from JSON specs by their `"kind"`.
#[derive(Clone)]
pub struct MatroidRegistry {
    builders: BTreeMap<&'static str, MatroidBuilder>,
}

fn payload<T: for<'de> Deserialize<'de>>(spec: &Value) -> Result<T> {
    Ok(serde_json::from_value(spec.clone())?)
}

fn build_linear(spec: &Value) -> Result<Box<dyn RankOracle>> {
    #[derive(Deserialize)]
    struct Spec {
        matrix: Vec<Vec<Value>>,
    }
    let s: Spec = payload(spec)?;
    let matrix = s
        .matrix
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| match v {
                    Value::String(t) => parse_rational(t),
                    Value::Number(x) if x.is_i64() => Ok(Rational::from_integer(x.as_i64().unwrap_or(0).into())),
                    other => Err(Error::InvalidRational(format!(
                        "matrix entries must be integers or \"p/q\" strings, got {other}"
                    ))),
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Box::new(Linear::new(&matrix)?))
}

fn build_graphic(spec: &Value) -> Result<Box<dyn RankOracle>> {
    #[derive(Deserialize)]
    struct Spec {
        vertices: usize,
        edges: Vec<(usize, usize)>,
    }
    let s: Spec = payload(spec)?;
    Ok(Box::new(Graphic::new(s.vertices, s.edges)?))
}

fn build_uniform(spec: &Value) -> Result<Box<dyn RankOracle>> {
    let u: Uniform = payload(spec)?;
    if u.n > MAX_GROUND {
        return Err(Error::GroundSetTooLarge(u.n, MAX_GROUND));
    }
    if u.k > u.n {
        return Err(Error::Invalid(format!("uniform matroid needs k <= n, got k={} n={}", u.k, u.n)));
    }
    Ok(Box::new(u))
}

fn build_free(spec: &Value) -> Result<Box<dyn RankOracle>> {
    let f: Free = payload(spec)?;
    if f.n > MAX_GROUND {
        return Err(Error::GroundSetTooLarge(f.n, MAX_GROUND));
    }
    Ok(Box::new(f))
}

impl MatroidRegistry {
    pub fn empty() -> Self {
        MatroidRegistry { builders: BTreeMap::new() }
    }

    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        r.register("linear", build_linear);
        r.register("graphic", build_graphic);
        r.register("uniform", build_uniform);
        r.register("free", build_free);
        r
    }

    pub fn register(&mut self, kind: &'static str, builder: MatroidBuilder) {
        self.builders.insert(kind, builder);
    }

    pub fn kinds(&self) -> Vec<&'static str> {
        self.builders.keys().copied().collect()
    }

    pub fn build(&self, spec: &Value) -> Result<Box<dyn RankOracle>> {
        let kind = spec
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Invalid("matroid spec needs a string \"kind\"".into()))?;
        let builder =
            self.builders.get(kind).ok_or_else(|| Error::UnknownName { kind: "matroid", name: kind.to_string() })?;
        builder(spec)
    }

    pub fn from_json(&self, text: &str) -> Result<Box<dyn RankOracle>> {
        self.build(&serde_json::from_str(text)?)
    }
}

impl Default for MatroidRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

/// Full rank table as an exact set function.
pub fn rank_setfn(m: &dyn RankOracle) -> Result<SetFunction<Rational>> {
    if m.n() > MAX_RANK_TABLE {
        return Err(Error::GroundSetTooLarge(m.n(), MAX_RANK_TABLE));
    }
    SetFunction::from_fn(m.n(), format!("{} matroid rank", m.kind()), |s| {
        Rational::from_integer((m.rank(s) as i64).into())
    })
}

/// Elements of rank zero.
pub fn loops(m: &dyn RankOracle) -> SubsetMask {
    (0..m.n()).filter(|&e| m.rank(SubsetMask::singleton(e)) == 0).fold(SubsetMask::EMPTY, SubsetMask::with)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Corollary4Verdict {
    pub kind: String,
    /// `Σ γ(F) r(F)`.
    pub weighted_sum: String,
    pub full_rank: usize,
    /// `Σ γ(F) r(F) − r(E)`.
    pub gap: String,
    pub equality: bool,
    pub loops: SubsetMask,
    /// `r(S) = |S ∖ loops|` for every `S`, i.e. every loop-free set is independent.
    pub free_outside_loops: bool,
    pub modular: bool,
    pub agree: bool,
}

pub fn corollary4_verdict(m: &dyn RankOracle, wf: &WeightedFamily) -> Result<Corollary4Verdict> {
    if m.n() != wf.n() {
        return Err(Error::SizeMismatch(m.n(), wf.n()));
    }
    wf.require_partition()?;
    let n = m.n();
    let weighted_sum: Rational =
        wf.members().iter().map(|mem| &mem.weight * Rational::from_integer((m.rank(mem.set) as i64).into())).sum();
    let full_rank = m.rank(SubsetMask::full(n));
    let gap = &weighted_sum - Rational::from_integer((full_rank as i64).into());
    let equality = gap.is_zero();
    debug_assert!(!gap.is_negative());
    let b = loops(m);
    let free_outside_loops = SubsetMask::all(n).all(|s| m.rank(s) == s.difference(b).len());
    let modular = rank_setfn(m)?.is_modular(0.0)?.holds;
    Ok(Corollary4Verdict {
        kind: m.kind().to_string(),
        weighted_sum: format_rational(&weighted_sum),
        full_rank,
        gap: format_rational(&gap),
        equality,
        loops: b,
        free_outside_loops,
        modular,
        agree: equality == free_outside_loops && free_outside_loops == modular,
    })
}
