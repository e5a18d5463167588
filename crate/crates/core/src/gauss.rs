//! Positive-definite matrices, principal minors and determinantal
//! inequalities.
//!
//! Determinants are handled in log-space from Cholesky pivots. Entropies in
//! this module are in nats.

use std::collections::BTreeMap;
use std::f64::consts::{E, LN_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frac::WeightedFamily;
use crate::gaps;
use crate::scalar::Scalar;
use crate::setfn::{SetFunction, SubsetMask, MAX_GROUND};

const SYMMETRY_TOL: f64 = 9.094947017729282e-13; // 2^-40
/// Largest `n` for which the full entropy table is built.
pub const MAX_ENTROPY_TABLE: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct PDMatrix {
    entries: Vec<Vec<f64>>,
    cholesky: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    n: usize,
    entries: Vec<Vec<f64>>,
}

impl TryFrom<MatrixRepr> for PDMatrix {
    type Error = Error;
    fn try_from(r: MatrixRepr) -> Result<Self> {
        if r.entries.len() != r.n {
            return Err(Error::Invalid(format!("matrix declares n={} but has {} rows", r.n, r.entries.len())));
        }
        PDMatrix::new(r.entries)
    }
}

impl From<PDMatrix> for MatrixRepr {
    fn from(m: PDMatrix) -> Self {
        MatrixRepr { n: m.n(), entries: m.entries }
    }
}

/// Lower Cholesky factor; on failure, the 0-based pivot index and value.
fn cholesky(a: &[Vec<f64>]) -> std::result::Result<Vec<Vec<f64>>, (usize, f64)> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for j in 0..n {
        let d = a[j][j] - l[j][..j].iter().map(|x| x * x).sum::<f64>();
        if d.is_nan() || d <= 0.0 || d.is_infinite() {
            return Err((j, d));
        }
        let ljj = d.sqrt();
        l[j][j] = ljj;
        for i in j + 1..n {
            let s: f64 = l[i][..j].iter().zip(&l[j][..j]).map(|(x, y)| x * y).sum();
            l[i][j] = (a[i][j] - s) / ljj;
        }
    }
    Ok(l)
}

impl PDMatrix {
    pub fn new(entries: Vec<Vec<f64>>) -> Result<Self> {
        let n = entries.len();
        if n == 0 || n > MAX_GROUND {
            return Err(Error::Invalid(format!("matrix size {n} must lie in 1..={MAX_GROUND}")));
        }
        if let Some(r) = entries.iter().position(|row| row.len() != n) {
            return Err(Error::Invalid(format!("row {} has {} entries, expected {n}", r + 1, entries[r].len())));
        }
        if entries.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Invalid("matrix entries must be finite".into()));
        }
        let scale = entries.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
        let asymmetric = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .find(|&(i, j)| (entries[i][j] - entries[j][i]).abs() > SYMMETRY_TOL * scale);
        if let Some((i, j)) = asymmetric {
            return Err(Error::NotSymmetric(i + 1, j + 1));
        }
        let cholesky = cholesky(&entries).map_err(|(j, d)| Error::NotPositiveDefinite(j + 1, d))?;
        Ok(PDMatrix { entries, cholesky })
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n]).expect("identity is positive definite")
    }

    pub fn diagonal(d: &[f64]) -> Result<Self> {
        let n = d.len();
        Self::new((0..n).map(|i| (0..n).map(|j| if i == j { d[i] } else { 0.0 }).collect()).collect())
    }

    /// Unit-diagonal matrix with every off-diagonal entry `rho`.
    pub fn equicorrelated(n: usize, rho: f64) -> Result<Self> {
        Self::new((0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { rho }).collect()).collect())
    }

    /// `AᵀA + εI` with entries of `A` uniform in `[−1, 1]`.
    pub fn random(n: usize, seed: u64, epsilon: f64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect()).collect();
        let mut k = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..=i {
                let v: f64 = (0..n).map(|r| a[r][i] * a[r][j]).sum();
                k[i][j] = v;
                k[j][i] = v;
            }
            k[i][i] += epsilon;
        }
        Self::new(k)
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Vec<f64>] {
        &self.entries
    }

    pub fn cholesky_factor(&self) -> &[Vec<f64>] {
        &self.cholesky
    }

    pub fn submatrix(&self, f: SubsetMask) -> Vec<Vec<f64>> {
        f.iter().map(|i| f.iter().map(|j| self.entries[i][j]).collect()).collect()
    }

    /// `ln |K(F)|` from a fresh Cholesky of the submatrix; `ln |K(∅)| = 0`.
    pub fn log_principal_minor(&self, f: SubsetMask) -> Result<f64> {
        if f.is_empty() {
            return Ok(0.0);
        }
        if f == SubsetMask::full(self.n()) {
            return Ok(log_det_from_factor(&self.cholesky));
        }
        let l = cholesky(&self.submatrix(f)).map_err(|(j, d)| {
            Error::Invalid(format!(
                "principal submatrix {f:?} failed Cholesky at pivot {} ({d}); internal inconsistency",
                j + 1
            ))
        })?;
        Ok(log_det_from_factor(&l))
    }

    pub fn principal_minor(&self, f: SubsetMask) -> Result<f64> {
        Ok(self.log_principal_minor(f)?.exp())
    }

    pub fn log_det(&self) -> f64 {
        log_det_from_factor(&self.cholesky)
    }
}

fn log_det_from_factor(l: &[Vec<f64>]) -> f64 {
    l.iter().enumerate().map(|(i, row)| 2.0 * row[i].ln()).sum()
}

/// `h(F) = ½ ln((2πe)^|F| |K(F)|)` in nats.
pub fn gaussian_entropy_setfn(k: &PDMatrix) -> Result<SetFunction<f64>> {
    if k.n() > MAX_ENTROPY_TABLE {
        return Err(Error::GroundSetTooLarge(k.n(), MAX_ENTROPY_TABLE));
    }
    let c = (2.0 * PI * E).ln();
    let values = SubsetMask::all(k.n())
        .map(|f| Ok(0.5 * (f.len() as f64 * c + k.log_principal_minor(f)?)))
        .collect::<Result<Vec<_>>>()?;
    SetFunction::new(k.n(), values, "gaussian entropy (nats)")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetEqualityVerdict {
    /// `Σ γ(F) ln |K(F)|`.
    pub lhs_log: f64,
    /// `ln |K|`.
    pub rhs_log: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs_log − rhs_log`; twice the Gaussian entropy gap in nats.
    pub log_gap: f64,
    /// The entropy gap `½ (lhs_log − rhs_log)` in bits.
    pub gap_bits: f64,
    pub equality: bool,
    /// Co-occurring element groups merged before testing diagonality.
    pub groups: Vec<SubsetMask>,
    /// Largest `|K_ij|` with `i`, `j` in different groups.
    pub off_diagonal_max: f64,
    pub diagonal_tolerance: f64,
    pub diagonal: bool,
    /// Modularity of the Gaussian entropy over the merged groups.
    pub modular: bool,
    pub agree: bool,
    pub tolerance: f64,
}

/// Tests `Π |K(F)|^γ(F) = |K|` against block-diagonality of `K` over the
/// normalized family's element groups.
pub fn det_equality_check(k: &PDMatrix, wf: &WeightedFamily, tol: f64) -> Result<DetEqualityVerdict> {
    if k.n() != wf.n() {
        return Err(Error::SizeMismatch(k.n(), wf.n()));
    }
    wf.require_partition()?;
    let lhs_log =
        wf.members().iter().map(|m| Ok(m.weight.to_f64() * k.log_principal_minor(m.set)?)).sum::<Result<f64>>()?;
    let rhs_log = k.log_det();
    let log_gap = lhs_log - rhs_log;
    let equality = log_gap.abs() <= tol;

    let normalized = wf.normalize()?;
    let groups = normalized.groups.clone();
    let mut group_of = vec![0usize; k.n()];
    for (g, mask) in groups.iter().enumerate() {
        for i in mask.iter() {
            group_of[i] = g;
        }
    }
    let n = k.n();
    let mut off_diagonal_max = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if group_of[i] != group_of[j] {
                off_diagonal_max = off_diagonal_max.max(k.entries[i][j].abs());
            }
        }
    }
    let max_diag = (0..n).map(|i| k.entries[i][i]).fold(0.0f64, f64::max);
    let diagonal_tolerance = tol.sqrt() * max_diag;
    let diagonal = off_diagonal_max <= diagonal_tolerance;

    let h = gaussian_entropy_setfn(k)?;
    let merged = SetFunction::from_fn(groups.len(), "merged gaussian entropy", |s| *h.at(normalized.expand(s)))?;
    let modular = merged.is_modular(tol)?.holds;

    Ok(DetEqualityVerdict {
        lhs_log,
        rhs_log,
        lhs: lhs_log.exp(),
        rhs: rhs_log.exp(),
        log_gap,
        gap_bits: 0.5 * log_gap / LN_2,
        equality,
        groups,
        off_diagonal_max,
        diagonal_tolerance,
        diagonal,
        modular,
        agree: equality == diagonal && diagonal == modular,
        tolerance: tol,
    })
}

/// `½ Σ γ(F) ln|K(F)| − ½ ln|K|` minus `Gap_U` of the Gaussian entropy.
pub fn log_consistency_residual(k: &PDMatrix, wf: &WeightedFamily) -> Result<f64> {
    let v = det_equality_check(k, wf, 0.0)?;
    let gap = gaps::gap_upper(&gaussian_entropy_setfn(k)?, wf)?;
    Ok((0.5 * v.log_gap - gap).abs())
}

/// A named family builder with an optional textual argument.
pub trait FamilyPreset: Send + Sync {
    fn name(&self) -> &'static str;
    fn build(&self, n: usize, arg: Option<&str>) -> Result<WeightedFamily>;
}

struct Hadamard;
struct Szasz;
struct Fischer;

impl FamilyPreset for Hadamard {
    fn name(&self) -> &'static str {
        "hadamard"
    }
    fn build(&self, n: usize, arg: Option<&str>) -> Result<WeightedFamily> {
        if let Some(a) = arg {
            return Err(Error::Invalid(format!("hadamard takes no argument, got {a:?}")));
        }
        if n == 0 {
            return Err(Error::Invalid("hadamard needs n >= 1".into()));
        }
        Ok(WeightedFamily::singletons(n))
    }
}

impl FamilyPreset for Szasz {
    fn name(&self) -> &'static str {
        "szasz"
    }
    /// All `k`-subsets; `k` defaults to `n − 1`.
    fn build(&self, n: usize, arg: Option<&str>) -> Result<WeightedFamily> {
        let k = match arg {
            Some(a) => {
                a.trim().parse().map_err(|_| Error::Invalid(format!("szasz expects an integer k, got {a:?}")))?
            }
            None => n.saturating_sub(1),
        };
        if n < 2 || k == 0 || k >= n {
            return Err(Error::Invalid(format!("szasz needs 1 <= k < n, got k={k} n={n}")));
        }
        WeightedFamily::k_subsets(n, k)
    }
}

impl FamilyPreset for Fischer {
    fn name(&self) -> &'static str {
        "fischer"
    }
    /// `{F, F^c}` with weight 1 each; the argument lists `F` like `1,2`.
    fn build(&self, n: usize, arg: Option<&str>) -> Result<WeightedFamily> {
        let a = arg.ok_or_else(|| Error::Invalid("fischer needs a set, e.g. fischer=1,2".into()))?;
        let elements = a
            .trim_matches(|c| c == '{' || c == '}' || c == '[' || c == ']')
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| t.trim().parse::<usize>().map_err(|_| Error::Invalid(format!("bad element {t:?} in {a:?}"))))
            .collect::<Result<Vec<_>>>()?;
        let f = SubsetMask::from_elements(&elements, n)?;
        let full = SubsetMask::full(n);
        if f.is_empty() || f == full {
            return Err(Error::Invalid(format!("fischer set must be a nonempty proper subset, got {a:?}")));
        }
        WeightedFamily::uniform(n, &[f, f.complement(n)], num_traits::One::one())
    }
}

pub struct PresetRegistry {
    presets: BTreeMap<&'static str, Box<dyn FamilyPreset>>,
}

impl PresetRegistry {
    pub fn empty() -> Self {
        PresetRegistry { presets: BTreeMap::new() }
    }

    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(Hadamard));
        r.register(Box::new(Szasz));
        r.register(Box::new(Fischer));
        r
    }

    pub fn register(&mut self, preset: Box<dyn FamilyPreset>) {
        self.presets.insert(preset.name(), preset);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.presets.keys().copied().collect()
    }

    /// Builds from `name` or `name=arg`.
    pub fn build(&self, spec: &str, n: usize) -> Result<WeightedFamily> {
        let (name, arg) = match spec.split_once('=') {
            Some((name, arg)) => (name, Some(arg)),
            None => (spec, None),
        };
        let preset = self
            .presets
            .get(name.trim())
            .ok_or_else(|| Error::UnknownName { kind: "preset", name: name.to_string() })?;
        preset.build(n, arg)
    }
}

impl Default for PresetRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

pub fn preset_family(spec: &str, n: usize) -> Result<WeightedFamily> {
    PresetRegistry::with_builtins().build(spec, n)
}
