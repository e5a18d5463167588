use std::path::Path;

use fracsub::frac::{find_fractional_partition, min_multiplicity};
use fracsub::gaps::{self, Assumptions};
use fracsub::gauss::{self, PDMatrix, PresetRegistry};
use fracsub::generate::GeneratorRegistry;
use fracsub::info::{self, JointDistribution};
use fracsub::io::{self, DynPartial, FamilyInput};
use fracsub::matroid::{self, MatroidRegistry};
use fracsub::scalar::{parse_rational, DEFAULT_TOL};
use fracsub::{DynSetFunction, Error, WeightedFamily};
use serde::Serialize;
use serde_json::{json, Value};

/// Why a command did not produce a report.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Precondition(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) => 2,
            Failure::Precondition(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Precondition(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_precondition() {
            Failure::Precondition(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

pub type CmdResult = std::result::Result<Outcome, Failure>;

/// A command's payload before it is wrapped in a report.
pub struct Outcome {
    pub inputs: Vec<Vec<u8>>,
    pub parameters: Value,
    pub result: Value,
    /// False when an equivalence the code asserts turned out broken.
    pub consistent: bool,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

pub struct Input {
    pub bytes: Vec<u8>,
    pub text: String,
    name: String,
}

impl Input {
    pub fn read(path: &Path) -> std::result::Result<Self, Failure> {
        let bytes = std::fs::read(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        Self::from_bytes(path.display().to_string(), bytes)
    }

    pub fn from_bytes(name: String, bytes: Vec<u8>) -> std::result::Result<Self, Failure> {
        let text = String::from_utf8(bytes.clone()).map_err(|_| Failure::Input(format!("{name}: not UTF-8")))?;
        Ok(Input { bytes, text, name })
    }

    fn parse<T>(&self, parse: impl FnOnce(&str) -> fracsub::Result<T>) -> std::result::Result<T, Failure> {
        parse(&self.text).map_err(|e| {
            let f = Failure::from(e);
            match f {
                Failure::Input(m) => Failure::Input(format!("{}: {m}", self.name)),
                p => p,
            }
        })
    }
}

/// Tolerance for float instances: the caller's value, or `2^-30` scaled by
/// the largest magnitude in `f`.
fn setfn_tol(tol: Option<f64>, f: &DynSetFunction) -> f64 {
    match (tol, f) {
        (Some(t), _) => t,
        (None, DynSetFunction::Float(f)) => gaps::default_tolerance(f),
        (None, DynSetFunction::Rational(_)) => 0.0,
    }
}

fn weighted(family: &FamilyInput, name: &str) -> std::result::Result<WeightedFamily, Failure> {
    family.weighted().map_err(|e| Failure::Input(format!("{name}: {e}")))
}

pub fn gaps_cmd(setfn: &Input, family: &Input, tol: Option<f64>) -> CmdResult {
    let f = setfn.parse(io::parse_setfn)?;
    let fam = family.parse(io::parse_family)?;
    let wf = weighted(&fam, &family.name)?;
    let tol = setfn_tol(tol, &f);
    let report = match &f {
        DynSetFunction::Rational(f) => gaps::gap_report(f, &wf, tol)?,
        DynSetFunction::Float(f) => gaps::gap_report(f, &wf, tol)?,
    };
    let modular = match &f {
        DynSetFunction::Rational(f) => f.is_grounded() && f.is_modular(tol)?.holds,
        DynSetFunction::Float(f) => f.is_grounded() && f.is_modular(tol)?.holds,
    };
    let mut result = to_value(&report);
    result["verdict"] = json!(if modular { "modular" } else { "not-modular" });
    Ok(Outcome {
        inputs: vec![setfn.bytes.clone(), family.bytes.clone()],
        parameters: json!({ "tol": tol }),
        consistent: report.is_consistent(),
        result,
    })
}

pub fn certify_cmd(
    partial: &Input,
    family: &Input,
    nondecreasing: bool,
    unassumed: bool,
    tol: Option<f64>,
) -> CmdResult {
    let p = partial.parse(io::parse_partial)?;
    let fam = family.parse(io::parse_family)?;
    let wf = weighted(&fam, &family.name)?;
    let assumptions = Assumptions { submodular_grounded: !unassumed, nondecreasing };
    let (cert, tol) = match &p {
        DynPartial::Rational(p) => (gaps::certify_modular_partial(p, &wf, assumptions, 0.0)?, 0.0),
        DynPartial::Float(p) => {
            let t = tol.unwrap_or(DEFAULT_TOL);
            (gaps::certify_modular_partial(p, &wf, assumptions, t)?, t)
        }
    };
    Ok(Outcome {
        inputs: vec![partial.bytes.clone(), family.bytes.clone()],
        parameters: json!({ "tol": tol, "assume_submodular": !unassumed, "assume_nondecreasing": nondecreasing }),
        result: to_value(&cert),
        consistent: true,
    })
}

pub fn stability_cmd(setfn: &Input, family: &Input, epsilon: &str, tol: Option<f64>) -> CmdResult {
    let f = setfn.parse(io::parse_setfn)?;
    let fam = family.parse(io::parse_family)?;
    let wf = weighted(&fam, &family.name)?;
    let tol = setfn_tol(tol, &f);
    let report = match &f {
        DynSetFunction::Rational(f) => {
            let eps = parse_rational(epsilon).map_err(|e| Failure::Input(format!("--epsilon: {e}")))?;
            gaps::stability_check(f, &wf, &eps, tol)?
        }
        DynSetFunction::Float(f) => {
            let eps: f64 =
                epsilon.parse().map_err(|_| Failure::Input(format!("--epsilon: not a number: {epsilon}")))?;
            gaps::stability_check(f, &wf, &eps, tol)?
        }
    };
    let broken = report.hypothesis_holds && report.submodular && !report.satisfied;
    Ok(Outcome {
        inputs: vec![setfn.bytes.clone(), family.bytes.clone()],
        parameters: json!({ "tol": tol, "epsilon": epsilon }),
        result: to_value(&report),
        consistent: !broken,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmiMode {
    Family,
    Tc,
    Dtc,
    Si,
    Max,
}

pub fn mmi_cmd(dist: &Input, family: Option<&Input>, mode: MmiMode, tol: Option<f64>) -> CmdResult {
    let d: JointDistribution = dist.parse(|t| Ok(serde_json::from_str(t)?))?;
    let tol = tol.unwrap_or(DEFAULT_TOL);
    let mut inputs = vec![dist.bytes.clone()];
    let (result, consistent, mode_name) = match mode {
        MmiMode::Family => {
            let family = family
                .ok_or_else(|| Failure::Input("a family file or one of --tc/--dtc/--si/--max is required".into()))?;
            inputs.push(family.bytes.clone());
            let wf = weighted(&family.parse(io::parse_family)?, &family.name)?;
            let r = info::fg_mutual_information(&d, &wf)?;
            let mut v = to_value(&r);
            v["symmetric_form"] = to_value(
                &info::symmetric_form(&wf).map(|g| g.iter().map(fracsub::scalar::format_rational).collect::<Vec<_>>()),
            );
            (v, true, "family")
        }
        MmiMode::Tc => {
            let tc = info::total_correlation(&d);
            let via_family = info::fg_mutual_information(&d, &WeightedFamily::singletons(d.n()))?.value;
            (json!({ "total_correlation": tc, "singleton_mi": via_family }), (tc - via_family).abs() <= tol, "tc")
        }
        MmiMode::Dtc => {
            let dtc = info::dual_total_correlation(&d);
            let mut v = json!({ "dual_total_correlation": dtc });
            let mut ok = true;
            if d.n() >= 2 {
                let mi = info::fg_mutual_information(&d, &WeightedFamily::co_singletons(d.n())?)?.value;
                v["co_singleton_mi"] = json!(mi);
                ok = (mi - dtc / (d.n() - 1) as f64).abs() <= tol;
            }
            (v, ok, "dtc")
        }
        MmiMode::Si => {
            let si = info::shared_information(&d)?;
            let ok = (si.value - si.dual_ratio).abs() <= tol;
            (to_value(&si), ok, "si")
        }
        MmiMode::Max => {
            let m = info::mmi_max_over_partitions(&d)?;
            let ok = (m.value - m.total_correlation).abs() <= tol && (m.witness_value - m.value).abs() <= tol;
            (to_value(&m), ok, "max")
        }
    };
    Ok(Outcome { inputs, parameters: json!({ "tol": tol, "mode": mode_name }), result, consistent })
}

pub fn matroid_cmd(spec: &Input, family: &Input) -> CmdResult {
    let m = spec.parse(|t| MatroidRegistry::with_builtins().from_json(t))?;
    let wf = weighted(&family.parse(io::parse_family)?, &family.name)?;
    let v = matroid::corollary4_verdict(m.as_ref(), &wf)?;
    Ok(Outcome {
        inputs: vec![spec.bytes.clone(), family.bytes.clone()],
        parameters: json!({}),
        consistent: v.agree,
        result: to_value(&v),
    })
}

/// Rows of comma-separated numbers; blank lines are skipped.
pub fn parse_matrix_csv(text: &str) -> fracsub::Result<PDMatrix> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Invalid(format!("row {}: {e}", r + 1)))?;
        let row = record
            .iter()
            .enumerate()
            .map(|(c, cell)| {
                cell.parse::<f64>()
                    .map_err(|_| Error::Invalid(format!("row {}, column {}: not a number: {cell:?}", r + 1, c + 1)))
            })
            .collect::<fracsub::Result<Vec<_>>>()?;
        rows.push(row);
    }
    PDMatrix::new(rows)
}

fn parse_matrix(input: &Input) -> std::result::Result<PDMatrix, Failure> {
    if input.name.ends_with(".csv") || !input.text.trim_start().starts_with('{') {
        input.parse(parse_matrix_csv)
    } else {
        input.parse(|t| Ok(serde_json::from_str(t)?))
    }
}

pub fn detineq_cmd(matrix: &Input, family: Option<&Input>, preset: Option<&str>, tol: Option<f64>) -> CmdResult {
    let k = parse_matrix(matrix)?;
    let tol = tol.unwrap_or(DEFAULT_TOL);
    let mut inputs = vec![matrix.bytes.clone()];
    let wf = match (family, preset) {
        (Some(f), None) => {
            inputs.push(f.bytes.clone());
            weighted(&f.parse(io::parse_family)?, &f.name)?
        }
        (None, Some(p)) => PresetRegistry::with_builtins().build(p, k.n())?,
        _ => return Err(Failure::Input("give exactly one of a family file or --preset".into())),
    };
    let v = gauss::det_equality_check(&k, &wf, tol)?;
    let mut result = to_value(&v);
    result["family"] = to_value(&wf);
    Ok(Outcome { inputs, parameters: json!({ "tol": tol, "preset": preset }), consistent: v.agree, result })
}

pub fn normalize_cmd(family: &Input) -> CmdResult {
    let fam = family.parse(io::parse_family)?;
    let raw = fam.weighted_raw().map_err(|e| Failure::Input(format!("{}: {e}", family.name)))?;
    let norm = raw.normalize()?;
    Ok(Outcome {
        inputs: vec![family.bytes.clone()],
        parameters: json!({}),
        result: json!({
            "normalized": to_value(&norm),
            "identity": norm.is_identity(),
            "classification": to_value(&norm.family.classify()),
        }),
        consistent: true,
    })
}

pub fn find_partition_cmd(family: &Input) -> CmdResult {
    let fam = family.parse(io::parse_family)?;
    let found = find_fractional_partition(&fam.sets, fam.n)?;
    let consistent = found.as_ref().is_none_or(|wf| wf.is_partition());
    Ok(Outcome {
        inputs: vec![family.bytes.clone()],
        parameters: json!({}),
        result: json!({ "found": found.is_some(), "family": to_value(&found) }),
        consistent,
    })
}

pub fn equality_cmd(setfn: &Input, family: &Input, tol: Option<f64>) -> CmdResult {
    let f = setfn.parse(io::parse_setfn)?;
    let fam = family.parse(io::parse_family)?;
    let tol = setfn_tol(tol, &f);
    let (result, agree) = match &fam.weights {
        Some(_) => {
            let wf = weighted(&fam, &family.name)?;
            let r = match &f {
                DynSetFunction::Rational(f) => gaps::equality_conditions_covering(f, &wf, tol)?,
                DynSetFunction::Float(f) => gaps::equality_conditions_covering(f, &wf, tol)?,
            };
            (to_value(&r), r.agree)
        }
        None => {
            let r = match &f {
                DynSetFunction::Rational(f) => gaps::shearer_integer_check(f, &fam.sets, tol)?,
                DynSetFunction::Float(f) => gaps::shearer_integer_check(f, &fam.sets, tol)?,
            };
            let mut v = to_value(&r);
            v["k"] = json!(min_multiplicity(fam.n, &fam.sets)?);
            (v, r.conditions.agree && r.equality == r.conditions.gap_zero)
        }
    };
    Ok(Outcome {
        inputs: vec![setfn.bytes.clone(), family.bytes.clone()],
        parameters: json!({ "tol": tol }),
        result,
        consistent: agree,
    })
}

pub fn generate_cmd(kind: &str, n: usize, seed: u64) -> CmdResult {
    let f = GeneratorRegistry::with_builtins().generate(kind, n, seed)?;
    Ok(Outcome {
        inputs: vec![],
        parameters: json!({ "kind": kind, "n": n, "seed": seed }),
        result: io::setfn_to_json(&f),
        consistent: true,
    })
}
