//! JSON input formats.
//!
//! Rationals are written as strings (`"p/q"`, integers or decimals) or JSON
//! integers; floats are JSON numbers. A file never mixes the two. Sets are
//! lists of 1-indexed elements.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::frac::{Member, WeightedFamily};
use crate::gaps::PartialSetFunction;
use crate::scalar::{format_rational, parse_rational, Rational, ScalarKind};
use crate::setfn::{DynSetFunction, SetFunction, SubsetMask, MAX_GROUND};

fn invalid(field: &str, msg: impl std::fmt::Display) -> Error {
    Error::Invalid(format!("{field}: {msg}"))
}

fn infer_kind(values: &[&Value], declared: Option<ScalarKind>, field: &str) -> Result<ScalarKind> {
    if let Some(k) = declared {
        return Ok(k);
    }
    let strings = values.iter().filter(|v| v.is_string()).count();
    if strings == values.len() {
        Ok(ScalarKind::Rational)
    } else if strings == 0 {
        Ok(ScalarKind::Float)
    } else {
        Err(invalid(field, "mixes rational strings and float numbers; set \"scalar\" explicitly"))
    }
}

fn rational_value(v: &Value, field: &str) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s).map_err(|e| invalid(field, e)),
        Value::Number(x) if x.is_i64() => Ok(Rational::from_integer(x.as_i64().unwrap_or_default().into())),
        other => Err(invalid(field, format!("expected a rational string such as \"3/5\", got {other}"))),
    }
}

fn float_value(v: &Value, field: &str) -> Result<f64> {
    match v {
        Value::Number(x) => x.as_f64().ok_or_else(|| invalid(field, "number out of range")),
        other => Err(invalid(field, format!("expected a JSON number, got {other}"))),
    }
}

fn check_n(n: usize) -> Result<()> {
    if n > MAX_GROUND {
        return Err(Error::GroundSetTooLarge(n, MAX_GROUND));
    }
    Ok(())
}

fn set_from(elements: &[usize], n: usize, field: &str) -> Result<SubsetMask> {
    SubsetMask::from_elements(elements, n).map_err(|e| invalid(field, e))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetFunctionFile {
    pub n: usize,
    pub values: Vec<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scalar: Option<ScalarKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl SetFunctionFile {
    pub fn into_setfn(self) -> Result<DynSetFunction> {
        check_n(self.n)?;
        let expected = 1usize << self.n;
        if self.values.len() != expected {
            return Err(invalid(
                "values",
                format!("has {} entries, expected 2^{} = {expected}", self.values.len(), self.n),
            ));
        }
        let label = self.label.unwrap_or_default();
        let refs: Vec<&Value> = self.values.iter().collect();
        Ok(match infer_kind(&refs, self.scalar, "values")? {
            ScalarKind::Rational => {
                let values = self
                    .values
                    .iter()
                    .enumerate()
                    .map(|(i, v)| rational_value(v, &format!("values[{i}]")))
                    .collect::<Result<_>>()?;
                DynSetFunction::Rational(SetFunction::new(self.n, values, label)?)
            }
            ScalarKind::Float => {
                let values = self
                    .values
                    .iter()
                    .enumerate()
                    .map(|(i, v)| float_value(v, &format!("values[{i}]")))
                    .collect::<Result<_>>()?;
                DynSetFunction::Float(SetFunction::new(self.n, values, label)?)
            }
        })
    }
}

pub fn parse_setfn(text: &str) -> Result<DynSetFunction> {
    serde_json::from_str::<SetFunctionFile>(text)?.into_setfn()
}

pub fn setfn_to_json(f: &DynSetFunction) -> Value {
    match f {
        DynSetFunction::Rational(f) => serde_json::json!({
            "n": f.n(),
            "values": f.values().iter().map(format_rational).collect::<Vec<_>>(),
            "scalar": "rational",
            "label": f.label(),
        }),
        DynSetFunction::Float(f) => serde_json::json!({
            "n": f.n(),
            "values": f.values(),
            "scalar": "float",
            "label": f.label(),
        }),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialEntry {
    pub set: Vec<usize>,
    pub value: Value,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialFile {
    pub n: usize,
    pub entries: Vec<PartialEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scalar: Option<ScalarKind>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DynPartial {
    Rational(PartialSetFunction<Rational>),
    Float(PartialSetFunction<f64>),
}

impl PartialFile {
    pub fn into_partial(self) -> Result<DynPartial> {
        check_n(self.n)?;
        let n = self.n;
        let refs: Vec<&Value> = self.entries.iter().map(|e| &e.value).collect();
        let sets = self
            .entries
            .iter()
            .enumerate()
            .map(|(i, e)| set_from(&e.set, n, &format!("entries[{i}].set")))
            .collect::<Result<Vec<_>>>()?;
        Ok(match infer_kind(&refs, self.scalar, "entries")? {
            ScalarKind::Rational => {
                let values = self
                    .entries
                    .iter()
                    .enumerate()
                    .map(|(i, e)| rational_value(&e.value, &format!("entries[{i}].value")))
                    .collect::<Result<Vec<_>>>()?;
                DynPartial::Rational(PartialSetFunction::new(n, sets.into_iter().zip(values))?)
            }
            ScalarKind::Float => {
                let values = self
                    .entries
                    .iter()
                    .enumerate()
                    .map(|(i, e)| float_value(&e.value, &format!("entries[{i}].value")))
                    .collect::<Result<Vec<_>>>()?;
                DynPartial::Float(PartialSetFunction::new(n, sets.into_iter().zip(values))?)
            }
        })
    }
}

pub fn parse_partial(text: &str) -> Result<DynPartial> {
    serde_json::from_str::<PartialFile>(text)?.into_partial()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyMemberEntry {
    pub set: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<Value>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyFile {
    pub n: usize,
    pub members: Vec<FamilyMemberEntry>,
}

/// A family as read from disk: weights are either all given or all omitted
/// (to be discovered).
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyInput {
    pub n: usize,
    pub sets: Vec<SubsetMask>,
    pub weights: Option<Vec<Rational>>,
}

impl FamilyInput {
    /// The weighted family, keeping zero weights for later normalization.
    pub fn weighted_raw(&self) -> Result<WeightedFamily> {
        let weights = self.weights.as_ref().ok_or_else(|| invalid("members", "weights are required here"))?;
        WeightedFamily::from_raw(
            self.n,
            self.sets.iter().zip(weights).map(|(&set, w)| Member { set, weight: w.clone() }).collect(),
        )
    }

    /// The weighted family with strictly positive weights.
    pub fn weighted(&self) -> Result<WeightedFamily> {
        let raw = self.weighted_raw()?;
        WeightedFamily::new(raw.n(), raw.members().to_vec())
    }
}

impl FamilyFile {
    pub fn into_input(self) -> Result<FamilyInput> {
        check_n(self.n)?;
        let n = self.n;
        let sets = self
            .members
            .iter()
            .enumerate()
            .map(|(i, m)| set_from(&m.set, n, &format!("members[{i}].set")))
            .collect::<Result<Vec<_>>>()?;
        let given = self.members.iter().filter(|m| m.weight.is_some()).count();
        let weights = if given == 0 {
            None
        } else if given == self.members.len() {
            Some(
                self.members
                    .iter()
                    .enumerate()
                    .map(|(i, m)| {
                        let field = format!("members[{i}].weight");
                        let w = rational_value(m.weight.as_ref().expect("counted"), &field)?;
                        if w < Rational::from_integer(0.into()) {
                            return Err(invalid(&field, "weights must be nonnegative"));
                        }
                        Ok(w)
                    })
                    .collect::<Result<Vec<_>>>()?,
            )
        } else {
            return Err(invalid("members", "either every member has a weight or none does"));
        };
        Ok(FamilyInput { n, sets, weights })
    }
}

pub fn parse_family(text: &str) -> Result<FamilyInput> {
    serde_json::from_str::<FamilyFile>(text)?.into_input()
}
