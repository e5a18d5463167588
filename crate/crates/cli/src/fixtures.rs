//! The bundled worked examples, run end to end through the commands.

use serde_json::{json, Value};

use crate::commands::{self, Failure, Input};

const POWERS_PARTIAL: &str = include_str!("../fixtures/powers_partial.json");
const SINGLETONS4: &str = include_str!("../fixtures/singletons4.json");
const SEVEN_MEMBERS_PARTIAL: &str = include_str!("../fixtures/seven_members_partial.json");
const SEVEN_MEMBERS_SETFN: &str = include_str!("../fixtures/seven_members_setfn.json");
const SEVEN_MEMBERS_FAMILY: &str = include_str!("../fixtures/seven_members_family.json");
const DECREASING_COVERING_SETFN: &str = include_str!("../fixtures/decreasing_covering_setfn.json");
const DECREASING_COVERING_FAMILY: &str = include_str!("../fixtures/decreasing_covering_family.json");

fn input(name: &str, text: &str) -> Input {
    Input::from_bytes(name.to_string(), text.as_bytes().to_vec()).expect("embedded fixtures are UTF-8")
}

struct Check {
    name: &'static str,
    pass: bool,
    detail: Value,
}

fn result_of(r: commands::CmdResult) -> Value {
    match r {
        Ok(o) => o.result,
        Err(f) => json!({ "error": f.message(), "exit_code": f.exit_code() }),
    }
}

pub fn inputs() -> Vec<&'static [u8]> {
    [
        POWERS_PARTIAL,
        SINGLETONS4,
        SEVEN_MEMBERS_PARTIAL,
        SEVEN_MEMBERS_SETFN,
        SEVEN_MEMBERS_FAMILY,
        DECREASING_COVERING_SETFN,
        DECREASING_COVERING_FAMILY,
    ]
    .iter()
    .map(|t| t.as_bytes())
    .collect()
}

/// Returns the per-check results and whether all passed.
pub fn run() -> (Value, bool) {
    let mut checks = Vec::new();

    let r = result_of(commands::certify_cmd(
        &input("powers_partial.json", POWERS_PARTIAL),
        &input("singletons4.json", SINGLETONS4),
        false,
        false,
        None,
    ));
    checks.push(Check {
        name: "powers of two: modular from singletons and the full set",
        pass: r["verdict"] == "modular" && r["checked_sum"] == "98",
        detail: r,
    });

    let r = result_of(commands::certify_cmd(
        &input("seven_members_partial.json", SEVEN_MEMBERS_PARTIAL),
        &input("seven_members_family.json", SEVEN_MEMBERS_FAMILY),
        false,
        false,
        None,
    ));
    checks.push(Check {
        name: "seven members: weighted sum 18/5 equals f([1:4])",
        pass: r["verdict"] == "modular" && r["checked_sum"] == "18/5" && r["flavor"] == "partition",
        detail: r,
    });

    let r = result_of(commands::gaps_cmd(
        &input("seven_members_setfn.json", SEVEN_MEMBERS_SETFN),
        &input("seven_members_family.json", SEVEN_MEMBERS_FAMILY),
        None,
    ));
    checks.push(Check {
        name: "seven members: zero gaps for the modular extension",
        pass: r["gap_upper"] == "0" && r["gap_lower"] == "0" && r["verdict"] == "modular",
        detail: r,
    });

    let r = result_of(commands::gaps_cmd(
        &input("decreasing_covering_setfn.json", DECREASING_COVERING_SETFN),
        &input("decreasing_covering_family.json", DECREASING_COVERING_FAMILY),
        None,
    ));
    checks.push(Check {
        name: "decreasing covering: zero covering gap for a non-modular submodular function",
        pass: r["gap_upper"] == "0"
            && r["submodular"] == true
            && r["modular"] == false
            && r["prefix_nondecreasing"] == true
            && r["classification"]["flavor"] == "covering",
        detail: r,
    });

    let outcome = commands::equality_cmd(
        &input("decreasing_covering_setfn.json", DECREASING_COVERING_SETFN),
        &input("decreasing_covering_family.json", DECREASING_COVERING_FAMILY),
        None,
    );
    let refused = matches!(outcome, Err(Failure::Precondition(_)));
    checks.push(Check {
        name: "decreasing covering: covering equality test refuses a decreasing function",
        pass: refused,
        detail: result_of(outcome),
    });

    let all = checks.iter().all(|c| c.pass);
    let value = Value::Array(
        checks.into_iter().map(|c| json!({ "name": c.name, "pass": c.pass, "detail": c.detail })).collect(),
    );
    (json!({ "checks": value, "all_pass": all }), all)
}
