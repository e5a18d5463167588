use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

fn scratch(name: &str, contents: &str) -> String {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, contents).unwrap();
    path.display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracsub")).env_remove("FRACSUB_TOL").args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn ok(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["status"], "ok");
    assert!(v["inputs_digest"].as_str().unwrap().starts_with("sha256:"));
    v
}

#[test]
fn certify_example_one() {
    let v = ok(&["certify", &fixture("powers_partial.json"), &fixture("singletons4.json")]);
    assert_eq!(v["command"], "certify");
    assert_eq!(v["result"]["verdict"], "modular");
    assert_eq!(v["result"]["checked_sum"], "98");
}

#[test]
fn certify_example_two_and_gaps() {
    let v = ok(&["certify", &fixture("seven_members_partial.json"), &fixture("seven_members_family.json")]);
    assert_eq!(v["result"]["verdict"], "modular");
    assert_eq!(v["result"]["checked_sum"], "18/5");
    let v = ok(&["gaps", &fixture("seven_members_setfn.json"), &fixture("seven_members_family.json")]);
    assert_eq!(v["result"]["classification"]["flavor"], "partition");
    assert_eq!(v["result"]["gap_upper"], "0");
    assert_eq!(v["result"]["verdict"], "modular");
}

#[test]
fn certify_without_submodularity_is_insufficient() {
    let v = ok(&["certify", "--no-submodular", &fixture("powers_partial.json"), &fixture("singletons4.json")]);
    assert_eq!(v["result"]["verdict"], "insufficient-data");
}

#[test]
fn decreasing_covering_gap_and_refusal() {
    let v = ok(&["gaps", &fixture("decreasing_covering_setfn.json"), &fixture("decreasing_covering_family.json")]);
    assert_eq!(v["result"]["gap_upper"], "0");
    assert_eq!(v["result"]["classification"]["flavor"], "covering");
    assert_eq!(v["result"]["verdict"], "not-modular");
    let out =
        run(&["equality", &fixture("decreasing_covering_setfn.json"), &fixture("decreasing_covering_family.json")]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn equality_without_weights_uses_integer_form() {
    let v = ok(&["equality", &fixture("u23_setfn.json"), &fixture("pairs3_unweighted.json")]);
    assert_eq!(v["result"]["k"], 2);
}

#[test]
fn stability_on_correlated_bits() {
    let setfn = scratch("bits_setfn.json", r#"{"n": 2, "values": [0.0, 1.0, 1.0, 1.0]}"#);
    let v = ok(&["stability", &setfn, &fixture("singletons2.json"), "--epsilon", "1"]);
    assert_eq!(v["result"]["satisfied"], true);
    assert_eq!(v["result"]["sigma"], "1");
}

#[test]
fn mmi_modes() {
    let v = ok(&["mmi", &fixture("correlated_bits.json"), "--tc"]);
    assert!((v["result"]["total_correlation"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let v = ok(&["mmi", &fixture("identical_bits3.json"), "--si"]);
    assert_eq!(v["result"]["value"].as_f64().unwrap(), 1.0);
    let v = ok(&["mmi", &fixture("identical_bits3.json"), "--max"]);
    assert!((v["result"]["value"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    let v = ok(&["mmi", &fixture("xor3.json"), "--dtc"]);
    assert!((v["result"]["dual_total_correlation"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    let v = ok(&["mmi", &fixture("identical_bits3.json"), &fixture("cosingletons3.json")]);
    assert!((v["result"]["value"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert_eq!(v["result"]["symmetric_form"], serde_json::json!(["0", "1/2"]));
    let out = run(&["mmi", &fixture("identical_bits3.json")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn matroid_verdicts() {
    let v = ok(&["matroid", &fixture("u23.json"), &fixture("singletons3.json")]);
    assert_eq!(v["result"]["gap"], "1");
    assert_eq!(v["result"]["equality"], false);
    let v = ok(&["matroid", &fixture("free3.json"), &fixture("singletons3.json")]);
    assert_eq!(v["result"]["equality"], true);
    let v = ok(&["matroid", &fixture("one_loop.json"), &fixture("cosingletons3.json")]);
    assert_eq!(v["result"]["equality"], true);
    assert_eq!(v["result"]["free_outside_loops"], true);
    let v = ok(&["matroid", &fixture("triangle.json"), &fixture("singletons3.json")]);
    assert_eq!(v["result"]["gap"], "1");
}

#[test]
fn detineq_presets_and_csv() {
    let v = ok(&["detineq", &fixture("diag123.json"), "--preset", "hadamard"]);
    assert_eq!(v["result"]["equality"], true);
    assert_eq!(v["result"]["log_gap"].as_f64().unwrap(), 0.0);
    let v = ok(&["detineq", &fixture("rho05.csv"), "--preset", "hadamard"]);
    let expected = -0.5 * 0.75f64.log2();
    assert!((v["result"]["gap_bits"].as_f64().unwrap() - expected).abs() <= 2f64.powi(-25));
    let v = ok(&["detineq", &fixture("block3.json"), "--preset", "fischer=1,2"]);
    assert_eq!(v["result"]["equality"], true);
    assert_eq!(v["result"]["diagonal"], true);
    let v = ok(&["detineq", &fixture("block3.json"), "--preset", "szasz"]);
    assert_eq!(v["result"]["equality"], false);
    let out = run(&["detineq", &fixture("block3.json")]);
    assert_eq!(out.status.code(), Some(2));
    let asymmetric = scratch("asymmetric.csv", "1,0.2\n0.3,1\n");
    assert_eq!(run(&["detineq", &asymmetric, "--preset", "hadamard"]).status.code(), Some(2));
    let not_pd = scratch("not_pd.csv", "1,2\n2,1\n");
    assert_eq!(run(&["detineq", &not_pd, "--preset", "hadamard"]).status.code(), Some(3));
}

#[test]
fn normalize_and_find_partition() {
    let v = ok(&["normalize", &fixture("with_zero_and_full.json")]);
    assert_eq!(v["result"]["identity"], false);
    assert_eq!(v["result"]["classification"]["flavor"], "partition");
    assert_eq!(v["result"]["normalized"]["dropped_zero_weight"], 1);
    let v = ok(&["find-partition", &fixture("pairs3_unweighted.json")]);
    assert_eq!(v["result"]["found"], true);
    let weights: Vec<&str> =
        v["result"]["family"]["members"].as_array().unwrap().iter().map(|m| m["weight"].as_str().unwrap()).collect();
    assert_eq!(weights, vec!["1/2"; 3]);
    let only_pairs = scratch("two_pairs.json", r#"{"n": 3, "members": [{"set": [1, 2]}, {"set": [1, 3]}]}"#);
    let v = ok(&["find-partition", &only_pairs]);
    assert_eq!(v["result"]["found"], false);
}

#[test]
fn generate_round_trips_through_gaps() {
    for kind in ["coverage", "entropy", "matroid-plus-modular"] {
        let out = run(&["generate", "--kind", kind, "--n", "4", "--seed", "11"]);
        assert_eq!(out.status.code(), Some(0));
        let v = json(&out);
        let path = scratch(&format!("gen_{kind}.json"), &serde_json::to_string(&v["result"]).unwrap());
        let g = ok(&["gaps", &path, &fixture("singletons4.json")]);
        assert_eq!(g["result"]["submodular"], true, "{kind}");
        assert!(g["result"]["violations"].as_array().unwrap().is_empty());
    }
    assert_eq!(run(&["generate", "--kind", "nope", "--n", "3"]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let args = ["gaps", &fixture("seven_members_setfn.json"), &fixture("seven_members_family.json")];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let g1 = run(&["generate", "--kind", "entropy", "--n", "5", "--seed", "3"]);
    let g2 = run(&["generate", "--kind", "entropy", "--n", "5", "--seed", "3"]);
    assert_eq!(g1.stdout, g2.stdout);
    let p1 = run(&["--worked-examples"]);
    let p2 = run(&["--worked-examples"]);
    assert_eq!(p1.stdout, p2.stdout);
}

#[test]
fn input_errors_exit_two() {
    let missing = run(&["gaps", "/nonexistent/setfn.json", &fixture("singletons3.json")]);
    assert_eq!(missing.status.code(), Some(2));
    let bad = scratch("bad_values.json", r#"{"n": 2, "values": ["0", "1", "x", "2"]}"#);
    let out = run(&["gaps", &bad, &fixture("singletons2.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("values[2]"));
    let mixed = scratch("mixed_values.json", r#"{"n": 1, "values": ["0", 1.5]}"#);
    assert_eq!(run(&["gaps", &mixed, &fixture("singletons2.json")]).status.code(), Some(2));
    let mismatch = run(&["gaps", &fixture("powers_setfn.json"), &fixture("singletons3.json")]);
    assert_eq!(mismatch.status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
}

#[test]
fn tolerance_artifacts_are_verdict_failures() {
    // submodular; the gap is d/2 while f({1,2}) is off by d
    let setfn = scratch("near_modular.json", r#"{"n": 3, "values": [0, 1, 1, 1.99, 1, 2, 2, 2.99]}"#);
    let pairs = fixture("cosingletons3.json");
    let strict = run(&["gaps", &setfn, &pairs]);
    assert_eq!(strict.status.code(), Some(0));
    let loose = run(&["gaps", "--tol", "0.0075", &setfn, &pairs]);
    assert_eq!(loose.status.code(), Some(1));
    let v = json(&loose);
    assert_eq!(v["status"], "verdict-failure");
    assert!(!v["result"]["violations"].as_array().unwrap().is_empty());
    let via_env = Command::new(env!("CARGO_BIN_EXE_fracsub"))
        .env("FRACSUB_TOL", "0.0075")
        .args(["gaps", &setfn, &pairs])
        .output()
        .unwrap();
    assert_eq!(via_env.status.code(), Some(1));
    assert_eq!(json(&via_env)["parameters"]["tol"], 0.0075);
}

#[test]
fn bundled_fixtures_flag() {
    let out = run(&["--worked-examples"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v = json(&out);
    assert_eq!(v["result"]["all_pass"], true);
}

#[test]
fn text_format() {
    let out = run(&["--format", "text", "matroid", &fixture("u23.json"), &fixture("singletons3.json")]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("matroid (\"ok\")"));
    assert!(text.contains("gap: \"1\""));
}
