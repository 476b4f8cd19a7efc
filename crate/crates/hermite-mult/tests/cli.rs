use std::path::PathBuf;

use hermite_mult::cli::run;
use serde_json::{json, Value};
use tempfile::TempDir;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("hermite-mult").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn write_json(dir: &TempDir, name: &str, v: &Value) -> String {
    write(dir, name, &v.to_string()).to_str().unwrap().to_owned()
}

fn lines(s: &str) -> Vec<Value> {
    s.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn assert_single_line_error(code: i32, out: &str, err: &str) {
    assert_eq!(code, 2);
    assert!(out.is_empty(), "{out}");
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.ends_with('\n'));
}

#[test]
fn expand_identity_map_is_single_term() {
    let dir = TempDir::new().unwrap();
    let spec = write_json(
        &dir,
        "id.json",
        &json!({"k": [2, 1], "Lambda": [[1, 0], [0, 1]], "Sigma": [[1, 0], [0, 1]], "Upsilon": [[1, 0], [0, 1]]}),
    );
    let (code, out, _) = call(&["expand", "--spec", &spec]);
    assert_eq!(code, 0);
    let doc = &lines(&out)[0];
    assert_eq!(doc["k"], json!([2, 1]));
    assert_eq!(doc["variant"], "symmetrized");
    assert_eq!(doc["terms"], json!([{"q": [2, 1], "coeff": 1.0}]));
}

#[test]
fn expand_rational_and_csv() {
    let dir = TempDir::new().unwrap();
    let spec = write_json(
        &dir,
        "r.json",
        &json!({"k": [2], "Lambda": [["2"]], "Sigma": [["1"]], "Upsilon": [["1"]], "rational": true}),
    );
    let (code, out, _) = call(&["expand", "--spec", &spec]);
    assert_eq!(code, 0);
    assert_eq!(
        lines(&out)[0]["terms"],
        json!([{"q": [2], "coeff": "4/1"}, {"q": [0], "coeff": "3/1"}])
    );
    let (code, out, _) = call(&["expand", "--spec", &spec, "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(out, "q_1,coeff\n2,4/1\n0,3/1\n");
}

#[test]
fn eval_named_families() {
    let (code, out, _) = call(&["eval", "--family", "he", "--k", "3", "--at", "2", "--at", "-1"]);
    assert_eq!(code, 0);
    let v = lines(&out);
    assert_eq!(v[0]["value"].as_f64(), Some(2.0));
    assert_eq!(v[1]["value"].as_f64(), Some(2.0));
    let (_, out, _) = call(&["eval", "--family", "h", "--k", "2", "--at", "1"]);
    assert_eq!(lines(&out)[0]["value"].as_f64(), Some(2.0));
    let (_, out, _) = call(&["eval", "--family", "scaled:0.5", "--k", "2", "--at", "1"]);
    assert_eq!(lines(&out)[0]["value"].as_f64(), Some(2.0));
    let (_, out, _) = call(&["eval", "--family", "he", "--k", "1,2", "--at", "2,3"]);
    assert_eq!(lines(&out)[0]["value"].as_f64(), Some(16.0));
}

#[test]
fn eval_general_family_uses_spec_covariance() {
    let dir = TempDir::new().unwrap();
    let spec = write_json(
        &dir,
        "g.json",
        &json!({"k": [1, 1], "Lambda": [[1, 0], [0, 1]], "Sigma": [["2", "1"], ["1", "1"]], "Upsilon": [[1, 0], [0, 1]], "rational": true}),
    );
    // B = Σ⁻¹ = [[1,-1],[-1,2]]; H_(1,1) = (Bx)_1 (Bx)_2 - B_12
    let (code, out, _) = call(&["eval", "--family", "general", "--spec", &spec, "--at", "1,1"]);
    assert_eq!(code, 0);
    assert_eq!(lines(&out)[0]["value"], "1/1");
}

#[test]
fn expansion_round_trip_matches_lhs() {
    let dir = TempDir::new().unwrap();
    let spec = write_json(
        &dir,
        "s.json",
        &json!({"k": [3, 1], "Lambda": [[0.4, -1.0], [1.3, 0.2]], "Sigma": [[1.0, 0.3], [0.3, 2.0]], "Upsilon": [[0.7, 0.0], [0.0, 1.4]]}),
    );
    let (_, expansion, _) = call(&["expand", "--spec", &spec]);
    let exp = write(&dir, "e.json", &expansion);
    let (code, out, _) = call(&["eval", "--expansion", exp.to_str().unwrap(), "--spec", &spec, "--at", "0.5,-0.25"]);
    assert_eq!(code, 0);
    let v = &lines(&out)[0];
    let (lhs, rhs) = (v["lhs"].as_f64().unwrap(), v["rhs"].as_f64().unwrap());
    assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0), "{lhs} {rhs}");
}

#[test]
fn mismatched_expansion_is_input_error() {
    let dir = TempDir::new().unwrap();
    let spec_a = write_json(&dir, "a.json", &json!({"k": [2], "Lambda": [[1]], "Sigma": [[1]], "Upsilon": [[1]]}));
    let spec_b = write_json(&dir, "b.json", &json!({"k": [3], "Lambda": [[1]], "Sigma": [[1]], "Upsilon": [[1]]}));
    let (_, expansion, _) = call(&["expand", "--spec", &spec_a]);
    let exp = write(&dir, "e.json", &expansion);
    let (code, out, err) = call(&["eval", "--expansion", exp.to_str().unwrap(), "--spec", &spec_b, "--at", "1"]);
    assert_single_line_error(code, &out, &err);
}

#[test]
fn input_errors_exit_2_with_one_line() {
    let dir = TempDir::new().unwrap();
    let malformed = write(&dir, "bad.json", "{\"k\": [1,");
    let (c, o, e) = call(&["expand", "--spec", malformed.to_str().unwrap()]);
    assert_single_line_error(c, &o, &e);

    let dims = write_json(&dir, "dims.json", &json!({"k": [1], "Lambda": [[1, 0]], "Sigma": [[1]], "Upsilon": [[1]]}));
    let (c, o, e) = call(&["expand", "--spec", &dims]);
    assert_single_line_error(c, &o, &e);

    let not_spd = write_json(
        &dir,
        "nspd.json",
        &json!({"k": [1, 0], "Lambda": [[1, 0], [0, 1]], "Sigma": [[1, 2], [2, 1]], "Upsilon": [[1, 0], [0, 1]]}),
    );
    let (c, o, e) = call(&["expand", "--spec", &not_spd]);
    assert_single_line_error(c, &o, &e);
    let (c, o, e) = call(&["oracle-compare", "--spec", &not_spd]);
    assert_single_line_error(c, &o, &e);

    let (c, o, e) = call(&["expand", "--spec", dir.path().join("missing.json").to_str().unwrap()]);
    assert_single_line_error(c, &o, &e);

    let (c, o, e) = call(&["eval", "--family", "he", "--k", "2", "--at", "1,2"]);
    assert_single_line_error(c, &o, &e);
    let (c, o, e) = call(&["eval", "--family", "nope", "--k", "2", "--at", "1"]);
    assert_single_line_error(c, &o, &e);
    let (c, o, e) = call(&["eval", "--family", "scaled:-1", "--k", "2", "--at", "1"]);
    assert_single_line_error(c, &o, &e);

    let (c, o, e) = call(&["frobnicate"]);
    assert_single_line_error(c, &o, &e);
    let (c, o, e) = call(&["verify", "--trials", "0", "--suite", "gf"]);
    assert_single_line_error(c, &o, &e);
}

#[test]
fn help_exits_zero() {
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("oracle-compare"));
}

#[test]
fn oracle_compare_permutation_instance() {
    let dir = TempDir::new().unwrap();
    let perm = write_json(
        &dir,
        "perm.json",
        &json!({"k": [1, 1], "Lambda": [[0, 1], [1, 0]], "Sigma": [[1, 0], [0, 1]], "Upsilon": [[1, 0], [0, 1]], "rational": true}),
    );
    let (code, out, _) = call(&["oracle-compare", "--spec", &perm, "--variant", "paper-literal"]);
    assert_eq!(code, 1);
    let v = &lines(&out)[0];
    assert_eq!(v["equal"], false);
    assert_eq!(v["rhs"], json!([]));
    assert_eq!(v["diff"], json!([{"mono": [1, 1], "coeff": "1/1"}]));
    assert_eq!(v["lhs"], v["diff"]);

    let (code, out, _) = call(&["oracle-compare", "--spec", &perm]);
    assert_eq!(code, 0);
    assert_eq!(lines(&out)[0]["diff"], json!([]));
}

#[test]
fn verify_main_seed_7() {
    let (code, out, _) = call(&["verify", "--suite", "main", "--seed", "7", "--trials", "100"]);
    assert_eq!(code, 0);
    let v = &lines(&out)[0];
    assert_eq!(v["failures"], 0);
    assert_eq!(v["checks_run"], 100);
    assert_eq!(v["seed"], 7);
    for key in ["suite", "variant", "checks_run", "failures", "max_rel_err", "tol", "worst_case", "rng", "seed"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn verify_single_selector_fails_in_general() {
    let (code, out, _) = call(&["verify", "--suite", "main", "--seed", "7", "--variant", "paper-literal"]);
    assert_eq!(code, 1);
    assert!(lines(&out)[0]["failures"].as_u64().unwrap() > 0);
    let (code, _, _) = call(&[
        "verify", "--suite", "main", "--seed", "7", "--variant", "paper-literal", "--n-max", "1",
    ]);
    assert_eq!(code, 0);
}

#[test]
fn verify_is_deterministic() {
    let a = call(&["verify", "--suite", "all", "--seed", "3", "--trials", "20"]);
    let b = call(&["verify", "--suite", "all", "--seed", "3", "--trials", "20"]);
    assert_eq!(a, b);
    assert_eq!(a.0, 0);
    assert_eq!(a.1.lines().count(), 8);
    let c = call(&["verify", "--suite", "all", "--seed", "4", "--trials", "20"]);
    assert_ne!(a.1, c.1);
}
