use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn sqca(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqca")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).unwrap_or_else(|e| panic!("stderr is not JSON ({e}): {}", String::from_utf8_lossy(&out.stderr)))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sqca-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write(name: &str, v: &Value) -> String {
    let p = scratch(name);
    std::fs::write(&p, v.to_string()).unwrap();
    p.to_string_lossy().into_owned()
}

fn preset(group: &str, payload: Value) -> Value {
    json!({"version": 1, "group": group, "realization": {"type": "preset", "payload": payload}})
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn shift_index_report() {
    let f = write("shift.json", &preset("trivial", json!({"name": "shift", "d": 2})));
    let out = sqca(&["index", &f]);
    assert_eq!(out.status.code(), Some(0));
    let r = stdout_json(&out);
    assert_eq!(r["d"], json!({"num": 2, "den": 1, "radical": false}));
    assert_eq!(r["zeta"], json!([0]));
    assert_eq!(r["nu"]["trivial"], json!(true));
    assert_eq!(r["diagnostics"]["dim_left"], json!(1));
    assert_eq!(r["diagnostics"]["dim_right"], json!(16));
}

#[test]
fn majorana_index_is_radical() {
    let f = write("maj.json", &preset("trivial", json!({"name": "majorana"})));
    let r = stdout_json(&sqca(&["index", &f, "--all-cells"]));
    assert_eq!(r["d"], json!({"num": 1, "den": 1, "radical": true}));
    for cell in r["diagnostics"]["cells"].as_array().unwrap() {
        assert_eq!(cell["index"]["d"], r["d"]);
    }
}

#[test]
fn zeta_and_cocycle_examples() {
    let f = write("zeta.json", &preset("Z2", json!({"name": "zeta", "zeta": [0, 1]})));
    let r = stdout_json(&sqca(&["index", &f]));
    assert_eq!((r["d"]["num"].clone(), r["zeta"].clone()), (json!(2), json!([0, 1])));
    let f = write("cocycle.json", &preset("Z2xZ2", json!({"name": "cocycle", "rep": "pauli"})));
    let r = stdout_json(&sqca(&["index", &f]));
    assert_eq!(r["d"]["num"], json!(2));
    assert_eq!(r["nu"]["trivial"], json!(false));
}

#[test]
fn malformed_files_exit_with_two() {
    let f = scratch("broken.json");
    std::fs::write(&f, "{\"version\": 1, \"group\": ").unwrap();
    let out = sqca(&["index", path(&f)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"]["kind"], json!("SchemaError"));
    let unknown_field = write("extra.json", &json!({"version": 1, "group": "Z2", "realization": {"type": "preset", "payload": {"name": "shift", "d": 2, "speed": 3}}}));
    assert_eq!(sqca(&["index", &unknown_field]).status.code(), Some(2));
    let bad_group = write("group.json", &preset("Z9", json!({"name": "shift", "d": 2})));
    let out = sqca(&["index", &bad_group]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"]["kind"], json!("UnknownGroup"));
    assert_eq!(sqca(&["index", "/nonexistent/problem.json"]).status.code(), Some(2));
    assert_eq!(sqca(&["--tol-alg", "2", "cohomology", "--group", "Z2"]).status.code(), Some(2));
    assert_eq!(sqca(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn outputs_are_byte_stable_and_written() {
    let f = write("stable.json", &preset("Z2xZ2", json!({"name": "cocycle", "rep": "pauli"})));
    let out_file = scratch("report.json");
    let a = sqca(&["--seed", "7", "index", &f, "--out", path(&out_file)]);
    let b = sqca(&["--seed", "7", "index", &f]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(std::fs::read(&out_file).unwrap(), a.stdout);
    let c1 = sqca(&["cohomology", "--group", "D4", "--m", "2"]);
    let c2 = sqca(&["cohomology", "--group", "D4", "--m", "2"]);
    assert_eq!(c1.stdout, c2.stdout);
}

#[test]
fn cohomology_class_counts() {
    let count = |g: &str| stdout_json(&sqca(&["cohomology", "--group", g, "--m", "2"]))["count"].clone();
    assert_eq!(count("Z2"), json!(1));
    assert_eq!(count("Z2xZ2"), json!(2));
    assert_eq!(count(r#"{"order": 2, "table": [[0, 1], [1, 0]]}"#), json!(1));
    let out = sqca(&["cohomology", "--group", "S3", "--m", "6"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"]["kind"], json!("TooLarge"));
}

#[test]
fn verify_suites() {
    let out = sqca(&["verify", "group-laws", "--group", "Z2xZ2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["passed"], json!(true));
    let out = sqca(&["--seed", "42", "verify", "stacking"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let out = sqca(&["verify", "astrology"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"]["kind"], json!("UnknownSuite"));
}

#[test]
fn decouple_identity_circuit_and_shift() {
    let id = write(
        "id.json",
        &json!({"version": 1, "group": "Z2", "window": {"sites": 12, "site": {"grading": [1, -1]}},
                "realization": {"type": "preset", "payload": {"name": "identity"}}}),
    );
    let r = stdout_json(&sqca(&["decouple", &id]));
    assert_eq!(r["realization"]["payload"]["layers"], json!([[], []]));

    let mut circuit = preset("Z2xZ2", json!({"name": "random_circuit"}));
    circuit["window"] = json!({"sites": 10});
    let f = write("circuit.json", &circuit);
    let out_file = scratch("decoupled.json");
    let out = sqca(&["--seed", "3", "decouple", &f, "--out", path(&out_file)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = stdout_json(&out);
    assert!(r["diagnostics"]["max_residual"].as_f64().unwrap() < 1e-8);
    assert!(r["diagnostics"]["written_residual"].as_f64().unwrap() < 1e-8);
    // The written file is itself a problem file whose circuit has trivial index.
    let again = stdout_json(&sqca(&["index", path(&out_file)]));
    assert_eq!(again["text"], json!("(1, 0, e)"));

    let shift = write("dshift.json", &preset("trivial", json!({"name": "shift", "d": 2})));
    let out = sqca(&["decouple", &shift]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"]["kind"], json!("IndexNotTrivial"));
}

#[test]
fn examples_are_runnable() {
    let dir = scratch("examples");
    assert_eq!(sqca(&["examples", "--dir", path(&dir)]).status.code(), Some(0));
    let expected = [
        ("shift-d2.json", "(2, 0, e)"),
        ("shift-d3.json", "(3, 0, e)"),
        ("shift-d2-coarse.json", "(2, 0, e)"),
        ("majorana.json", "(√2, 0, e)"),
        ("zeta-z2.json", "(2, 01, e)"),
        ("identity-z2.json", "(1, 0, e)"),
        ("circuit-z2.json", "(1, 0, e)"),
    ];
    for (name, text) in expected {
        let r = stdout_json(&sqca(&["index", path(&dir.join(name))]));
        assert_eq!(r["text"], json!(text), "{name}");
    }
}
