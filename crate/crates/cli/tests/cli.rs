use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bandlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bandlab")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON report on stdout")
}

fn verdict(report: &Value, label: &str) -> String {
    report["result"]["conditions"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["label"] == label)
        .map(|c| c["verdict"].as_str().unwrap().to_string())
        .unwrap()
}

fn export(dir: &Path, case: &str) -> String {
    let path = dir.join(format!("{case}.json"));
    let out = bandlab(&["export", "--gallery", case, "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    path.to_str().unwrap().to_string()
}

#[test]
fn check_i_minus_v1_reports_injective_not_fredholm() {
    let out = bandlab(&["check", "--gallery", "i_minus_v1"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_eq!(r["schemaVersion"], 1);
    assert_eq!(r["task"], "ladder");
    assert_eq!(r["status"], "ok");
    assert_eq!(verdict(&r, "(vii)"), "holds");
    assert_eq!(verdict(&r, "(v)"), "fails");
    assert_eq!(verdict(&r, "(i)"), "fails");
    assert!(r["expectations"].as_array().unwrap().iter().all(|e| e["status"] == "ok"));
}

#[test]
fn ladder_alias_and_text_format() {
    let out = bandlab(&["ladder", "--gallery", "symbol_2_minus_t", "--format", "text"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("(i)") && text.contains("holds"), "{text}");
}

#[test]
fn moduli_csv_has_five_singular_values_per_radius() {
    let dir = tempfile::tempdir().unwrap();
    let op = export(dir.path(), "symbol_2_minus_t");
    let out = bandlab(&["moduli", "--op", &op, "--radii", "8,16,32,64", "--p", "2", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let csv = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "radius,j,q,sigma_1,sigma_2,sigma_3,sigma_4,sigma_5,flags");
    assert_eq!(lines.len(), 5);
    for (line, r) in lines[1..].iter().zip([8, 16, 32, 64]) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 9);
        assert_eq!(fields[0], r.to_string());
        let s1: f64 = fields[3].parse().unwrap();
        assert!(s1 >= 1.0 - 1e-12, "|2 − t| ≥ 1 on the circle, got {s1}");
    }
}

#[test]
fn tsemi_auto_eps_chooses_bandwidth() {
    let dir = tempfile::tempdir().unwrap();
    let op = export(dir.path(), "symbol_2_minus_t");
    let out = bandlab(&["tsemi", "--op", &op, "--m", "1", "--eps", "auto"]);
    assert_eq!(code(&out), 0);
    let r = json(&out)["result"].clone();
    assert_eq!(r["epsAuto"], true);
    assert_eq!(r["l"], 1);
    assert_eq!(r["defect"], 0.0);
    assert_eq!(r["chainHolds"], true);
    assert!(r["upperSlack"].as_f64().unwrap() >= 0.0 && r["lowerSlack"].as_f64().unwrap() >= 0.0);
}

#[test]
fn identical_config_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.json");
    std::fs::write(
        &cfg,
        r#"{"task": "ladder", "operator": {"gallery": "mixed_one_sided"}, "outputs": {"json": "out/report.json", "text": "out/report.txt"}}"#,
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    assert_eq!(code(&bandlab(&["run", "--config", cfg])), 0);
    let first = std::fs::read(dir.path().join("out/report.json")).unwrap();
    assert_eq!(code(&bandlab(&["run", "--config", cfg])), 0);
    let second = std::fs::read(dir.path().join("out/report.json")).unwrap();
    assert_eq!(first, second);
    assert!(dir.path().join("out/report.txt").exists());
    // the flag route builds the same configuration
    let direct = bandlab(&["check", "--gallery", "mixed_one_sided"]);
    assert_eq!(direct.stdout, first);
}

#[test]
fn inline_operator_in_config() {
    let dir = tempfile::tempdir().unwrap();
    let op: Value = serde_json::from_str(&std::fs::read_to_string(export(dir.path(), "identity")).unwrap()).unwrap();
    let cfg = serde_json::json!({"task": "sweep", "operator": {"inline": op}, "radii": [8, 12, 16], "outputs": {"csv": "sweep.csv"}});
    let path = dir.path().join("exp.json");
    std::fs::write(&path, cfg.to_string()).unwrap();
    let out = bandlab(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv, "radius,kernel_count,cokernel_count\n8,0,0\n12,0,0\n16,0,0\n");
}

#[test]
fn invalid_configs_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (r#"{"task": "tsemi", "operator": {"gallery": "identity"}, "tolerances": {"zeroTol": -1}}"#, "tolerances.zeroTol"),
        (r#"{"task": "tsemi", "operator": {"gallery": "identity"}}"#, "m:"),
        (r#"{"task": "ladder"}"#, "operator:"),
        (r#"{"task": "sweep", "operator": {"gallery": "identity"}, "radii": [8, 16]}"#, "radii:"),
        (r#"{"task": "ladder", "operator": {"gallery": "identity"}, "p": "1"}"#, "p:"),
        (r#"{"task": "spectrum", "operator": {"gallery": "identity"}, "outputs": {"csv": "x.csv"}}"#, "outputs.csv"),
        (r#"{"task": "gallery", "cases": ["identity", "nope"]}"#, "cases[1]"),
        (r#"{"task": "ladder", "operater": {"gallery": "identity"}}"#, "unknown field"),
        (r#"{"task": "tsemi", "operator": {"gallery": "identity"}, "m": 1, "eps": "sometimes"}"#, "eps:"),
    ];
    for (i, (text, path)) in cases.iter().enumerate() {
        let file = dir.path().join(format!("bad{i}.json"));
        std::fs::write(&file, text).unwrap();
        let out = bandlab(&["run", "--config", file.to_str().unwrap()]);
        let err = String::from_utf8_lossy(&out.stderr);
        assert_eq!(code(&out), 2, "{text}: {err}");
        assert!(err.contains(path), "{text}: expected `{path}` in {err}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&bandlab(&["check"])), 2);
    assert_eq!(code(&bandlab(&["check", "--gallery", "no_such_case"])), 2);
    assert_eq!(code(&bandlab(&["check", "--gallery", "identity", "--format", "csv"])), 2);
    assert_eq!(code(&bandlab(&["check", "--gallery", "flip_quasibanded"])), 2);
    assert_eq!(code(&bandlab(&["moduli", "--gallery", "identity", "--p", "3"])), 2);
    assert_eq!(code(&bandlab(&["frobnicate"])), 2);
}

#[test]
fn exhausted_budget_has_its_own_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = export(dir.path(), "symbol_2_minus_t");
    let mut op: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    op["tailBound"] = 1.0.into();
    std::fs::write(&path, op.to_string()).unwrap();
    let out = bandlab(&["tsemi", "--op", &path, "--m", "1", "--eps", "1e-6"]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn undecided_gallery_expectation_exits_4() {
    // every singular value counts as zero: the sweep cannot settle a Fredholm case
    let out = bandlab(&["check", "--gallery", "symbol_2_minus_t", "--tol", "10"]);
    assert_eq!(code(&out), 4);
    assert_eq!(json(&out)["status"], "undecided");
}

#[test]
fn gallery_subset_and_spectrum() {
    let out = bandlab(&["gallery", "--case", "identity", "--case", "symbol_2_minus_t", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("case,check,expected,observed,status\n"));
    assert!(csv.lines().skip(1).all(|l| l.ends_with("Pass")), "{csv}");

    let out = bandlab(&["spectrum", "--gallery", "mixed_one_sided"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["result"]["orbits"].as_array().unwrap().len(), 4);
}

#[test]
fn export_round_trips_through_op() {
    let dir = tempfile::tempdir().unwrap();
    let op = export(dir.path(), "e1_halfplane");
    let a = bandlab(&["spectrum", "--op", &op]);
    assert_eq!(code(&a), 0);
    let r = json(&a);
    assert_eq!(r["source"], format!("file:{op}"));
    assert_eq!(r["result"]["orbits"].as_array().unwrap().len(), 3);
}
