use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const TOY: &str = "A1,A2,A3,label\n0,1,0,y\n0,0,1,n\n0,0,0,y\n0,1,1,y\n0,0,1,n\n";
const TOY_CONFIG: &str = r#"
[[attribute]]
column = "A1"
values = ["0", "1"]

[[attribute]]
column = "A2"
values = ["0", "1"]

[[attribute]]
column = "A3"
values = ["0", "1"]
"#;

fn mupcov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mupcov")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn toy(dir: &TempDir) -> (PathBuf, PathBuf) {
    let csv = dir.path().join("toy.csv");
    let cfg = dir.path().join("toy.toml");
    fs::write(&csv, TOY).unwrap();
    fs::write(&cfg, TOY_CONFIG).unwrap();
    (csv, cfg)
}

fn pattern_lines(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap().trim())
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect()
}

fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn assess_toy_lists_1xx() {
    let dir = TempDir::new().unwrap();
    let (csv, cfg) = toy(&dir);
    let out = mupcov(&["assess", s(&csv), "--config", s(&cfg), "--threshold", "1", "--algorithm", "deepdiver"]);
    assert!(out.status.success());
    assert_eq!(pattern_lines(&stdout(&out)), ["1XX"]);
}

#[test]
fn text_and_json_agree() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("r.csv");
    let synth = mupcov(&["synth", "random", "--seed", "3", "--cards", "2,3,2,2", "--rows", "60", "--skew", "0.5", "--out", s(&csv)]);
    assert!(synth.status.success());
    let cfg = csv.with_extension("toml");
    let base = ["assess", s(&csv), "--config", s(&cfg), "--threshold", "3"];
    let text = mupcov(&base);
    let js = mupcov(&[&base[..], &["--format", "json", "--algorithm", "breaker"]].concat());
    let mut from_text = pattern_lines(&stdout(&text));
    let mut from_json: Vec<String> = json(&stdout(&js))["mups"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m["pattern"].as_str().unwrap().to_string())
        .collect();
    from_text.sort();
    from_json.sort();
    assert!(!from_text.is_empty());
    assert_eq!(from_text, from_json);
    let report = json(&stdout(&js));
    let total: u64 = report["level_histogram"].as_object().unwrap().values().map(|v| v.as_u64().unwrap()).sum();
    assert_eq!(total as usize, from_json.len());
}

#[test]
fn threshold_rate_one() {
    let dir = TempDir::new().unwrap();
    let (csv, cfg) = toy(&dir);
    let out = mupcov(&["assess", s(&csv), "--config", s(&cfg), "--threshold-rate", "1.0", "--format", "json"]);
    assert!(out.status.success());
    let r = json(&stdout(&out));
    assert_eq!(r["threshold"]["count"], 5);
    assert!(r["mups"].as_array().unwrap().iter().all(|m| m["pattern"] != "XXX"));
}

#[test]
fn usage_errors_exit_1() {
    let dir = TempDir::new().unwrap();
    let (csv, cfg) = toy(&dir);
    let none = mupcov(&["assess", s(&csv), "--config", s(&cfg)]);
    assert_eq!(none.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&none.stderr).contains("threshold"));
    let both = mupcov(&["assess", s(&csv), "--config", s(&cfg), "--threshold", "1", "--threshold-rate", "0.5"]);
    assert_eq!(both.status.code(), Some(1));
    let missing = mupcov(&["assess", "/nonexistent.csv", "--threshold", "1"]);
    assert_eq!(missing.status.code(), Some(1));
    let bad_rate = mupcov(&["assess", s(&csv), "--config", s(&cfg), "--threshold-rate", "1.5"]);
    assert_eq!(bad_rate.status.code(), Some(1));
    let degenerate = mupcov(&["assess", s(&csv), "--threshold", "1"]);
    assert_eq!(degenerate.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&degenerate.stderr).contains("A1"));
    assert!(mupcov(&["--help"]).status.success());
}

#[test]
fn expired_budget_exits_2() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("big.csv");
    let cards = vec!["2"; 14].join(",");
    assert!(mupcov(&["synth", "random", "--seed", "1", "--cards", &cards, "--rows", "5000", "--out", s(&csv)])
        .status
        .success());
    let out = mupcov(&[
        "assess", s(&csv), "--config", s(&csv.with_extension("toml")), "--threshold", "30",
        "--time-budget", "0", "--algorithm", "breaker", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&stdout(&out))["complete"], false);
}

#[test]
fn synth_diagonal_is_identity() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("diag.csv");
    let out = mupcov(&["synth", "diagonal", "--n", "4", "--out", s(&csv)]);
    assert!(out.status.success());
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text, "A1,A2,A3,A4\n1,0,0,0\n0,1,0,0\n0,0,1,0\n0,0,0,1\n");
    assert!(csv.with_extension("toml").exists());
    assert_eq!(mupcov(&["synth", "diagonal", "--n", "3", "--out", s(&csv)]).status.code(), Some(1));
}

#[test]
fn synth_random_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        assert!(mupcov(&["synth", "random", "--seed", "7", "--cards", "3,2,4", "--rows", "200", "--out", s(p)])
            .status
            .success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn vc_fixture_and_plan() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("vc.csv");
    let out = mupcov(&["synth", "vc", "--vertices", "4", "--edges", "0-1,1-3,0-3,2-3,0-2", "--out", s(&csv)]);
    assert!(out.status.success());
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(
        text,
        "A1,A2,A3,A4,A5\n1,0,1,0,1\n1,1,0,0,0\n0,0,0,1,1\n0,1,1,1,0\n0,0,0,0,0\n0,0,0,0,0\n0,0,0,0,0\n"
    );
    let cfg = csv.with_extension("toml");
    let rules = csv.with_extension("rules.json");
    let assess = mupcov(&["assess", s(&csv), "--config", s(&cfg), "--threshold", "3"]);
    let mut mups = pattern_lines(&stdout(&assess));
    mups.sort();
    assert_eq!(mups, ["1XXXX", "X1XXX", "XX1XX", "XXX1X", "XXXX1"]);
    let plan = mupcov(&[
        "enhance", s(&csv), "--config", s(&cfg), "--threshold", "3", "--lambda", "1", "--rules", s(&rules),
    ]);
    assert!(plan.status.success());
    let p = json(&stdout(&plan));
    assert_eq!(p["picks"].as_array().unwrap().len(), 2);
    assert!(p["residual"].as_array().unwrap().is_empty());
}

#[test]
fn infeasible_exits_3() {
    let dir = TempDir::new().unwrap();
    let (csv, cfg) = toy(&dir);
    let rules = dir.path().join("rules.json");
    fs::write(&rules, r#"{"rules": [{"A1": ["1"]}]}"#).unwrap();
    let out = mupcov(&[
        "enhance", s(&csv), "--config", s(&cfg), "--threshold", "1", "--lambda", "1", "--rules", s(&rules),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1XX"));
    assert_eq!(json(&stdout(&out))["residual"][0], "1XX");
}

#[test]
fn drop_invalid_filters_report() {
    let dir = TempDir::new().unwrap();
    let (csv, cfg) = toy(&dir);
    let rules = dir.path().join("rules.json");
    fs::write(&rules, r#"{"rules": [{"A1": ["1"]}]}"#).unwrap();
    let tagged = mupcov(&["assess", s(&csv), "--config", s(&cfg), "--threshold", "1", "--rules", s(&rules), "--format", "json"]);
    assert_eq!(json(&stdout(&tagged))["mups"][0]["valid"], false);
    let dropped = mupcov(&[
        "assess", s(&csv), "--config", s(&cfg), "--threshold", "1", "--rules", s(&rules), "--drop-invalid",
    ]);
    assert!(pattern_lines(&stdout(&dropped)).is_empty());
}

#[test]
fn review_file_and_incomplete_reports() {
    let dir = TempDir::new().unwrap();
    let (csv, cfg) = toy(&dir);
    let review = dir.path().join("review.txt");
    fs::write(&review, "# material MUPs\n1XX  # keep this one\n").unwrap();
    let ok = mupcov(&["enhance", s(&csv), "--config", s(&cfg), "--mups", s(&review), "--lambda", "1"]);
    assert_eq!(ok.status.code(), Some(1), "review file without a threshold needs --threshold");
    let ok = mupcov(&[
        "enhance", s(&csv), "--config", s(&cfg), "--mups", s(&review), "--lambda", "1", "--threshold", "1",
    ]);
    assert!(ok.status.success());

    let limited = dir.path().join("limited.json");
    assert!(mupcov(&[
        "assess", s(&csv), "--config", s(&cfg), "--threshold", "2", "--max-level", "1", "--format", "json",
        "--out", s(&limited),
    ])
    .status
    .success());
    let too_deep = mupcov(&["enhance", s(&csv), "--config", s(&cfg), "--mups", s(&limited), "--lambda", "2"]);
    assert_eq!(too_deep.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&too_deep.stderr).contains("incomplete"));
    let stricter = mupcov(&[
        "enhance", s(&csv), "--config", s(&cfg), "--mups", s(&limited), "--lambda", "1", "--threshold", "3",
    ]);
    assert_eq!(stricter.status.code(), Some(1));
}

#[test]
fn already_satisfied_level_gives_empty_plan() {
    let dir = TempDir::new().unwrap();
    let (csv, cfg) = toy(&dir);
    let out = mupcov(&["enhance", s(&csv), "--config", s(&cfg), "--threshold", "1", "--lambda", "1", "--format", "json"]);
    assert_eq!(json(&stdout(&out))["picks"].as_array().unwrap().len(), 1);
    let deeper = dir.path().join("deeper.csv");
    let mut text = TOY.to_string();
    text.push_str("1,0,0,y\n1,1,1,y\n");
    fs::write(&deeper, text).unwrap();
    let out = mupcov(&["enhance", s(&deeper), "--config", s(&cfg), "--threshold", "1", "--lambda", "1"]);
    assert!(out.status.success());
    assert!(json(&stdout(&out))["picks"].as_array().unwrap().is_empty());
}

fn max_covered_level(csv: &Path, cfg: &Path, tau: &str) -> i64 {
    let out = mupcov(&["assess", s(csv), "--config", s(cfg), "--threshold", tau, "--format", "json"]);
    assert!(out.status.success());
    json(&stdout(&out))["max_covered_level"].as_i64().unwrap()
}

#[test]
fn assess_enhance_append_reassess() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("data.csv");
    assert!(mupcov(&["synth", "random", "--seed", "11", "--cards", "3,2,3,2", "--rows", "80", "--skew", "0.6", "--out", s(&csv)])
        .status
        .success());
    let cfg = csv.with_extension("toml");
    let report = dir.path().join("report.txt");
    let rows = dir.path().join("rows.csv");
    assert!(mupcov(&["assess", s(&csv), "--config", s(&cfg), "--threshold", "4", "--out", s(&report)])
        .status
        .success());
    assert!(max_covered_level(&csv, &cfg, "4") < 3);
    let plan = mupcov(&[
        "enhance", s(&csv), "--config", s(&cfg), "--mups", s(&report), "--lambda", "3", "--emit-rows", s(&rows),
    ]);
    assert!(plan.status.success(), "{}", String::from_utf8_lossy(&plan.stderr));
    let p = json(&stdout(&plan));
    let extra = fs::read_to_string(&rows).unwrap();
    assert_eq!(extra.lines().count() as u64 - 1, p["total_tuples"].as_u64().unwrap());
    let mut all = fs::read_to_string(&csv).unwrap();
    all.extend(extra.lines().skip(1).map(|l| format!("{l}\n")));
    let grown = dir.path().join("grown.csv");
    fs::write(&grown, all).unwrap();
    assert!(max_covered_level(&grown, &cfg, "4") >= 3);
}

#[test]
fn value_count_mode() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("data.csv");
    assert!(mupcov(&["synth", "random", "--seed", "5", "--cards", "3,3,2", "--rows", "40", "--skew", "0.7", "--out", s(&csv)])
        .status
        .success());
    let cfg = csv.with_extension("toml");
    let out = mupcov(&["enhance", s(&csv), "--config", s(&cfg), "--threshold", "3", "--min-value-count", "3"]);
    assert!(out.status.success());
    assert_eq!(json(&stdout(&out))["target"]["min_value_count"], 3);
    let both = mupcov(&["enhance", s(&csv), "--config", s(&cfg), "--threshold", "3", "--min-value-count", "3", "--lambda", "1"]);
    assert_eq!(both.status.code(), Some(1));
}
