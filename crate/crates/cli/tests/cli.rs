use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const DESK: &str = r#"{"q":"241","u":"30","v":"3","N":"8","R":"1/30","rho_r":"1/8","rho_w":"1/2"}"#;
const MESSAGE: &str = r#"["1","2","3","4","5","6","7","8"]"#;

struct Dir(PathBuf);

impl Dir {
    fn new(tag: &str) -> Self {
        let p = std::env::temp_dir().join(format!("awtp-cli-{tag}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&p);
        fs::create_dir_all(&p).unwrap();
        Dir(p)
    }

    fn file(&self, name: &str, body: &str) -> PathBuf {
        let p = self.0.join(name);
        fs::write(&p, body).unwrap();
        p
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }
}

impl Drop for Dir {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.0);
    }
}

fn awtp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_awtp")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn params_check_and_derive() {
    let d = Dir::new("params");
    let p = d.file("p.json", DESK);
    assert_eq!(code(&awtp(&["params", "check", s(&p)])), 0);

    let strict = awtp(&["params", "check", s(&p), "--rho-mode", "strict"]);
    assert_eq!(code(&strict), 2);
    assert!(String::from_utf8_lossy(&strict.stderr).contains("219/448"));

    let out = awtp(&["params", "derive", s(&p)]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["agreement_threshold"], "211/56");
    assert_eq!(v["params"]["k"], 66);
    assert_eq!(v["params"]["writes"], 4);

    let bad = d.file("bad.json", &DESK.replace("\"241\"", "\"240\""));
    assert_eq!(code(&awtp(&["params", "check", s(&bad)])), 2);
    let garbled = d.file("garbled.json", "{");
    assert_eq!(code(&awtp(&["params", "check", s(&garbled)])), 2);
    assert_eq!(code(&awtp(&["params", "check", s(&d.path("missing.json"))])), 2);
}

fn pipeline(format: &str) {
    let d = Dir::new(&format!("pipe-{format}"));
    let p = d.file("p.json", DESK);
    let m = d.file("m.json", MESSAGE);
    let (c, y, t) = (d.path("c"), d.path("y"), d.path("t.json"));
    let enc = awtp(&["encode", "--params", s(&p), "--message", s(&m), "--out", s(&c), "--format", format, "--seed", "5"]);
    assert_eq!(code(&enc), 0, "{}", String::from_utf8_lossy(&enc.stderr));
    for strategy in [r#"{"name":"random"}"#, r#"{"name":"burst","start":5}"#, r#"{"name":"informed"}"#] {
        let cor = awtp(&[
            "corrupt", "--params", s(&p), "--input", s(&c), "--out", s(&y), "--format", format, "--strategy", strategy,
            "--transcript", s(&t),
        ]);
        assert_eq!(code(&cor), 0, "{}", String::from_utf8_lossy(&cor.stderr));
        let tr: serde_json::Value = serde_json::from_str(&fs::read_to_string(&t).unwrap()).unwrap();
        assert!(tr["write_set"].as_array().unwrap().len() <= 4);
        let dec = awtp(&["decode", "--params", s(&p), "--input", s(&y)]);
        assert_eq!(code(&dec), 0);
        let got: serde_json::Value = serde_json::from_slice(&dec.stdout).unwrap();
        assert_eq!(got, serde_json::from_str::<serde_json::Value>(MESSAGE).unwrap());
    }
}

#[test]
fn encode_corrupt_decode_json() {
    pipeline("json");
}

#[test]
fn encode_corrupt_decode_binary() {
    pipeline("bin");
}

#[test]
fn fixed_coins_are_deterministic() {
    let d = Dir::new("coins");
    let p = d.file("p.json", DESK);
    let m = d.file("m.json", MESSAGE);
    let (c1, c2, coins) = (d.path("c1.json"), d.path("c2.json"), d.path("coins.json"));
    assert_eq!(code(&awtp(&["encode", "--params", s(&p), "--message", s(&m), "--out", s(&c1), "--coins-out", s(&coins)])), 0);
    assert_eq!(code(&awtp(&["encode", "--params", s(&p), "--message", s(&m), "--out", s(&c2), "--coins", s(&coins), "--seed", "99"])), 0);
    assert_eq!(fs::read(&c1).unwrap(), fs::read(&c2).unwrap());
}

#[test]
fn decode_failures_and_aborts_exit_one() {
    let d = Dir::new("fail");
    let p = d.file("p.json", DESK);
    let m = d.file("m.json", MESSAGE);
    let c = d.path("c.json");
    assert_eq!(code(&awtp(&["encode", "--params", s(&p), "--message", s(&m), "--out", s(&c)])), 0);

    let over = awtp(&["corrupt", "--params", s(&p), "--input", s(&c), "--out", s(&d.path("y.json")), "--strategy", r#"{"name":"overread"}"#]);
    assert_eq!(code(&over), 1);

    let row = format!("[{}]", vec!["\"17\""; 30].join(","));
    let garbage = d.file("g.json", &format!("[{}]", vec![row; 8].join(",")));
    assert_eq!(code(&awtp(&["decode", "--params", s(&p), "--input", s(&garbage)])), 1);

    let short = d.file("short.json", r#"[["1","2"]]"#);
    assert_eq!(code(&awtp(&["decode", "--params", s(&p), "--input", s(&short)])), 2);
    let wrong_len = d.file("m2.json", r#"["1"]"#);
    assert_eq!(code(&awtp(&["encode", "--params", s(&p), "--message", s(&wrong_len), "--out", s(&c)])), 2);
}

#[test]
fn experiments_report_json_and_csv() {
    let d = Dir::new("exp");
    let out = awtp(&["experiment", "amd"]);
    assert_eq!(code(&out), 0);
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["aggregates"]["max_tamper_pass"], "2/25");
    assert_eq!(rep["aggregates"]["incorrect"], 0);

    let csv_path = d.path("bounds.csv");
    assert_eq!(code(&awtp(&["experiment", "bounds", "--out", "csv", "--output", s(&csv_path)])), 0);
    let csv = fs::read_to_string(&csv_path).unwrap();
    assert!(csv.starts_with("section,key,value"));
    assert!(csv.lines().any(|l| l.starts_with("assertion,rate_accounting,PASS")));

    let cfg = d.file("cfg.json", r#"{"seed": 4, "strategy": {"name": "burst"}}"#);
    let rt = awtp(&["experiment", "roundtrip", "--config", s(&cfg), "--trials", "5"]);
    assert_eq!(code(&rt), 0);
    let rep: serde_json::Value = serde_json::from_slice(&rt.stdout).unwrap();
    assert_eq!(rep["seed"], 4);
    assert_eq!(rep["aggregates"]["ok"], 5);

    let bad = d.file("bad.json", r#"{"bogus": true}"#);
    assert_eq!(code(&awtp(&["experiment", "ses", "--config", s(&bad)])), 2);
    assert_eq!(code(&awtp(&["experiment", "nope"])), 2);
    assert_eq!(code(&awtp(&["experiment", "ses", "--trials", "0"])), 2);
}
