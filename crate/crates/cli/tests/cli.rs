use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_instakernel"));
    c.env_remove("INSTAKERNEL_BUDGET");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&o.stdout)
        )
    })
}

fn write(dir: &TempDir, name: &str, v: &Value) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p
}

fn read(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn reduce_vector_three_five() {
    let o = run(&["reduce-vector", "--w", "3,5", "--delta", "1"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["reduced"], json!(["2", "3"]));
    assert_eq!(v["l1_norm"], "5");
}

#[test]
fn reduce_vector_zero_stays_zero() {
    let v = stdout_json(&run(&["reduce-vector", "--w", "0,0"]));
    assert_eq!(v["reduced"], json!(["0", "0"]));
    assert_eq!(v["l1_norm"], "0");
}

#[test]
fn reduce_vector_verify_flag() {
    let o = run(&["reduce-vector", "--w", "1,2", "--verify"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["verified"], true);
    assert_eq!(v["reduced"], json!(["1", "2"]));
}

#[test]
fn reduce_vector_from_file_with_signs() {
    let dir = TempDir::new().unwrap();
    let p = write(
        &dir,
        "w.json",
        &json!({"w": ["-1000003", "0", "999999937"], "delta": "1"}),
    );
    let o = run(&["reduce-vector", "--in", s(&p), "--verify"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["verified"], true);
    let r: Vec<i64> = v["reduced"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap().parse().unwrap())
        .collect();
    assert!(r[0] < 0 && r[1] == 0 && r[2] > 0);
}

#[test]
fn reduce_vector_rejects_bad_numbers() {
    assert_eq!(code(&run(&["reduce-vector", "--w", "1,x"])), 1);
    assert_eq!(
        code(&run(&["reduce-vector", "--w", "1,2", "--delta", "0"])),
        1
    );
}

#[test]
fn huge_knapsack_is_verified() {
    let dir = TempDir::new().unwrap();
    let inst = write(
        &dir,
        "k.json",
        &json!({"kind": "knapsack", "version": 1, "payload": {
            "weights": ["18446744073709551629", "36893488147419103301", "55340232221128654847"],
            "profits": ["73786976294838206473", "18446744073709551557", "92233720368547758111"],
            "capacity": "73786976294838206476",
            "target": "92233720368547758111"
        }}),
    );
    let out = dir.path().join("r.json");
    let o = run(&["compress", "--in", s(&inst), "--out", s(&out), "--verify"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rep = stdout_json(&o);
    assert_eq!(rep["verdict"], "Reduced");
    assert_eq!(rep["verification"], "Verified");
    assert!(rep["reduced_bits"].as_u64().unwrap() < rep["original_bits"].as_u64().unwrap());
    assert_eq!(read(&out)["kind"], "knapsack");
}

#[test]
fn kernel_of_single_row() {
    let dir = TempDir::new().unwrap();
    let inst = write(
        &dir,
        "ilp.json",
        &json!({"kind": "ilp", "version": 1, "payload": {"a": [["1", "1"]], "b": ["5"]}}),
    );
    let out = dir.path().join("k.json");
    let o = run(&[
        "compress",
        "--in",
        s(&inst),
        "--mode",
        "kernel",
        "--out",
        s(&out),
        "--verify",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["verification"], "Verified");
    let pre = read(&dir.path().join("k.pre.json"));
    assert_eq!(pre["kind"], "presolution");
    assert_eq!(pre["payload"]["fixed"], json!(["2", "0"]));
    assert_eq!(read(&out)["payload"]["b"], json!(["3"]));
}

#[test]
fn kernel_mode_needs_plain_ilp() {
    let dir = TempDir::new().unwrap();
    let g = dir.path().join("t.json");
    assert_eq!(
        code(&run(&["generate", "--kind", "two-stage", "--out", s(&g)])),
        0
    );
    let o = run(&[
        "compress",
        "--in",
        s(&g),
        "--mode",
        "kernel",
        "--out",
        s(&dir.path().join("r.json")),
    ]);
    assert_eq!(code(&o), 1);
}

#[test]
fn loadbalance_example() {
    let dir = TempDir::new().unwrap();
    let inst = write(
        &dir,
        "lb.json",
        &json!({"kind": "loadbalance", "version": 1,
                "payload": {"p": ["2"], "n": ["6"], "m": "3", "l": "2", "u": "6"}}),
    );
    let out = dir.path().join("r.json");
    let pre = dir.path().join("custom-pre.json");
    let o = run(&[
        "compress",
        "--in",
        s(&inst),
        "--out",
        s(&out),
        "--pre-out",
        s(&pre),
        "--verify",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["verification"], "Verified");
    let o = run(&[
        "verify",
        "--original",
        s(&inst),
        "--reduced",
        s(&out),
        "--pre",
        s(&pre),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["verification"], "Verified");
}

#[test]
fn verify_self_reduced_and_corrupted() {
    let dir = TempDir::new().unwrap();
    let g = dir.path().join("g.json");
    let r = dir.path().join("r.json");
    assert_eq!(
        code(&run(&[
            "--seed",
            "11",
            "generate",
            "--kind",
            "subsetsum",
            "--size",
            "8",
            "--out",
            s(&g)
        ])),
        0
    );
    let self_check = run(&["verify", "--original", s(&g), "--reduced", s(&g)]);
    assert_eq!(code(&self_check), 0);
    assert_eq!(code(&run(&["compress", "--in", s(&g), "--out", s(&r)])), 0);
    let pair = run(&["verify", "--original", s(&g), "--reduced", s(&r)]);
    assert_eq!(stdout_json(&pair)["verification"], "Verified");

    let mut bad = read(&r);
    let t: i64 = bad["payload"]["target"].as_str().unwrap().parse().unwrap();
    bad["payload"]["target"] = json!((t + 1).to_string());
    let bad_path = write(&dir, "bad.json", &bad);
    let o = run(&["verify", "--original", s(&g), "--reduced", s(&bad_path)]);
    assert_eq!(code(&o), 3);
    let v = stdout_json(&o);
    assert_eq!(v["verification"], "Failed");
    assert!(v["counterexample"]["subset"].is_string());
}

#[test]
fn mismatched_kinds_are_input_errors() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    run(&["generate", "--kind", "knapsack", "--out", s(&a)]);
    run(&["generate", "--kind", "subsetsum", "--out", s(&b)]);
    assert_eq!(
        code(&run(&["verify", "--original", s(&a), "--reduced", s(&b)])),
        1
    );
}

#[test]
fn every_generated_kind_compresses() {
    let dir = TempDir::new().unwrap();
    for kind in [
        "ilp",
        "two-stage",
        "nfold",
        "knapsack",
        "subsetsum",
        "uks",
        "mdks",
        "loadbalance",
    ] {
        for seed in ["1", "2"] {
            let g = dir.path().join(format!("{kind}-{seed}.json"));
            let r = dir.path().join(format!("{kind}-{seed}.out.json"));
            let o = run(&[
                "--seed",
                seed,
                "generate",
                "--kind",
                kind,
                "--size",
                "4",
                "--bits",
                "40",
                "--out",
                s(&g),
            ]);
            assert_eq!(code(&o), 0, "{kind}");
            let o = run(&["compress", "--in", s(&g), "--out", s(&r), "--verify"]);
            let rep = stdout_json(&o);
            assert_eq!(code(&o), 0, "{kind} seed {seed}: {rep}");
            assert_ne!(rep["verification"], "Failed", "{kind} seed {seed}");
        }
    }
}

#[test]
fn generate_is_deterministic_and_round_trips() {
    let a = run(&["--seed", "7", "generate", "--kind", "mdks", "--bits", "100"]);
    let b = run(&["--seed", "7", "generate", "--kind", "mdks", "--bits", "100"]);
    let c = run(&["--seed", "8", "generate", "--kind", "mdks", "--bits", "100"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);

    let dir = TempDir::new().unwrap();
    let p = dir.path().join("m.json");
    std::fs::write(&p, &a.stdout).unwrap();
    let again = run(&["verify", "--original", s(&p), "--reduced", s(&p)]);
    assert_eq!(code(&again), 0);
    assert_eq!(read(&p), stdout_json(&a));
}

#[test]
fn compress_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let g = dir.path().join("g.json");
    run(&[
        "--seed",
        "5",
        "generate",
        "--kind",
        "knapsack",
        "--out",
        s(&g),
    ]);
    let (r1, r2) = (dir.path().join("r1.json"), dir.path().join("r2.json"));
    run(&["compress", "--in", s(&g), "--out", s(&r1)]);
    run(&["compress", "--in", s(&g), "--out", s(&r2)]);
    assert_eq!(std::fs::read(&r1).unwrap(), std::fs::read(&r2).unwrap());
}

#[test]
fn budget_flag_and_env() {
    let dir = TempDir::new().unwrap();
    let g = dir.path().join("g.json");
    let r = dir.path().join("r.json");
    run(&["generate", "--kind", "knapsack", "--out", s(&g)]);
    let o = run(&["--budget", "10", "compress", "--in", s(&g), "--out", s(&r)]);
    assert_eq!(code(&o), 2);
    assert_eq!(stdout_json(&o)["verdict"], "BudgetExceeded");
    assert!(!r.exists());

    let o = bin()
        .env("INSTAKERNEL_BUDGET", "10")
        .args(["compress", "--in", s(&g), "--out", s(&r)])
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    let o = bin()
        .env("INSTAKERNEL_BUDGET", "10")
        .args([
            "--budget",
            "100000000",
            "compress",
            "--in",
            s(&g),
            "--out",
            s(&r),
        ])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
}

#[test]
fn malformed_files_are_input_errors() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("r.json");
    let cases = [
        json!({"kind": "subsetsum", "version": 1, "payload": {"values": [3, 5], "target": "8"}}),
        json!({"kind": "subsetsum", "version": 2, "payload": {"values": ["3"], "target": "3"}}),
        json!({"kind": "subsetsum", "version": 1, "payload": {"values": ["3"], "target": "3", "x": "1"}}),
        json!({"kind": "widgets", "version": 1, "payload": {}}),
        json!({"kind": "knapsack", "version": 1, "payload": {
            "weights": ["0"], "profits": ["1"], "capacity": "1", "target": "1"}}),
    ];
    for (i, c) in cases.iter().enumerate() {
        let p = write(&dir, &format!("bad{i}.json"), c);
        let o = run(&["compress", "--in", s(&p), "--out", s(&out)]);
        assert_eq!(code(&o), 1, "case {i}");
        assert!(!o.stderr.is_empty());
    }
    assert!(!out.exists());
}

#[test]
fn human_output_is_line_based() {
    let o = run(&["--human", "reduce-vector", "--w", "3,5"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().any(|l| l == "l1_norm: 5"));
}
