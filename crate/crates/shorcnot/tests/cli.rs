use std::process::{Command, Output};

use serde_json::Value;

fn shorcnot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shorcnot"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn count_primitive() {
    let out = shorcnot(&["count", "--primitive", "mod-add", "--n", "4"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["model"], 260);
    assert_eq!(v["measured"], 260);
}

#[test]
fn count_full_report() {
    let v = json_of(&shorcnot(&["count", "--n", "4"]));
    assert_eq!(v["per_primitive"]["mont-full"]["model"], 1596);
    assert_eq!(v["window_plan"]["m"], 4);
    assert_eq!(v["window_plan"]["total_model"], 3484);
    assert!(v["window_plan"]["total_measured"].is_u64());
    assert!(v["runtime"]["seconds"].is_f64());
}

#[test]
fn verify_montgomery_passes() {
    let out = shorcnot(&[
        "verify",
        "--circuit",
        "montgomery-full",
        "--n",
        "4",
        "--modulus",
        "13",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["points"], 169);
}

#[test]
fn verify_refuses_huge_domain_without_sample() {
    let out = shorcnot(&["verify", "--circuit", "adder", "--n", "12"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json_of(&out)["error"]["kind"], "validation");
    let out = shorcnot(&[
        "verify",
        "--circuit",
        "adder",
        "--n",
        "12",
        "--sample",
        "200",
        "--seed",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["points"], 200);
}

#[test]
fn estimate_rsa_1024() {
    let v = json_of(&shorcnot(&[
        "estimate",
        "--n",
        "1024",
        "--t-cnot",
        "2.85e-4",
        "--coding-factor",
        "1",
    ]));
    let s = v["seconds"].as_f64().unwrap();
    assert!((s / 6.64e6 - 1.0).abs() < 1e-3);
    let doubled = json_of(&shorcnot(&[
        "estimate",
        "--n",
        "1024",
        "--coding-factor",
        "2",
    ]));
    assert_eq!(doubled["seconds"].as_f64().unwrap(), 2.0 * s);
}

#[test]
fn optimize_and_fit() {
    let v = json_of(&shorcnot(&["optimize-window", "--n", "4"]));
    assert_eq!(
        (v["m"].as_u64(), v["cnot_total"].as_u64()),
        (Some(4), Some(3484))
    );
    assert_eq!(v["candidates"].as_array().unwrap().len(), 8);
    let v = json_of(&shorcnot(&["fit", "--n-values", "16,32,64,128"]));
    assert_eq!(v["points"].as_array().unwrap().len(), 4);
    assert!(v["coefficient"].is_f64());
}

#[test]
fn factor_is_seeded() {
    let a = shorcnot(&["factor", "--modulus", "15", "--seed", "11"]);
    let b = shorcnot(&["factor", "--modulus", "15", "--seed", "11"]);
    assert_eq!(a.stdout, b.stdout);
    let v = json_of(&a);
    assert_eq!(v["N"], 15);
    assert_eq!(v["factors"], serde_json::json!([3, 5]));
}

#[test]
fn build_and_export() {
    let v = json_of(&shorcnot(&["build", "--circuit", "adder", "--n", "4"]));
    assert_eq!(v["cnot_count"], 65);
    assert_eq!(v["model"], 65);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("modexp.qasm");
    let out = shorcnot(&[
        "export",
        "--circuit",
        "modexp",
        "--n",
        "3",
        "--modulus",
        "7",
        "--base",
        "3",
        "--window",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let c = shorcnot::qasm::from_qasm(&text).unwrap();
    assert_eq!(c.layout().get("target").unwrap().initial, 1);
}

#[test]
fn text_format_flattens() {
    let out = shorcnot(&["optimize-window", "--n", "4", "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "m = 4"));
}

#[test]
fn validation_errors_exit_2() {
    for args in [
        &["count", "--n", "4", "--bogus"][..],
        &["build", "--circuit", "mod-add", "--n", "4"],
        &[
            "build",
            "--circuit",
            "mod-add",
            "--n",
            "4",
            "--modulus",
            "14",
        ],
        &["estimate", "--n", "1024", "--t-cnot", "0"],
        &["factor", "--modulus", "6"],
        &["optimize-window", "--n", "0"],
    ] {
        assert_eq!(shorcnot(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn optimize_window_at_cryptographic_size() {
    let out = shorcnot(&["optimize-window", "--n", "2048"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert!(v["m"].as_u64().unwrap() > 1);
    assert!(!v["candidates"].as_array().unwrap().is_empty());
}

#[test]
fn oversized_count_is_a_validation_error() {
    let out = shorcnot(&["estimate", "--n", "100000000"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json_of(&out)["error"]["kind"], "validation");
}
