use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_spectral-growth"));
    c.env_remove("SPECTRAL_GROWTH_MAX_ELEMENTS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn growth_of_free_group() {
    let out = run(&["growth", "--group", "free(2)", "--kernel", "wordlength", "--N", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let beta: Vec<u64> = v["profile"]["beta"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
    assert_eq!(&beta[..4], &[1, 5, 17, 53]);
    assert_eq!(v["classification"]["class"]["kind"], "exponential");
    assert!((v["classification"]["class"]["rate"].as_f64().unwrap() - 3.0).abs() < 1e-12);
    assert_eq!(v["certificates"]["complete"], true);
}

#[test]
fn ball_radius_zero_and_determinism() {
    let a = run(&["ball", "--group", "free(2)", "--n", "0"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(json(&a)["size"], 1);
    let job = ["relative", "--group", "zd(2)", "--inclusion", "axis(0)", "--kernel", "pullback(proj(1), l1)", "--t", "1"];
    let (x, y) = (run(&job), run(&job));
    assert_eq!(x.status.code(), Some(0));
    assert_eq!(x.stdout, y.stdout);
    let text = String::from_utf8(x.stdout).unwrap();
    // keys are sorted at every level
    assert!(text.find("\"certificates\"").unwrap() < text.find("\"command\"").unwrap());
    assert!(text.contains("relative amenability criterion satisfied"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["growth", "--group", "free(", "--kernel", "wordlength"]).status.code(), Some(2));
    assert_eq!(run(&["growth", "--group", "free(2)", "--kernel", "l1"]).status.code(), Some(2));
    assert_eq!(run(&["spectrum", "--group", "zd(2)"]).status.code(), Some(2));
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));

    let capped = bin()
        .args(["ball", "--group", "free(2)", "--n", "6"])
        .env("SPECTRAL_GROWTH_MAX_ELEMENTS", "100")
        .output()
        .unwrap();
    assert_eq!(capped.status.code(), Some(3));

    // the b-exponent sum is not proper on F_2 / <a>
    let out = run(&[
        "relative", "--group", "free(2)", "--inclusion", "cyclic-free(a)", "--kernel", "pullback(expsum(b), l1)",
        "--lambda", "3", "--max-radius", "5", "--t", "1",
    ]);
    assert_eq!(out.status.code(), Some(4));
    let v = json(&out);
    assert_eq!(v["certificates"]["complete"], false);
    assert_eq!(v["criterion"], Value::Null);
    assert_eq!(v["quasi_normality"]["verdict"], "growing");
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("job.conf");
    std::fs::write(&cfg, "# growth job\ngroup = zd(2)\nkernel = wordlength\nN = 8\nformat = csv\n").unwrap();
    let out = run(&["growth", "--config", cfg.to_str().unwrap(), "--group", "zd(1)"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,beta,gamma,omega_root,omega_ratio");
    assert_eq!(lines.len(), 10);
    // zd(1) from the flag, not zd(2) from the file
    assert!(lines[3].starts_with("2,5,2,"));

    std::fs::write(&cfg, "group = zd(1)\ncolour = blue\n").unwrap();
    assert_eq!(run(&["ball", "--config", cfg.to_str().unwrap(), "--n", "1"]).status.code(), Some(2));
}

#[test]
fn output_file_and_table_kernel() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("abs.csv");
    let mut rows = String::from("encoding,value\n");
    for n in -6i64..=6 {
        rows.push_str(&format!("{n},{}\n", n.abs()));
    }
    std::fs::write(&table, rows).unwrap();
    let report = dir.path().join("out.json");
    let kernel = format!("table({})", table.display());
    let out = run(&[
        "cnd-check", "--group", "zd(1)", "--kernel", &kernel, "--radius", "3", "--output", report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["certificates"]["pass"], true);
    // differences on the ball of radius 4 reach 8, past the table
    let out = run(&["cnd-check", "--group", "zd(1)", "--kernel", &kernel, "--radius", "4"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn reconstruct_report_shape() {
    let out = run(&["reconstruct", "--group", "zd(1)", "--kernel", "l1", "--N", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schedule"][0], serde_json::json!([1, 1.0]));
    assert_eq!(v["gamma_sets"][0], 3);
    assert_eq!(v["audit"]["pass"], true);
    assert_eq!(v["schoenberg"]["pass"], true);
}
