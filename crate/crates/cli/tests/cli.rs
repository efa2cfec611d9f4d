use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_timelottery"))
        .args(args)
        .env_remove("TIMELOTTERY_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const TL: [&str; 8] = ["--t1", "1", "--t2", "2", "--p", "0.5", "--dx", "10"];

fn with_tl<'a>(head: &[&'a str]) -> Vec<&'a str> {
    head.iter().copied().chain(TL).collect()
}

#[test]
fn classify_time_approach_is_risk_neutral() {
    let out = run(&with_tl(&["classify", "--approach", "time"]));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["time"], "RNTL");
    let both = json(&run(&with_tl(&["classify"])));
    assert_eq!(both["ensemble"], "RSTL");
}

#[test]
fn eval_reports_both_rates_exactly() {
    let v = json(&run(&with_tl(&["eval", "--exact"])));
    assert_eq!(v["exact"]["time_avg"], "20/3");
    assert_eq!(v["exact"]["ensemble_avg"], "15/2");
    assert_eq!(v["numeric_mode"], "exact-rational");
    let f = json(&run(&with_tl(&["eval"])));
    assert!((f["jensen_gap"].as_f64().unwrap() - 5.0 / 6.0).abs() < 1e-12);
}

#[test]
fn mix_reproduces_the_counterexample_rate() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let c = dir.path().join("c.json");
    fs::write(&a, r#"{"t1": 1, "t2": 2, "p": 0.5, "dx": 10}"#).unwrap();
    fs::write(&c, r#"{"outcomes": [{"amount": 2, "time": 2, "prob": "3/10"}, {"amount": 2, "time": 4, "prob": 0.7}]}"#)
        .unwrap();
    let out = run(&[
        "mix",
        "--a",
        a.to_str().unwrap(),
        "--b",
        c.to_str().unwrap(),
        "--theta",
        "0.1",
        "--exact",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    assert!((v["time_avg"].as_f64().unwrap() - 0.872).abs() < 1e-3);
    assert_eq!(v["outcomes"].as_array().unwrap().len(), 4);
}

#[test]
fn simulate_is_deterministic_and_seeded_from_env() {
    let args = with_tl(&["simulate", "--n", "20000"]);
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let seq = run(&[args.as_slice(), &["--exec", "sequential"]].concat());
    assert_eq!(a.stdout, seq.stdout);
    let env = Command::new(env!("CARGO_BIN_EXE_timelottery"))
        .args(&args)
        .env("TIMELOTTERY_SEED", "9")
        .output()
        .unwrap();
    let flag = run(&[args.as_slice(), &["--seed", "9"]].concat());
    assert_eq!(env.stdout, flag.stdout);
    assert_ne!(env.stdout, a.stdout);
}

#[test]
fn simulate_checkpoints_emit_csv() {
    let out = run(&with_tl(&[
        "simulate",
        "--mode",
        "ensemble",
        "--checkpoints",
        "10,100,1000",
    ]));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("count,empirical_rate\n"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn audit_flags_the_inconsistent_case() {
    let out = run(&["audit", "--dataset", "onay"]);
    assert_eq!(out.status.code(), Some(2));
    let findings = json(&out);
    let bad: Vec<_> = findings
        .as_array()
        .unwrap()
        .iter()
        .filter(|f| f["severity"] == "inconsistent")
        .collect();
    assert_eq!(bad.len(), 1);
    assert_eq!(bad[0]["label"], "Case 1");
    assert_eq!(
        run(&["audit", "--dataset", "dejarnette"]).status.code(),
        Some(0)
    );
}

#[test]
fn audit_reads_user_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    fs::write(
        &path,
        "label,g_ens_i,g_ens_ii,g_time,ratl_pct,exp_t,dx\nx,5,9,5,40,2,10\n",
    )
    .unwrap();
    let out = run(&["audit", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    fs::write(
        &path,
        "label,g_ens_i,g_ens_ii,g_time,ratl_pct\nx,5,oops,5,40\n",
    )
    .unwrap();
    let out = run(&["audit", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("g_ens_ii"));
}

#[test]
fn figure_is_byte_deterministic_and_written_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig.svg");
    let out = run(&[
        "reproduce",
        "figure",
        "--dataset",
        "dejarnette",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let svg = fs::read_to_string(&path).unwrap();
    assert_eq!(svg.matches("<circle").count(), 10);
    assert!(svg.contains("R² = 0.6"));
    let again = run(&["reproduce", "figure", "--dataset", "dejarnette"]);
    assert_eq!(again.stdout, svg.as_bytes());
}

#[test]
fn tables_render_in_both_formats() {
    let text =
        String::from_utf8(run(&["reproduce", "tables", "--dataset", "onay"]).stdout).unwrap();
    assert!(text.contains("17.78"));
    let csv = String::from_utf8(
        run(&[
            "reproduce",
            "tables",
            "--dataset",
            "dejarnette",
            "--format",
            "csv",
        ])
        .stdout,
    )
    .unwrap();
    assert!(csv.starts_with("# unit: $/wk\n"));
    assert_eq!(csv.lines().count(), 12);
}

#[test]
fn design_pairs_disagree() {
    for setup in ["times", "amounts"] {
        let out = run(&with_tl(&["design", setup, "--exact"]));
        assert_eq!(out.status.code(), Some(0), "{setup}");
        let v = json(&out);
        assert_eq!(v["disagree"], true, "{setup}");
        assert_eq!(v["prediction_time"]["relation"], "prefers_second");
        assert_eq!(v["prediction_ensemble"]["relation"], "prefers_first");
    }
}

#[test]
fn axioms_exit_codes() {
    let ens = run(&[
        "axioms",
        "--approach",
        "ensemble",
        "--samples",
        "300",
        "--exact",
    ]);
    assert_eq!(ens.status.code(), Some(0));
    assert_eq!(json(&ens)["independence"]["failed"], 0);
    let search = run(&["axioms", "--samples", "50", "--search", "2000"]);
    assert_eq!(search.status.code(), Some(2));
    assert!(
        json(&search)["independence_search"]["violations"]
            .as_u64()
            .unwrap()
            > 0
    );
}

#[test]
fn usage_and_validation_errors_exit_one() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["classify", "--t1", "1"]).status.code(), Some(1));
    let bad = run(&["eval", "--t1", "2", "--t2", "1", "--p", "0.5", "--dx", "10"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(!bad.stderr.is_empty());
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
