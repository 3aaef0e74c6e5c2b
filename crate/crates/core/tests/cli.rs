use std::process::Command;

use condorcet::cli::{run, EXIT_CAP, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

fn run_args(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(
        std::iter::once("condorcet").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn json_results(args: &[&str]) -> Value {
    let (code, out, err) = run_args(args);
    assert_eq!(code, EXIT_OK, "{err}");
    let record: Value = serde_json::from_str(&out).unwrap();
    record["results"].clone()
}

#[test]
fn minprob_three_alternatives() {
    let r = json_results(&["minprob", "--n", "3", "--voters", "3"]);
    assert_eq!(r["value"], "7/9");
    assert!((r["decimal"].as_f64().unwrap() - 7.0 / 9.0).abs() < 1e-15);
}

#[test]
fn exact_impartial_three() {
    let r = json_results(&[
        "exact",
        "--culture",
        "impartial",
        "--n",
        "3",
        "--voters",
        "3",
    ]);
    assert_eq!(r["value"], "17/18");
    assert_eq!(r["winner_0"], "17/54");
    let naive = json_results(&[
        "exact",
        "--culture",
        "impartial",
        "--n",
        "3",
        "--k",
        "2",
        "--naive",
        "--workers",
        "2",
    ]);
    assert_eq!(naive["value"], "17/18");
}

#[test]
fn verify_all_passes() {
    let (code, out, _) = run_args(&["verify", "--suite", "all", "--seed", "7"]);
    assert_eq!(code, EXIT_OK);
    let record: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(record["seed"], 7);
    let reports = record["results"].as_array().unwrap();
    assert!(reports.len() > 10);
    assert!(reports.iter().all(|r| r["violations"] == 0));
}

#[test]
fn formats_carry_identical_numbers() {
    let base = [
        "simulate",
        "--culture",
        "cyclic",
        "--n",
        "5",
        "--voters",
        "3",
        "--samples",
        "5000",
        "--seed",
        "3",
    ];
    let with = |format: &str| {
        let mut args = base.to_vec();
        args.extend(["--format", format]);
        let (code, out, _) = run_args(&args);
        assert_eq!(code, EXIT_OK);
        out
    };
    let json: Value = serde_json::from_str(&with("json")).unwrap();
    let results = json["results"].as_object().unwrap();

    let csv = with("csv");
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header.len(), results.len());

    let human = with("human");
    for (name, text) in header.iter().zip(&row) {
        let expected = match &results[*name] {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        assert_eq!(*text, expected, "column {name}");
        let line = human
            .lines()
            .find(|l| l.split_whitespace().next() == Some(name))
            .unwrap();
        assert_eq!(line.split_whitespace().nth(1), Some(expected.as_str()));
    }
}

#[test]
fn sweep_csv_header_and_rows() {
    let (code, out, _) = run_args(&[
        "sweep",
        "--culture",
        "impartial",
        "--n",
        "3,4,5",
        "--voters",
        "3",
        "--samples",
        "2000",
        "--seed",
        "1",
        "--format",
        "csv",
    ]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "n,k,p_hat,std_error,ci_low,ci_high,seed");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("3,2,"));
}

#[test]
fn missing_seed_is_generated_and_reported() {
    let (code, out, err) = run_args(&[
        "simulate",
        "--culture",
        "impartial",
        "--n",
        "3",
        "--voters",
        "3",
        "--samples",
        "100",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(err.contains("seed"));
    let record: Value = serde_json::from_str(&out).unwrap();
    let seed = record["seed"].as_u64().unwrap();
    let again = json_results(&[
        "simulate",
        "--culture",
        "impartial",
        "--n",
        "3",
        "--voters",
        "3",
        "--samples",
        "100",
        "--seed",
        &seed.to_string(),
    ]);
    assert_eq!(again, record["results"]);
}

#[test]
fn culture_file_input_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    std::fs::write(&good, r#"{"n": 3, "entries": [{"ranking": [0,1,2], "p": "1/2"}, {"ranking": [2,1,0], "p": "1/2"}]}"#).unwrap();
    let r = json_results(&[
        "exact",
        "--culture",
        good.to_str().unwrap(),
        "--voters",
        "3",
    ]);
    // two opposite rankings: the middle alternative always wins
    assert_eq!(r["value"], "1");
    let r = json_results(&[
        "lowerbound",
        "--culture",
        good.to_str().unwrap(),
        "--voters",
        "3",
    ]);
    assert_eq!(r["value"], "1");

    let bad_sum = dir.path().join("sum.json");
    std::fs::write(
        &bad_sum,
        r#"{"n": 3, "entries": [{"ranking": [0,1,2], "p": "1/3"}]}"#,
    )
    .unwrap();
    let (code, _, err) = run_args(&[
        "exact",
        "--culture",
        bad_sum.to_str().unwrap(),
        "--voters",
        "3",
    ]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("sum"));

    let bad_perm = dir.path().join("perm.json");
    std::fs::write(
        &bad_perm,
        r#"{"n": 3, "entries": [{"ranking": [0,0,2], "p": "1"}]}"#,
    )
    .unwrap();
    assert_eq!(
        run_args(&[
            "exact",
            "--culture",
            bad_perm.to_str().unwrap(),
            "--voters",
            "3"
        ])
        .0,
        EXIT_USAGE
    );

    let missing = dir.path().join("missing.json");
    assert_eq!(
        run_args(&[
            "exact",
            "--culture",
            missing.to_str().unwrap(),
            "--voters",
            "3"
        ])
        .0,
        EXIT_USAGE
    );
    let (code, _, _) = run_args(&[
        "exact",
        "--culture",
        good.to_str().unwrap(),
        "--n",
        "4",
        "--voters",
        "3",
    ]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn caps_exit_with_code_three() {
    let (code, _, err) = run_args(&[
        "exact",
        "--culture",
        "impartial",
        "--n",
        "5",
        "--voters",
        "5",
        "--max-checks",
        "1000",
    ]);
    assert_eq!(code, EXIT_CAP);
    assert!(err.contains("max_winner_checks"));
    let (code, _, _) = run_args(&[
        "exact",
        "--culture",
        "impartial",
        "--n",
        "9",
        "--voters",
        "3",
        "--max-support",
        "100",
    ]);
    assert_eq!(code, EXIT_CAP);
    let (code, _, _) = run_args(&[
        "ck",
        "--k",
        "2",
        "--target-error",
        "1e-9",
        "--max-evaluations",
        "1000",
    ]);
    assert_eq!(code, EXIT_CAP);
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    let (code, out, _) = run_args(&[
        "asymptote",
        "--n",
        "3",
        "--voters",
        "5",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), out);
}

#[test]
fn ck_and_asymptote() {
    let r = json_results(&["ck", "--k", "1", "--target-error", "1e-6"]);
    assert!((r["value"].as_f64().unwrap() - 1.0).abs() <= 1e-6);
    let r = json_results(&[
        "asymptote",
        "--n",
        "10000",
        "--voters",
        "3",
        "--ck",
        "2.7842",
    ]);
    assert!((r["impartial_leading"].as_f64().unwrap() - 0.027842).abs() < 1e-12);
    assert!((r["large_n_leading"].as_f64().unwrap() - 3e-4).abs() < 1e-18);
    let r = json_results(&["asymptote", "--n", "2", "--voters", "3"]);
    assert_eq!(r["large_k_rate"], Value::Null);
}

#[test]
fn binary_reports_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_condorcet");
    let ok = Command::new(bin)
        .args(["minprob", "--n", "3", "--voters", "3", "--format", "human"])
        .output()
        .unwrap();
    assert!(ok.status.success());
    assert!(String::from_utf8_lossy(&ok.stdout).contains("7/9"));
    let bad = Command::new(bin)
        .args(["minprob", "--n", "3", "--voters", "2"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_USAGE));
}
