//! End-to-end tests of the command line: exit codes, report shapes, error
//! rendering, and round-trips between documents and reports.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use infobound_cli::docs::ChainDocument;
use infobound_cli::run_with;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_infobound"))
}

fn write_doc(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn stdout_json(output: &Output) -> serde_json::Value {
    serde_json::from_slice(&output.stdout).expect("stdout is one JSON document")
}

fn stderr_json(output: &Output) -> serde_json::Value {
    serde_json::from_slice(&output.stderr).expect("stderr is one JSON document")
}

const LOWER_VIOLATION_CHAIN: &str = r#"{
  "p_x2_given_k": [[0.5, 0.5], [0.5, 0.5]],
  "p_k_given_x1": [[0.5, 0.5], [0.5, 0.5]],
  "p_x1": [1.0, 0.0]
}"#;

const HOLDING_CHAIN: &str = r#"{
  "p_x2_given_k": [[1.0, 0.0], [0.0, 1.0]],
  "p_k_given_x1": [[1.0, 0.0], [0.0, 1.0]],
  "p_x1": [0.5, 0.5]
}"#;

#[test]
fn check_reports_a_lower_violation_with_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_doc(dir.path(), "chain.json", LOWER_VIOLATION_CHAIN);
    let output = bin().arg("check").arg(&path).output().unwrap();
    assert_eq!(output.status.code(), Some(3));
    let json = stdout_json(&output);
    assert_eq!(json["bounds"]["verdict"], "violates_lower");
    assert_eq!(
        json["bounds"]["iqc"].as_f64().unwrap(),
        -std::f64::consts::LN_2
    );
    assert_eq!(json["mutual"]["holds"], true);
}

#[test]
fn check_exits_zero_when_the_bounds_hold() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_doc(dir.path(), "chain.json", HOLDING_CHAIN);
    let output = bin().arg("check").arg(&path).output().unwrap();
    assert_eq!(output.status.code(), Some(0));
    let json = stdout_json(&output);
    assert_eq!(json["bounds"]["verdict"], "holds");
}

#[test]
fn check_reads_a_document_from_stdin() {
    use std::io::Write as _;
    use std::process::Stdio;
    let mut child = bin()
        .args(["check", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(HOLDING_CHAIN.as_bytes())
        .unwrap();
    let output = child.wait_with_output().unwrap();
    assert_eq!(output.status.code(), Some(0));
}

#[test]
fn invalid_distributions_exit_sixty_five_with_a_pointer() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_doc(
        dir.path(),
        "bad.json",
        r#"{"p_x2_given_k": [[1.0]], "p_k_given_x1": [[1.0]], "p_x1": [0.7]}"#,
    );
    let output = bin().arg("check").arg(&path).output().unwrap();
    assert_eq!(output.status.code(), Some(65));
    let err = stderr_json(&output);
    assert_eq!(err["error"]["kind"], "validation");
    assert_eq!(err["error"]["pointer"], "/p_x1");
}

#[test]
fn malformed_json_exits_sixty_four() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_doc(dir.path(), "broken.json", r#"{"p_x2_given_k": [[1.0"#);
    let output = bin().arg("check").arg(&path).output().unwrap();
    assert_eq!(output.status.code(), Some(64));
    assert_eq!(stderr_json(&output)["error"]["kind"], "parse");
}

#[test]
fn missing_files_exit_sixty_four() {
    let output = bin()
        .args(["check", "/definitely/not/here.json"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(64));
    assert_eq!(stderr_json(&output)["error"]["kind"], "io");
}

#[test]
fn unknown_flags_are_usage_errors() {
    let output = bin().args(["check", "--frobnicate"]).output().unwrap();
    assert_eq!(output.status.code(), Some(64));
    let output = bin().arg("--help").output().unwrap();
    assert_eq!(output.status.code(), Some(0));
}

#[test]
fn verify_examples_prints_the_frozen_values() {
    let output = bin().arg("verify-examples").output().unwrap();
    assert_eq!(output.status.code(), Some(0));
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.contains("-0.6931471805599453"));
    assert!(text.contains("\"h_k\": 0.0"));
    assert!(text.contains("\"verdict\": \"violates_lower\""));
    assert!(text.contains("\"verdict\": \"violates_upper\""));
}

#[test]
fn bits_rescale_the_examples_to_unit_entropies() {
    let output = bin().args(["verify-examples", "--bits"]).output().unwrap();
    assert_eq!(output.status.code(), Some(0));
    let json = stdout_json(&output);
    assert_eq!(json["units"], "bits");
    assert_eq!(json["example1"]["iqc"].as_f64().unwrap(), -1.0);
    assert_eq!(json["example2"]["iqc"].as_f64().unwrap(), 1.0);
}

#[test]
fn search_on_trivial_alphabets_reports_plain_zero() {
    for objective in ["minimize-iqc", "maximize-iqc-minus-hk"] {
        let output = bin()
            .args([
                "search",
                "--dims",
                "1",
                "1",
                "1",
                "--objective",
                objective,
                "--restarts",
                "2",
                "--budget",
                "500",
                "--seed",
                "1",
            ])
            .output()
            .unwrap();
        assert_eq!(output.status.code(), Some(0), "objective {objective}");
        let text = String::from_utf8(output.stdout.clone()).unwrap();
        assert!(!text.contains("-0.0"), "negative zero leaked: {text}");
        assert_eq!(stdout_json(&output)["best_value"].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn search_writes_the_same_report_to_the_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("report.json");
    let output = bin()
        .args([
            "search",
            "--dims",
            "2",
            "2",
            "2",
            "--restarts",
            "4",
            "--budget",
            "4000",
            "--seed",
            "3",
        ])
        .arg("--out")
        .arg(&out_path)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
    let saved = std::fs::read(&out_path).unwrap();
    assert_eq!(saved, output.stdout);
    let json: serde_json::Value = serde_json::from_slice(&saved).unwrap();
    assert!(json["best_value"].as_f64().unwrap() < 0.0);
    // The best chain is itself a valid input document.
    let chain_doc: ChainDocument = serde_json::from_value(json["best_chain"].clone()).unwrap();
    chain_doc.to_chain().unwrap();
}

#[test]
fn oversized_grid_oracles_exit_sixty_six() {
    let output = bin()
        .args([
            "search",
            "--dims",
            "4",
            "4",
            "4",
            "--restarts",
            "1",
            "--budget",
            "300",
            "--seed",
            "1",
            "--oracle-steps",
            "50",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(66));
    assert_eq!(stderr_json(&output)["error"]["kind"], "resource_limit");
}

#[test]
fn seed_comes_from_the_environment_unless_a_flag_overrides_it() {
    let args = [
        "search",
        "--dims",
        "1",
        "1",
        "1",
        "--restarts",
        "1",
        "--budget",
        "300",
    ];
    let output = bin()
        .args(args)
        .env("INFOBOUND_SEED", "123")
        .output()
        .unwrap();
    assert_eq!(stdout_json(&output)["seed"].as_u64(), Some(123));

    let output = bin()
        .args(args)
        .args(["--seed", "7"])
        .env("INFOBOUND_SEED", "123")
        .output()
        .unwrap();
    assert_eq!(stdout_json(&output)["seed"].as_u64(), Some(7));

    let output = bin()
        .args(args)
        .env("INFOBOUND_SEED", "not-a-seed")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(64));
    assert_eq!(stderr_json(&output)["error"]["kind"], "parse");
}

#[test]
fn jarzynski_from_chain_reports_the_identity_and_the_gap() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_doc(dir.path(), "chain.json", LOWER_VIOLATION_CHAIN);
    let output = bin()
        .arg("jarzynski")
        .arg("--from-chain")
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let json = stdout_json(&output);
    assert_eq!(json["jarzynski"].as_f64().unwrap(), 1.0);
    assert_eq!(
        json["chain"]["sigma_plus_iqc"].as_f64().unwrap(),
        -std::f64::consts::LN_2
    );
    assert!(json["chain"]["gap"].as_f64().unwrap() > 0.69);
}

#[test]
fn jarzynski_montecarlo_reports_a_tight_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_doc(dir.path(), "chain.json", LOWER_VIOLATION_CHAIN);
    let output = bin()
        .args([
            "jarzynski",
            "--mode",
            "mc",
            "--samples",
            "20000",
            "--seed",
            "9",
        ])
        .arg("--from-chain")
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let json = stdout_json(&output);
    // Embedding makes sigma vanish, and this chain's measurement is
    // uninformative, so every sampled weight is exactly one.
    assert_eq!(json["estimate"].as_f64().unwrap(), 1.0);
    assert_eq!(json["std_error"].as_f64().unwrap(), 0.0);
    assert_eq!(json["samples"].as_u64(), Some(20000));
}

#[test]
fn jarzynski_requires_exactly_one_source() {
    let output = bin().args(["jarzynski", "--mode", "mc"]).output().unwrap();
    assert_eq!(output.status.code(), Some(64));

    let dir = tempfile::tempdir().unwrap();
    let path = write_doc(dir.path(), "chain.json", HOLDING_CHAIN);
    let output = bin()
        .arg("jarzynski")
        .arg("--model")
        .arg(&path)
        .arg("--from-chain")
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(64));
}

#[test]
fn a_model_violating_the_support_condition_exits_sixty_seven() {
    // Forward support reaches (x0=0, k=0, x1=0), but the reverse channel
    // for outcome 0 gives that transition zero weight.
    let dir = tempfile::tempdir().unwrap();
    let path = write_doc(
        dir.path(),
        "model.json",
        r#"{
  "p0": [0.5, 0.5],
  "meas": [[1.0, 0.0], [0.0, 1.0]],
  "feedback": [
    [[1.0, 1.0], [0.0, 0.0]],
    [[0.0, 0.0], [1.0, 1.0]]
  ],
  "reverse": [
    [[0.0, 1.0], [1.0, 0.0]],
    [[0.0, 1.0], [1.0, 0.0]]
  ],
  "p1_ref": [[0.5, 0.5], [0.5, 0.5]],
  "bayesian_reverse": false
}"#,
    );
    let output = bin()
        .arg("jarzynski")
        .arg("--model")
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(67));
    let err = stderr_json(&output);
    assert_eq!(err["error"]["kind"], "infinite_sigma");
    let message = err["error"]["message"].as_str().unwrap();
    assert!(
        message.contains("x0=0"),
        "message should name the trajectory: {message}"
    );
}

#[test]
fn a_partial_reverse_process_exits_sixty_five() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_doc(
        dir.path(),
        "model.json",
        r#"{
  "p0": [1.0],
  "meas": [[1.0]],
  "feedback": [[[1.0]]],
  "reverse": [[[1.0]]]
}"#,
    );
    let output = bin()
        .arg("jarzynski")
        .arg("--model")
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(65));
    assert_eq!(stderr_json(&output)["error"]["pointer"], "/p1_ref");
}

#[test]
fn documents_round_trip_through_serialization_without_drift() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..1000 {
        let dims = (
            rng.random_range(1..=4),
            rng.random_range(1..=4),
            rng.random_range(1..=4),
        );
        let chain = infobound::markov::random_chain(dims, &mut rng);
        let doc = ChainDocument::from_chain(&chain);
        let json = serde_json::to_string(&doc).unwrap();
        let parsed: ChainDocument = serde_json::from_str(&json).unwrap();
        let rebuilt = parsed.to_chain().unwrap();
        // JSON float formatting is shortest-round-trip, so the decoded
        // chain is bitwise identical and so is every derived quantity.
        assert_eq!(
            infobound::info::iqc_classical(&rebuilt),
            infobound::info::iqc_classical(&chain),
            "trial {trial} drifted"
        );
    }
}

#[test]
fn in_process_check_matches_the_library_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for trial in 0..20 {
        let dims = (
            rng.random_range(1..=3),
            rng.random_range(1..=3),
            rng.random_range(1..=3),
        );
        let chain = infobound::markov::random_chain(dims, &mut rng);
        let doc = ChainDocument::from_chain(&chain);
        let path = dir.path().join(format!("chain_{trial}.json"));
        std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();

        let mut captured = Vec::new();
        let code = run_with(
            ["infobound", "check", path.to_str().unwrap()],
            &mut captured,
        );
        let json: serde_json::Value = serde_json::from_slice(&captured).unwrap();
        let report = infobound::bounds::check_bounds(&chain);
        assert_eq!(json["bounds"]["iqc"].as_f64().unwrap(), report.iqc);
        let expected = if report.verdict == infobound::bounds::Verdict::Holds {
            0
        } else {
            3
        };
        assert_eq!(code, expected, "trial {trial}");
    }
}
