//! End-to-end tests of the command-line interface: exit codes, golden
//! describe strings, report formats, determinism, and file output.

use std::process::{Command, Output};

use subgeom::suite::VerificationReport;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subgeom"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn describe_golden_strings() {
    let out = run(&["describe", "example2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out).trim(),
        "dim M=5, dim N=3, \u{3be} horizontal, \u{3bc}=span{\u{3be}}, Riemannian submersion"
    );

    let out = run(&["describe", "example3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("\u{3be} vertical"), "{}", stdout(&out));
    assert!(stdout(&out).contains("conformal \u{3bb}=z"), "{}", stdout(&out));
}

#[test]
fn unknown_source_is_a_usage_error() {
    let out = run(&["describe", "nonesuch"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["verify", "nonesuch"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_flag_value_is_a_usage_error() {
    let out = run(&["verify", "example2", "--format", "yaml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_exit_codes() {
    let out = run(&["verify", "example2", "--samples", "20"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));

    // xi vertical: the Riemannian record is skipped unless required
    let out = run(&["verify", "example3", "--samples", "20"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let out = run(&["verify", "example3", "--samples", "20", "--require-riemannian"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn json_report_round_trips() {
    let out = run(&["verify", "example2", "--samples", "15", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let report: VerificationReport = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(report.passed());
    assert_eq!(report.samples, 15);
    assert_eq!(report.seed, 42);
    assert_eq!(report.to_json().trim(), stdout(&out).trim());
}

#[test]
fn text_format_has_one_line_per_check() {
    let out = run(&["verify", "example3", "--samples", "10", "--format", "text"]);
    let text = stdout(&out);
    assert!(text.lines().any(|l| l.starts_with("PASS")), "{text}");
    assert!(text.lines().any(|l| l.starts_with("SKIP")), "{text}");
    assert!(text.lines().last().unwrap().starts_with("summary:"));
}

#[test]
fn reports_are_deterministic_per_seed() {
    let a = run(&["verify", "example2", "--samples", "25", "--format", "json"]);
    let b = run(&["verify", "example2", "--samples", "25", "--format", "json"]);
    assert_eq!(a.stdout, b.stdout, "identical config+seed, identical body");

    let c = run(&["verify", "example2", "--samples", "25", "--format", "json", "--seed", "7"]);
    assert_ne!(a.stdout, c.stdout, "the seed is part of the body");
}

#[test]
fn out_flag_writes_the_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&[
        "verify",
        "example2",
        "--samples",
        "10",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let body = std::fs::read_to_string(&path).unwrap();
    let report: VerificationReport = serde_json::from_str(&body).unwrap();
    assert!(report.passed());
}

#[test]
fn warp_subcommand() {
    let out = run(&["warp", "--samples", "10", "--", "exp(t)"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));

    let out = run(&["warp", "--samples", "10", "--", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));

    let out = run(&["warp", "--samples", "10", "--", "2 + sin(t)"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));

    // nonpositive warping function: configuration error
    let out = run(&["warp", "--samples", "10", "--", "-1"]);
    assert_eq!(out.status.code(), Some(2));

    // unknown variable: configuration error
    let out = run(&["warp", "--samples", "10", "--", "exp(q)"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn suite_subcommand_runs_all_builtins() {
    let out = run(&["suite", "--samples", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    for name in ["example2", "example3", "ken7"] {
        assert!(text.contains(name), "missing {name} in suite output:\n{text}");
    }
}
