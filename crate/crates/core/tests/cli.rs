use std::path::PathBuf;
use std::process::{Command, Output};

use nalgebra::Vector3;

use momentgate::ingest::{evaluate_jobs, parse_job_json, parse_report_json, ReportDocument};
use momentgate::{
    com_feasibility, FeasibilityStatus, InertiaFrame, RigidBodyParams, ToleranceConfig,
};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_momentgate"))
        .args(args)
        .env_remove("MOMENTGATE_TOL_EIG")
        .output()
        .expect("binary runs")
}

fn check(file: &str, extra: &[&str]) -> Output {
    let path = data(file);
    let mut args = vec!["check", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn json_reports(out: &Output) -> Vec<ReportDocument> {
    let docs: Vec<serde_json::Value> =
        serde_json::from_slice(&out.stdout).expect("JSON array on stdout");
    docs.iter()
        .map(|d| parse_report_json(d.to_string().as_bytes()).unwrap())
        .collect()
}

#[test]
fn plate_example_with_repair() {
    let out = check("plate_example.json", &["--repair"]);
    let text = stdout(&out);
    assert_eq!(out.status.code(), Some(1), "{text}");
    assert!(text.contains("INFEASIBLE"), "{text}");
    assert!(text.contains("a=0.2582"), "{text}");
    assert!(text.contains("b=0.1826"), "{text}");
    assert!(text.contains("max feasible mass 0.3704"), "{text}");
    assert!(text.contains("geometric extrapolation"), "{text}");
}

#[test]
fn volume_ratio_subcommand() {
    let out = run(&["volume-ratio", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "0.5236");
    assert_eq!(run(&["volume-ratio", "--n", "0"]).status.code(), Some(2));
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(check("empty.json", &[]).status.code(), Some(2));
    let out = check("bad_field.json", &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("[0].inertia") && err.contains("izx"), "{err}");
    assert_eq!(check("missing.json", &[]).status.code(), Some(2));
}

#[test]
fn urdf_modes() {
    let out = check(
        "robot.urdf",
        &["--mode", "origin_hypothesis", "--format", "json"],
    );
    assert_eq!(out.status.code(), Some(1));
    let reports = json_reports(&out);
    assert_eq!(
        reports.iter().map(|r| r.label.as_str()).collect::<Vec<_>>(),
        ["plate", "arm"]
    );
    assert_eq!(reports[0].status, FeasibilityStatus::InfeasibleCenter);
    assert!(reports[1].status.is_feasible());

    let body = RigidBodyParams::from_principal(
        10.0,
        20.0,
        30.0,
        300.0,
        Vector3::new(2.0, 5.0, 0.0),
        InertiaFrame::AboutReferencePoint,
    )
    .unwrap();
    let library = com_feasibility(&body, &ToleranceConfig::default()).unwrap();
    assert_eq!(reports[0].status, library.status);
    assert_eq!(reports[0].margin, library.margin);

    let out = check("robot.urdf", &["--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json_reports(&out).iter().all(|r| r.status.is_feasible()));
}

#[test]
fn invalid_tensor_rejected_in_both_modes() {
    for mode in ["com_semantics", "origin_hypothesis"] {
        let out = check("invalid_tensor.urdf", &["--mode", mode, "--format", "json"]);
        assert_eq!(out.status.code(), Some(1), "{mode}");
        assert_eq!(
            json_reports(&out)[0].status,
            FeasibilityStatus::InvalidSecondMoments,
            "{mode}"
        );
    }
}

#[test]
fn eigenvalue_tolerance_from_environment() {
    assert_eq!(check("tol_sensitive.json", &[]).status.code(), Some(1));
    let path = data("tol_sensitive.json");
    let out = Command::new(env!("CARGO_BIN_EXE_momentgate"))
        .args(["check", path.to_str().unwrap()])
        .env("MOMENTGATE_TOL_EIG", "1e-6")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert_eq!(
        check("tol_sensitive.json", &["--tol-eig", "1e-6"])
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn json_output_round_trips() {
    let out = check("mixed.json", &["--format", "json", "--repair"]);
    let reports = json_reports(&out);
    let jobs = parse_job_json(&std::fs::read(data("mixed.json")).unwrap()).unwrap();
    let library: Vec<ReportDocument> = evaluate_jobs(&jobs, true)
        .into_iter()
        .map(Result::unwrap)
        .collect();
    assert_eq!(reports, library);
}

#[test]
fn selftest_passes() {
    let out = run(&["selftest", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(!stdout(&out).contains("FAIL"));
}

#[test]
fn exit_code_zero_iff_every_job_feasible() {
    for file in [
        "plate_example.json",
        "feasible.json",
        "boundary.json",
        "mixed.json",
        "tol_sensitive.json",
    ] {
        let jobs = parse_job_json(&std::fs::read(data(file)).unwrap()).unwrap();
        let all_feasible = evaluate_jobs(&jobs, false)
            .iter()
            .all(|r| r.as_ref().is_ok_and(|r| r.status.is_feasible()));
        let code = check(file, &[]).status.code();
        assert_eq!(code == Some(0), all_feasible, "{file}");
        assert_eq!(code, Some(if all_feasible { 0 } else { 1 }), "{file}");
    }
    let boundary = json_reports(&check("boundary.json", &["--format", "json"]));
    assert_eq!(boundary[0].status, FeasibilityStatus::Boundary);
}
