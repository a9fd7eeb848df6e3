//! Input files, job evaluation and report emission.

pub mod job;
pub mod report;
pub mod urdf;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::moments::{classify, cuboid_check, volume_ratio};
use crate::repair::suggest_repairs;
use crate::rigid_body::{com_feasibility, moment_set_unchecked, principal_moments, triangle_check};

pub use job::{
    parse_job_json, parse_job_json_with_defaults, InertiaComponents, JobKind, JobPayload,
    ValidationJob,
};
pub use report::{emit_report, emit_reports, parse_report_json, ReportDocument, ReportFormat};
pub use urdf::{parse_urdf, UrdfLink, UrdfMode};

/// Process exit codes of the command-line tool.
pub mod exit_code {
    pub const FEASIBLE: i32 = 0;
    pub const INFEASIBLE: i32 = 1;
    pub const INPUT_ERROR: i32 = 2;
    pub const NUMERICAL_FAILURE: i32 = 3;
}

/// Runs the checks for one job. Repairs are only computed for rigid bodies.
pub fn evaluate_job(job: &ValidationJob, with_repairs: bool) -> Result<ReportDocument> {
    let tol = &job.tolerances;
    match &job.payload {
        JobPayload::Moments(m) => {
            let report = classify(m, tol)?;
            Ok(ReportDocument {
                label: job.label.clone(),
                kind: JobKind::GenericMoments,
                status: report.status,
                margin: report.margin,
                semiaxes: report.semiaxes,
                axis_ratios: report.axis_ratios,
                null_violations: report.null_violations,
                cuboid_bound: cuboid_check(m, tol)?,
                triangle: None,
                repairs: None,
                volume_ratio: volume_ratio(m.dim() as u32)?,
            })
        }
        JobPayload::RigidBody(p) => {
            let (moments, _) = principal_moments(p.inertia())?;
            let triangle = triangle_check(moments[0], moments[1], moments[2]).ok();
            let unchecked = moment_set_unchecked(p)?;
            let report = match com_feasibility(p, tol) {
                Ok(report) => report,
                Err(Error::InfeasibleInertia(_)) => classify(&unchecked, tol)?,
                Err(e) => return Err(e),
            };
            let repairs = with_repairs.then(|| suggest_repairs(p, &report));
            Ok(ReportDocument {
                label: job.label.clone(),
                kind: JobKind::RigidBody,
                status: report.status,
                margin: report.margin,
                semiaxes: report.semiaxes,
                axis_ratios: report.axis_ratios,
                null_violations: report.null_violations,
                cuboid_bound: cuboid_check(&unchecked, tol)?,
                triangle,
                repairs,
                volume_ratio: volume_ratio(3)?,
            })
        }
    }
}

/// Evaluates independent jobs in parallel; results keep the input order.
pub fn evaluate_jobs(jobs: &[ValidationJob], with_repairs: bool) -> Vec<Result<ReportDocument>> {
    jobs.par_iter()
        .map(|job| evaluate_job(job, with_repairs))
        .collect()
}

/// Exit code for one outcome.
pub fn outcome_code(outcome: &Result<ReportDocument>) -> i32 {
    match outcome {
        Ok(r) if r.status.is_feasible() => exit_code::FEASIBLE,
        Ok(_) => exit_code::INFEASIBLE,
        Err(Error::NumericalFailure(_)) => exit_code::NUMERICAL_FAILURE,
        Err(_) => exit_code::INPUT_ERROR,
    }
}

/// Combined exit code: the most severe outcome wins, ranked
/// numerical failure > input error > infeasible > feasible.
pub fn combined_exit_code<'a>(
    outcomes: impl IntoIterator<Item = &'a Result<ReportDocument>>,
) -> i32 {
    outcomes
        .into_iter()
        .map(outcome_code)
        .max()
        .unwrap_or(exit_code::INPUT_ERROR)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::FeasibilityStatus;
    use crate::rigid_body::TriangleClass;

    #[test]
    fn invalid_tensor_reports_invalid_second_moments() {
        let jobs = parse_job_json(
            br#"{"kind":"rigid_body","mass":1,"inertia":{"ixx":1,"iyy":1,"izz":3,"ixy":0,"ixz":0,"iyz":0},"com":[0,0,0]}"#,
        )
        .unwrap();
        let r = evaluate_job(&jobs[0], true).unwrap();
        assert_eq!(r.status, FeasibilityStatus::InvalidSecondMoments);
        assert_eq!(r.triangle, Some(TriangleClass::Invalid));
        assert_eq!(r.margin, None);
        let fix = r.repairs.unwrap();
        assert_eq!(fix.max_mass, None);
        assert_eq!(fix.nearest_com, None);
    }

    #[test]
    fn exit_codes() {
        let ok = |status| {
            Ok(ReportDocument {
                label: String::new(),
                kind: JobKind::GenericMoments,
                status,
                margin: Some(0.0),
                semiaxes: vec![],
                axis_ratios: vec![],
                null_violations: vec![],
                cuboid_bound: vec![],
                triangle: None,
                repairs: None,
                volume_ratio: 1.0,
            })
        };
        let feasible = [
            ok(FeasibilityStatus::StrictInterior),
            ok(FeasibilityStatus::Boundary),
        ];
        assert_eq!(combined_exit_code(&feasible), 0);
        let mixed = [
            ok(FeasibilityStatus::StrictInterior),
            ok(FeasibilityStatus::InfeasibleCenter),
        ];
        assert_eq!(combined_exit_code(&mixed), 1);
        let with_input = [
            ok(FeasibilityStatus::InvalidSecondMoments),
            Err(Error::input("x", "y")),
        ];
        assert_eq!(combined_exit_code(&with_input), 2);
        let numeric = [
            Err(Error::NumericalFailure("n".into())),
            Err(Error::input("x", "y")),
        ];
        assert_eq!(combined_exit_code(&numeric), 3);
        assert_eq!(combined_exit_code(&[]), 2);
    }

    #[test]
    fn parallel_evaluation_keeps_order() {
        let text: String = format!(
            "[{}]",
            (0..50)
                .map(|i| format!(
                    r#"{{"kind":"moments","label":"j{i}","n":1,"mean":[{}],"second":[[1]]}}"#,
                    i as f64 / 25.0
                ))
                .collect::<Vec<_>>()
                .join(",")
        );
        let jobs = parse_job_json(text.as_bytes()).unwrap();
        let results = evaluate_jobs(&jobs, false);
        for (i, r) in results.iter().enumerate() {
            let r = r.as_ref().unwrap();
            assert_eq!(r.label, format!("j{i}"));
            let x = i as f64 / 25.0;
            assert!((r.margin.unwrap() - (1.0 - x * x)).abs() < 1e-12);
        }
    }
}
