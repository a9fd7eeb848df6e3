use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use momentgate::ingest::{
    self, combined_exit_code, emit_reports, evaluate_jobs, exit_code, parse_job_json_with_defaults,
    parse_urdf, JobPayload, ReportFormat, UrdfMode, ValidationJob,
};
use momentgate::{selftest, volume_ratio, Error, ToleranceConfig};

#[derive(Parser)]
#[command(
    name = "momentgate",
    version,
    about = "Check whether moment data and rigid-body inertial parameters are physically realizable"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a JSON job file or a URDF robot description.
    Check {
        file: PathBuf,
        /// How URDF inertial data is interpreted.
        #[arg(long, value_enum, default_value = "com_semantics")]
        mode: Mode,
        /// Suggest mass and center-of-mass repairs for infeasible bodies.
        #[arg(long)]
        repair: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Relative eigenvalue zero-threshold.
        #[arg(long, env = "MOMENTGATE_TOL_EIG", default_value_t = 1e-10)]
        tol_eig: f64,
        /// Margin band reported as the boundary.
        #[arg(long, default_value_t = 1e-9)]
        tol_margin: f64,
    },
    /// Ellipsoid-to-bounding-box volume ratio in dimension n.
    VolumeRatio {
        #[arg(long)]
        n: u32,
    },
    /// Run the built-in property checks.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    #[value(name = "com_semantics")]
    ComSemantics,
    #[value(name = "origin_hypothesis")]
    OriginHypothesis,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Check {
            file,
            mode,
            repair,
            format,
            tol_eig,
            tol_margin,
        } => check(&file, mode, repair, format, tol_eig, tol_margin),
        Command::VolumeRatio { n } => match volume_ratio(n) {
            Ok(v) => {
                println!("{}", table_format(v));
                exit_code::FEASIBLE
            }
            Err(e) => {
                eprintln!("error: {e}");
                exit_code::INPUT_ERROR
            }
        },
        Command::Selftest { seed } => {
            let mut failed = false;
            for check in selftest::run(seed) {
                println!(
                    "{} {}: {}",
                    if check.passed { "PASS" } else { "FAIL" },
                    check.name,
                    check.detail
                );
                failed |= !check.passed;
            }
            if failed {
                exit_code::INFEASIBLE
            } else {
                exit_code::FEASIBLE
            }
        }
    };
    ExitCode::from(code as u8)
}

/// Four decimals like a printed table, switching to two significant digits
/// below 1e-4.
fn table_format(v: f64) -> String {
    if v >= 1e-4 {
        format!("{v:.4}")
    } else {
        format!("{v:.1e}")
    }
}

fn is_urdf(path: &Path, bytes: &[u8]) -> bool {
    match path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .as_deref()
    {
        Some("urdf" | "xml") => true,
        Some("json") => false,
        _ => bytes.iter().find(|b| !b.is_ascii_whitespace()) == Some(&b'<'),
    }
}

fn check(
    path: &Path,
    mode: Mode,
    repair: bool,
    format: Format,
    tol_eig: f64,
    tol_margin: f64,
) -> i32 {
    let defaults = match ToleranceConfig::new(tol_eig, tol_margin) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code::INPUT_ERROR;
        }
    };
    let bytes = match std::fs::read(path) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return exit_code::INPUT_ERROR;
        }
    };

    let mut link_errors = Vec::new();
    let jobs: Vec<ValidationJob> = if is_urdf(path, &bytes) {
        let mode = match mode {
            Mode::ComSemantics => UrdfMode::ComSemantics,
            Mode::OriginHypothesis => UrdfMode::OriginHypothesis,
        };
        match parse_urdf(&bytes, mode) {
            Ok(links) => links
                .into_iter()
                .filter_map(|link| match link.params {
                    Ok(p) => Some(ValidationJob {
                        label: link.name,
                        payload: JobPayload::RigidBody(p),
                        tolerances: defaults,
                    }),
                    Err(e) => {
                        link_errors.push(Err(e));
                        None
                    }
                })
                .collect(),
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                return exit_code::INPUT_ERROR;
            }
        }
    } else {
        match parse_job_json_with_defaults(&bytes, &defaults) {
            Ok(jobs) => jobs,
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                return exit_code::INPUT_ERROR;
            }
        }
    };
    if jobs.is_empty() && link_errors.is_empty() {
        eprintln!("error: {}: no inertial data found", path.display());
        return exit_code::INPUT_ERROR;
    }

    let outcomes = evaluate_jobs(&jobs, repair);
    for (job, outcome) in jobs.iter().zip(&outcomes) {
        if let Err(e) = outcome {
            eprintln!("error: {}: {e}", job.label);
        }
    }
    for err in &link_errors {
        if let Err(e) = err {
            eprintln!("error: {e}");
        }
    }

    let reports: Vec<_> = outcomes
        .iter()
        .filter_map(|o| o.as_ref().ok())
        .cloned()
        .collect();
    let format = match format {
        Format::Json => ReportFormat::Json,
        Format::Text => ReportFormat::Text,
    };
    if !reports.is_empty() || format == ReportFormat::Json {
        println!("{}", emit_reports(&reports, format).trim_end());
    }

    let all: Vec<Result<ingest::ReportDocument, Error>> =
        outcomes.into_iter().chain(link_errors).collect();
    combined_exit_code(&all)
}
