//! JSON validation jobs.
//!
//! A document is one job object or an array of them. Matrices are row-major.
//!
//! ```json
//! {"kind": "moments", "label": "unit", "n": 1, "mean": [0], "second": [[1]]}
//! {"kind": "rigid_body", "mass": 300,
//!  "inertia": {"ixx": 10, "iyy": 20, "izz": 30, "ixy": 0, "ixz": 0, "iyz": 0},
//!  "com": [2, 5, 0], "frame": "reference_point"}
//! ```
//!
//! `label`, `frame` (default `reference_point`) and `tolerances`
//! (`{"eig_rel_tol": .., "boundary_tol": ..}`, each optional) may be omitted.
//! Unknown fields are rejected.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::{MomentSet, ToleranceConfig};
use crate::rigid_body::{InertiaFrame, RigidBodyParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JobKind {
    #[serde(rename = "moments")]
    GenericMoments,
    RigidBody,
}

#[derive(Debug, Clone, PartialEq)]
pub enum JobPayload {
    Moments(MomentSet),
    RigidBody(RigidBodyParams),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationJob {
    pub label: String,
    pub payload: JobPayload,
    pub tolerances: ToleranceConfig,
}

impl ValidationJob {
    pub fn kind(&self) -> JobKind {
        match self.payload {
            JobPayload::Moments(_) => JobKind::GenericMoments,
            JobPayload::RigidBody(_) => JobKind::RigidBody,
        }
    }
}

/// Inertia tensor components as stored in robot descriptions: the tensor
/// entries themselves, `ixy` being the (x, y) entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InertiaComponents {
    pub ixx: f64,
    pub iyy: f64,
    pub izz: f64,
    pub ixy: f64,
    pub ixz: f64,
    pub iyz: f64,
}

impl InertiaComponents {
    pub fn to_matrix(self) -> Matrix3<f64> {
        Matrix3::new(
            self.ixx, self.ixy, self.ixz, //
            self.ixy, self.iyy, self.iyz, //
            self.ixz, self.iyz, self.izz,
        )
    }
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    eig_rel_tol: Option<f64>,
    boundary_tol: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMoments {
    #[allow(dead_code)]
    kind: String,
    label: Option<String>,
    n: usize,
    mean: Vec<f64>,
    second: Vec<Vec<f64>>,
    tolerances: Option<RawTolerances>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRigidBody {
    #[allow(dead_code)]
    kind: String,
    label: Option<String>,
    mass: f64,
    inertia: InertiaComponents,
    com: Vec<f64>,
    frame: Option<InertiaFrame>,
    tolerances: Option<RawTolerances>,
}

enum RawJob {
    Moments(RawMoments),
    RigidBody(RawRigidBody),
}

fn decode<T: serde::de::DeserializeOwned>(value: serde_json::Value, prefix: &str) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let location = match (prefix.is_empty(), path.as_str()) {
            (true, ".") => "document".to_string(),
            (true, _) => path,
            (false, ".") => prefix.to_string(),
            (false, _) => format!("{prefix}.{path}"),
        };
        Error::input(location, e.into_inner().to_string())
    })
}

fn decode_job(value: serde_json::Value, prefix: &str) -> Result<RawJob> {
    let kind = value
        .get("kind")
        .and_then(|k| k.as_str())
        .map(str::to_string);
    match kind.as_deref() {
        Some("moments") => decode(value, prefix).map(RawJob::Moments),
        Some("rigid_body") => decode(value, prefix).map(RawJob::RigidBody),
        Some(other) => Err(Error::input(
            field(prefix, "kind"),
            format!("unknown kind `{other}`, expected `moments` or `rigid_body`"),
        )),
        None => Err(Error::input(
            field(prefix, "kind"),
            "missing string field `kind`",
        )),
    }
}

/// Parses jobs using the built-in default tolerances.
pub fn parse_job_json(bytes: &[u8]) -> Result<Vec<ValidationJob>> {
    parse_job_json_with_defaults(bytes, &ToleranceConfig::default())
}

/// Parses jobs; tolerances a job does not set come from `defaults`.
pub fn parse_job_json_with_defaults(
    bytes: &[u8],
    defaults: &ToleranceConfig,
) -> Result<Vec<ValidationJob>> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| Error::input("document", format!("not valid UTF-8: {e}")))?;
    let doc: serde_json::Value = serde_json::from_str(text).map_err(|e| {
        Error::input(
            format!("line {}, column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;

    let (values, indexed) = match doc {
        serde_json::Value::Array(items) => (items, true),
        other => (vec![other], false),
    };
    if values.is_empty() {
        return Err(Error::input("document", "no jobs"));
    }
    values
        .into_iter()
        .enumerate()
        .map(|(i, value)| {
            let prefix = if indexed {
                format!("[{i}]")
            } else {
                String::new()
            };
            let raw = decode_job(value, &prefix)?;
            build_job(raw, i, &prefix, defaults)
        })
        .collect()
}

fn field(prefix: &str, name: &str) -> String {
    if prefix.is_empty() {
        name.to_string()
    } else {
        format!("{prefix}.{name}")
    }
}

fn merge_tolerances(
    raw: Option<RawTolerances>,
    defaults: &ToleranceConfig,
    prefix: &str,
) -> Result<ToleranceConfig> {
    let raw = raw.unwrap_or_default();
    let tol = ToleranceConfig {
        eig_rel_tol: raw.eig_rel_tol.unwrap_or(defaults.eig_rel_tol),
        boundary_tol: raw.boundary_tol.unwrap_or(defaults.boundary_tol),
    };
    tol.validate()
        .map_err(|e| Error::input(field(prefix, "tolerances"), e.to_string()))?;
    Ok(tol)
}

fn build_job(
    raw: RawJob,
    index: usize,
    prefix: &str,
    defaults: &ToleranceConfig,
) -> Result<ValidationJob> {
    let default_label = || format!("job-{}", index + 1);
    match raw {
        RawJob::Moments(RawMoments {
            label,
            n,
            mean,
            second,
            tolerances,
            ..
        }) => {
            if n == 0 {
                return Err(Error::input(
                    field(prefix, "n"),
                    "dimension must be at least 1",
                ));
            }
            if mean.len() != n {
                return Err(Error::input(
                    field(prefix, "mean"),
                    format!("expected {n} entries to match n, got {}", mean.len()),
                ));
            }
            if second.len() != n {
                return Err(Error::input(
                    field(prefix, "second"),
                    format!("expected {n} rows to match n, got {}", second.len()),
                ));
            }
            if let Some((r, row)) = second.iter().enumerate().find(|(_, row)| row.len() != n) {
                return Err(Error::input(
                    format!("{}[{r}]", field(prefix, "second")),
                    format!("expected {n} entries, got {}", row.len()),
                ));
            }
            let moments = MomentSet::from_rows(&mean, &second)
                .map_err(|e| Error::input(field(prefix, "second"), e.to_string()))?;
            Ok(ValidationJob {
                label: label.unwrap_or_else(default_label),
                payload: JobPayload::Moments(moments),
                tolerances: merge_tolerances(tolerances, defaults, prefix)?,
            })
        }
        RawJob::RigidBody(RawRigidBody {
            label,
            mass,
            inertia,
            com,
            frame,
            tolerances,
            ..
        }) => {
            if com.len() != 3 {
                return Err(Error::input(
                    field(prefix, "com"),
                    format!("expected 3 entries, got {}", com.len()),
                ));
            }
            if !(mass.is_finite() && mass > 0.0) {
                return Err(Error::input(
                    field(prefix, "mass"),
                    format!("must be positive, got {mass}"),
                ));
            }
            let params = RigidBodyParams::new(
                mass,
                inertia.to_matrix(),
                Vector3::new(com[0], com[1], com[2]),
                frame.unwrap_or(InertiaFrame::AboutReferencePoint),
            )
            .map_err(|e| Error::input(field(prefix, "inertia"), e.to_string()))?;
            Ok(ValidationJob {
                label: label.unwrap_or_else(default_label),
                payload: JobPayload::RigidBody(params),
                tolerances: merge_tolerances(tolerances, defaults, prefix)?,
            })
        }
    }
}
