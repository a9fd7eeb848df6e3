//! Report documents and their JSON / text renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::job::JobKind;
use crate::moments::{FeasibilityStatus, NullViolation};
use crate::repair::RepairSuggestion;
use crate::rigid_body::TriangleClass;

/// One checked job. Serialized field-for-field; numbers keep full precision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDocument {
    pub label: String,
    pub kind: JobKind,
    pub status: FeasibilityStatus,
    pub margin: Option<f64>,
    pub semiaxes: Vec<f64>,
    pub axis_ratios: Vec<f64>,
    pub null_violations: Vec<NullViolation>,
    /// Per principal axis, whether the mean is within the bounding box.
    pub cuboid_bound: Vec<bool>,
    /// Triangle-inequality class of the principal moments (rigid bodies).
    pub triangle: Option<TriangleClass>,
    pub repairs: Option<RepairSuggestion>,
    /// Ellipsoid-to-bounding-box volume ratio for this dimension.
    pub volume_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Text,
}

pub fn emit_report(r: &ReportDocument, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            serde_json::to_string_pretty(r).expect("report documents always serialize")
        }
        ReportFormat::Text => text_report(r),
    }
}

/// Several reports: a JSON array, or text blocks separated by blank lines.
pub fn emit_reports(reports: &[ReportDocument], format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            serde_json::to_string_pretty(reports).expect("report documents always serialize")
        }
        ReportFormat::Text => reports
            .iter()
            .map(text_report)
            .collect::<Vec<_>>()
            .join("\n"),
    }
}

pub fn parse_report_json(bytes: &[u8]) -> Result<ReportDocument> {
    let mut de = serde_json::Deserializer::from_slice(bytes);
    serde_path_to_error::deserialize(&mut de)
        .map_err(|e| Error::input(e.path().to_string(), e.into_inner().to_string()))
}

fn headline(status: FeasibilityStatus) -> &'static str {
    match status {
        FeasibilityStatus::StrictInterior => "FEASIBLE",
        FeasibilityStatus::Boundary => "FEASIBLE (on the boundary)",
        FeasibilityStatus::InfeasibleCenter => {
            "INFEASIBLE (center outside the admissible ellipsoid)"
        }
        FeasibilityStatus::InvalidSecondMoments => {
            "INVALID (second moments are not positive semidefinite)"
        }
    }
}

fn text_report(r: &ReportDocument) -> String {
    let mut out = String::new();
    let kind = match r.kind {
        JobKind::GenericMoments => "moments",
        JobKind::RigidBody => "rigid_body",
    };
    let _ = writeln!(out, "{} [{}]: {}", r.label, kind, headline(r.status));
    let _ = writeln!(out, "  {:<14}{}", "status", r.status);
    let margin = r.margin.map(sig6).unwrap_or_else(|| "n/a".to_string());
    let _ = writeln!(out, "  {:<14}{}", "margin", margin);

    let full = join(r.semiaxes.iter().map(|&v| sig6(v)));
    let semiaxes = if r.semiaxes.len() == 3 {
        format!(
            "a={:.4} b={:.4} c={:.4}  ({full})",
            r.semiaxes[0], r.semiaxes[1], r.semiaxes[2]
        )
    } else {
        full
    };
    let _ = writeln!(out, "  {:<14}{}", "semiaxes", semiaxes);
    if !r.axis_ratios.is_empty() {
        let _ = writeln!(
            out,
            "  {:<14}{}",
            "axis ratios",
            join(r.axis_ratios.iter().map(|&v| sig6(v)))
        );
    }
    let nulls = if r.null_violations.is_empty() {
        "none".to_string()
    } else {
        join(
            r.null_violations
                .iter()
                .map(|v| format!("axis {} off by {}", v.direction, sig6(v.magnitude))),
        )
    };
    let _ = writeln!(out, "  {:<14}{}", "null axes", nulls);
    let cuboid = join(
        r.cuboid_bound
            .iter()
            .map(|&ok| if ok { "ok" } else { "exceeded" }),
    );
    let _ = writeln!(out, "  {:<14}{}", "box bound", cuboid);
    if let Some(t) = r.triangle {
        let t = match t {
            TriangleClass::Valid => "valid",
            TriangleClass::Degenerate => "degenerate (planar body)",
            TriangleClass::Invalid => "violated",
        };
        let _ = writeln!(out, "  {:<14}{}", "triangle", t);
    }
    let _ = writeln!(out, "  {:<14}{}", "volume ratio", sig6(r.volume_ratio));

    if let Some(fix) = &r.repairs {
        if let Some(m) = fix.max_mass {
            let _ = writeln!(out, "  repair: max feasible mass {m:.4} ({})", sig6(m));
        }
        if let Some(c) = fix.boundary_com {
            let _ = writeln!(
                out,
                "  repair: com scaled to boundary [{}] (geometric extrapolation)",
                join(c.iter().map(|&v| sig6(v)))
            );
        }
        if let Some(c) = fix.nearest_com {
            let _ = writeln!(
                out,
                "  repair: nearest feasible com [{}] (geometric extrapolation)",
                join(c.iter().map(|&v| sig6(v)))
            );
        }
        if fix.max_mass.is_none() && fix.boundary_com.is_none() && fix.nearest_com.is_none() {
            let _ = writeln!(out, "  repair: none needed or none available");
        }
    }
    out
}

fn join<I: IntoIterator<Item = S>, S: AsRef<str>>(items: I) -> String {
    items
        .into_iter()
        .map(|s| s.as_ref().to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Six significant digits, trailing zeros dropped.
pub fn sig6(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        let s = format!("{v:.5e}");
        let (mantissa, exponent) = s.split_once('e').expect("exponent form");
        format!("{}e{}", trim_zeros(mantissa.to_string()), exponent)
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
