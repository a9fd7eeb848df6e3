//! Minimal repairs for a body whose center of mass lies outside its
//! admissible ellipsoid.
//!
//! Only the mass or the center of mass is ever changed. The mass repair
//! keeps the center and shrinks `M` until the ellipsoid reaches it; the two
//! geometric repairs keep the mass and move the center, either radially
//! onto the surface or to the closest surface point.

use nalgebra::{DVector, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::{FeasibilityReport, FeasibilityStatus};
use crate::rigid_body::{
    triangle_check, triangle_gaps, triangle_tolerance, InertiaFrame, RigidBodyParams, TriangleClass,
};

/// Iteration cap for the projection's secular equation.
pub const MAX_PROJECTION_ITERATIONS: usize = 100;

/// Target `|f(λ)|` for the projection's secular equation.
pub const PROJECTION_TOL: f64 = 1e-12;

/// Largest admissible mass for a fixed tensor and center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MassBound {
    Finite(f64),
    /// The center sits at the reference point, so any mass works.
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepairSuggestion {
    /// Mass placing the unchanged center exactly on the boundary, kg.
    pub max_mass: Option<f64>,
    /// Center scaled along its own direction onto the boundary, m.
    pub boundary_com: Option<[f64; 3]>,
    /// Closest feasible center, m.
    pub nearest_com: Option<[f64; 3]>,
    pub original_margin: Option<f64>,
}

impl RepairSuggestion {
    fn empty(original_margin: Option<f64>) -> Self {
        RepairSuggestion {
            max_mass: None,
            boundary_com: None,
            nearest_com: None,
            original_margin,
        }
    }
}

/// `M_max = 1 / (2 Σ comᵢ²/dᵢ)` with `d = (B+C−A, C+A−B, A+B−C)`, `com` in
/// the principal frame of `(A, B, C)`.
pub fn max_feasible_mass(a: f64, b: f64, c: f64, com: &Vector3<f64>) -> Result<MassBound> {
    if triangle_check(a, b, c)? == TriangleClass::Invalid {
        return Err(Error::InfeasibleInertia(format!(
            "principal moments ({a}, {b}, {c}) violate the triangle inequalities"
        )));
    }
    if com.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(
            "center of mass is not finite".to_string(),
        ));
    }
    let tau = triangle_tolerance(a, b, c);
    let zero_com = 1e-12 * com.amax().max(1.0);
    let mut sum = 0.0;
    for (axis, (&d, &x)) in triangle_gaps(a, b, c).iter().zip(com.iter()).enumerate() {
        if x.abs() <= zero_com {
            continue;
        }
        if d <= tau {
            return Err(Error::NoRepair(format!(
                "the body is planar along principal axis {axis} but the center is {x} off that plane"
            )));
        }
        sum += x * x / d;
    }
    if sum == 0.0 {
        Ok(MassBound::Unbounded)
    } else {
        Ok(MassBound::Finite(1.0 / (2.0 * sum)))
    }
}

fn check_axes(semiaxes: &[f64], point: &[f64]) -> Result<()> {
    if semiaxes.len() != point.len() {
        return Err(Error::InvalidInput(format!(
            "{} semiaxes but the point has {} coordinates",
            semiaxes.len(),
            point.len()
        )));
    }
    if semiaxes.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
        return Err(Error::InvalidInput(
            "semiaxes must be finite and non-negative".to_string(),
        ));
    }
    if point.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("point is not finite".to_string()));
    }
    Ok(())
}

/// `Σ xᵢ²/sᵢ²` over the non-zero semiaxes.
fn ellipsoid_norm_sq(semiaxes: &[f64], point: &[f64]) -> f64 {
    semiaxes
        .iter()
        .zip(point)
        .filter(|(s, _)| **s > 0.0)
        .map(|(s, x)| (x / s) * (x / s))
        .sum()
}

/// Scales `com` along its own direction onto the ellipsoid surface. Works in
/// the principal frame; `semiaxes` and `com` have the same length.
pub fn scale_com_to_boundary(semiaxes: &[f64], com: &[f64]) -> Result<Vec<f64>> {
    check_axes(semiaxes, com)?;
    if com.iter().all(|&x| x == 0.0) {
        return Err(Error::InvalidInput(
            "center is at the origin, there is no direction to scale along".to_string(),
        ));
    }
    if let Some(i) = (0..com.len()).find(|&i| semiaxes[i] == 0.0 && com[i] != 0.0) {
        return Err(Error::InvalidInput(format!(
            "center has component {} along the zero semiaxis {i}",
            com[i]
        )));
    }
    let t = 1.0 / ellipsoid_norm_sq(semiaxes, com).sqrt();
    Ok(com.iter().map(|x| x * t).collect())
}

/// Closest point to `com` on the ellipsoid `Σ xᵢ²/sᵢ² = 1` (principal frame).
///
/// Components along zero semiaxes are dropped first. If what remains is
/// already inside, it is returned as is. Otherwise the projection is
/// `xᵢ = sᵢ²·comᵢ / (sᵢ² + λ)` where `λ > 0` solves
/// `f(λ) = Σ sᵢ² comᵢ² / (sᵢ² + λ)² − 1 = 0`, found by Newton steps guarded
/// by the bracket `[0, s_max·‖com‖]`.
pub fn nearest_com_on_ellipsoid(semiaxes: &[f64], com: &[f64]) -> Result<Vec<f64>> {
    check_axes(semiaxes, com)?;
    let y: Vec<f64> = semiaxes
        .iter()
        .zip(com)
        .map(|(&s, &x)| if s > 0.0 { x } else { 0.0 })
        .collect();
    if ellipsoid_norm_sq(semiaxes, &y) <= 1.0 {
        return Ok(y);
    }

    let secular = |lambda: f64| -> (f64, f64) {
        let mut f = -1.0;
        let mut df = 0.0;
        for (&s, &x) in semiaxes.iter().zip(&y) {
            if s == 0.0 || x == 0.0 {
                continue;
            }
            let s2 = s * s;
            let denom = s2 + lambda;
            let term = s2 * x * x / (denom * denom);
            f += term;
            df -= 2.0 * term / denom;
        }
        (f, df)
    };

    let s_max = semiaxes.iter().copied().fold(0.0, f64::max);
    let y_norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut lo = 0.0;
    let mut hi = s_max * y_norm;
    let mut lambda = hi;
    let mut converged = false;
    for _ in 0..MAX_PROJECTION_ITERATIONS {
        let (f, df) = secular(lambda);
        if f.abs() <= PROJECTION_TOL {
            converged = true;
            break;
        }
        if f > 0.0 {
            lo = lambda;
        } else {
            hi = lambda;
        }
        let newton = lambda - f / df;
        lambda = if df < 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    if !converged {
        return Err(Error::NumericalFailure(format!(
            "ellipsoid projection did not converge in {MAX_PROJECTION_ITERATIONS} iterations, \
             bracket [{lo:e}, {hi:e}]"
        )));
    }
    Ok(semiaxes
        .iter()
        .zip(&y)
        .map(|(&s, &x)| {
            let s2 = s * s;
            if s2 == 0.0 {
                0.0
            } else {
                s2 * x / (s2 + lambda)
            }
        })
        .collect())
}

/// Fills in every repair that applies to `p` given its report from
/// [`crate::rigid_body::com_feasibility`].
///
/// Feasible bodies, tensors about the center of mass and tensors that are
/// not physical get no repair. The mass repair is absent when the center
/// leaves the plane of a planar body; the geometric repairs then drop the
/// out-of-plane components first.
pub fn suggest_repairs(p: &RigidBodyParams, report: &FeasibilityReport) -> RepairSuggestion {
    let margin = report.margin;
    if report.status != FeasibilityStatus::InfeasibleCenter
        || p.frame() == InertiaFrame::AboutCenterOfMass
    {
        return RepairSuggestion::empty(margin);
    }
    let Some(margin_value) = margin else {
        return RepairSuggestion::empty(margin);
    };

    // margin(M) = 1 − M·q for a fixed tensor and center, so M_max = M / (1 − margin)
    let max_mass = (report.null_violations.is_empty() && margin_value < 1.0)
        .then(|| p.mass() / (1.0 - margin_value));

    let frame = &report.principal;
    let com_principal: Vec<f64> = frame
        .mean_principal
        .iter()
        .zip(&report.semiaxes)
        .map(|(&x, &s)| if s > 0.0 { x } else { 0.0 })
        .collect();
    let to_body = |principal: Vec<f64>| -> [f64; 3] {
        let v = &frame.rotation * DVector::from_vec(principal);
        [v[0], v[1], v[2]]
    };

    let boundary_com = if ellipsoid_norm_sq(&report.semiaxes, &com_principal) > 1.0 {
        scale_com_to_boundary(&report.semiaxes, &com_principal).ok()
    } else {
        Some(com_principal.clone())
    }
    .map(to_body);
    let nearest_com = nearest_com_on_ellipsoid(&report.semiaxes, &com_principal)
        .ok()
        .map(to_body);

    RepairSuggestion {
        max_mass,
        boundary_com,
        nearest_com,
        original_margin: margin,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::ToleranceConfig;
    use crate::rigid_body::{com_feasibility, semiaxes};

    fn dist(a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn max_mass_examples() {
        match max_feasible_mass(10.0, 20.0, 30.0, &Vector3::new(2.0, 5.0, 0.0)).unwrap() {
            MassBound::Finite(m) => assert!((m - 1.0 / 2.7).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            max_feasible_mass(10.0, 20.0, 30.0, &Vector3::zeros()).unwrap(),
            MassBound::Unbounded
        );
        assert!(matches!(
            max_feasible_mass(10.0, 20.0, 30.0, &Vector3::new(0.0, 0.0, 1.0)),
            Err(Error::NoRepair(_))
        ));
        assert!(matches!(
            max_feasible_mass(1.0, 1.0, 3.0, &Vector3::new(1.0, 0.0, 0.0)),
            Err(Error::InfeasibleInertia(_))
        ));
    }

    #[test]
    fn scale_examples() {
        assert_eq!(
            scale_com_to_boundary(&[1.0, 1.0, 1.0], &[2.0, 0.0, 0.0]).unwrap(),
            vec![1.0, 0.0, 0.0]
        );
        let s = semiaxes(10.0, 20.0, 30.0, 300.0).unwrap().to_array();
        let out = scale_com_to_boundary(&s, &[2.0, 5.0, 0.0]).unwrap();
        let t = 1.0 / 810f64.sqrt();
        assert!((out[0] - 2.0 * t).abs() < 1e-12);
        assert!((out[1] - 5.0 * t).abs() < 1e-12);
        assert_eq!(out[2], 0.0);
        assert!((ellipsoid_norm_sq(&s, &out) - 1.0).abs() < 1e-9);

        let on = [0.6, 0.8];
        let out = scale_com_to_boundary(&[1.0, 1.0], &on).unwrap();
        assert!(dist(&on, &out) < 1e-9);

        assert!(matches!(
            scale_com_to_boundary(&[1.0, 1.0], &[0.0, 0.0]),
            Err(Error::InvalidInput(_))
        ));
        assert!(scale_com_to_boundary(&[1.0, 0.0], &[1.0, 1.0]).is_err());
        assert!(scale_com_to_boundary(&[1.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn nearest_examples() {
        let out = nearest_com_on_ellipsoid(&[1.0, 1.0, 1.0], &[2.0, 0.0, 0.0]).unwrap();
        assert!(dist(&out, &[1.0, 0.0, 0.0]) < 1e-12);
        let out = nearest_com_on_ellipsoid(&[2.0, 1.0], &[3.0, 0.0]).unwrap();
        assert!(dist(&out, &[2.0, 0.0]) < 1e-12);
        let out = nearest_com_on_ellipsoid(&[1.0, 1.0], &[0.2, 0.1]).unwrap();
        assert_eq!(out, vec![0.2, 0.1]);
        // a degenerate axis drops the out-of-plane component
        let out = nearest_com_on_ellipsoid(&[1.0, 1.0, 0.0], &[0.2, 0.1, 0.5]).unwrap();
        assert_eq!(out, vec![0.2, 0.1, 0.0]);
    }

    #[test]
    fn nearest_is_no_farther_than_radial() {
        let s = [3.0, 1.0, 0.5];
        let com = [4.0, 2.0, -1.0];
        let near = nearest_com_on_ellipsoid(&s, &com).unwrap();
        let radial = scale_com_to_boundary(&s, &com).unwrap();
        assert!((ellipsoid_norm_sq(&s, &near) - 1.0).abs() < 1e-9);
        assert!(dist(&com, &near) < dist(&com, &radial));
    }

    #[test]
    fn plate_repairs() {
        let p = RigidBodyParams::from_principal(
            10.0,
            20.0,
            30.0,
            300.0,
            Vector3::new(2.0, 5.0, 0.0),
            InertiaFrame::AboutReferencePoint,
        )
        .unwrap();
        let tol = ToleranceConfig::default();
        let report = com_feasibility(&p, &tol).unwrap();
        let fix = suggest_repairs(&p, &report);
        assert!((fix.max_mass.unwrap() - 0.370370).abs() < 1e-6);
        assert!(fix.original_margin.unwrap() < 0.0);
        for com in [fix.boundary_com.unwrap(), fix.nearest_com.unwrap()] {
            let moved = p.with_com(Vector3::from(com)).unwrap();
            let r = com_feasibility(&moved, &tol).unwrap();
            assert_eq!(r.status, FeasibilityStatus::Boundary, "{com:?}");
        }
        let lighter = p.with_mass(fix.max_mass.unwrap()).unwrap();
        assert_eq!(
            com_feasibility(&lighter, &tol).unwrap().status,
            FeasibilityStatus::Boundary
        );
    }

    #[test]
    fn feasible_body_gets_no_repair() {
        let p = RigidBodyParams::from_principal(
            2.0,
            2.0,
            2.0,
            1.0,
            Vector3::new(0.1, 0.0, 0.0),
            InertiaFrame::AboutReferencePoint,
        )
        .unwrap();
        let report = com_feasibility(&p, &ToleranceConfig::default()).unwrap();
        let fix = suggest_repairs(&p, &report);
        assert_eq!(fix.max_mass, None);
        assert_eq!(fix.boundary_com, None);
        assert_eq!(fix.nearest_com, None);
        assert!(fix.original_margin.unwrap() >= 0.0);
    }

    #[test]
    fn planar_body_out_of_plane_com() {
        let p = RigidBodyParams::from_principal(
            10.0,
            20.0,
            30.0,
            300.0,
            Vector3::new(2.0, 5.0, 0.1),
            InertiaFrame::AboutReferencePoint,
        )
        .unwrap();
        let tol = ToleranceConfig::default();
        let report = com_feasibility(&p, &tol).unwrap();
        assert!(!report.null_violations.is_empty());
        let fix = suggest_repairs(&p, &report);
        assert_eq!(fix.max_mass, None);
        let near = fix.nearest_com.unwrap();
        let radial = fix.boundary_com.unwrap();
        assert!(near[2].abs() < 1e-15 && radial[2].abs() < 1e-15);
        for com in [near, radial] {
            let r = com_feasibility(&p.with_com(Vector3::from(com)).unwrap(), &tol).unwrap();
            assert!(r.status.is_feasible());
        }
    }
}
