//! Rigid-body inertial parameters as moment data.
//!
//! For a body of mass `M` with inertia tensor `J` about a point `O`, the
//! mass-normalized second-moment matrix about `O` is
//! `Σ = ((tr J / 2)·I − J) / M`. The center of mass must then lie in the
//! ellipsoid of [`crate::moments::classify`]; in the principal frame its
//! semiaxes are `a² = (B+C−A)/2M`, `b² = (C+A−B)/2M`, `c² = (A+B−C)/2M`.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::moments::{classify, FeasibilityReport, MomentSet, ToleranceConfig};

/// Accepted asymmetry of an input inertia tensor, relative to its largest entry.
pub const INERTIA_ASYMMETRY_TOL: f64 = 1e-12;

/// The point an inertia tensor is taken about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InertiaFrame {
    /// About a reference point; the center of mass is given relative to it.
    #[serde(rename = "reference_point")]
    AboutReferencePoint,
    /// About the center of mass itself. Only tensor validity can be checked.
    #[serde(rename = "center_of_mass")]
    AboutCenterOfMass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RigidBodyParams {
    mass: f64,
    inertia: Matrix3<f64>,
    com: Vector3<f64>,
    frame: InertiaFrame,
}

impl RigidBodyParams {
    pub fn new(
        mass: f64,
        inertia: Matrix3<f64>,
        com: Vector3<f64>,
        frame: InertiaFrame,
    ) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidInput(format!(
                "mass must be positive and finite, got {mass}"
            )));
        }
        if inertia.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "inertia tensor has non-finite entries".to_string(),
            ));
        }
        if com.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "center of mass has non-finite entries".to_string(),
            ));
        }
        let scale = inertia.amax().max(1.0);
        if (inertia - inertia.transpose()).amax() > INERTIA_ASYMMETRY_TOL * scale {
            return Err(Error::InvalidInput(
                "inertia tensor is not symmetric".to_string(),
            ));
        }
        Ok(RigidBodyParams {
            mass,
            inertia: (inertia + inertia.transpose()) * 0.5,
            com,
            frame,
        })
    }

    /// Body whose tensor is diagonal with principal moments `(A, B, C)`.
    pub fn from_principal(
        a: f64,
        b: f64,
        c: f64,
        mass: f64,
        com: Vector3<f64>,
        frame: InertiaFrame,
    ) -> Result<Self> {
        RigidBodyParams::new(
            mass,
            Matrix3::from_diagonal(&Vector3::new(a, b, c)),
            com,
            frame,
        )
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn inertia(&self) -> &Matrix3<f64> {
        &self.inertia
    }

    pub fn com(&self) -> &Vector3<f64> {
        &self.com
    }

    pub fn frame(&self) -> InertiaFrame {
        self.frame
    }

    pub fn with_mass(&self, mass: f64) -> Result<Self> {
        RigidBodyParams::new(mass, self.inertia, self.com, self.frame)
    }

    pub fn with_com(&self, com: Vector3<f64>) -> Result<Self> {
        RigidBodyParams::new(self.mass, self.inertia, com, self.frame)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriangleClass {
    Valid,
    /// One inequality holds with equality: the body is planar.
    Degenerate,
    Invalid,
}

/// `1e-12 · max(A, B, C, 1)`.
pub fn triangle_tolerance(a: f64, b: f64, c: f64) -> f64 {
    1e-12 * a.max(b).max(c).max(1.0)
}

/// Classifies principal moments against the triangle inequalities.
pub fn triangle_check(a: f64, b: f64, c: f64) -> Result<TriangleClass> {
    if ![a, b, c].iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidInput(
            "principal moments must be finite".to_string(),
        ));
    }
    let tau = triangle_tolerance(a, b, c);
    if [a, b, c].iter().any(|&v| v < -tau) {
        return Err(Error::InvalidInput(format!(
            "negative principal moment in ({a}, {b}, {c})"
        )));
    }
    let gaps = triangle_gaps(a, b, c);
    if gaps.iter().any(|&g| g < -tau) {
        Ok(TriangleClass::Invalid)
    } else if gaps.iter().any(|&g| g <= tau) {
        Ok(TriangleClass::Degenerate)
    } else {
        Ok(TriangleClass::Valid)
    }
}

/// `(B+C−A, C+A−B, A+B−C)`.
pub fn triangle_gaps(a: f64, b: f64, c: f64) -> [f64; 3] {
    [b + c - a, c + a - b, a + b - c]
}

/// Semiaxes of the ellipsoid of admissible centers of mass, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemiAxes {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl SemiAxes {
    /// Takes square roots of the three radicands, which must be non-negative.
    pub fn from_squares(a2: f64, b2: f64, c2: f64) -> Result<Self> {
        for (name, v) in [("a", a2), ("b", b2), ("c", c2)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidInput(format!(
                    "semiaxis {name} has invalid radicand {v}"
                )));
            }
        }
        Ok(SemiAxes {
            a: a2.sqrt(),
            b: b2.sqrt(),
            c: c2.sqrt(),
        })
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }
}

/// Semiaxes from principal moments `(A, B, C)` and mass `M`. Radicands
/// within the triangle tolerance of zero are clamped to zero.
pub fn semiaxes(a: f64, b: f64, c: f64, mass: f64) -> Result<SemiAxes> {
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::InvalidInput(format!(
            "mass must be positive and finite, got {mass}"
        )));
    }
    if triangle_check(a, b, c)? == TriangleClass::Invalid {
        return Err(Error::InfeasibleInertia(format!(
            "principal moments ({a}, {b}, {c}) violate the triangle inequalities"
        )));
    }
    let [da, db, dc] = triangle_gaps(a, b, c).map(|g| g.max(0.0) / (2.0 * mass));
    SemiAxes::from_squares(da, db, dc)
}

/// `((tr J / 2)·I − J) / M` without any validity check.
pub fn second_moment_matrix(inertia: &Matrix3<f64>, mass: f64) -> Matrix3<f64> {
    (Matrix3::identity() * (0.5 * inertia.trace()) - inertia) / mass
}

/// Eigenvalues (descending) and eigenvectors of an inertia tensor.
pub fn principal_moments(inertia: &Matrix3<f64>) -> Result<(Vector3<f64>, Matrix3<f64>)> {
    let dense = DMatrix::from_column_slice(3, 3, inertia.as_slice());
    let eig = linalg::jacobi_eigen(&dense)?;
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| eig.values[j].total_cmp(&eig.values[i]).then(i.cmp(&j)));
    let values = Vector3::from_fn(|i, _| eig.values[order[i]]);
    let vectors = Matrix3::from_fn(|r, c| eig.vectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Moment data of a body: `mean = com` for a tensor about a reference point,
/// `mean = 0` for a tensor about the center of mass.
pub fn inertia_to_moment_set(p: &RigidBodyParams) -> Result<MomentSet> {
    inertia_to_moment_set_with(p, &ToleranceConfig::default())
}

pub fn inertia_to_moment_set_with(p: &RigidBodyParams, tol: &ToleranceConfig) -> Result<MomentSet> {
    let m = moment_set_unchecked(p)?;
    let eig = linalg::jacobi_eigen(m.second())?;
    let largest = eig.values.amax();
    let smallest = eig.values.min();
    if smallest < -tol.eig_threshold(largest) {
        return Err(Error::InfeasibleInertia(format!(
            "second-moment matrix has eigenvalue {smallest:e}; the inertia tensor violates \
             the triangle inequalities"
        )));
    }
    Ok(m)
}

/// Like [`inertia_to_moment_set`] but without rejecting tensors that no
/// real body can have, so that they can still be diagnosed.
pub fn moment_set_unchecked(p: &RigidBodyParams) -> Result<MomentSet> {
    let second = second_moment_matrix(&p.inertia, p.mass);
    let mean = match p.frame {
        InertiaFrame::AboutReferencePoint => p.com,
        InertiaFrame::AboutCenterOfMass => Vector3::zeros(),
    };
    MomentSet::new(
        DVector::from_column_slice(mean.as_slice()),
        DMatrix::from_column_slice(3, 3, second.as_slice()),
    )
}

/// Checks whether the center of mass is compatible with mass and tensor.
///
/// For [`InertiaFrame::AboutCenterOfMass`] the center is the origin by
/// definition, so this only verifies that the tensor is physical.
pub fn com_feasibility(p: &RigidBodyParams, tol: &ToleranceConfig) -> Result<FeasibilityReport> {
    let m = inertia_to_moment_set_with(p, tol)?;
    classify(&m, tol)
}

/// Parallel-axis shift `J_O = J_C + M(|r|²·I − r·rᵀ)`, where `r` is the
/// center of mass relative to the new reference point `O`.
pub fn parallel_axis(
    inertia_about_com: &Matrix3<f64>,
    mass: f64,
    r: &Vector3<f64>,
) -> Matrix3<f64> {
    inertia_about_com + (Matrix3::identity() * r.norm_squared() - r * r.transpose()) * mass
}

/// Inverse of [`parallel_axis`].
pub fn shift_to_center_of_mass(
    inertia_about_point: &Matrix3<f64>,
    mass: f64,
    r: &Vector3<f64>,
) -> Matrix3<f64> {
    inertia_about_point - (Matrix3::identity() * r.norm_squared() - r * r.transpose()) * mass
}
