//! First/second moment feasibility.
//!
//! A normalized non-negative distribution with mean `x̄` and second-moment
//! matrix `S` (about the origin) must have its mean inside or on the
//! ellipsoid whose principal axes are the eigenvectors of `S` and whose
//! semiaxes are the square roots of its eigenvalues. Equivalently the
//! bordered matrix
//!
//! ```text
//!     | 1   x̄ᵀ |
//! A = |        |
//!     | x̄   S  |
//! ```
//!
//! is positive semidefinite. In the principal frame of `S` the test becomes
//! `Σ ξ̄ᵢ² / λᵢ ≤ 1` over the non-zero eigenvalues, with `ξ̄ᵢ = 0` required
//! along every zero eigenvalue.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Largest supported dimension of a moment set.
pub const MAX_DIMENSION: usize = 64;

/// Entry-wise asymmetry accepted (and averaged away) when building a
/// [`MomentSet`], relative to `max(1, max |sᵢⱼ|)`.
pub const ASYMMETRY_TOL: f64 = 1e-9;

/// Tie tolerance when picking the dominant component of an eigenvector.
const SIGN_TIE_TOL: f64 = 1e-12;

/// Numerical thresholds used by [`classify`] and friends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceConfig {
    /// Eigenvalues with `|λ| ≤ eig_rel_tol · max(|λ|max, 1)` count as zero.
    pub eig_rel_tol: f64,
    /// Margins with `|margin| ≤ boundary_tol` are reported as on the boundary.
    pub boundary_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            eig_rel_tol: 1e-10,
            boundary_tol: 1e-9,
        }
    }
}

impl ToleranceConfig {
    pub fn new(eig_rel_tol: f64, boundary_tol: f64) -> Result<Self> {
        let tol = ToleranceConfig {
            eig_rel_tol,
            boundary_tol,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(self.eig_rel_tol) {
            return Err(Error::InvalidInput(format!(
                "eig_rel_tol must be positive and finite, got {}",
                self.eig_rel_tol
            )));
        }
        if !ok(self.boundary_tol) {
            return Err(Error::InvalidInput(format!(
                "boundary_tol must be positive and finite, got {}",
                self.boundary_tol
            )));
        }
        Ok(())
    }

    /// Absolute zero-threshold for eigenvalues, given the largest magnitude.
    pub fn eig_threshold(&self, largest_abs_eigenvalue: f64) -> f64 {
        self.eig_rel_tol * largest_abs_eigenvalue.max(1.0)
    }
}

/// Mean vector and second-moment matrix (about the origin) of a normalized
/// distribution. The matrix is stored exactly symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSet {
    mean: DVector<f64>,
    second: DMatrix<f64>,
}

impl MomentSet {
    /// Validates dimensions and finiteness, rejects gross asymmetry and
    /// stores `(S + Sᵀ)/2`.
    pub fn new(mean: DVector<f64>, second: DMatrix<f64>) -> Result<Self> {
        let n = mean.len();
        if n == 0 {
            return Err(Error::InvalidInput(
                "dimension must be at least 1".to_string(),
            ));
        }
        if n > MAX_DIMENSION {
            return Err(Error::InvalidInput(format!(
                "dimension {n} exceeds the supported maximum {MAX_DIMENSION}"
            )));
        }
        if second.nrows() != n || second.ncols() != n {
            return Err(Error::InvalidInput(format!(
                "second-moment matrix is {}x{} but mean has length {n}",
                second.nrows(),
                second.ncols()
            )));
        }
        if mean.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "mean has non-finite entries".to_string(),
            ));
        }
        if second.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "second-moment matrix has non-finite entries".to_string(),
            ));
        }
        let scale = second.amax().max(1.0);
        for i in 0..n {
            for j in i + 1..n {
                let gap = (second[(i, j)] - second[(j, i)]).abs();
                if gap > ASYMMETRY_TOL * scale {
                    return Err(Error::InvalidInput(format!(
                        "second-moment matrix is not symmetric: entries ({i},{j}) and ({j},{i}) differ by {gap:e}"
                    )));
                }
            }
        }
        let second = (&second + second.transpose()) * 0.5;
        Ok(MomentSet { mean, second })
    }

    /// Builds a moment set from a mean slice and a row-major list of rows.
    pub fn from_rows(mean: &[f64], second: &[Vec<f64>]) -> Result<Self> {
        let n = mean.len();
        if second.len() != n || second.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidInput(format!(
                "second-moment matrix must be {n}x{n} to match the mean"
            )));
        }
        let flat: Vec<f64> = second.iter().flatten().copied().collect();
        MomentSet::new(
            DVector::from_column_slice(mean),
            DMatrix::from_row_slice(n, n, &flat),
        )
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn second(&self) -> &DMatrix<f64> {
        &self.second
    }

    /// Rows of the second-moment matrix, for serialization.
    pub fn second_rows(&self) -> Vec<Vec<f64>> {
        self.second
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }
}

/// The `(n+1)×(n+1)` bordered matrix `[[1, x̄ᵀ], [x̄, S]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedMatrix(DMatrix<f64>);

impl AugmentedMatrix {
    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }
}

pub fn augmented_matrix(m: &MomentSet) -> AugmentedMatrix {
    AugmentedMatrix(bordered(m.second(), m.mean()))
}

fn bordered(second: &DMatrix<f64>, border: &DVector<f64>) -> DMatrix<f64> {
    let n = border.len();
    DMatrix::from_fn(n + 1, n + 1, |i, j| match (i, j) {
        (0, 0) => 1.0,
        (0, j) => border[j - 1],
        (i, 0) => border[i - 1],
        (i, j) => second[(i - 1, j - 1)],
    })
}

/// Eigen-decomposition of the second-moment matrix, with the mean expressed
/// in the eigenvector basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalFrame {
    /// Sorted descending.
    pub eigenvalues: DVector<f64>,
    /// Proper rotation whose columns are the eigenvectors.
    pub rotation: DMatrix<f64>,
    /// `rotationᵀ · mean`.
    pub mean_principal: DVector<f64>,
}

/// Diagonalizes the second-moment matrix.
///
/// Eigenvalues come out descending. Every eigenvector except the last has
/// its dominant component (the first one of largest magnitude) non-negative;
/// the last column's sign is then fixed so that the rotation has
/// determinant +1.
pub fn principal_frame(m: &MomentSet) -> Result<PrincipalFrame> {
    let n = m.dim();
    let eig = linalg::jacobi_eigen(m.second())?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.values[j]
            .partial_cmp(&eig.values[i])
            .expect("eigenvalues are finite")
            .then(i.cmp(&j))
    });

    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| eig.values[i]));
    let mut rotation = DMatrix::from_fn(n, n, |r, c| eig.vectors[(r, order[c])]);

    for c in 0..n.saturating_sub(1) {
        if dominant_component(&rotation, c) < 0.0 {
            rotation.column_mut(c).neg_mut();
        }
    }
    if linalg::determinant(&rotation) < 0.0 {
        rotation.column_mut(n - 1).neg_mut();
    }

    let mean_principal = rotation.transpose() * m.mean();
    Ok(PrincipalFrame {
        eigenvalues,
        rotation,
        mean_principal,
    })
}

fn dominant_component(rotation: &DMatrix<f64>, col: usize) -> f64 {
    let column = rotation.column(col);
    let largest = column.amax();
    column
        .iter()
        .copied()
        .find(|v| v.abs() >= largest - SIGN_TIE_TOL)
        .unwrap_or(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeasibilityStatus {
    StrictInterior,
    Boundary,
    InfeasibleCenter,
    InvalidSecondMoments,
}

impl FeasibilityStatus {
    /// True for the two statuses a real distribution can produce.
    pub fn is_feasible(self) -> bool {
        matches!(
            self,
            FeasibilityStatus::StrictInterior | FeasibilityStatus::Boundary
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FeasibilityStatus::StrictInterior => "strict_interior",
            FeasibilityStatus::Boundary => "boundary",
            FeasibilityStatus::InfeasibleCenter => "infeasible_center",
            FeasibilityStatus::InvalidSecondMoments => "invalid_second_moments",
        }
    }
}

impl std::fmt::Display for FeasibilityStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A principal direction with a zero eigenvalue along which the mean does
/// not vanish.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NullViolation {
    /// Index into the descending eigenvalue order.
    pub direction: usize,
    /// `|ξ̄ᵢ|`.
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub status: FeasibilityStatus,
    /// `1 − Σ ξ̄ᵢ²/λᵢ` over the non-zero eigenvalues; absent for
    /// [`FeasibilityStatus::InvalidSecondMoments`].
    pub margin: Option<f64>,
    /// `ξ̄ᵢ²/λᵢ` for the non-zero eigenvalues, which are the leading entries
    /// of the descending order.
    pub axis_ratios: Vec<f64>,
    pub null_violations: Vec<NullViolation>,
    /// `√λᵢ`, with eigenvalues inside the zero band clamped to 0.
    pub semiaxes: Vec<f64>,
    pub principal: PrincipalFrame,
    /// Absolute eigenvalue threshold that was applied.
    pub eig_threshold: f64,
}

/// Decides whether the mean of `m` is attainable given its second moments.
pub fn classify(m: &MomentSet, tol: &ToleranceConfig) -> Result<FeasibilityReport> {
    tol.validate()?;
    let principal = principal_frame(m)?;
    let largest = principal.eigenvalues.amax();
    let tau = tol.eig_threshold(largest);

    let semiaxes: Vec<f64> = principal
        .eigenvalues
        .iter()
        .map(|&l| if l > tau { l.sqrt() } else { 0.0 })
        .collect();

    if principal.eigenvalues.iter().any(|&l| l < -tau) {
        return Ok(FeasibilityReport {
            status: FeasibilityStatus::InvalidSecondMoments,
            margin: None,
            axis_ratios: Vec::new(),
            null_violations: Vec::new(),
            semiaxes,
            principal,
            eig_threshold: tau,
        });
    }

    let null_tol = tau.sqrt();
    let mut axis_ratios = Vec::new();
    let mut null_violations = Vec::new();
    for (i, (&lambda, &xi)) in principal
        .eigenvalues
        .iter()
        .zip(principal.mean_principal.iter())
        .enumerate()
    {
        if lambda > tau {
            axis_ratios.push(xi * xi / lambda);
        } else if xi.abs() > null_tol {
            null_violations.push(NullViolation {
                direction: i,
                magnitude: xi.abs(),
            });
        }
    }
    let margin = 1.0 - axis_ratios.iter().sum::<f64>();

    let status = if !null_violations.is_empty() || margin < -tol.boundary_tol {
        FeasibilityStatus::InfeasibleCenter
    } else if margin.abs() <= tol.boundary_tol {
        FeasibilityStatus::Boundary
    } else {
        FeasibilityStatus::StrictInterior
    };

    Ok(FeasibilityReport {
        status,
        margin: Some(margin),
        axis_ratios,
        null_violations,
        semiaxes,
        principal,
        eig_threshold: tau,
    })
}

/// Determinant of the bordered matrix with `x` in place of the mean.
///
/// Zero on the admissible ellipsoid's surface; for non-singular `S` it equals
/// `det(S)·(1 − xᵀS⁻¹x)`.
pub fn surface_residual(m: &MomentSet, x: &DVector<f64>) -> Result<f64> {
    if x.len() != m.dim() {
        return Err(Error::InvalidInput(format!(
            "point has length {} but the moment set has dimension {}",
            x.len(),
            m.dim()
        )));
    }
    Ok(linalg::determinant(&bordered(m.second(), x)))
}

/// Per-axis bound `ξ̄ᵢ² ≤ λᵢ`, the bounding box of the admissible ellipsoid.
///
/// Uses the same tolerances as [`classify`], so every axis passes whenever
/// `classify` reports a feasible status.
pub fn cuboid_check(m: &MomentSet, tol: &ToleranceConfig) -> Result<Vec<bool>> {
    tol.validate()?;
    let principal = principal_frame(m)?;
    let tau = tol.eig_threshold(principal.eigenvalues.amax());
    Ok(principal
        .eigenvalues
        .iter()
        .zip(principal.mean_principal.iter())
        .map(|(&lambda, &xi)| {
            let sq = xi * xi;
            if lambda > tau {
                sq <= lambda * (1.0 + tol.boundary_tol)
            } else if lambda >= -tau {
                sq <= tau
            } else {
                false
            }
        })
        .collect())
}

/// `Γ(two_z / 2)` by the recursion `Γ(z+1) = zΓ(z)` from `Γ(1) = 1` and
/// `Γ(1/2) = √π`.
pub fn half_integer_gamma(two_z: u32) -> Result<f64> {
    if two_z == 0 {
        return Err(Error::InvalidInput(
            "gamma argument must be positive".to_string(),
        ));
    }
    let value = if two_z.is_multiple_of(2) {
        (1..two_z / 2).fold(1.0, |acc, k| acc * k as f64)
    } else {
        (1..=(two_z - 1) / 2).fold(std::f64::consts::PI.sqrt(), |acc, k| acc * (k as f64 - 0.5))
    };
    Ok(value)
}

/// Volume of the admissible ellipsoid divided by the volume of its bounding
/// box in dimension `n`: `(√π/2)ⁿ / Γ(1 + n/2)`. Independent of the semiaxes.
pub fn volume_ratio(n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput(
            "volume ratio needs a positive dimension".to_string(),
        ));
    }
    let half_sqrt_pi = 0.5 * std::f64::consts::PI.sqrt();
    Ok(half_sqrt_pi.powi(n as i32) / half_integer_gamma(n + 2)?)
}
