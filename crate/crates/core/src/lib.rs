//! Feasibility checks for first and second moment data.
//!
//! Given the mean and the second-moment matrix of a distribution (or the
//! mass, inertia tensor and center of mass of a rigid body) this crate
//! decides whether the data can come from a real non-negative distribution,
//! explains violations and proposes minimal repairs.
//!
//! - [`moments`]: the bordered-matrix condition and its principal-frame form.
//! - [`rigid_body`]: inertia tensors as moment data, triangle inequalities.
//! - [`repair`]: maximum admissible mass and center-of-mass projections.
//! - [`oracle`]: discrete distributions and brute-force references.
//! - [`ingest`]: JSON jobs, URDF links and reports.

pub mod error;
pub mod ingest;
pub mod linalg;
pub mod moments;
pub mod oracle;
pub mod repair;
pub mod rigid_body;
pub mod selftest;

pub use error::{Error, Result};
pub use moments::{
    augmented_matrix, classify, cuboid_check, half_integer_gamma, principal_frame,
    surface_residual, volume_ratio, AugmentedMatrix, FeasibilityReport, FeasibilityStatus,
    MomentSet, NullViolation, PrincipalFrame, ToleranceConfig,
};
pub use repair::{
    max_feasible_mass, nearest_com_on_ellipsoid, scale_com_to_boundary, suggest_repairs, MassBound,
    RepairSuggestion,
};
pub use rigid_body::{
    com_feasibility, inertia_to_moment_set, parallel_axis, semiaxes, triangle_check, InertiaFrame,
    RigidBodyParams, SemiAxes, TriangleClass,
};
