//! Constant-width surfaces in E3, modelled through a complex coordinate on
//! the space of oriented lines.
//!
//! A convex body is described by its support function `r` on the unit sphere
//! of directions. The sphere is charted by stereographic projection, so `r`
//! becomes a function of a complex variable `xi`, and the geometry of the
//! body (embedding, curvature, focal sets, measures) is read off from the
//! first two derivatives of `r` in `xi` and `conj(xi)`.

pub mod congruence;
pub mod focal;
pub mod measures;
pub mod poly;
pub mod sphere;
pub mod support;
pub mod symmetry;

use thiserror::Error;

/// Complex scalar used throughout.
pub type C = num_complex::Complex64;

/// Errors shared by every module in the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A direction left the chart (south pole, or a rotation mapped onto it).
    #[error("direction leaves the coordinate chart: {0}")]
    ChartExit(String),
    /// Denominator polynomial vanishes (or nearly vanishes) on the sphere.
    #[error("denominator vanishes on the sphere (min |Q| = {0:e})")]
    DenominatorVanishes(f64),
    /// A coefficient matrix that must be hermitian is not.
    #[error("coefficient matrix is not hermitian (deviation {0:e})")]
    NotHermitian(f64),
    /// Width deviation too large for an operation that requires constant width.
    #[error("width deviation {dev:e} exceeds tolerance {tol:e}")]
    WidthViolation { dev: f64, tol: f64 },
    /// Shrinking collapses the body to a point.
    #[error("shrink limit is degenerate: the body collapses to a point")]
    DegenerateShrink,
    /// An equation that should select finitely many roots vanishes identically.
    #[error("equation vanishes identically: {0}")]
    DegenerateEquation(String),
    /// A constant-width constraint cannot be satisfied.
    #[error("constant-width constraint unsatisfiable: {0}")]
    Unsatisfiable(String),
    /// A mesh operation needs a closed surface but edges do not pair up.
    #[error("mesh is not closed ({0} unmatched directed edges)")]
    OpenMesh(usize),
    /// Catch-all for invalid arguments.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub use congruence::{
    cross_section_csv, embed, mesh, normal_line, obj_export, obj_points, rotsym_parametric,
    SurfaceMesh,
};
pub use focal::{
    convexity_margin, focal_cloud, focal_points, focal_radii, focal_sweep_obj, rotsym_cusps,
    rotsym_focal, rotsym_focal_csv, shrink_limit, FocalData, MarginReport, RotsymFocal,
    ShrinkReport,
};
pub use measures::{
    area, di_dc, iso_ratio, measure, mesh_volume, volume_cw, width_deficit, MeasureReport,
};
pub use sphere::{
    antipodal, build_quadrature, from_angles, line_to_point, moebius_rotate, to_angles,
    EuclideanPoint, OrientedLine, QuadNode, QuadratureGrid, RotationElement, SphereAngles,
};
pub use support::{
    check_constant_width, check_rational_cw, example_family, make_cw_numerator, shift,
    sphere_support, translate, CwCheck, RationalSupport, RotSymSupport, SupportFunction,
    SupportJet, WidthReport,
};
pub use symmetry::{
    average_support, cyclic_group, default_orientation, tetrahedral_group, verify_invariance,
    PointGroup,
};
