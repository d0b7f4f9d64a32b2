//! Numerical toolkit for curves in the standard S-manifold model spaces
//! R^{2m+s}(-3s): framed metric structure tensors and their Levi-Civita
//! connection, Frenet frames and curvatures along curves by exact jet
//! arithmetic, contact-angle and C-parallel / C-proper classification, and
//! synthesis of the special helices those conditions characterize.
//!
//! Modules:
//! - [`ambient`]: the model space (phi, xi_a, eta^a, g), Christoffel symbols,
//!   and a randomized structure-equation test suite.
//! - [`curvelang`]: curve expression language with exact symbolic derivatives
//!   and nested definite integrals.
//! - [`frenet`]: covariant derivatives along a curve, Frenet apparatus, and
//!   the four mean-curvature operator fields by two independent routes.
//! - [`classify`]: contact angle, C-parallel / C-proper detection with
//!   lambda recovery, and the four characterization checklists.
//! - [`synth`]: construction of helices realizing the characterizations by
//!   integrating the ambient Frenet system.

pub mod ambient;
pub mod classify;
pub mod curvelang;
pub mod frenet;
pub mod jet;
pub mod synth;

pub mod assets;

pub use ambient::{
    AmbientError, AxiomReport, Christoffel, ManifoldShape, ModelSpace, Point, Tangent,
};
pub use curvelang::{parse_curve_file, parse_expr, CurveDef, Expr, Jet};

/// Numeric tolerances used across the pipeline, with their defaults.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Absolute tolerance for adaptive quadrature.
    pub quad_tol: f64,
    /// Allowed deviation of |gamma'| from 1 on the grid.
    pub speed_tol: f64,
    /// Relative Gram-Schmidt residual below which the osculating order ends.
    pub rank_tol: f64,
    /// Allowed frame-orthonormality defect.
    pub frame_tol: f64,
    /// Allowed spread of eta^a(T) for a slant verdict.
    pub slant_tol: f64,
    /// Allowed defect |W - lambda * xi_sum| for granting a class.
    pub class_tol: f64,
    /// Minimum |lambda| for the "non-zero function" requirement.
    pub lambda_tol: f64,
    /// max - min below which a sampled function counts as constant.
    pub const_tol: f64,
    /// Normalized projection residual for span membership.
    pub span_tol: f64,
    /// Residual bound for theorem checklist identities.
    pub checklist_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            quad_tol: 1e-10,
            speed_tol: 1e-6,
            rank_tol: 1e-8,
            frame_tol: 1e-6,
            slant_tol: 1e-6,
            class_tol: 1e-5,
            lambda_tol: 1e-6,
            const_tol: 1e-6,
            span_tol: 1e-5,
            checklist_tol: 1e-4,
        }
    }
}

/// Uniform sample grid over [a, b] with n points (n >= 2).
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "need at least two grid points");
    let h = (b - a) / (n - 1) as f64;
    (0..n).map(|j| a + h * j as f64).collect()
}
