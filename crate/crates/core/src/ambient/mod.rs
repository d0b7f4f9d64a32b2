//! The ambient model space: a (2m+s)-dimensional framed metric structure
//! (phi, xi_a, eta^a, g) on coordinates (x_1..x_m, y_1..y_m, z_1..z_s),
//! together with its Levi-Civita connection.
//!
//! Conventions (fixed for the whole crate):
//!   eta^a = (dz_a - sum_i y_i dx_i) / 2
//!   xi_a  = 2 d/dz_a
//!   g     = sum_a eta^a (x) eta^a + (sum_i dx_i^2 + dy_i^2) / 4
//!   phi(X dx + Y dy + Z dz) = Y dx - X dy + (Y . y) sum_a dz_a
//!
//! With these choices the structure equations hold identically; the axiom
//! suite ([`ModelSpace::verify_axioms`]) checks them at random points as a
//! guard against transcription errors.

mod tensors;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

use crate::jet::Jet;

#[derive(Debug, Error)]
pub enum AmbientError {
    #[error("characteristic index {alpha} out of range (s = {s})")]
    IndexOutOfRange { alpha: usize, s: usize },
    #[error("shape invalid: need m >= 1 and s >= 1, got m = {m}, s = {s}")]
    InvalidShape { m: usize, s: usize },
    #[error("metric inversion failed (internal error: metric must be positive definite)")]
    SingularMetric,
    #[error("coordinate vector has wrong dimension: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite coordinate entry")]
    NonFinite,
}

/// The pair (m, s) fixing the model space of dimension 2m+s.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ManifoldShape {
    m: usize,
    s: usize,
}

impl ManifoldShape {
    pub fn new(m: usize, s: usize) -> Result<Self, AmbientError> {
        if m < 1 || s < 1 {
            return Err(AmbientError::InvalidShape { m, s });
        }
        Ok(ManifoldShape { m, s })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn s(&self) -> usize {
        self.s
    }

    /// Ambient dimension 2m+s.
    pub fn dim(&self) -> usize {
        2 * self.m + self.s
    }
}

/// A position in the coordinate chart, stored flat as
/// (x_1..x_m, y_1..y_m, z_1..z_s).
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(shape: ManifoldShape, coords: Vec<f64>) -> Result<Self, AmbientError> {
        if coords.len() != shape.dim() {
            return Err(AmbientError::DimensionMismatch {
                expected: shape.dim(),
                got: coords.len(),
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(AmbientError::NonFinite);
        }
        Ok(Point { coords })
    }

    pub fn origin(shape: ManifoldShape) -> Self {
        Point {
            coords: vec![0.0; shape.dim()],
        }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// The y-block of the coordinates (all the metric depends on).
    pub fn y(&self, shape: ManifoldShape) -> &[f64] {
        &self.coords[shape.m..2 * shape.m]
    }
}

/// A tangent vector in coordinate components, same layout as [`Point`].
#[derive(Debug, Clone, PartialEq)]
pub struct Tangent {
    components: Vec<f64>,
}

impl Tangent {
    pub fn new(components: Vec<f64>) -> Self {
        Tangent { components }
    }

    pub fn zero(dim: usize) -> Self {
        Tangent {
            components: vec![0.0; dim],
        }
    }

    /// Unit coordinate direction (not metrically normalized).
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut components = vec![0.0; dim];
        components[index] = 1.0;
        Tangent { components }
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn dx(&self, shape: ManifoldShape) -> &[f64] {
        &self.components[..shape.m]
    }

    pub fn dy(&self, shape: ManifoldShape) -> &[f64] {
        &self.components[shape.m..2 * shape.m]
    }

    pub fn dz(&self, shape: ManifoldShape) -> &[f64] {
        &self.components[2 * shape.m..]
    }

    pub fn add(&self, rhs: &Tangent) -> Tangent {
        Tangent::new(
            self.components
                .iter()
                .zip(&rhs.components)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, rhs: &Tangent) -> Tangent {
        Tangent::new(
            self.components
                .iter()
                .zip(&rhs.components)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn scale(&self, c: f64) -> Tangent {
        Tangent::new(self.components.iter().map(|a| c * a).collect())
    }

    /// self + c * rhs
    pub fn axpy(&self, c: f64, rhs: &Tangent) -> Tangent {
        Tangent::new(
            self.components
                .iter()
                .zip(&rhs.components)
                .map(|(a, b)| a + c * b)
                .collect(),
        )
    }
}

/// Christoffel symbols at a point, `gamma[k][i][j]` with upper index first.
#[derive(Debug, Clone)]
pub struct Christoffel {
    entries: Vec<Vec<Vec<f64>>>,
}

impl Christoffel {
    pub fn entry(&self, k: usize, i: usize, j: usize) -> f64 {
        self.entries[k][i][j]
    }

    /// Contraction Gamma(u, v)^k = Gamma^k_ij u^i v^j.
    pub fn contract(&self, u: &Tangent, v: &Tangent) -> Tangent {
        let n = self.entries.len();
        let mut out = vec![0.0; n];
        for (k, slot) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for i in 0..n {
                let ui = u.components()[i];
                if ui == 0.0 {
                    continue;
                }
                for j in 0..n {
                    acc += self.entries[k][i][j] * ui * v.components()[j];
                }
            }
            *slot = acc;
        }
        Tangent::new(out)
    }
}

/// Maximum residual observed per structure equation over the sampled
/// points and vectors.
#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub shape_m: usize,
    pub shape_s: usize,
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub residuals: BTreeMap<String, f64>,
    pub passed: bool,
}

/// The model space with its structure tensors and connection.
#[derive(Debug, Clone, Copy)]
pub struct ModelSpace {
    shape: ManifoldShape,
}

impl ModelSpace {
    pub fn new(shape: ManifoldShape) -> Self {
        ModelSpace { shape }
    }

    pub fn shape(&self) -> ManifoldShape {
        self.shape
    }

    pub fn dim(&self) -> usize {
        self.shape.dim()
    }

    fn check_alpha(&self, alpha: usize) -> Result<(), AmbientError> {
        if alpha >= self.shape.s {
            Err(AmbientError::IndexOutOfRange {
                alpha,
                s: self.shape.s,
            })
        } else {
            Ok(())
        }
    }

    /// eta^alpha(v) = (dz_alpha - sum_i y_i dx_i) / 2. `alpha` is 0-based.
    pub fn eta(&self, alpha: usize, p: &Point, v: &Tangent) -> Result<f64, AmbientError> {
        self.check_alpha(alpha)?;
        let y = p.y(self.shape);
        let dx = v.dx(self.shape);
        let mut acc = v.dz(self.shape)[alpha];
        for (yi, dxi) in y.iter().zip(dx) {
            acc -= yi * dxi;
        }
        Ok(0.5 * acc)
    }

    /// The characteristic vector field xi_alpha = 2 d/dz_alpha
    /// (constant components). `alpha` is 0-based.
    pub fn xi(&self, alpha: usize) -> Result<Tangent, AmbientError> {
        self.check_alpha(alpha)?;
        let mut components = vec![0.0; self.dim()];
        components[2 * self.shape.m + alpha] = 2.0;
        Ok(Tangent::new(components))
    }

    /// Sum of the characteristic fields; |xi_sum|^2 = s exactly.
    pub fn xi_sum(&self) -> Tangent {
        let mut components = vec![0.0; self.dim()];
        for a in 0..self.shape.s {
            components[2 * self.shape.m + a] = 2.0;
        }
        Tangent::new(components)
    }

    /// phi(X dx + Y dy + Z dz) = Y dx - X dy + (Y . y) sum_a dz_a.
    pub fn phi(&self, p: &Point, v: &Tangent) -> Tangent {
        let m = self.shape.m;
        let s = self.shape.s;
        let y = p.y(self.shape);
        let mut out = vec![0.0; self.dim()];
        let mut ydot = 0.0;
        for i in 0..m {
            out[i] = v.components()[m + i];
            out[m + i] = -v.components()[i];
            ydot += v.components()[m + i] * y[i];
        }
        for a in 0..s {
            out[2 * m + a] = ydot;
        }
        Tangent::new(out)
    }

    /// Riemannian metric g(u, v) at p.
    pub fn metric(&self, p: &Point, u: &Tangent, v: &Tangent) -> f64 {
        let m = self.shape.m;
        let s = self.shape.s;
        let mut acc = 0.0;
        for a in 0..s {
            // eta is total; alpha is in range by construction
            let eu = self.eta(a, p, u).expect("alpha in range");
            let ev = self.eta(a, p, v).expect("alpha in range");
            acc += eu * ev;
        }
        for i in 0..2 * m {
            acc += 0.25 * u.components()[i] * v.components()[i];
        }
        acc
    }

    pub fn norm(&self, p: &Point, v: &Tangent) -> f64 {
        self.metric(p, v, v).sqrt()
    }

    /// Christoffel symbols at p from exact analytic metric partials.
    pub fn christoffel(&self, p: &Point) -> Result<Christoffel, AmbientError> {
        let y = p.y(self.shape);
        let entries = tensors::christoffel_components(self.shape.m, self.shape.s, y)
            .ok_or(AmbientError::SingularMetric)?;
        Ok(Christoffel { entries })
    }

    /// Christoffel symbols along a curve, with entries carried as jets of
    /// the y-coordinate jets (exact derivatives of Gamma(gamma(t))).
    pub fn christoffel_jets(&self, y_jets: &[Jet]) -> Result<Vec<Vec<Vec<Jet>>>, AmbientError> {
        tensors::christoffel_components(self.shape.m, self.shape.s, y_jets)
            .ok_or(AmbientError::SingularMetric)
    }

    /// Metric components as jets along a curve (for exact inner products
    /// of jet-valued fields).
    pub fn metric_jets(&self, y_jets: &[Jet]) -> Vec<Vec<Jet>> {
        tensors::metric_components(self.shape.m, self.shape.s, y_jets)
    }

    /// Samples random points and vectors (coordinates uniform in [-2, 2],
    /// seeded) and reports the worst residual of each structure equation.
    pub fn verify_axioms(&self, samples: usize, tol: f64, seed: u64) -> AxiomReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.dim();
        let s = self.shape.s;
        let mut res: BTreeMap<String, f64> = BTreeMap::new();
        let mut record = |key: &str, value: f64| {
            let slot = res.entry(key.to_string()).or_insert(0.0);
            if value > *slot {
                *slot = value;
            }
        };

        let xi: Vec<Tangent> = (0..s)
            .map(|a| self.xi(a).expect("alpha in range"))
            .collect();
        let xi_sum = self.xi_sum();

        for _ in 0..samples {
            let p = Point {
                coords: (0..n).map(|_| rng.random_range(-2.0..2.0)).collect(),
            };
            let u = Tangent::new((0..n).map(|_| rng.random_range(-2.0..2.0)).collect());
            let v = Tangent::new((0..n).map(|_| rng.random_range(-2.0..2.0)).collect());

            // phi^2 = -I + sum eta^a (x) xi_a
            let phiphi = self.phi(&p, &self.phi(&p, &v));
            let mut expected = v.scale(-1.0);
            for (a, xia) in xi.iter().enumerate() {
                let e = self.eta(a, &p, &v).unwrap();
                expected = expected.axpy(e, xia);
            }
            record("phi_squared", self.norm(&p, &phiphi.sub(&expected)));

            // eta^a(xi_b) = delta_ab, phi(xi_a) = 0, eta^a(phi v) = 0
            for a in 0..s {
                for (b, xib) in xi.iter().enumerate() {
                    let want = if a == b { 1.0 } else { 0.0 };
                    record("eta_xi_delta", (self.eta(a, &p, xib).unwrap() - want).abs());
                }
                record("phi_xi_zero", self.norm(&p, &self.phi(&p, &xi[a])));
                record(
                    "eta_phi_zero",
                    self.eta(a, &p, &self.phi(&p, &v)).unwrap().abs(),
                );
                // eta^a(v) = g(v, xi_a)
                record(
                    "eta_metric_dual",
                    (self.eta(a, &p, &v).unwrap() - self.metric(&p, &v, &xi[a])).abs(),
                );
            }

            // g(phi u, phi v) = g(u, v) - sum eta^a(u) eta^a(v)
            let mut eta_uv = 0.0;
            for a in 0..s {
                eta_uv += self.eta(a, &p, &u).unwrap() * self.eta(a, &p, &v).unwrap();
            }
            record(
                "metric_phi_compat",
                (self.metric(&p, &self.phi(&p, &u), &self.phi(&p, &v)) - self.metric(&p, &u, &v)
                    + eta_uv)
                    .abs(),
            );

            // connection identities need Gamma at p
            let gamma = self.christoffel(&p).expect("metric positive definite");

            // nabla_v xi_a = -phi v
            for xia in &xi {
                let lhs = gamma.contract(&v, xia);
                let rhs = self.phi(&p, &v).scale(-1.0);
                record("nabla_xi", self.norm(&p, &lhs.sub(&rhs)));
            }

            // (nabla_u phi) v = sum_a { g(phi u, phi v) xi_a + eta^a(v) phi^2 u }
            let lhs = self.nabla_phi(&p, &gamma, &u, &v);
            let gphi = self.metric(&p, &self.phi(&p, &u), &self.phi(&p, &v));
            let phi2u = self.phi(&p, &self.phi(&p, &u));
            let mut rhs = Tangent::zero(n);
            for (a, xia) in xi.iter().enumerate() {
                rhs = rhs.axpy(gphi, xia);
                rhs = rhs.axpy(self.eta(a, &p, &v).unwrap(), &phi2u);
            }
            record("nabla_phi", self.norm(&p, &lhs.sub(&rhs)));
        }

        // |sum xi_a|^2 = s, exact
        let p0 = Point::origin(self.shape);
        record(
            "xi_sum_norm_sq",
            (self.metric(&p0, &xi_sum, &xi_sum) - s as f64).abs(),
        );

        let passed = res.values().all(|&r| r < tol);
        AxiomReport {
            shape_m: self.shape.m,
            shape_s: self.shape.s,
            samples,
            seed,
            tolerance: tol,
            residuals: res,
            passed,
        }
    }

    /// (nabla_u phi) v for constant-component extensions of u and v:
    /// D_u(phi v) + Gamma(u, phi v) - phi(Gamma(u, v)).
    fn nabla_phi(&self, p: &Point, gamma: &Christoffel, u: &Tangent, v: &Tangent) -> Tangent {
        let m = self.shape.m;
        let n = self.dim();
        // phi v has z-components (v_y . y); their directional derivative
        // along u is v_y . u_y, the x/y blocks are constant.
        let mut dir = vec![0.0; n];
        let mut vy_uy = 0.0;
        for i in 0..m {
            vy_uy += v.components()[m + i] * u.components()[m + i];
        }
        for a in 0..self.shape.s {
            dir[2 * m + a] = vy_uy;
        }
        let d_u_phiv = Tangent::new(dir);
        let phiv = self.phi(p, v);
        d_u_phiv
            .add(&gamma.contract(u, &phiv))
            .sub(&self.phi(p, &gamma.contract(u, v)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn space(m: usize, s: usize) -> ModelSpace {
        ModelSpace::new(ManifoldShape::new(m, s).unwrap())
    }

    #[test]
    fn eta_on_xi_is_kronecker() {
        let sp = space(2, 2);
        let p = Point::new(sp.shape(), vec![0.3, -1.0, 0.7, 2.0, 0.1, -0.4]).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                let want = if a == b { 1.0 } else { 0.0 };
                let xi_b = sp.xi(b).unwrap();
                assert_relative_eq!(sp.eta(a, &p, &xi_b).unwrap(), want);
            }
        }
    }

    #[test]
    fn eta_at_origin_on_z_direction() {
        let sp = space(2, 2);
        let p = Point::origin(sp.shape());
        // v = 2 d/dz_1 evaluates eta^1 to 1
        let v = Tangent::basis(6, 4).scale(2.0);
        assert_relative_eq!(sp.eta(0, &p, &v).unwrap(), 1.0);
    }

    #[test]
    fn eta_with_unit_y_on_x_direction() {
        let sp = space(2, 2);
        // y_1 = 1, v = d/dx_1: eta^a(v) = -(1*1)/2
        let p = Point::new(sp.shape(), vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0]).unwrap();
        let v = Tangent::basis(6, 0);
        assert_relative_eq!(sp.eta(0, &p, &v).unwrap(), -0.5);
    }

    #[test]
    fn xi_components_and_index_bounds() {
        let sp = space(1, 2);
        let xi0 = sp.xi(0).unwrap();
        assert_eq!(xi0.dz(sp.shape()), &[2.0, 0.0]);
        assert!(matches!(
            sp.xi(2),
            Err(AmbientError::IndexOutOfRange { alpha: 2, s: 2 })
        ));
        assert!(matches!(
            sp.eta(5, &Point::origin(sp.shape()), &xi0),
            Err(AmbientError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn phi_maps_x_to_minus_y() {
        let sp = space(2, 2);
        let p = Point::origin(sp.shape());
        let v = Tangent::basis(6, 0); // d/dx_1
        let out = sp.phi(&p, &v);
        assert_eq!(out.components(), &[0.0, 0.0, -1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn phi_on_y_direction_picks_up_z_terms() {
        let sp = space(2, 2);
        let c = 1.7;
        let p = Point::new(sp.shape(), vec![0.0, 0.0, c, 0.0, 0.0, 0.0]).unwrap();
        let v = Tangent::basis(6, 2); // d/dy_1
        let out = sp.phi(&p, &v);
        // d/dx_1 + c * (dz_1 + dz_2)
        assert_eq!(out.components(), &[1.0, 0.0, 0.0, 0.0, c, c]);
    }

    #[test]
    fn phi_annihilates_xi() {
        let sp = space(2, 3);
        let p = Point::new(sp.shape(), vec![1.0, 2.0, 3.0, -1.0, 0.5, 0.2, 0.9]).unwrap();
        let out = sp.phi(&p, &sp.xi(1).unwrap());
        assert!(out.components().iter().all(|&c| c == 0.0));
    }

    #[test]
    fn metric_component_values() {
        let sp = space(2, 2);
        let p = Point::new(sp.shape(), vec![0.5, -0.5, 0.8, 0.1, 0.0, 0.0]).unwrap();
        let dy1 = Tangent::basis(6, 2);
        assert_relative_eq!(sp.metric(&p, &dy1, &dy1), 0.25);
        let p0 = Point::origin(sp.shape());
        let dx1 = Tangent::basis(6, 0);
        assert_relative_eq!(sp.metric(&p0, &dx1, &dx1), 0.25);
        for a in 0..2 {
            for b in 0..2 {
                let want = if a == b { 1.0 } else { 0.0 };
                assert_relative_eq!(sp.metric(&p, &sp.xi(a).unwrap(), &sp.xi(b).unwrap()), want);
            }
        }
    }

    #[test]
    #[allow(clippy::needless_range_loop)] // oracle written in index notation
    fn christoffel_matches_finite_difference_oracle() {
        // Independent oracle: central finite differences of the metric
        // matrix plus a numeric inverse, at several points.
        let sp = space(2, 2);
        let pts = [
            Point::origin(sp.shape()),
            Point::new(sp.shape(), vec![0.3, -0.2, 0.9, -1.1, 0.4, 0.6]).unwrap(),
        ];
        let n = sp.dim();
        let h = 1e-5;
        for p in &pts {
            let gamma = sp.christoffel(p).unwrap();
            let metric_matrix = |coords: &[f64]| -> Vec<Vec<f64>> {
                let q = Point {
                    coords: coords.to_vec(),
                };
                (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| sp.metric(&q, &Tangent::basis(n, i), &Tangent::basis(n, j)))
                            .collect()
                    })
                    .collect()
            };
            // dg[l][i][j] by central differences
            let mut dg = vec![vec![vec![0.0; n]; n]; n];
            for l in 0..n {
                let mut up = p.coords().to_vec();
                let mut dn = p.coords().to_vec();
                up[l] += h;
                dn[l] -= h;
                let gu = metric_matrix(&up);
                let gd = metric_matrix(&dn);
                for i in 0..n {
                    for j in 0..n {
                        dg[l][i][j] = (gu[i][j] - gd[i][j]) / (2.0 * h);
                    }
                }
            }
            let g = metric_matrix(p.coords());
            let ginv = super::tensors::invert(&g).unwrap();
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let mut acc = 0.0;
                        for l in 0..n {
                            acc += ginv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                        }
                        let oracle = 0.5 * acc;
                        assert!(
                            (gamma.entry(k, i, j) - oracle).abs() < 1e-7,
                            "Gamma^{k}_{i}{j}: {} vs oracle {}",
                            gamma.entry(k, i, j),
                            oracle
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn axiom_suite_passes_for_reference_shapes() {
        for (m, s) in [(2, 2), (1, 1), (1, 4)] {
            let sp = space(m, s);
            let report = sp.verify_axioms(100, 1e-7, 42);
            assert!(
                report.passed,
                "axioms failed for ({m},{s}): {:?}",
                report.residuals
            );
            // pure tensor equations are far tighter than the connection ones
            for key in [
                "phi_squared",
                "eta_xi_delta",
                "phi_xi_zero",
                "eta_phi_zero",
                "eta_metric_dual",
                "metric_phi_compat",
            ] {
                assert!(
                    report.residuals[key] < 1e-9,
                    "{key} residual {} too large for ({m},{s})",
                    report.residuals[key]
                );
            }
        }
    }

    #[test]
    fn xi_sum_norm_is_s_exactly() {
        for (m, s) in [(1, 1), (2, 2), (1, 4), (3, 2)] {
            let sp = space(m, s);
            let p = Point::new(
                sp.shape(),
                (0..sp.dim()).map(|i| 0.3 * i as f64 - 1.0).collect(),
            )
            .unwrap();
            let xs = sp.xi_sum();
            assert_eq!(sp.metric(&p, &xs, &xs), s as f64);
        }
    }
}
