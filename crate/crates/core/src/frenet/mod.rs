//! Covariant differentiation along curves, Frenet frames and curvatures,
//! and the four mean-curvature operator fields by two independent routes.
//!
//! Everything on this path works from per-sample coordinate jets. For
//! expression-defined curves the jets are exact (symbolic derivatives);
//! for sampled curves they come from finite differences of the stored
//! tangents. Covariant derivatives iterate
//! (nabla_T V)^k = dV^k/dt + Gamma^k_ij T^i V^j in jet arithmetic, with
//! the Christoffel entries carried as jets of the y-coordinates, so no
//! accuracy is lost to repeated numeric differentiation.

pub mod fd;

use crate::ambient::{AmbientError, ManifoldShape, ModelSpace, Point, Tangent};
use crate::curvelang::{CurveDef, CurveError, Jet};
use crate::Tolerances;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FrenetError {
    #[error("curve is not unit speed: max |g(T,T) - 1| = {max_dev:.3e} (speeds in [{min_speed:.6}, {max_speed:.6}], arc length {arc_length:.6} over parameter length {param_length:.6})")]
    NotUnitSpeed {
        max_dev: f64,
        min_speed: f64,
        max_speed: f64,
        arc_length: f64,
        param_length: f64,
    },
    #[error("grid too coarse: {n} samples, need at least {min}")]
    GridTooCoarse { n: usize, min: usize },
    #[error("grid is not uniformly spaced")]
    NonUniformGrid,
    #[error("jet order {have} insufficient, need at least {need}")]
    InsufficientJetOrder { have: usize, need: usize },
    #[error(transparent)]
    Ambient(#[from] AmbientError),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// Per-sample coordinate jets of a curve on a uniform grid.
pub struct CurveSamples {
    pub shape: ManifoldShape,
    pub label: String,
    pub grid: Vec<f64>,
    pub jets: Vec<Vec<Jet>>,
    /// True when the jets came from finite differences of sampled data
    /// rather than symbolic derivatives.
    pub from_samples: bool,
}

impl CurveSamples {
    /// Exact jets (order 5) of an expression-defined curve.
    pub fn from_def(def: &CurveDef, grid: Vec<f64>, quad_tol: f64) -> Result<Self, FrenetError> {
        let mut sampler = def.sampler(5, quad_tol)?;
        let mut jets = Vec::with_capacity(grid.len());
        for &t in &grid {
            jets.push(sampler.jets_at(t).map_err(CurveError::from)?);
        }
        Ok(CurveSamples {
            shape: def.shape,
            label: def.label.clone(),
            grid,
            jets,
            from_samples: false,
        })
    }

    /// Order-4 jets from sampled points and tangents: positions and
    /// tangents are taken as given, higher orders come from 7-point
    /// stencils on the tangents. Trims three samples per side.
    pub fn from_points_and_tangents(
        shape: ManifoldShape,
        label: impl Into<String>,
        grid: &[f64],
        points: &[Point],
        tangents: &[Tangent],
    ) -> Result<Self, FrenetError> {
        let n = grid.len();
        if n < 9 {
            return Err(FrenetError::GridTooCoarse { n, min: 9 });
        }
        let h = fd::uniform_step(grid).ok_or(FrenetError::NonUniformGrid)?;
        let dim = shape.dim();
        let mut jets = Vec::with_capacity(n - 6);
        for j in 3..n - 3 {
            let mut coord_jets = Vec::with_capacity(dim);
            for c in 0..dim {
                let series: Vec<f64> = tangents.iter().map(|t| t.components()[c]).collect();
                coord_jets.push(Jet::new(vec![
                    points[j].coords()[c],
                    series[j],
                    fd::d1_7pt(&series, h, j),
                    fd::d2_7pt(&series, h, j),
                    fd::d3_7pt(&series, h, j),
                ]));
            }
            jets.push(coord_jets);
        }
        Ok(CurveSamples {
            shape,
            label: label.into(),
            grid: grid[3..n - 3].to_vec(),
            jets,
            from_samples: true,
        })
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

/// Iterated covariant derivatives of the tangent as jets:
/// returns [T, nabla_T T, ..., nabla_T^k T].
fn covariant_chain_jets(
    space: &ModelSpace,
    coord_jets: &[Jet],
    k: usize,
) -> Result<Vec<Vec<Jet>>, FrenetError> {
    let have = coord_jets[0].order();
    if have < k + 1 {
        return Err(FrenetError::InsufficientJetOrder { have, need: k + 1 });
    }
    let m = space.shape().m();
    let y_jets = &coord_jets[m..2 * m];
    let gamma = space.christoffel_jets(y_jets)?;
    let n = space.dim();

    let t_jets: Vec<Jet> = coord_jets.iter().map(Jet::differentiate).collect();
    let mut chain = vec![t_jets];
    for _ in 0..k {
        let v = chain.last().unwrap();
        let t = &chain[0];
        let mut next = Vec::with_capacity(n);
        for (kk, gamma_k) in gamma.iter().enumerate() {
            let mut acc = v[kk].differentiate();
            for (i, gamma_ki) in gamma_k.iter().enumerate() {
                for (j, g) in gamma_ki.iter().enumerate() {
                    acc = acc.add(&g.mul(&t[i]).mul(&v[j]));
                }
            }
            next.push(acc);
        }
        chain.push(next);
    }
    Ok(chain)
}

fn jet_values(jets: &[Jet]) -> Tangent {
    Tangent::new(jets.iter().map(Jet::value).collect())
}

/// nabla_T^1..k T at one parameter value, from that sample's coordinate
/// jets (which must carry at least k+1 derivative orders).
pub fn covariant_derivatives(
    space: &ModelSpace,
    coord_jets: &[Jet],
    k: usize,
) -> Result<Vec<Tangent>, FrenetError> {
    let chain = covariant_chain_jets(space, coord_jets, k)?;
    Ok(chain[1..].iter().map(|v| jet_values(v)).collect())
}

/// Estimated derivatives of the curvature functions on the interior grid
/// (5-point stencils; two samples trimmed per side).
#[derive(Debug, Clone, Serialize)]
pub struct KappaDerivs {
    pub offset: usize,
    pub kappa1_prime: Vec<f64>,
    pub kappa1_second: Vec<f64>,
    pub kappa2_prime: Vec<f64>,
}

/// Frenet frame, curvatures and raw covariant derivatives along a curve.
pub struct FrenetApparatus {
    pub shape: ManifoldShape,
    pub label: String,
    pub grid: Vec<f64>,
    pub points: Vec<Point>,
    /// E1 = gamma' per sample.
    pub tangents: Vec<Tangent>,
    /// nabla_T T, nabla_T^2 T, nabla_T^3 T per sample (exact per-sample
    /// values; inputs to both operator routes).
    pub nabla: [Vec<Tangent>; 3],
    /// Osculating order (maximum over samples).
    pub r: usize,
    /// Frames per sample, E_1..E_{local order}.
    pub frames: Vec<Vec<Tangent>>,
    /// kappa_1, kappa_2, kappa_3 series; zero where the order ends.
    pub kappa: [Vec<f64>; 3],
    pub kappa_derivs: KappaDerivs,
    pub max_speed_dev: f64,
    /// Measured speed range over the grid (both within speed_tol of 1).
    pub speed_range: (f64, f64),
    pub arc_length: f64,
    /// Worst |g(E_a, E_b) - delta_ab| over samples and pairs.
    pub frame_defect: f64,
}

impl FrenetApparatus {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Frame vector E_{i+1} at sample j, if the order reaches it.
    pub fn frame(&self, j: usize, i: usize) -> Option<&Tangent> {
        self.frames[j].get(i)
    }

    /// Interior index range for residual scans (two trimmed per side,
    /// matching the curvature-derivative stencils).
    pub fn interior(&self) -> std::ops::Range<usize> {
        2..self.len().saturating_sub(2)
    }
}

/// Builds the Frenet apparatus from per-sample jets: E1 = gamma',
/// Gram-Schmidt of the covariant derivatives against earlier frame
/// vectors, curvatures from the standard recursions, and curvature
/// derivatives by 5-point stencils.
pub fn frenet_apparatus(
    space: &ModelSpace,
    samples: &CurveSamples,
    tols: &Tolerances,
) -> Result<FrenetApparatus, FrenetError> {
    let n = samples.len();
    if n < 5 {
        return Err(FrenetError::GridTooCoarse { n, min: 5 });
    }
    let h = fd::uniform_step(&samples.grid).ok_or(FrenetError::NonUniformGrid)?;

    let mut points = Vec::with_capacity(n);
    let mut tangents = Vec::with_capacity(n);
    let mut nabla: [Vec<Tangent>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for jets in &samples.jets {
        let p = Point::new(samples.shape, jets.iter().map(Jet::value).collect())?;
        let chain = covariant_chain_jets(space, jets, 3)?;
        tangents.push(jet_values(&chain[0]));
        for (slot, v) in nabla.iter_mut().zip(&chain[1..]) {
            slot.push(jet_values(v));
        }
        points.push(p);
    }

    // unit-speed gate with arc-length diagnostic
    let speeds: Vec<f64> = points
        .iter()
        .zip(&tangents)
        .map(|(p, t)| space.norm(p, t))
        .collect();
    let max_dev = speeds
        .iter()
        .map(|v| (v * v - 1.0).abs())
        .fold(0.0, f64::max);
    let arc_length = h * (speeds.iter().sum::<f64>() - 0.5 * (speeds[0] + speeds[n - 1]));
    let (mut speed_lo, mut speed_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in &speeds {
        speed_lo = speed_lo.min(*v);
        speed_hi = speed_hi.max(*v);
    }
    if max_dev > tols.speed_tol {
        return Err(FrenetError::NotUnitSpeed {
            max_dev,
            min_speed: speed_lo,
            max_speed: speed_hi,
            arc_length,
            param_length: samples.grid[n - 1] - samples.grid[0],
        });
    }

    // Gram-Schmidt ladder per sample
    let mut frames: Vec<Vec<Tangent>> = Vec::with_capacity(n);
    let mut kappa: [Vec<f64>; 3] = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let mut r = 1;
    let mut frame_defect: f64 = 0.0;
    for j in 0..n {
        let p = &points[j];
        let mut frame = vec![tangents[j].clone()];
        let mut kappas: Vec<f64> = Vec::new();
        for (stage, w) in [&nabla[0][j], &nabla[1][j], &nabla[2][j]]
            .into_iter()
            .enumerate()
        {
            let w_norm = space.norm(p, w);
            let mut u = w.clone();
            for e in &frame {
                let c = space.metric(p, w, e);
                u = u.axpy(-c, e);
            }
            let res = space.norm(p, &u);
            if w_norm <= tols.rank_tol || res <= tols.rank_tol * w_norm {
                break;
            }
            frame.push(u.scale(1.0 / res));
            let k = match stage {
                0 => res,
                1 => res / kappas[0],
                _ => res / (kappas[0] * kappas[1]),
            };
            kappas.push(k);
        }
        for (i, k) in kappas.iter().enumerate() {
            kappa[i][j] = *k;
        }
        r = r.max(frame.len());
        for (a, ea) in frame.iter().enumerate() {
            for (b, eb) in frame.iter().enumerate() {
                let want = if a == b { 1.0 } else { 0.0 };
                frame_defect = frame_defect.max((space.metric(p, ea, eb) - want).abs());
            }
        }
        frames.push(frame);
    }

    let mut kappa1_prime = Vec::with_capacity(n - 4);
    let mut kappa1_second = Vec::with_capacity(n - 4);
    let mut kappa2_prime = Vec::with_capacity(n - 4);
    for j in 2..n - 2 {
        kappa1_prime.push(fd::d1_5pt(&kappa[0], h, j));
        kappa1_second.push(fd::d2_5pt(&kappa[0], h, j));
        kappa2_prime.push(fd::d1_5pt(&kappa[1], h, j));
    }

    Ok(FrenetApparatus {
        shape: samples.shape,
        label: samples.label.clone(),
        grid: samples.grid.clone(),
        points,
        tangents,
        nabla,
        r,
        frames,
        kappa,
        kappa_derivs: KappaDerivs {
            offset: 2,
            kappa1_prime,
            kappa1_second,
            kappa2_prime,
        },
        max_speed_dev: max_dev,
        speed_range: (speed_lo, speed_hi),
        arc_length,
        frame_defect,
    })
}

/// A vector field sampled along the curve; `offset` indexes its first
/// sample into the parent grid.
#[derive(Debug, Clone)]
pub struct OperatorField {
    pub offset: usize,
    pub vectors: Vec<Tangent>,
}

impl OperatorField {
    pub fn get(&self, parent_index: usize) -> Option<&Tangent> {
        parent_index
            .checked_sub(self.offset)
            .and_then(|i| self.vectors.get(i))
    }
}

/// The four mean-curvature operator fields.
pub struct OperatorSet {
    pub nabla_t_h: OperatorField,
    pub nabla_t_perp_h: OperatorField,
    pub delta_h: OperatorField,
    pub delta_perp_h: OperatorField,
}

/// Which operator field a classification condition constrains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OperatorKind {
    NablaTH,
    NablaTPerpH,
    DeltaH,
    DeltaPerpH,
}

impl OperatorSet {
    pub fn field(&self, kind: OperatorKind) -> &OperatorField {
        match kind {
            OperatorKind::NablaTH => &self.nabla_t_h,
            OperatorKind::NablaTPerpH => &self.nabla_t_perp_h,
            OperatorKind::DeltaH => &self.delta_h,
            OperatorKind::DeltaPerpH => &self.delta_perp_h,
        }
    }
}

/// Operator fields assembled from the Frenet data:
///   nabla_T H       = -k1^2 E1 + k1' E2 + k1 k2 E3
///   nabla_T-perp H  =            k1' E2 + k1 k2 E3
///   Delta H         = 3 k1 k1' E1 + (k1^3 + k1 k2^2 - k1'') E2
///                     - (2 k1' k2 + k1 k2') E3 - k1 k2 k3 E4
///   Delta-perp H    = (k1 k2^2 - k1'') E2 - (2 k1' k2 + k1 k2') E3
///                     - k1 k2 k3 E4
/// Terms whose frame vector is beyond the osculating order carry a
/// vanishing curvature coefficient and are dropped.
pub fn mean_curvature_ops_formula(fa: &FrenetApparatus) -> OperatorSet {
    let n = fa.len();
    let dim = fa.shape.dim();
    let off = fa.kappa_derivs.offset;
    let mut nabla_t_h = Vec::with_capacity(n - 2 * off);
    let mut nabla_t_perp_h = Vec::with_capacity(n - 2 * off);
    let mut delta_h = Vec::with_capacity(n - 2 * off);
    let mut delta_perp_h = Vec::with_capacity(n - 2 * off);

    for j in off..n - off {
        let k1 = fa.kappa[0][j];
        let k2 = fa.kappa[1][j];
        let k3 = fa.kappa[2][j];
        let k1p = fa.kappa_derivs.kappa1_prime[j - off];
        let k1pp = fa.kappa_derivs.kappa1_second[j - off];
        let k2p = fa.kappa_derivs.kappa2_prime[j - off];

        let term = |acc: Tangent, coeff: f64, i: usize| -> Tangent {
            match fa.frame(j, i) {
                Some(e) => acc.axpy(coeff, e),
                None => acc,
            }
        };

        let mut v = Tangent::zero(dim);
        v = term(v, -k1 * k1, 0);
        v = term(v, k1p, 1);
        v = term(v, k1 * k2, 2);
        nabla_t_h.push(v);

        let mut v = Tangent::zero(dim);
        v = term(v, k1p, 1);
        v = term(v, k1 * k2, 2);
        nabla_t_perp_h.push(v);

        let mut v = Tangent::zero(dim);
        v = term(v, 3.0 * k1 * k1p, 0);
        v = term(v, k1 * k1 * k1 + k1 * k2 * k2 - k1pp, 1);
        v = term(v, -(2.0 * k1p * k2 + k1 * k2p), 2);
        v = term(v, -k1 * k2 * k3, 3);
        delta_h.push(v);

        let mut v = Tangent::zero(dim);
        v = term(v, k1 * k2 * k2 - k1pp, 1);
        v = term(v, -(2.0 * k1p * k2 + k1 * k2p), 2);
        v = term(v, -k1 * k2 * k3, 3);
        delta_perp_h.push(v);
    }

    OperatorSet {
        nabla_t_h: OperatorField {
            offset: off,
            vectors: nabla_t_h,
        },
        nabla_t_perp_h: OperatorField {
            offset: off,
            vectors: nabla_t_perp_h,
        },
        delta_h: OperatorField {
            offset: off,
            vectors: delta_h,
        },
        delta_perp_h: OperatorField {
            offset: off,
            vectors: delta_perp_h,
        },
    }
}

/// Covariant derivative of a sampled field along the curve:
/// 5-point differences for the component derivatives plus the Christoffel
/// contraction. The result starts two samples further in.
pub fn covariant_derivative_fd(
    space: &ModelSpace,
    fa: &FrenetApparatus,
    field: &OperatorField,
) -> Result<OperatorField, FrenetError> {
    let len = field.vectors.len();
    let dim = space.dim();
    let h = fd::uniform_step(&fa.grid).ok_or(FrenetError::NonUniformGrid)?;
    let series: Vec<Vec<f64>> = (0..dim)
        .map(|c| field.vectors.iter().map(|v| v.components()[c]).collect())
        .collect();
    let mut out = Vec::with_capacity(len.saturating_sub(4));
    for j in 2..len.saturating_sub(2) {
        let parent = field.offset + j;
        let p = &fa.points[parent];
        let gamma = space.christoffel(p)?;
        let dv = Tangent::new((0..dim).map(|c| fd::d1_5pt(&series[c], h, j)).collect());
        out.push(dv.add(&gamma.contract(&fa.tangents[parent], &field.vectors[j])));
    }
    Ok(OperatorField {
        offset: field.offset + 2,
        vectors: out,
    })
}

fn project_normal(space: &ModelSpace, p: &Point, t: &Tangent, v: &Tangent) -> Tangent {
    v.axpy(-space.metric(p, v, t), t)
}

/// Operator fields from raw covariant derivatives:
///   nabla_T H = nabla_T^2 T,  Delta H = -nabla_T^3 T (exact per sample);
///   nabla_T-perp H by tangential projection removal;
///   Delta-perp H by iterating V |-> nabla_T V - g(nabla_T V, T) T with
///   finite differences for the outer derivatives of the projected fields.
pub fn mean_curvature_ops_direct(
    space: &ModelSpace,
    fa: &FrenetApparatus,
) -> Result<OperatorSet, FrenetError> {
    let n = fa.len();
    let nabla_t_h = OperatorField {
        offset: 0,
        vectors: fa.nabla[1].clone(),
    };
    let delta_h = OperatorField {
        offset: 0,
        vectors: fa.nabla[2].iter().map(|v| v.scale(-1.0)).collect(),
    };
    let nabla_t_perp_h = OperatorField {
        offset: 0,
        vectors: (0..n)
            .map(|j| project_normal(space, &fa.points[j], &fa.tangents[j], &fa.nabla[1][j]))
            .collect(),
    };

    // Delta-perp H = -(perp nabla_T)^3 T; the innermost step is exact.
    let w1 = OperatorField {
        offset: 0,
        vectors: (0..n)
            .map(|j| project_normal(space, &fa.points[j], &fa.tangents[j], &fa.nabla[0][j]))
            .collect(),
    };
    let mut w = w1;
    for _ in 0..2 {
        let dw = covariant_derivative_fd(space, fa, &w)?;
        let vectors = dw
            .vectors
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let parent = dw.offset + i;
                project_normal(space, &fa.points[parent], &fa.tangents[parent], v)
            })
            .collect();
        w = OperatorField {
            offset: dw.offset,
            vectors,
        };
    }
    let delta_perp_h = OperatorField {
        offset: w.offset,
        vectors: w.vectors.iter().map(|v| v.scale(-1.0)).collect(),
    };

    Ok(OperatorSet {
        nabla_t_h,
        nabla_t_perp_h,
        delta_h,
        delta_perp_h,
    })
}

/// Worst g-norm difference between two fields over the indices where both
/// are defined.
pub fn max_field_difference(
    space: &ModelSpace,
    fa: &FrenetApparatus,
    a: &OperatorField,
    b: &OperatorField,
) -> f64 {
    let lo = a.offset.max(b.offset);
    let hi = (a.offset + a.vectors.len()).min(b.offset + b.vectors.len());
    let mut worst: f64 = 0.0;
    for parent in lo..hi {
        let va = a.get(parent).expect("in range");
        let vb = b.get(parent).expect("in range");
        worst = worst.max(space.norm(&fa.points[parent], &va.sub(vb)));
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::ManifoldShape;
    use crate::curvelang::{parse_curve_file, Jet};
    use crate::{assets, linspace};

    fn analyze(text: &str, a: f64, b: f64, n: usize) -> (ModelSpace, FrenetApparatus) {
        let def = parse_curve_file(text).unwrap();
        let space = ModelSpace::new(def.shape);
        let samples = CurveSamples::from_def(&def, linspace(a, b, n), 1e-10).unwrap();
        let fa = frenet_apparatus(&space, &samples, &Tolerances::default()).unwrap();
        (space, fa)
    }

    #[test]
    fn zero_connection_reduces_to_plain_derivatives() {
        // with Gamma = 0 the chain is just repeated differentiation
        let space = ModelSpace::new(ManifoldShape::new(1, 1).unwrap());
        let t0 = 0.4_f64;
        // coordinates (sin t, 0, 0) with zero y keeps Gamma terms present,
        // so instead feed the chain a flat Gamma directly
        let jets = [
            Jet::new(vec![
                t0.sin(),
                t0.cos(),
                -t0.sin(),
                -t0.cos(),
                t0.sin(),
                t0.cos(),
            ]),
            Jet::constant(0.0, 5),
            Jet::constant(0.0, 5),
        ];
        let n = space.dim();
        let zero_gamma = vec![vec![vec![Jet::constant(0.0, 5); n]; n]; n];
        // replicate covariant_chain_jets with the flat connection
        let t_jets: Vec<Jet> = jets.iter().map(Jet::differentiate).collect();
        let mut v = t_jets.clone();
        for step in 1..=3 {
            let mut next = Vec::new();
            for (kk, row) in zero_gamma.iter().enumerate() {
                let mut acc = v[kk].differentiate();
                for (i, cell) in row.iter().enumerate() {
                    for (j, g) in cell.iter().enumerate() {
                        acc = acc.add(&g.mul(&t_jets[i]).mul(&v[j]));
                    }
                }
                next.push(acc);
            }
            v = next;
            // (d/dt)^(step+1) sin at t0
            let want = match (step + 1) % 4 {
                0 => t0.sin(),
                1 => t0.cos(),
                2 => -t0.sin(),
                _ => -t0.cos(),
            };
            assert!((v[0].value() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn covariant_chain_rejects_short_jets() {
        let space = ModelSpace::new(ManifoldShape::new(1, 1).unwrap());
        let jets: Vec<Jet> = (0..3).map(|_| Jet::constant(0.0, 2)).collect();
        assert!(matches!(
            covariant_derivatives(&space, &jets, 3),
            Err(FrenetError::InsufficientJetOrder { have: 2, need: 4 })
        ));
    }

    #[test]
    fn geodesic_has_order_one_and_vanishing_derivative() {
        let geo = assets::geodesic_curve_text(1, 4);
        let (space, fa) = analyze(&geo, 0.0, 1.0, 64);
        assert_eq!(fa.r, 1);
        let worst = fa.nabla[0]
            .iter()
            .zip(&fa.points)
            .map(|(v, p)| space.norm(p, v))
            .fold(0.0, f64::max);
        assert!(worst < 1e-10, "nabla_T T = {worst:.3e} on a geodesic");
    }

    #[test]
    fn nested_integral_curve_matches_expected_curvatures() {
        let (_, fa) = analyze(assets::EXAMPLE2, 0.0, 0.8, 129);
        assert_eq!(fa.r, 3);
        // |nabla_T T| at t = 0 is 2
        assert!((fa.kappa[0][0] - 2.0).abs() < 1e-6);
        for (j, &t) in fa.grid.iter().enumerate() {
            let want = 2.0 * (2.0 * t).exp();
            assert!(
                (fa.kappa[0][j] - want).abs() < 1e-6 * want,
                "kappa1({t}) = {} vs {want}",
                fa.kappa[0][j]
            );
            assert!((fa.kappa[1][j] - 2.0).abs() < 1e-6);
        }
        assert!(fa.frame_defect < 1e-6);
    }

    #[test]
    fn corrected_slant_helix_curvatures() {
        let (space, fa) = analyze(assets::EXAMPLE1_CORRECTED, 0.0, std::f64::consts::TAU, 257);
        assert_eq!(fa.r, 3);
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        for j in 0..fa.len() {
            assert!((fa.kappa[0][j] - inv_sqrt2).abs() < 1e-6);
            assert!((fa.kappa[1][j] - inv_sqrt2).abs() < 1e-6);
        }
        // eta^a(E2) = 0 along a slant curve
        let mut worst: f64 = 0.0;
        for j in 0..fa.len() {
            let e2 = fa.frame(j, 1).unwrap();
            for a in 0..2 {
                worst = worst.max(space.eta(a, &fa.points[j], e2).unwrap().abs());
            }
        }
        assert!(worst < 1e-6, "eta(E2) = {worst:.3e}");
    }

    #[test]
    fn printed_variant_fails_unit_speed() {
        let def = parse_curve_file(assets::EXAMPLE1_PRINTED).unwrap();
        let space = ModelSpace::new(def.shape);
        let samples =
            CurveSamples::from_def(&def, linspace(0.0, std::f64::consts::TAU, 65), 1e-10).unwrap();
        match frenet_apparatus(&space, &samples, &Tolerances::default()) {
            Err(FrenetError::NotUnitSpeed { max_dev, .. }) => {
                assert!(max_dev > 0.1);
            }
            other => panic!("expected a unit-speed failure, got {:?}", other.is_ok()),
        }
    }

    #[test]
    fn frenet_recursion_residual_is_small() {
        // finite-difference nabla_T of the frame samples against
        // -k_{i-1} E_{i-1} + k_i E_{i+1}
        let (space, fa) = analyze(assets::EXAMPLE2, 0.0, 0.8, 257);
        for i in 0..fa.r {
            let field = OperatorField {
                offset: 0,
                vectors: (0..fa.len())
                    .map(|j| fa.frame(j, i).unwrap().clone())
                    .collect(),
            };
            let deriv = covariant_derivative_fd(&space, &fa, &field).unwrap();
            let mut worst: f64 = 0.0;
            for (idx, got) in deriv.vectors.iter().enumerate() {
                let j = idx + deriv.offset;
                let dim = fa.shape.dim();
                let mut want = Tangent::zero(dim);
                if i > 0 {
                    want = want.axpy(-fa.kappa[i - 1][j], fa.frame(j, i - 1).unwrap());
                }
                if i + 1 < fa.frames[j].len() {
                    want = want.axpy(fa.kappa[i][j], fa.frame(j, i + 1).unwrap());
                }
                worst = worst.max(space.norm(&fa.points[j], &got.sub(&want)));
            }
            assert!(
                worst < 1e-4,
                "Frenet recursion residual for E{} = {worst:.3e}",
                i + 1
            );
        }
    }

    #[test]
    fn operator_routes_agree_on_example_curves() {
        // 512-point grids: the doubly finite-differenced route needs the
        // spacing, the nested-integral curve's fields vary like e^{2t}
        for (text, a, b, n) in [
            (assets::EXAMPLE2, 0.0, 0.8, 512),
            (assets::EXAMPLE1_CORRECTED, 0.0, std::f64::consts::TAU, 512),
        ] {
            let (space, fa) = analyze(text, a, b, n);
            let formula = mean_curvature_ops_formula(&fa);
            let direct = mean_curvature_ops_direct(&space, &fa).unwrap();
            for (name, f, d) in [
                ("nabla_t_h", &formula.nabla_t_h, &direct.nabla_t_h),
                (
                    "nabla_t_perp_h",
                    &formula.nabla_t_perp_h,
                    &direct.nabla_t_perp_h,
                ),
                ("delta_h", &formula.delta_h, &direct.delta_h),
                ("delta_perp_h", &formula.delta_perp_h, &direct.delta_perp_h),
            ] {
                let diff = max_field_difference(&space, &fa, f, d);
                assert!(diff < 1e-4, "{name} routes differ by {diff:.3e}");
            }
            // delta_h needs no finite differencing on the direct route, so
            // it holds a tighter bound
            let diff = max_field_difference(&space, &fa, &formula.delta_h, &direct.delta_h);
            assert!(diff < 1e-5, "delta_h routes differ by {diff:.3e}");
        }
    }

    #[test]
    fn formula_ops_with_constant_curvature_and_no_torsion() {
        // synthetic apparatus: constant k1, k2 = k3 = 0, flat frame at the
        // origin region where E = 2 dx, 2 dy are unit
        let shape = ManifoldShape::new(1, 1).unwrap();
        let space = ModelSpace::new(shape);
        let n = 7;
        let dim = 3;
        let k1 = 0.8;
        let e1 = Tangent::basis(dim, 0).scale(2.0);
        let e2 = Tangent::basis(dim, 1).scale(2.0);
        let fa = FrenetApparatus {
            shape,
            label: "synthetic".into(),
            grid: linspace(0.0, 0.6, n),
            points: vec![Point::origin(shape); n],
            tangents: vec![e1.clone(); n],
            nabla: [
                vec![e2.scale(k1); n],
                vec![e1.scale(-k1 * k1); n],
                vec![e2.scale(-k1 * k1 * k1); n],
            ],
            r: 2,
            frames: vec![vec![e1.clone(), e2.clone()]; n],
            kappa: [vec![k1; n], vec![0.0; n], vec![0.0; n]],
            kappa_derivs: KappaDerivs {
                offset: 2,
                kappa1_prime: vec![0.0; n - 4],
                kappa1_second: vec![0.0; n - 4],
                kappa2_prime: vec![0.0; n - 4],
            },
            max_speed_dev: 0.0,
            speed_range: (1.0, 1.0),
            arc_length: 0.6,
            frame_defect: 0.0,
        };
        let ops = mean_curvature_ops_formula(&fa);
        let j = 3 - ops.nabla_t_h.offset;
        let want_nabla = e1.scale(-k1 * k1);
        let want_delta = e2.scale(k1 * k1 * k1);
        assert!(space.norm(&fa.points[3], &ops.nabla_t_h.vectors[j].sub(&want_nabla)) < 1e-12);
        assert!(space.norm(&fa.points[3], &ops.delta_h.vectors[j].sub(&want_delta)) < 1e-12);
        // perp variants vanish outright here: k1' = 0 kills nabla-perp and
        // k2 = k1'' = 0 kills delta-perp
        assert!(space.norm(&fa.points[3], &ops.nabla_t_perp_h.vectors[j]) < 1e-12);
        assert!(space.norm(&fa.points[3], &ops.delta_perp_h.vectors[j]) < 1e-12);
    }

    #[test]
    fn direct_delta_h_has_no_e4_component_when_kappa3_vanishes() {
        let (space, fa) = analyze(assets::EXAMPLE2, 0.0, 0.8, 129);
        assert_eq!(fa.r, 3);
        let direct = mean_curvature_ops_direct(&space, &fa).unwrap();
        // project Delta H onto the complement of span{E1, E2, E3}
        let mut worst: f64 = 0.0;
        for (i, v) in direct.delta_h.vectors.iter().enumerate() {
            let j = direct.delta_h.offset + i;
            let p = &fa.points[j];
            let mut res = v.clone();
            for e in &fa.frames[j] {
                res = res.axpy(-space.metric(p, v, e), e);
            }
            worst = worst.max(space.norm(p, &res));
        }
        assert!(worst < 1e-6, "E4 component of direct Delta H = {worst:.3e}");
    }

    #[test]
    fn geodesic_operator_fields_vanish() {
        let geo = assets::geodesic_curve_text(1, 4);
        let (space, fa) = analyze(&geo, 0.0, 1.0, 64);
        let formula = mean_curvature_ops_formula(&fa);
        let direct = mean_curvature_ops_direct(&space, &fa).unwrap();
        for field in [
            &formula.nabla_t_h,
            &formula.nabla_t_perp_h,
            &formula.delta_h,
            &formula.delta_perp_h,
            &direct.nabla_t_h,
            &direct.nabla_t_perp_h,
            &direct.delta_h,
            &direct.delta_perp_h,
        ] {
            for (i, v) in field.vectors.iter().enumerate() {
                let norm = space.norm(&fa.points[field.offset + i], v);
                assert!(norm < 1e-8, "operator field on a geodesic: {norm:.3e}");
            }
        }
    }
}
