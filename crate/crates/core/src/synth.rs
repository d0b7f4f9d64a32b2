//! Synthesis of the special helices the characterizations describe, by
//! integrating the ambient Frenet system
//!   gamma' = E1,
//!   E_i'^k = -Gamma^k_ab E1^a E_i^b + (-kappa_{i-1} E_{i-1} + kappa_i E_{i+1})^k
//! with constant curvatures. The two constructions (kappa3 = 0):
//!
//! * tangent-bundle C-parallel: non-Legendre slant data with
//!   kappa1 = -s cos(theta) sqrt(1 - s cos^2), kappa2 = sqrt(s)(1 - s cos^2),
//!   requiring cos(theta) < 0 so that kappa1 > 0;
//! * normal-bundle C-parallel: Legendre data with a free kappa1 > 0 and
//!   kappa2 = sqrt(s).
//!
//! Synthesized curves round-trip through the classifier as an end-to-end
//! check of both sides.

use crate::ambient::{AmbientError, ManifoldShape, ModelSpace, Point, Tangent};
use crate::frenet::{CurveSamples, FrenetError};
use serde::Serialize;
use thiserror::Error;

/// Orthonormality drift allowed per unit arc length.
const DRIFT_TOL: f64 = 1e-8;
/// Initial substeps per output interval and the halving cap.
const INITIAL_STRIDE: usize = 8;
const MAX_HALVINGS: usize = 12;
/// Initial frame must be orthonormal to this before integrating.
const FRAME_SEED_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid helix specification: {0}")]
    InvalidSpec(String),
    #[error("step control failed: drift {drift:.3e} per unit arc length still above {tol:.3e} at minimum step {step:.3e}")]
    StepControl { drift: f64, tol: f64, step: f64 },
    #[error(transparent)]
    Ambient(#[from] AmbientError),
}

/// Which construction to run.
#[derive(Debug, Clone, Copy, Serialize)]
pub enum HelixKind {
    /// Tangent-bundle C-parallel slant helix with the given contact angle
    /// (radians, cos(theta) < 0).
    TangentParallel { theta: f64 },
    /// Normal-bundle C-parallel Legendre helix with a free first curvature.
    NormalParallel { kappa1: f64 },
}

/// A helix construction request.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HelixSpec {
    pub shape: ManifoldShape,
    pub kind: HelixKind,
    pub t_span: (f64, f64),
    /// Number of output samples (>= 9 so sampled-mode jets exist).
    pub samples: usize,
}

/// Constants the construction pins down.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HelixConstants {
    pub theorem: u8,
    pub cos_theta: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    /// The lambda the classifier should recover.
    pub lambda_expected: f64,
}

impl HelixSpec {
    pub fn constants(&self) -> Result<HelixConstants, SynthError> {
        let s = self.shape.s() as f64;
        if self.samples < 9 {
            return Err(SynthError::InvalidSpec(format!(
                "need at least 9 output samples, got {}",
                self.samples
            )));
        }
        if self.t_span.0 >= self.t_span.1 {
            return Err(SynthError::InvalidSpec(format!(
                "empty parameter span [{}, {}]",
                self.t_span.0, self.t_span.1
            )));
        }
        match self.kind {
            HelixKind::TangentParallel { theta } => {
                let c = theta.cos();
                // below this the data is effectively Legendre and lambda
                // degenerates toward zero
                if c.abs() < 1e-4 {
                    return Err(SynthError::InvalidSpec(
                        "tangent-bundle construction needs cos(theta) != 0 (non-Legendre); this theta is within 1e-4 of a right angle".into(),
                    ));
                }
                if s * c * c >= 1.0 {
                    return Err(SynthError::InvalidSpec(format!(
                        "need s cos^2(theta) < 1, got {}",
                        s * c * c
                    )));
                }
                if c.abs() > 1.0 / s.sqrt() + 1e-12 {
                    return Err(SynthError::InvalidSpec(format!(
                        "contact angle violates |cos(theta)| <= 1/sqrt(s): {} vs {}",
                        c.abs(),
                        1.0 / s.sqrt()
                    )));
                }
                if c > 0.0 {
                    return Err(SynthError::InvalidSpec(
                        "tangent-bundle construction needs cos(theta) < 0 so that kappa1 = -s cos(theta) sqrt(1 - s cos^2(theta)) is positive; use theta in (pi/2, pi)"
                            .into(),
                    ));
                }
                let root = (1.0 - s * c * c).sqrt();
                let kappa1 = -s * c * root;
                let kappa2 = s.sqrt() * (1.0 - s * c * c);
                Ok(HelixConstants {
                    theorem: 1,
                    cos_theta: c,
                    kappa1,
                    kappa2,
                    lambda_expected: -kappa1 * kappa1 / (s * c),
                })
            }
            HelixKind::NormalParallel { kappa1 } => {
                if kappa1 <= 0.0 {
                    return Err(SynthError::InvalidSpec(format!(
                        "kappa1 must be positive, got {kappa1}"
                    )));
                }
                let kappa2 = s.sqrt();
                Ok(HelixConstants {
                    theorem: 2,
                    cos_theta: 0.0,
                    kappa1,
                    kappa2,
                    lambda_expected: kappa1 * kappa2 / s.sqrt(),
                })
            }
        }
    }
}

/// Initial data at the origin: T from the contact angle and the fixed
/// horizontal seed u = 2 d/dx_1, E2 = phi T / |phi T|, and E3 solved from
/// the xi_sum relation of the corresponding characterization.
pub fn initial_frame(
    space: &ModelSpace,
    spec: &HelixSpec,
) -> Result<(Point, [Tangent; 3], HelixConstants), SynthError> {
    let consts = spec.constants()?;
    let shape = spec.shape;
    let n = shape.dim();
    let p0 = Point::origin(shape);
    let s = shape.s() as f64;
    let c = consts.cos_theta;

    let u = Tangent::basis(n, 0).scale(2.0); // unit horizontal seed
    let xi_sum = space.xi_sum();

    let tangent = xi_sum.scale(c).axpy((1.0 - s * c * c).sqrt(), &u);
    let phi_t = space.phi(&p0, &tangent);
    let e2 = phi_t.scale(1.0 / space.norm(&p0, &phi_t));
    let e3 = match consts.theorem {
        1 => {
            let root = (1.0 - s * c * c).sqrt();
            tangent
                .scale(-s * c)
                .add(&xi_sum)
                .scale(1.0 / (s.sqrt() * root))
        }
        _ => xi_sum.scale(1.0 / s.sqrt()),
    };

    // the construction should hand the integrator an exactly orthonormal
    // frame; anything else is a bug upstream
    let frame = [tangent, e2, e3];
    let mut defect: f64 = 0.0;
    for (a, ea) in frame.iter().enumerate() {
        for (b, eb) in frame.iter().enumerate() {
            let want = if a == b { 1.0 } else { 0.0 };
            defect = defect.max((space.metric(&p0, ea, eb) - want).abs());
        }
    }
    for a in 0..shape.s() {
        defect = defect.max((space.eta(a, &p0, &frame[0])? - c).abs());
    }
    if defect > FRAME_SEED_TOL {
        return Err(SynthError::InvalidSpec(format!(
            "initial frame defect {defect:.3e} exceeds {FRAME_SEED_TOL:.0e}"
        )));
    }
    Ok((p0, frame, consts))
}

/// Integration diagnostics embedded in the output.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub theorem: u8,
    pub cos_theta: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub lambda_expected: f64,
    pub step: f64,
    /// Worst |g(E_a, E_b) - delta| over the run.
    pub frame_drift: f64,
    /// Worst | |T|^2 - 1 | over the run.
    pub speed_dev: f64,
    /// Worst |eta^a(T) - cos(theta)| over the run.
    pub slant_dev: f64,
}

/// A curve produced by integration: grid, points, tangents and the frame
/// fields E2, E3 as provenance.
#[derive(Debug, Clone)]
pub struct SampledCurve {
    pub shape: ManifoldShape,
    pub label: String,
    pub grid: Vec<f64>,
    pub points: Vec<Point>,
    pub tangents: Vec<Tangent>,
    pub e2: Vec<Tangent>,
    pub e3: Vec<Tangent>,
    pub provenance: Provenance,
}

impl SampledCurve {
    /// Coordinate jets for the analysis pipeline (finite differences of
    /// the stored tangents; trims three samples per side).
    pub fn to_samples(&self) -> Result<CurveSamples, FrenetError> {
        CurveSamples::from_points_and_tangents(
            self.shape,
            self.label.clone(),
            &self.grid,
            &self.points,
            &self.tangents,
        )
    }
}

struct FrenetOde<'a> {
    space: &'a ModelSpace,
    kappa1: f64,
    kappa2: f64,
    n: usize,
}

impl FrenetOde<'_> {
    // state layout: [gamma, E1, E2, E3], each of length n
    fn rhs(&self, state: &[f64]) -> Result<Vec<f64>, AmbientError> {
        let n = self.n;
        let p = Point::new(self.space.shape(), state[..n].to_vec())?;
        let gamma = self.space.christoffel(&p)?;
        let e = |i: usize| Tangent::new(state[n * (i + 1)..n * (i + 2)].to_vec());
        let e1 = e(0);
        let e2 = e(1);
        let e3 = e(2);
        let mut out = Vec::with_capacity(4 * n);
        out.extend_from_slice(e1.components());
        // nabla_T E1 = kappa1 E2
        let de1 = e2.scale(self.kappa1).sub(&gamma.contract(&e1, &e1));
        // nabla_T E2 = -kappa1 E1 + kappa2 E3
        let de2 = e1
            .scale(-self.kappa1)
            .axpy(self.kappa2, &e3)
            .sub(&gamma.contract(&e1, &e2));
        // nabla_T E3 = -kappa2 E2 (kappa3 = 0)
        let de3 = e2.scale(-self.kappa2).sub(&gamma.contract(&e1, &e3));
        out.extend_from_slice(de1.components());
        out.extend_from_slice(de2.components());
        out.extend_from_slice(de3.components());
        Ok(out)
    }

    fn rk4_step(&self, state: &[f64], h: f64) -> Result<Vec<f64>, AmbientError> {
        let add_scaled = |base: &[f64], k: &[f64], c: f64| -> Vec<f64> {
            base.iter().zip(k).map(|(b, k)| b + c * k).collect()
        };
        let k1 = self.rhs(state)?;
        let k2 = self.rhs(&add_scaled(state, &k1, 0.5 * h))?;
        let k3 = self.rhs(&add_scaled(state, &k2, 0.5 * h))?;
        let k4 = self.rhs(&add_scaled(state, &k3, h))?;
        Ok(state
            .iter()
            .enumerate()
            .map(|(i, v)| v + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect())
    }
}

/// Integrates the Frenet system over the requested span with classical
/// RK4, halving the step until the frame orthonormality drift per unit
/// arc length falls under 1e-8.
pub fn integrate(space: &ModelSpace, spec: &HelixSpec) -> Result<SampledCurve, SynthError> {
    let (p0, frame, consts) = initial_frame(space, spec)?;
    let n = space.dim();
    let ode = FrenetOde {
        space,
        kappa1: consts.kappa1,
        kappa2: consts.kappa2,
        n,
    };
    let (a, b) = spec.t_span;
    let out_n = spec.samples;
    let span = b - a;
    let drift_budget = DRIFT_TOL * span.max(1.0);

    let mut stride = INITIAL_STRIDE;
    let mut halvings = 0;
    loop {
        let h = span / ((out_n - 1) * stride) as f64;
        let mut state: Vec<f64> = Vec::with_capacity(4 * n);
        state.extend_from_slice(p0.coords());
        for e in &frame {
            state.extend_from_slice(e.components());
        }

        let mut grid = Vec::with_capacity(out_n);
        let mut points = Vec::with_capacity(out_n);
        let mut tangents = Vec::with_capacity(out_n);
        let mut e2s = Vec::with_capacity(out_n);
        let mut e3s = Vec::with_capacity(out_n);
        let mut drift: f64 = 0.0;
        let mut speed_dev: f64 = 0.0;
        let mut slant_dev: f64 = 0.0;

        let mut record = |state: &[f64],
                          t: f64,
                          drift: &mut f64,
                          speed: &mut f64,
                          slant: &mut f64|
         -> Result<(), SynthError> {
            let p = Point::new(space.shape(), state[..n].to_vec())?;
            let es: Vec<Tangent> = (0..3)
                .map(|i| Tangent::new(state[n * (i + 1)..n * (i + 2)].to_vec()))
                .collect();
            for (x, ex) in es.iter().enumerate() {
                for (y, ey) in es.iter().enumerate() {
                    let want = if x == y { 1.0 } else { 0.0 };
                    *drift = drift.max((space.metric(&p, ex, ey) - want).abs());
                }
            }
            *speed = speed.max((space.metric(&p, &es[0], &es[0]) - 1.0).abs());
            for alpha in 0..space.shape().s() {
                *slant = slant.max((space.eta(alpha, &p, &es[0])? - consts.cos_theta).abs());
            }
            grid.push(t);
            points.push(p);
            tangents.push(es[0].clone());
            e2s.push(es[1].clone());
            e3s.push(es[2].clone());
            Ok(())
        };

        record(&state, a, &mut drift, &mut speed_dev, &mut slant_dev)?;
        for j in 1..out_n {
            for _ in 0..stride {
                state = ode.rk4_step(&state, h)?;
            }
            let t = a + span * j as f64 / (out_n - 1) as f64;
            record(&state, t, &mut drift, &mut speed_dev, &mut slant_dev)?;
        }

        if drift <= drift_budget {
            return Ok(SampledCurve {
                shape: space.shape(),
                label: format!("synth-theorem{}", consts.theorem),
                grid,
                points,
                tangents,
                e2: e2s,
                e3: e3s,
                provenance: Provenance {
                    theorem: consts.theorem,
                    cos_theta: consts.cos_theta,
                    kappa1: consts.kappa1,
                    kappa2: consts.kappa2,
                    lambda_expected: consts.lambda_expected,
                    step: h,
                    frame_drift: drift,
                    speed_dev,
                    slant_dev,
                },
            });
        }
        halvings += 1;
        if halvings > MAX_HALVINGS {
            return Err(SynthError::StepControl {
                drift: drift / span.max(1.0),
                tol: DRIFT_TOL,
                step: h,
            });
        }
        stride *= 2;
    }
}

// --- CSV interchange ------------------------------------------------------

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("missing metadata comment line '# m=.. s=..'")]
    MissingMetadata,
    #[error("bad metadata entry '{0}'")]
    BadMetadata(String),
    #[error("line {line}: expected {expected} fields, found {found}")]
    FieldCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: {msg}")]
    BadField { line: usize, msg: String },
    #[error(transparent)]
    Shape(#[from] AmbientError),
}

impl SampledCurve {
    /// CSV with a metadata comment, a header row and one row per sample:
    /// t, coordinates, E1 (tangent), E2, E3 components.
    pub fn to_csv(&self) -> String {
        let n = self.shape.dim();
        let mut out = String::new();
        let p = &self.provenance;
        out.push_str(&format!(
            "# m={} s={} label={} theorem={} cos_theta={} kappa1={} kappa2={}\n",
            self.shape.m(),
            self.shape.s(),
            self.label,
            p.theorem,
            p.cos_theta,
            p.kappa1,
            p.kappa2,
        ));
        out.push('t');
        for c in 1..=n {
            out.push_str(&format!(",c{c}"));
        }
        for e in 1..=3 {
            for c in 1..=n {
                out.push_str(&format!(",e{e}_{c}"));
            }
        }
        out.push('\n');
        for j in 0..self.grid.len() {
            out.push_str(&format!("{:.17e}", self.grid[j]));
            for v in self.points[j].coords() {
                out.push_str(&format!(",{v:.17e}"));
            }
            for field in [&self.tangents[j], &self.e2[j], &self.e3[j]] {
                for v in field.components() {
                    out.push_str(&format!(",{v:.17e}"));
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<SampledCurve, CsvError> {
        let mut lines = text.lines().enumerate();
        let (_, meta) = lines.next().ok_or(CsvError::MissingMetadata)?;
        let meta = meta
            .strip_prefix('#')
            .ok_or(CsvError::MissingMetadata)?
            .trim();
        let mut m = None;
        let mut s = None;
        let mut label = String::from("sampled");
        let mut theorem = 0u8;
        let mut cos_theta = 0.0;
        let mut kappa1 = 0.0;
        let mut kappa2 = 0.0;
        for entry in meta.split_whitespace() {
            let (key, value) = entry
                .split_once('=')
                .ok_or_else(|| CsvError::BadMetadata(entry.to_string()))?;
            let bad = || CsvError::BadMetadata(entry.to_string());
            match key {
                "m" => m = Some(value.parse::<usize>().map_err(|_| bad())?),
                "s" => s = Some(value.parse::<usize>().map_err(|_| bad())?),
                "label" => label = value.to_string(),
                "theorem" => theorem = value.parse::<u8>().map_err(|_| bad())?,
                "cos_theta" => cos_theta = value.parse::<f64>().map_err(|_| bad())?,
                "kappa1" => kappa1 = value.parse::<f64>().map_err(|_| bad())?,
                "kappa2" => kappa2 = value.parse::<f64>().map_err(|_| bad())?,
                _ => {}
            }
        }
        let shape = ManifoldShape::new(
            m.ok_or(CsvError::MissingMetadata)?,
            s.ok_or(CsvError::MissingMetadata)?,
        )?;
        let n = shape.dim();
        let expected = 1 + 4 * n;

        let mut grid = Vec::new();
        let mut points = Vec::new();
        let mut tangents = Vec::new();
        let mut e2 = Vec::new();
        let mut e3 = Vec::new();
        for (idx, line) in lines {
            let lineno = idx + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('t') || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != expected {
                return Err(CsvError::FieldCount {
                    line: lineno,
                    expected,
                    found: fields.len(),
                });
            }
            let parse = |f: &str| -> Result<f64, CsvError> {
                f.parse::<f64>().map_err(|e| CsvError::BadField {
                    line: lineno,
                    msg: format!("'{f}': {e}"),
                })
            };
            grid.push(parse(fields[0])?);
            let block = |start: usize| -> Result<Vec<f64>, CsvError> {
                fields[start..start + n].iter().map(|f| parse(f)).collect()
            };
            points.push(Point::new(shape, block(1)?)?);
            tangents.push(Tangent::new(block(1 + n)?));
            e2.push(Tangent::new(block(1 + 2 * n)?));
            e3.push(Tangent::new(block(1 + 3 * n)?));
        }
        Ok(SampledCurve {
            shape,
            label,
            grid,
            points,
            tangents,
            e2,
            e3,
            provenance: Provenance {
                theorem,
                cos_theta,
                kappa1,
                kappa2,
                lambda_expected: 0.0,
                step: 0.0,
                frame_drift: f64::NAN,
                speed_dev: f64::NAN,
                slant_dev: f64::NAN,
            },
        })
    }
}
