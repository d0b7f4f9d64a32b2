//! Contact-angle analysis, C-parallel / C-proper detection with recovery
//! of the proportionality function lambda, and the four characterization
//! checklists.
//!
//! A curve is C-parallel (resp. C-proper), in the tangent or normal
//! bundle, when the corresponding operator field W equals
//! lambda * sum_a xi_a for a nowhere-zero function lambda. Since
//! |sum_a xi_a|^2 = s exactly, lambda is recovered by projection,
//! lambda = g(W, xi_sum) / s, and the class is granted when the defect
//! |W - lambda xi_sum| stays below `class_tol` with min |lambda| above
//! `lambda_tol`.

use crate::ambient::{ModelSpace, Point, Tangent};
use crate::frenet::{FrenetApparatus, OperatorKind, OperatorSet};
use crate::Tolerances;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// Margin above the theoretical contact-angle bound 1/sqrt(s) before an
/// input is flagged as inconsistent with the structure.
pub const BOUND_MARGIN: f64 = 1e-9;

/// The four classification conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConditionKind {
    ParallelTangent,
    ParallelNormal,
    ProperTangent,
    ProperNormal,
}

impl ConditionKind {
    pub const ALL: [ConditionKind; 4] = [
        ConditionKind::ParallelTangent,
        ConditionKind::ParallelNormal,
        ConditionKind::ProperTangent,
        ConditionKind::ProperNormal,
    ];

    /// The operator field the condition constrains.
    pub fn operator(&self) -> OperatorKind {
        match self {
            ConditionKind::ParallelTangent => OperatorKind::NablaTH,
            ConditionKind::ParallelNormal => OperatorKind::NablaTPerpH,
            ConditionKind::ProperTangent => OperatorKind::DeltaH,
            ConditionKind::ProperNormal => OperatorKind::DeltaPerpH,
        }
    }

    /// Class label used in reports.
    pub fn label(&self) -> &'static str {
        match self {
            ConditionKind::ParallelTangent => "C-parallel-tangent",
            ConditionKind::ParallelNormal => "C-parallel-normal",
            ConditionKind::ProperTangent => "C-proper-tangent",
            ConditionKind::ProperNormal => "C-proper-normal",
        }
    }

    /// The characterization checklist matching the condition.
    pub fn theorem(&self) -> u8 {
        match self {
            ConditionKind::ParallelTangent => 1,
            ConditionKind::ParallelNormal => 2,
            ConditionKind::ProperTangent => 3,
            ConditionKind::ProperNormal => 4,
        }
    }
}

impl fmt::Display for ConditionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConditionKind::ParallelTangent => "parallel-tangent",
            ConditionKind::ParallelNormal => "parallel-normal",
            ConditionKind::ProperTangent => "proper-tangent",
            ConditionKind::ProperNormal => "proper-normal",
        };
        f.write_str(s)
    }
}

impl FromStr for ConditionKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "parallel-tangent" => ConditionKind::ParallelTangent,
            "parallel-normal" => ConditionKind::ParallelNormal,
            "proper-tangent" => ConditionKind::ProperTangent,
            "proper-normal" => ConditionKind::ProperNormal,
            other => {
                return Err(format!(
                    "unknown condition '{other}' (expected parallel-tangent, parallel-normal, proper-tangent or proper-normal)"
                ))
            }
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AlphaContact {
    pub mean: f64,
    pub max_dev: f64,
}

/// Contact-angle report: cos(theta_a) = eta^a(T) per characteristic field.
#[derive(Debug, Clone, Serialize)]
pub struct ContactReport {
    /// cos(theta) samples, indexed [alpha][sample].
    pub cos_theta: Vec<Vec<f64>>,
    pub per_alpha: Vec<AlphaContact>,
    pub mean_cos_theta: f64,
    /// theta = acos(mean cos), in [0, pi].
    pub theta: f64,
    /// Worst |cos_theta - mean| over all alpha and samples.
    pub max_deviation: f64,
    pub is_slant: bool,
    pub is_legendre: bool,
    /// The theoretical bound 1/sqrt(s).
    pub bound: f64,
    /// Set when |cos theta| exceeds the bound by more than the margin;
    /// signals a structure/curve mismatch.
    pub bound_violation: bool,
}

/// Contact report from raw samples (usable even when the Frenet gate
/// rejects the curve).
pub fn contact_report_from(
    space: &ModelSpace,
    points: &[Point],
    tangents: &[Tangent],
    slant_tol: f64,
) -> ContactReport {
    let s = space.shape().s();
    let n = points.len();
    let mut cos_theta = vec![Vec::with_capacity(n); s];
    for (p, t) in points.iter().zip(tangents) {
        for (a, series) in cos_theta.iter_mut().enumerate() {
            series.push(space.eta(a, p, t).expect("alpha in range"));
        }
    }
    let mut total = 0.0;
    for series in &cos_theta {
        total += series.iter().sum::<f64>();
    }
    let mean = total / (s * n) as f64;
    let per_alpha: Vec<AlphaContact> = cos_theta
        .iter()
        .map(|series| {
            let am = series.iter().sum::<f64>() / n as f64;
            let dev = series.iter().map(|c| (c - am).abs()).fold(0.0, f64::max);
            AlphaContact {
                mean: am,
                max_dev: dev,
            }
        })
        .collect();
    let max_deviation = cos_theta
        .iter()
        .flatten()
        .map(|c| (c - mean).abs())
        .fold(0.0, f64::max);
    let bound = 1.0 / (s as f64).sqrt();
    let worst_abs = cos_theta
        .iter()
        .flatten()
        .map(|c| c.abs())
        .fold(0.0, f64::max);
    let is_slant = max_deviation < slant_tol;
    ContactReport {
        cos_theta,
        per_alpha,
        mean_cos_theta: mean,
        theta: mean.clamp(-1.0, 1.0).acos(),
        max_deviation,
        is_slant,
        is_legendre: is_slant && mean.abs() < slant_tol,
        bound,
        bound_violation: worst_abs > bound + BOUND_MARGIN,
    }
}

/// Contact report along an analyzed curve.
pub fn contact_report(space: &ModelSpace, fa: &FrenetApparatus, slant_tol: f64) -> ContactReport {
    contact_report_from(space, &fa.points, &fa.tangents, slant_tol)
}

/// Outcome of testing one condition W = lambda * xi_sum.
#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    /// Condition queried, e.g. "parallel-tangent".
    pub which: String,
    /// Granted class label, or "none".
    pub class: String,
    pub granted: bool,
    /// Parameter values of the interior samples lambda is reported on.
    pub t: Vec<f64>,
    /// Recovered lambda(t) samples.
    pub lambda: Vec<f64>,
    /// Worst defect |W - lambda xi_sum| in g-norm.
    pub residual: f64,
    pub lambda_min_abs: f64,
    pub lambda_nonzero: bool,
}

/// Tests the selected condition against the operator fields.
pub fn classify(
    space: &ModelSpace,
    fa: &FrenetApparatus,
    ops: &OperatorSet,
    which: ConditionKind,
    tols: &Tolerances,
) -> ClassificationReport {
    let field = ops.field(which.operator());
    let s = space.shape().s() as f64;
    let xi_sum = space.xi_sum();
    let lo = fa.interior().start.max(field.offset);
    let hi = fa.interior().end.min(field.offset + field.vectors.len());
    let mut t = Vec::new();
    let mut lambda = Vec::new();
    let mut residual: f64 = 0.0;
    let mut lambda_min_abs = f64::INFINITY;
    for j in lo..hi {
        let w = field.get(j).expect("in range");
        let p = &fa.points[j];
        let lam = space.metric(p, w, &xi_sum) / s;
        let defect = space.norm(p, &w.axpy(-lam, &xi_sum));
        residual = residual.max(defect);
        lambda_min_abs = lambda_min_abs.min(lam.abs());
        t.push(fa.grid[j]);
        lambda.push(lam);
    }
    let lambda_nonzero = lambda_min_abs > tols.lambda_tol;
    let granted = residual < tols.class_tol && lambda_nonzero;
    ClassificationReport {
        which: which.to_string(),
        class: if granted {
            which.label().into()
        } else {
            "none".into()
        },
        granted,
        t,
        lambda,
        residual,
        lambda_min_abs,
        lambda_nonzero,
    }
}

/// Residual map for one characterization checklist.
#[derive(Debug, Clone, Serialize)]
pub struct Checklist {
    pub theorem: u8,
    /// Whether the checklist's hypotheses hold for this curve.
    pub applicable: bool,
    pub notes: Vec<String>,
    pub residuals: BTreeMap<String, f64>,
    pub max_residual: f64,
    pub passed: bool,
}

struct ChecklistBuilder<'a> {
    space: &'a ModelSpace,
    fa: &'a FrenetApparatus,
    tols: &'a Tolerances,
    theorem: u8,
    notes: Vec<String>,
    applicable: bool,
    residuals: BTreeMap<String, f64>,
}

impl<'a> ChecklistBuilder<'a> {
    fn new(
        space: &'a ModelSpace,
        fa: &'a FrenetApparatus,
        tols: &'a Tolerances,
        theorem: u8,
    ) -> Self {
        ChecklistBuilder {
            space,
            fa,
            tols,
            theorem,
            notes: Vec::new(),
            applicable: true,
            residuals: BTreeMap::new(),
        }
    }

    fn require(&mut self, ok: bool, note: &str) {
        if !ok {
            self.applicable = false;
            self.notes.push(note.to_string());
        }
    }

    fn record(&mut self, key: &str, value: f64) {
        let slot = self.residuals.entry(key.to_string()).or_insert(0.0);
        if value > *slot {
            *slot = value;
        }
    }

    /// max - min over the interior samples.
    fn spread(&self, series: &[f64]) -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for j in self.fa.interior() {
            lo = lo.min(series[j]);
            hi = hi.max(series[j]);
        }
        hi - lo
    }

    fn spread_of<F: Fn(usize) -> f64>(&self, f: F) -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for j in self.fa.interior() {
            let v = f(j);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        hi - lo
    }

    /// Normalized residual of projecting v onto the span of (orthonormal)
    /// frame vectors with the given indices; missing frame vectors simply
    /// do not contribute.
    fn span_residual(&self, j: usize, v: &Tangent, frame_indices: &[usize]) -> f64 {
        let p = &self.fa.points[j];
        let mut res = v.clone();
        for &i in frame_indices {
            if let Some(e) = self.fa.frame(j, i) {
                res = res.axpy(-self.space.metric(p, v, e), e);
            }
        }
        self.space.norm(p, &res) / self.space.norm(p, v)
    }

    fn kappa3_is_zero(&self) -> bool {
        self.fa
            .interior()
            .map(|j| self.fa.kappa[2][j].abs())
            .fold(0.0, f64::max)
            < self.tols.const_tol
    }

    fn finish(self) -> Checklist {
        let max_residual = self.residuals.values().cloned().fold(0.0, f64::max);
        let passed = self.applicable
            && self.residuals.iter().all(|(key, &value)| {
                let tol = if key.starts_with("span_") {
                    self.tols.span_tol
                } else {
                    self.tols.checklist_tol
                };
                value < tol
            });
        Checklist {
            theorem: self.theorem,
            applicable: self.applicable,
            notes: self.notes,
            residuals: self.residuals,
            max_residual,
            passed,
        }
    }
}

/// Characterization of C-parallel (tangent bundle) curves: non-Legendre
/// slant helix of order >= 3 with
///   kappa2 = -kappa1 sqrt(1 - s cos^2) / (sqrt(s) cos),
///   lambda = -kappa1^2 / (s cos) constant,
///   xi_sum in span{T, E3},  phi T in span{E2, E4},
/// and, when kappa3 = 0,
///   kappa1 = -s cos sqrt(1 - s cos^2),  kappa2 = sqrt(s)(1 - s cos^2).
pub fn theorem1_checklist(
    space: &ModelSpace,
    fa: &FrenetApparatus,
    contact: &ContactReport,
    tols: &Tolerances,
) -> Checklist {
    let mut b = ChecklistBuilder::new(space, fa, tols, 1);
    b.require(contact.is_slant, "requires a slant curve");
    b.require(!contact.is_legendre, "requires a non-Legendre curve");
    b.require(fa.r >= 3, "requires osculating order at least 3");
    if !b.applicable {
        return b.finish();
    }
    let s = space.shape().s() as f64;
    let c = contact.mean_cos_theta;
    let root = (1.0 - s * c * c).max(0.0).sqrt();

    b.record("kappa1_constant", b.spread(&fa.kappa[0]));
    b.record("kappa2_constant", b.spread(&fa.kappa[1]));
    b.record("kappa3_constant", b.spread(&fa.kappa[2]));
    let slant_relation = fa
        .interior()
        .map(|j| (fa.kappa[1][j] + fa.kappa[0][j] * root / (s.sqrt() * c)).abs())
        .fold(0.0, f64::max);
    b.record("eq_kappa2_slant_relation", slant_relation);
    b.record(
        "lambda_constant",
        b.spread_of(|j| -fa.kappa[0][j] * fa.kappa[0][j] / (s * c)),
    );

    let xi_sum = space.xi_sum();
    for j in fa.interior() {
        b.record("span_xi_sum_in_T_E3", b.span_residual(j, &xi_sum, &[0, 2]));
        let phi_t = space.phi(&fa.points[j], &fa.tangents[j]);
        b.record("span_phi_T_in_E2_E4", b.span_residual(j, &phi_t, &[1, 3]));
    }

    if b.kappa3_is_zero() {
        let want_k1 = -s * c * root;
        let want_k2 = s.sqrt() * (1.0 - s * c * c);
        let r1 = fa
            .interior()
            .map(|j| (fa.kappa[0][j] - want_k1).abs())
            .fold(0.0, f64::max);
        let r2 = fa
            .interior()
            .map(|j| (fa.kappa[1][j] - want_k2).abs())
            .fold(0.0, f64::max);
        b.record("eq_kappa3zero_kappa1", r1);
        b.record("eq_kappa3zero_kappa2", r2);
    }
    b.finish()
}

/// Characterization of C-parallel (normal bundle) curves: Legendre helix
/// of order >= 3 with xi_sum = sqrt(s) E3,
/// phi T = (kappa2/sqrt(s)) E2 - (kappa3/sqrt(s)) E4,
/// lambda = kappa1 kappa2 / sqrt(s); kappa3 = 0 forces kappa2 = sqrt(s)
/// and phi T = E2.
pub fn theorem2_checklist(
    space: &ModelSpace,
    fa: &FrenetApparatus,
    contact: &ContactReport,
    tols: &Tolerances,
) -> Checklist {
    let mut b = ChecklistBuilder::new(space, fa, tols, 2);
    b.require(contact.is_legendre, "requires a Legendre curve");
    b.require(fa.r >= 3, "requires osculating order at least 3");
    if !b.applicable {
        return b.finish();
    }
    let s = space.shape().s() as f64;
    let sqrt_s = s.sqrt();

    b.record("kappa1_constant", b.spread(&fa.kappa[0]));
    b.record("kappa2_constant", b.spread(&fa.kappa[1]));
    b.record("kappa3_constant", b.spread(&fa.kappa[2]));
    b.record(
        "lambda_constant",
        b.spread_of(|j| fa.kappa[0][j] * fa.kappa[1][j] / sqrt_s),
    );

    let xi_sum = space.xi_sum();
    for j in fa.interior() {
        let p = &fa.points[j];
        if let Some(e3) = fa.frame(j, 2) {
            b.record(
                "eq_E3_is_xi_sum_over_sqrt_s",
                space.norm(p, &e3.sub(&xi_sum.scale(1.0 / sqrt_s))),
            );
        }
        // phi T - (k2/sqrt(s)) E2 + (k3/sqrt(s)) E4
        let mut res = space.phi(p, &fa.tangents[j]);
        if let Some(e2) = fa.frame(j, 1) {
            res = res.axpy(-fa.kappa[1][j] / sqrt_s, e2);
        }
        if let Some(e4) = fa.frame(j, 3) {
            res = res.axpy(fa.kappa[2][j] / sqrt_s, e4);
        }
        b.record("eq_phi_T_frame_relation", space.norm(p, &res));
    }

    if b.kappa3_is_zero() {
        let rk2 = fa
            .interior()
            .map(|j| (fa.kappa[1][j] - sqrt_s).abs())
            .fold(0.0, f64::max);
        b.record("eq_kappa3zero_kappa2_sqrt_s", rk2);
        for j in fa.interior() {
            let p = &fa.points[j];
            if let Some(e2) = fa.frame(j, 1) {
                let phi_t = space.phi(p, &fa.tangents[j]);
                b.record("eq_kappa3zero_phi_T_is_E2", space.norm(p, &phi_t.sub(e2)));
            }
        }
    }
    b.finish()
}

/// Shared identities of the two C-proper characterizations:
///   lambda s eta^a(E3) = -(2 kappa1' kappa2 + kappa1 kappa2'),
///   lambda s eta^a(E4) = -kappa1 kappa2 kappa3,
///   eta^a(E3)^2 + eta^a(E4)^2 = (1 - s cos^2) / s.
fn proper_shared_identities(b: &mut ChecklistBuilder<'_>, lambda: &[f64], cos_theta: f64) {
    let fa = b.fa;
    let space = b.space;
    let s = space.shape().s() as f64;
    let s_int = space.shape().s();
    let off = fa.kappa_derivs.offset;
    for j in fa.interior() {
        let p = &fa.points[j];
        let k1 = fa.kappa[0][j];
        let k2 = fa.kappa[1][j];
        let k3 = fa.kappa[2][j];
        let k1p = fa.kappa_derivs.kappa1_prime[j - off];
        let k2p = fa.kappa_derivs.kappa2_prime[j - off];
        let lam = lambda[j - off];
        for a in 0..s_int {
            let eta_e3 = fa
                .frame(j, 2)
                .map(|e| space.eta(a, p, e).expect("alpha in range"))
                .unwrap_or(0.0);
            let eta_e4 = fa
                .frame(j, 3)
                .map(|e| space.eta(a, p, e).expect("alpha in range"))
                .unwrap_or(0.0);
            b.record(
                "eq_lambda_eta_E3",
                (lam * s * eta_e3 + 2.0 * k1p * k2 + k1 * k2p).abs(),
            );
            b.record("eq_lambda_eta_E4", (lam * s * eta_e4 + k1 * k2 * k3).abs());
            b.record(
                "eq_eta_E3_E4_norm",
                (eta_e3 * eta_e3 + eta_e4 * eta_e4 - (1.0 - s * cos_theta * cos_theta) / s).abs(),
            );
        }
    }
}

/// E5 direction estimated from nabla_T E4 = -kappa3 E3 + kappa4 E5 via
/// finite differences; None when the curve never reaches order 5.
fn estimate_e5(
    space: &ModelSpace,
    fa: &FrenetApparatus,
    tols: &Tolerances,
) -> Option<crate::frenet::OperatorField> {
    if fa.r < 4 {
        return None;
    }
    let e4_field = crate::frenet::OperatorField {
        offset: 0,
        vectors: (0..fa.len())
            .map(|j| {
                fa.frame(j, 3)
                    .cloned()
                    .unwrap_or_else(|| Tangent::zero(fa.shape.dim()))
            })
            .collect(),
    };
    let deriv = crate::frenet::covariant_derivative_fd(space, fa, &e4_field).ok()?;
    let mut out = Vec::with_capacity(deriv.vectors.len());
    let mut any = false;
    for (i, v) in deriv.vectors.iter().enumerate() {
        let j = deriv.offset + i;
        let p = &fa.points[j];
        let mut u = v.clone();
        if let Some(e3) = fa.frame(j, 2) {
            u = u.axpy(fa.kappa[2][j], e3);
        }
        let norm = space.norm(p, &u);
        if norm > tols.rank_tol.sqrt() {
            any = true;
            out.push(u.scale(1.0 / norm));
        } else {
            out.push(Tangent::zero(fa.shape.dim()));
        }
    }
    any.then_some(crate::frenet::OperatorField {
        offset: deriv.offset,
        vectors: out,
    })
}

/// Characterization of C-proper (tangent bundle) curves: non-Legendre
/// slant curve with kappa1 non-constant, kappa2 nonzero,
///   lambda = 3 kappa1 kappa1' / (s cos),
///   kappa1^2 + kappa2^2 = kappa1'' / kappa1,
/// the shared eta identities, xi_sum in span{T, E3, E4},
/// phi T in span{E2..E5}; when kappa3 = 0 also
///   phi T = sqrt(1 - s cos^2) E2,
///   E3 = (-s cos T + xi_sum) / (sqrt(s) sqrt(1 - s cos^2)),
///   kappa2 = sqrt(s) (1 + kappa1 cos / sqrt(1 - s cos^2)).
pub fn theorem3_checklist(
    space: &ModelSpace,
    fa: &FrenetApparatus,
    contact: &ContactReport,
    tols: &Tolerances,
) -> Checklist {
    let mut b = ChecklistBuilder::new(space, fa, tols, 3);
    b.require(contact.is_slant, "requires a slant curve");
    b.require(!contact.is_legendre, "requires a non-Legendre curve");
    let k1_spread = b.spread(&fa.kappa[0]);
    b.require(
        k1_spread > 100.0 * tols.const_tol,
        "requires non-constant kappa1",
    );
    let k2_min = fa
        .interior()
        .map(|j| fa.kappa[1][j].abs())
        .fold(f64::INFINITY, f64::min);
    b.require(k2_min > tols.lambda_tol, "requires nonzero kappa2");
    if !b.applicable {
        return b.finish();
    }
    let s = space.shape().s() as f64;
    let c = contact.mean_cos_theta;
    let root = (1.0 - s * c * c).max(0.0).sqrt();
    let off = fa.kappa_derivs.offset;

    let lambda: Vec<f64> = fa
        .interior()
        .map(|j| 3.0 * fa.kappa[0][j] * fa.kappa_derivs.kappa1_prime[j - off] / (s * c))
        .collect();

    for j in fa.interior() {
        let k1 = fa.kappa[0][j];
        let k2 = fa.kappa[1][j];
        let k1pp = fa.kappa_derivs.kappa1_second[j - off];
        b.record(
            "eq_kappa_sq_sum_is_kappa1pp_over_kappa1",
            (k1 * k1 + k2 * k2 - k1pp / k1).abs(),
        );
    }
    proper_shared_identities(&mut b, &lambda, c);

    let xi_sum = space.xi_sum();
    let e5 = estimate_e5(space, fa, tols);
    for j in fa.interior() {
        b.record(
            "span_xi_sum_in_T_E3_E4",
            b.span_residual(j, &xi_sum, &[0, 2, 3]),
        );
        let p = &fa.points[j];
        let phi_t = space.phi(p, &fa.tangents[j]);
        let mut res = phi_t.clone();
        for &i in &[1usize, 2, 3] {
            if let Some(e) = fa.frame(j, i) {
                res = res.axpy(-space.metric(p, &phi_t, e), e);
            }
        }
        if let Some(field) = &e5 {
            if let Some(e5v) = field.get(j) {
                res = res.axpy(-space.metric(p, &phi_t, e5v), e5v);
            }
        }
        b.record(
            "span_phi_T_in_E2_to_E5",
            space.norm(p, &res) / space.norm(p, &phi_t),
        );
    }

    if b.kappa3_is_zero() {
        for j in fa.interior() {
            let p = &fa.points[j];
            let phi_t = space.phi(p, &fa.tangents[j]);
            if let Some(e2) = fa.frame(j, 1) {
                b.record(
                    "eq_kappa3zero_phi_T",
                    space.norm(p, &phi_t.sub(&e2.scale(root))),
                );
            }
            if let Some(e3) = fa.frame(j, 2) {
                let want = xi_sum
                    .axpy(-s * c, &fa.tangents[j])
                    .scale(1.0 / (s.sqrt() * root));
                b.record("eq_kappa3zero_E3", space.norm(p, &e3.sub(&want)));
            }
            let k1 = fa.kappa[0][j];
            let want_k2 = s.sqrt() * (1.0 + k1 * c / root);
            b.record("eq_kappa3zero_kappa2", (fa.kappa[1][j] - want_k2).abs());
        }
    }
    b.finish()
}

/// Characterization of C-proper (normal bundle) curves: Legendre curve
/// with kappa1 non-constant, kappa2 nonzero,
/// kappa1 kappa2^2 - kappa1'' = 0, the shared eta identities with
/// eta(E3)^2 + eta(E4)^2 = 1/s, xi_sum in span{E3, E4},
/// phi T in span{E2..E5}; kappa3 = 0 forces xi_sum = sqrt(s) E3,
/// kappa2 = sqrt(s), phi T = E2.
pub fn theorem4_checklist(
    space: &ModelSpace,
    fa: &FrenetApparatus,
    contact: &ContactReport,
    tols: &Tolerances,
) -> Checklist {
    let mut b = ChecklistBuilder::new(space, fa, tols, 4);
    b.require(contact.is_legendre, "requires a Legendre curve");
    let k1_spread = b.spread(&fa.kappa[0]);
    b.require(
        k1_spread > 100.0 * tols.const_tol,
        "requires non-constant kappa1",
    );
    let k2_min = fa
        .interior()
        .map(|j| fa.kappa[1][j].abs())
        .fold(f64::INFINITY, f64::min);
    b.require(k2_min > tols.lambda_tol, "requires nonzero kappa2");
    if !b.applicable {
        return b.finish();
    }
    let s = space.shape().s() as f64;
    let sqrt_s = s.sqrt();
    let off = fa.kappa_derivs.offset;
    let xi_sum = space.xi_sum();

    // lambda from the normal-bundle operator assembled out of Frenet data
    let lambda: Vec<f64> = fa
        .interior()
        .map(|j| {
            let p = &fa.points[j];
            let k1 = fa.kappa[0][j];
            let k2 = fa.kappa[1][j];
            let k3 = fa.kappa[2][j];
            let k1p = fa.kappa_derivs.kappa1_prime[j - off];
            let k1pp = fa.kappa_derivs.kappa1_second[j - off];
            let k2p = fa.kappa_derivs.kappa2_prime[j - off];
            let mut w = Tangent::zero(fa.shape.dim());
            if let Some(e2) = fa.frame(j, 1) {
                w = w.axpy(k1 * k2 * k2 - k1pp, e2);
            }
            if let Some(e3) = fa.frame(j, 2) {
                w = w.axpy(-(2.0 * k1p * k2 + k1 * k2p), e3);
            }
            if let Some(e4) = fa.frame(j, 3) {
                w = w.axpy(-k1 * k2 * k3, e4);
            }
            space.metric(p, &w, &xi_sum) / s
        })
        .collect();

    for j in fa.interior() {
        let k1 = fa.kappa[0][j];
        let k2 = fa.kappa[1][j];
        let k1pp = fa.kappa_derivs.kappa1_second[j - off];
        b.record(
            "eq_kappa1_kappa2sq_minus_kappa1pp",
            (k1 * k2 * k2 - k1pp).abs(),
        );
    }
    // Legendre: cos theta = 0, so the shared norm identity reads 1/s
    proper_shared_identities(&mut b, &lambda, 0.0);

    let e5 = estimate_e5(space, fa, tols);
    for j in fa.interior() {
        b.record("span_xi_sum_in_E3_E4", b.span_residual(j, &xi_sum, &[2, 3]));
        let p = &fa.points[j];
        let phi_t = space.phi(p, &fa.tangents[j]);
        let mut res = phi_t.clone();
        for &i in &[1usize, 2, 3] {
            if let Some(e) = fa.frame(j, i) {
                res = res.axpy(-space.metric(p, &phi_t, e), e);
            }
        }
        if let Some(field) = &e5 {
            if let Some(e5v) = field.get(j) {
                res = res.axpy(-space.metric(p, &phi_t, e5v), e5v);
            }
        }
        b.record(
            "span_phi_T_in_E2_to_E5",
            space.norm(p, &res) / space.norm(p, &phi_t),
        );
    }

    if b.kappa3_is_zero() {
        for j in fa.interior() {
            let p = &fa.points[j];
            if let Some(e3) = fa.frame(j, 2) {
                b.record(
                    "eq_kappa3zero_xi_sum_E3",
                    space.norm(p, &e3.sub(&xi_sum.scale(1.0 / sqrt_s))),
                );
            }
            b.record(
                "eq_kappa3zero_kappa2_sqrt_s",
                (fa.kappa[1][j] - sqrt_s).abs(),
            );
            if let Some(e2) = fa.frame(j, 1) {
                let phi_t = space.phi(p, &fa.tangents[j]);
                b.record("eq_kappa3zero_phi_T_is_E2", space.norm(p, &phi_t.sub(e2)));
            }
        }
    }
    b.finish()
}

/// The checklist matching a condition.
pub fn checklist_for(
    which: ConditionKind,
    space: &ModelSpace,
    fa: &FrenetApparatus,
    contact: &ContactReport,
    tols: &Tolerances,
) -> Checklist {
    match which {
        ConditionKind::ParallelTangent => theorem1_checklist(space, fa, contact, tols),
        ConditionKind::ParallelNormal => theorem2_checklist(space, fa, contact, tols),
        ConditionKind::ProperTangent => theorem3_checklist(space, fa, contact, tols),
        ConditionKind::ProperNormal => theorem4_checklist(space, fa, contact, tols),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::ManifoldShape;
    use crate::assets;
    use crate::curvelang::parse_curve_file;
    use crate::frenet::{
        frenet_apparatus, mean_curvature_ops_formula, CurveSamples, FrenetApparatus, OperatorField,
        OperatorSet,
    };
    use approx::assert_relative_eq;

    fn pipeline(
        text: &str,
        a: f64,
        b: f64,
        n: usize,
    ) -> (ModelSpace, FrenetApparatus, ContactReport, OperatorSet) {
        let def = parse_curve_file(text).unwrap();
        let space = ModelSpace::new(def.shape);
        let samples = CurveSamples::from_def(&def, crate::linspace(a, b, n), 1e-10).unwrap();
        let fa = frenet_apparatus(&space, &samples, &Tolerances::default()).unwrap();
        let contact = contact_report(&space, &fa, Tolerances::default().slant_tol);
        let ops = mean_curvature_ops_formula(&fa);
        (space, fa, contact, ops)
    }

    #[test]
    fn legendre_curve_is_c_proper_normal_with_expected_lambda() {
        let (space, fa, contact, ops) = pipeline(assets::EXAMPLE2, 0.0, 0.8, 257);
        assert!(contact.is_legendre);
        assert!(contact.mean_cos_theta.abs() < 1e-8);
        assert!(!contact.bound_violation);

        let tols = Tolerances::default();
        let report = classify(&space, &fa, &ops, ConditionKind::ProperNormal, &tols);
        assert!(report.granted, "residual {:.3e}", report.residual);
        for (t, lam) in report.t.iter().zip(&report.lambda) {
            let want = -8.0 * (2.0 * t).exp();
            assert!(
                (lam - want).abs() < 1e-4 * want.abs(),
                "lambda({t}) = {lam} vs {want}"
            );
        }

        // the parallel conditions fail on this curve
        for kind in [
            ConditionKind::ParallelTangent,
            ConditionKind::ParallelNormal,
        ] {
            let denied = classify(&space, &fa, &ops, kind, &tols);
            assert!(!denied.granted, "{kind} should be denied");
            assert_eq!(denied.class, "none");
        }

        // characterization of the normal-bundle C-proper class holds
        let checklist = theorem4_checklist(&space, &fa, &contact, &tols);
        assert!(checklist.applicable);
        assert!(checklist.passed, "residuals: {:?}", checklist.residuals);
        // kappa1 kappa2^2 - kappa1'' = 8 e^{2t} - 8 e^{2t}
        assert!(checklist.residuals["eq_kappa1_kappa2sq_minus_kappa1pp"] < 1e-4);

        // the normal-bundle *parallel* characterization is applicable
        // (Legendre, r = 3) but fails on non-constant kappa1
        let helix_checklist = theorem2_checklist(&space, &fa, &contact, &tols);
        assert!(helix_checklist.applicable);
        assert!(!helix_checklist.passed);
        assert!(helix_checklist.residuals["kappa1_constant"] > 1.0);

        // the tangent-bundle C-proper characterization needs non-Legendre
        let t3 = theorem3_checklist(&space, &fa, &contact, &tols);
        assert!(!t3.applicable);

        // at cos theta = 0 the slant norm identity reduces to
        // eta(E3)^2 + eta(E4)^2 = 1/s; here eta^a(E3) = 1/2 with s = 4
        for j in fa.interior() {
            let e3 = fa.frame(j, 2).unwrap();
            for a in 0..4 {
                let eta = space.eta(a, &fa.points[j], e3).unwrap();
                assert!((eta * eta - 0.25).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn corrected_slant_helix_is_c_parallel_tangent() {
        let two_pi = std::f64::consts::TAU;
        let (space, fa, contact, ops) = pipeline(assets::EXAMPLE1_CORRECTED, 0.0, two_pi, 257);
        assert!(contact.is_slant && !contact.is_legendre);
        assert_relative_eq!(contact.mean_cos_theta, -0.5, epsilon = 1e-8);
        assert_relative_eq!(
            contact.theta,
            2.0 * std::f64::consts::PI / 3.0,
            epsilon = 1e-6
        );

        let tols = Tolerances::default();
        let report = classify(&space, &fa, &ops, ConditionKind::ParallelTangent, &tols);
        assert!(report.granted, "residual {:.3e}", report.residual);
        for lam in &report.lambda {
            assert!((lam - 0.5).abs() < 1e-4, "lambda = {lam}");
        }

        let checklist = theorem1_checklist(&space, &fa, &contact, &tols);
        assert!(checklist.applicable);
        assert!(checklist.passed, "residuals: {:?}", checklist.residuals);
        assert!(checklist.residuals["eq_kappa3zero_kappa1"] < 1e-4);
        assert!(checklist.residuals["eq_kappa3zero_kappa2"] < 1e-4);

        // published frame: E2 = sqrt(2) phi T, E3 = T + xi_sum
        let xi_sum = space.xi_sum();
        for j in fa.interior() {
            let p = &fa.points[j];
            let e2 = fa.frame(j, 1).unwrap();
            let e3 = fa.frame(j, 2).unwrap();
            let want_e2 = space
                .phi(p, &fa.tangents[j])
                .scale(std::f64::consts::SQRT_2);
            let want_e3 = fa.tangents[j].add(&xi_sum);
            assert!(space.norm(p, &e2.sub(&want_e2)) < 1e-4);
            assert!(space.norm(p, &e3.sub(&want_e3)) < 1e-4);
        }

        // non-constant kappa1 is a hypothesis of the C-proper checklist
        let t3 = theorem3_checklist(&space, &fa, &contact, &tols);
        assert!(!t3.applicable);
        assert!(t3.notes.iter().any(|n| n.contains("kappa1")));
    }

    #[test]
    fn geodesic_attains_bound_and_is_denied() {
        let geo = assets::geodesic_curve_text(1, 4);
        let (space, fa, contact, ops) = pipeline(&geo, 0.0, 1.0, 65);
        assert!(contact.is_slant);
        assert_relative_eq!(contact.mean_cos_theta, 0.5, epsilon = 1e-9);
        assert!(!contact.bound_violation);

        let tols = Tolerances::default();
        for kind in ConditionKind::ALL {
            let report = classify(&space, &fa, &ops, kind, &tols);
            assert!(!report.granted, "{kind} granted on a geodesic");
            assert!(!report.lambda_nonzero);
        }
    }

    #[test]
    fn bound_violation_is_flagged() {
        // T = xi_1 has eta^1(T) = 1 > 1/sqrt(2): impossible for genuine
        // unit-speed data, so the report must flag the mismatch
        let space = ModelSpace::new(ManifoldShape::new(1, 2).unwrap());
        let p = Point::origin(space.shape());
        let t = space.xi(0).unwrap();
        let report = contact_report_from(&space, &[p], &[t], 1e-6);
        assert!(report.bound_violation);
        assert!(!report.is_slant);
    }

    #[test]
    fn lambda_projection_is_exact() {
        let space = ModelSpace::new(ManifoldShape::new(1, 4).unwrap());
        let p = Point::origin(space.shape());
        let xi_sum = space.xi_sum();
        let s = space.shape().s() as f64;
        for lambda0 in [0.37, -8.0, 1e-6, 123.456] {
            let w = xi_sum.scale(lambda0);
            let rec = space.metric(&p, &w, &xi_sum) / s;
            assert!((rec - lambda0).abs() <= f64::EPSILON * lambda0.abs());
        }
    }

    #[test]
    fn classify_recovers_synthetic_lambda_field() {
        let geo = assets::geodesic_curve_text(2, 2);
        let (space, fa, _, _) = pipeline(&geo, 0.0, 1.0, 33);
        let lambda0 = -2.25;
        let field = || OperatorField {
            offset: 0,
            vectors: vec![space.xi_sum().scale(lambda0); fa.len()],
        };
        let ops = OperatorSet {
            nabla_t_h: field(),
            nabla_t_perp_h: field(),
            delta_h: field(),
            delta_perp_h: field(),
        };
        let tols = Tolerances::default();
        for kind in ConditionKind::ALL {
            let report = classify(&space, &fa, &ops, kind, &tols);
            assert!(report.granted);
            assert!(report.residual < 1e-12);
            for lam in &report.lambda {
                assert!((lam - lambda0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn condition_kind_round_trips_through_strings() {
        for kind in ConditionKind::ALL {
            let s = kind.to_string();
            assert_eq!(s.parse::<ConditionKind>().unwrap(), kind);
        }
        assert!("slanted".parse::<ConditionKind>().is_err());
    }
}
