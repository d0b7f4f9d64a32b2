//! JSON report shapes. Struct field order fixes the key order, so output
//! is byte-stable for a fixed input (modulo the timestamp field).

use serde::Serialize;
use slant_curves::classify::{Checklist, ContactReport};
use slant_curves::frenet::FrenetApparatus;
use std::collections::BTreeMap;

pub fn now_unix() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

#[derive(Serialize)]
pub struct AxiomsOutput {
    pub command: &'static str,
    pub generated_unix: u64,
    pub report: slant_curves::AxiomReport,
    pub verdict: &'static str,
}

#[derive(Serialize, Clone, Copy)]
pub struct GridEcho {
    pub t_min: f64,
    pub t_max: f64,
    pub n: usize,
}

#[derive(Serialize)]
pub struct SpeedReport {
    pub unit_speed: bool,
    pub max_deviation: f64,
    pub min_speed: f64,
    pub max_speed: f64,
    pub arc_length: f64,
    pub param_length: f64,
}

impl SpeedReport {
    pub fn passing(fa: &FrenetApparatus) -> Self {
        SpeedReport {
            unit_speed: true,
            max_deviation: fa.max_speed_dev,
            min_speed: fa.speed_range.0,
            max_speed: fa.speed_range.1,
            arc_length: fa.arc_length,
            param_length: fa.grid.last().unwrap() - fa.grid.first().unwrap(),
        }
    }
}

#[derive(Serialize)]
pub struct AlphaSummary {
    pub mean: f64,
    pub max_dev: f64,
}

/// Contact report without the raw per-sample series.
#[derive(Serialize)]
pub struct ContactSummary {
    pub mean_cos_theta: f64,
    pub theta: f64,
    pub max_deviation: f64,
    pub per_alpha: Vec<AlphaSummary>,
    pub is_slant: bool,
    pub is_legendre: bool,
    pub bound: f64,
    pub bound_violation: bool,
}

impl From<&ContactReport> for ContactSummary {
    fn from(c: &ContactReport) -> Self {
        ContactSummary {
            mean_cos_theta: c.mean_cos_theta,
            theta: c.theta,
            max_deviation: c.max_deviation,
            per_alpha: c
                .per_alpha
                .iter()
                .map(|a| AlphaSummary {
                    mean: a.mean,
                    max_dev: a.max_dev,
                })
                .collect(),
            is_slant: c.is_slant,
            is_legendre: c.is_legendre,
            bound: c.bound,
            bound_violation: c.bound_violation,
        }
    }
}

#[derive(Serialize)]
pub struct KappaSummary {
    pub min: f64,
    pub max: f64,
    pub first: f64,
    pub last: f64,
}

#[derive(Serialize)]
pub struct FrenetSummary {
    pub r: usize,
    pub kappa1: KappaSummary,
    pub kappa2: KappaSummary,
    pub kappa3: KappaSummary,
    pub frame_defect: f64,
}

impl From<&FrenetApparatus> for FrenetSummary {
    fn from(fa: &FrenetApparatus) -> Self {
        let summary = |series: &[f64]| {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for v in series {
                lo = lo.min(*v);
                hi = hi.max(*v);
            }
            KappaSummary {
                min: lo,
                max: hi,
                first: *series.first().unwrap_or(&0.0),
                last: *series.last().unwrap_or(&0.0),
            }
        };
        FrenetSummary {
            r: fa.r,
            kappa1: summary(&fa.kappa[0]),
            kappa2: summary(&fa.kappa[1]),
            kappa3: summary(&fa.kappa[2]),
            frame_defect: fa.frame_defect,
        }
    }
}

#[derive(Serialize)]
pub struct AnalyzeOutput {
    pub command: &'static str,
    pub generated_unix: u64,
    pub label: String,
    pub m: usize,
    pub s: usize,
    pub grid: GridEcho,
    pub speed: SpeedReport,
    pub contact: ContactSummary,
    pub frenet: FrenetSummary,
    pub verdict: &'static str,
}

#[derive(Serialize)]
pub struct AnalyzeFailureOutput {
    pub command: &'static str,
    pub generated_unix: u64,
    pub label: String,
    pub m: usize,
    pub s: usize,
    pub grid: GridEcho,
    pub speed: SpeedReport,
    pub contact: ContactSummary,
    pub discrepancy: &'static str,
    pub verdict: &'static str,
}

#[derive(Serialize)]
pub struct ClassifyOutput {
    pub command: &'static str,
    pub generated_unix: u64,
    pub label: String,
    pub m: usize,
    pub s: usize,
    pub which: String,
    pub contact: ContactSummary,
    pub class: String,
    pub lambda_t: Vec<f64>,
    pub lambda: Vec<f64>,
    pub residuals: BTreeMap<String, f64>,
    pub checklist: Checklist,
    pub verdict: &'static str,
}

#[derive(Serialize)]
pub struct ConstantsEcho {
    pub cos_theta: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub lambda_expected: f64,
}

#[derive(Serialize)]
pub struct IntegrationEcho {
    pub t_min: f64,
    pub t_max: f64,
    pub samples: usize,
    pub step: f64,
    pub frame_drift: f64,
    pub speed_dev: f64,
    pub slant_dev: f64,
}

#[derive(Serialize)]
pub struct RoundTripEcho {
    pub which: String,
    pub granted: bool,
    pub residual: f64,
    pub max_lambda_dev: f64,
}

#[derive(Serialize)]
pub struct SynthCertificate {
    pub command: &'static str,
    pub generated_unix: u64,
    pub theorem: u8,
    pub m: usize,
    pub s: usize,
    pub constants: ConstantsEcho,
    pub integration: IntegrationEcho,
    pub roundtrip: RoundTripEcho,
    pub checklist: Checklist,
    pub verdict: &'static str,
}

/// One published-value comparison.
#[derive(Serialize)]
pub struct CheckRow {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl CheckRow {
    pub fn value(name: &'static str, expected: f64, got: f64, tol: f64) -> Self {
        let pass = (got - expected).abs() < tol;
        CheckRow {
            name,
            pass,
            detail: format!("expected {expected:.8} +- {tol:.1e}, got {got:.8}"),
        }
    }

    pub fn residual(name: &'static str, got: f64, tol: f64) -> Self {
        CheckRow {
            name,
            pass: got < tol,
            detail: format!("residual {got:.3e}, tolerance {tol:.1e}"),
        }
    }

    pub fn flag(name: &'static str, got: bool) -> Self {
        CheckRow {
            name,
            pass: got,
            detail: format!("expected true, got {got}"),
        }
    }
}

#[derive(Serialize)]
pub struct ExampleOutput {
    pub command: &'static str,
    pub generated_unix: u64,
    pub which: u8,
    pub notes: Vec<String>,
    pub checks: Vec<CheckRow>,
    pub verdict: &'static str,
}
