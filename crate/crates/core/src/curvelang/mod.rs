//! Curve definitions: a small expression language with exact symbolic
//! derivatives, numeric evaluation with nested definite integrals, and the
//! `key = value` curve file format.

pub mod ast;
mod deriv;
mod eval;
pub mod parser;

pub use ast::{Expr, ExprKind, Func, Span};
pub use deriv::{differentiate, differentiate_in};
pub use eval::{EvalCtx, EvalError, DEFAULT_QUAD_TOL};
pub use parser::{parse_expr, parse_expr_in, ParseError};

pub use crate::jet::Jet;

use crate::ambient::{AmbientError, ManifoldShape};
use thiserror::Error;

/// Cap on symbolic derivative order: three covariant derivatives of the
/// tangent need four ambient derivatives; order-four Frenet data needs at
/// most five. Anything higher is a caller bug.
pub const MAX_JET_ORDER: usize = 6;

#[derive(Debug, Error)]
pub enum CurveError {
    #[error("derivative order {requested} exceeds the cap of {max}")]
    OrderTooHigh { requested: usize, max: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// A parsed curve: one expression in `t` per ambient coordinate, in the
/// order x_1..x_m, y_1..y_m, z_1..z_s.
#[derive(Debug, Clone)]
pub struct CurveDef {
    pub shape: ManifoldShape,
    pub label: String,
    /// Parameter range declared by the curve file.
    pub t_range: (f64, f64),
    pub components: Vec<Expr>,
}

impl CurveDef {
    pub fn new(
        shape: ManifoldShape,
        label: impl Into<String>,
        t_range: (f64, f64),
        components: Vec<Expr>,
    ) -> Result<Self, CurveFileError> {
        if components.len() != shape.dim() {
            return Err(CurveFileError::ComponentCount {
                expected: shape.dim(),
                got: components.len(),
            });
        }
        if t_range.0 >= t_range.1 {
            return Err(CurveFileError::BadRange {
                t_min: t_range.0,
                t_max: t_range.1,
            });
        }
        Ok(CurveDef {
            shape,
            label: label.into(),
            t_range,
            components,
        })
    }

    /// One jet per coordinate: (c(t), c'(t), ..., c^(order)(t)), derivatives
    /// taken symbolically and then evaluated (quadrature output is never
    /// differentiated numerically).
    pub fn eval_jet(&self, t: f64, order: usize, quad_tol: f64) -> Result<Vec<Jet>, CurveError> {
        let mut sampler = self.sampler(order, quad_tol)?;
        sampler.jets_at(t).map_err(CurveError::from)
    }

    /// Prepares the symbolic derivative table once for a whole sampling
    /// pass; the returned sampler carries the cumulative integral cache.
    pub fn sampler(&self, order: usize, quad_tol: f64) -> Result<CurveSampler, CurveError> {
        if order > MAX_JET_ORDER {
            return Err(CurveError::OrderTooHigh {
                requested: order,
                max: MAX_JET_ORDER,
            });
        }
        let derivs = self
            .components
            .iter()
            .map(|c| {
                let mut table = Vec::with_capacity(order + 1);
                table.push(c.clone());
                for k in 0..order {
                    let next = differentiate(&table[k]);
                    table.push(next);
                }
                table
            })
            .collect();
        Ok(CurveSampler {
            derivs,
            ctx: EvalCtx::cached(quad_tol),
            order,
        })
    }
}

/// Evaluates a curve's coordinate jets at parameter values, reusing one
/// integral cache across the pass.
pub struct CurveSampler {
    derivs: Vec<Vec<Expr>>,
    ctx: EvalCtx,
    order: usize,
}

impl CurveSampler {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn jets_at(&mut self, t: f64) -> Result<Vec<Jet>, EvalError> {
        let mut out = Vec::with_capacity(self.derivs.len());
        for table in &self.derivs {
            let mut values = Vec::with_capacity(table.len());
            for expr in table {
                values.push(expr.eval_with(t, &mut self.ctx)?);
            }
            out.push(Jet::new(values));
        }
        Ok(out)
    }
}

#[derive(Debug, Error)]
pub enum CurveFileError {
    #[error("line {line}: expected 'key = value'")]
    MalformedLine { line: usize },
    #[error("line {line}: invalid value for '{key}': {msg}")]
    BadValue {
        line: usize,
        key: String,
        msg: String,
    },
    #[error("line {line}: component {key}: {source}")]
    Component {
        line: usize,
        key: String,
        source: ParseError,
    },
    #[error("duplicate key '{key}' at line {line}")]
    DuplicateKey { key: String, line: usize },
    #[error("missing key '{key}'")]
    MissingKey { key: &'static str },
    #[error("component index in '{key}' out of range 1..={max}")]
    ComponentIndex { key: String, max: usize },
    #[error("expected {expected} components, found {got}")]
    ComponentCount { expected: usize, got: usize },
    #[error("t_min must be less than t_max (got {t_min} and {t_max})")]
    BadRange { t_min: f64, t_max: f64 },
    #[error(transparent)]
    Shape(#[from] AmbientError),
}

/// Parses the curve file format: `key = value` lines with `#` comments.
/// Required keys: `m`, `s`, and components `c1` .. `c{2m+s}` in coordinate
/// order x_1..x_m, y_1..y_m, z_1..z_s. Optional: `label`, `t_min`, `t_max`
/// (defaults 0 and 1).
pub fn parse_curve_file(text: &str) -> Result<CurveDef, CurveFileError> {
    let mut m: Option<usize> = None;
    let mut s: Option<usize> = None;
    let mut label = String::from("curve");
    let mut t_min = 0.0;
    let mut t_max = 1.0;
    let mut raw_components: Vec<(usize, String, usize)> = Vec::new(); // (index, text, line)

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let content = content.trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or(CurveFileError::MalformedLine { line })?;
        let key = key.trim();
        let value = value.trim();
        let parse_usize = |v: &str| {
            v.parse::<usize>().map_err(|e| CurveFileError::BadValue {
                line,
                key: key.to_string(),
                msg: e.to_string(),
            })
        };
        let parse_f64 = |v: &str| {
            v.parse::<f64>().map_err(|e| CurveFileError::BadValue {
                line,
                key: key.to_string(),
                msg: e.to_string(),
            })
        };
        match key {
            "m" => {
                if m.replace(parse_usize(value)?).is_some() {
                    return Err(CurveFileError::DuplicateKey {
                        key: key.into(),
                        line,
                    });
                }
            }
            "s" => {
                if s.replace(parse_usize(value)?).is_some() {
                    return Err(CurveFileError::DuplicateKey {
                        key: key.into(),
                        line,
                    });
                }
            }
            "label" => label = value.to_string(),
            "t_min" => t_min = parse_f64(value)?,
            "t_max" => t_max = parse_f64(value)?,
            _ if key.starts_with('c') => {
                let index = key[1..]
                    .parse::<usize>()
                    .map_err(|_| CurveFileError::MalformedLine { line })?;
                if raw_components.iter().any(|(i, _, _)| *i == index) {
                    return Err(CurveFileError::DuplicateKey {
                        key: key.into(),
                        line,
                    });
                }
                raw_components.push((index, value.to_string(), line));
            }
            _ => return Err(CurveFileError::MalformedLine { line }),
        }
    }

    let m = m.ok_or(CurveFileError::MissingKey { key: "m" })?;
    let s = s.ok_or(CurveFileError::MissingKey { key: "s" })?;
    let shape = ManifoldShape::new(m, s)?;
    let n = shape.dim();

    for (index, _, _) in &raw_components {
        if *index < 1 || *index > n {
            return Err(CurveFileError::ComponentIndex {
                key: format!("c{index}"),
                max: n,
            });
        }
    }
    if raw_components.len() != n {
        return Err(CurveFileError::ComponentCount {
            expected: n,
            got: raw_components.len(),
        });
    }
    raw_components.sort_by_key(|(i, _, _)| *i);

    let mut components = Vec::with_capacity(n);
    for (index, text, line) in raw_components {
        let expr = parse_expr(&text).map_err(|source| CurveFileError::Component {
            line,
            key: format!("c{index}"),
            source,
        })?;
        components.push(expr);
    }

    CurveDef::new(shape, label, (t_min, t_max), components)
}
