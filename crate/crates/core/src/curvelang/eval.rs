//! Numeric evaluation of expressions, including nested definite integrals.
//!
//! Integral nodes are evaluated by adaptive Simpson quadrature (absolute
//! tolerance, Richardson acceptance, max depth 40). When an [`EvalCtx`] with
//! caching is used, each integral keeps a sorted list of antiderivative
//! checkpoints so that sampling a curve along an increasing grid advances
//! each integral cumulatively instead of re-integrating from 0 — this is
//! what keeps nested-integral curves affordable to sample densely.

use super::ast::{Expr, ExprKind, Func, Span};
use std::collections::HashMap;
use thiserror::Error;

pub const DEFAULT_QUAD_TOL: f64 = 1e-10;
pub const MAX_QUAD_DEPTH: usize = 40;

/// Checkpoints closer than this are not inserted into the cache.
const CHECKPOINT_MIN_SEP: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("domain error at {}..{}: {what}", span.start, span.end)]
    Domain { what: String, span: Span },
    #[error("division by zero at {}..{}", span.start, span.end)]
    DivisionByZero { span: Span },
    #[error("quadrature did not converge at {}..{} (depth {depth})", span.start, span.end)]
    QuadratureNonConvergence { span: Span, depth: usize },
    #[error("unbound variable '{name}' at {}..{} (internal)", span.start, span.end)]
    UnboundVariable { name: String, span: Span },
}

/// Evaluation context: quadrature tolerance plus the per-integral
/// checkpoint cache. A context is confined to one sampling pass; sharing
/// one across unrelated evaluations is safe but pointless.
#[derive(Debug, Clone)]
pub struct EvalCtx {
    pub quad_tol: f64,
    use_cache: bool,
    /// integral fingerprint -> sorted (upper_limit, value) checkpoints
    cache: HashMap<u64, Vec<(f64, f64)>>,
}

impl EvalCtx {
    /// Context with cumulative caching enabled (grid sampling).
    pub fn cached(quad_tol: f64) -> Self {
        EvalCtx {
            quad_tol,
            use_cache: true,
            cache: HashMap::new(),
        }
    }

    /// Context that re-integrates every integral from 0 (the independent
    /// reference path).
    pub fn direct(quad_tol: f64) -> Self {
        EvalCtx {
            quad_tol,
            use_cache: false,
            cache: HashMap::new(),
        }
    }
}

impl Expr {
    /// Direct evaluation at `t` (no cumulative caching).
    pub fn eval(&self, t: f64, quad_tol: f64) -> Result<f64, EvalError> {
        let mut ctx = EvalCtx::direct(quad_tol);
        self.eval_with(t, &mut ctx)
    }

    /// Evaluation through a caller-owned context.
    pub fn eval_with(&self, t: f64, ctx: &mut EvalCtx) -> Result<f64, EvalError> {
        let mut scope = vec![(String::from("t"), t)];
        eval_scoped(self, &mut scope, ctx)
    }
}

fn eval_scoped(
    e: &Expr,
    scope: &mut Vec<(String, f64)>,
    ctx: &mut EvalCtx,
) -> Result<f64, EvalError> {
    let v = match &e.kind {
        ExprKind::Num(v) => *v,
        ExprKind::Var(name) => scope
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
            .ok_or_else(|| EvalError::UnboundVariable {
                name: name.clone(),
                span: e.span,
            })?,
        ExprKind::Neg(a) => -eval_scoped(a, scope, ctx)?,
        ExprKind::Add(a, b) => eval_scoped(a, scope, ctx)? + eval_scoped(b, scope, ctx)?,
        ExprKind::Sub(a, b) => eval_scoped(a, scope, ctx)? - eval_scoped(b, scope, ctx)?,
        ExprKind::Mul(a, b) => eval_scoped(a, scope, ctx)? * eval_scoped(b, scope, ctx)?,
        ExprKind::Div(a, b) => {
            let den = eval_scoped(b, scope, ctx)?;
            if den == 0.0 {
                return Err(EvalError::DivisionByZero { span: e.span });
            }
            eval_scoped(a, scope, ctx)? / den
        }
        ExprKind::Pow(a, k) => eval_scoped(a, scope, ctx)?.powi(*k),
        ExprKind::Apply(f, a) => {
            let x = eval_scoped(a, scope, ctx)?;
            match f {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Tan => x.tan(),
                Func::Exp => x.exp(),
                Func::Ln => {
                    if x <= 0.0 {
                        return Err(EvalError::Domain {
                            what: format!("ln of non-positive value {x}"),
                            span: e.span,
                        });
                    }
                    x.ln()
                }
                Func::Sqrt => {
                    if x < 0.0 {
                        return Err(EvalError::Domain {
                            what: format!("sqrt of negative value {x}"),
                            span: e.span,
                        });
                    }
                    x.sqrt()
                }
            }
        }
        ExprKind::Integral { var, body, fp } => {
            let upper = scope
                .last()
                .map(|(_, v)| *v)
                .expect("scope never empty during evaluation");
            eval_integral(*fp, var, body, upper, e.span, scope, ctx)?
        }
    };
    if !v.is_finite() {
        return Err(EvalError::Domain {
            what: "non-finite intermediate value".into(),
            span: e.span,
        });
    }
    Ok(v)
}

fn eval_integral(
    fp: u64,
    var: &str,
    body: &Expr,
    upper: f64,
    span: Span,
    scope: &mut Vec<(String, f64)>,
    ctx: &mut EvalCtx,
) -> Result<f64, EvalError> {
    // pick the starting point: the nearest cached checkpoint, or 0
    let (start, base_value) = if ctx.use_cache {
        let entries = ctx.cache.entry(fp).or_insert_with(|| vec![(0.0, 0.0)]);
        let idx = entries.partition_point(|(u, _)| *u < upper);
        let mut best = (0.0, 0.0);
        let mut best_dist = f64::INFINITY;
        let lo = idx.saturating_sub(1);
        let hi = (idx + 1).min(entries.len());
        for &cand in &entries[lo..hi] {
            let d = (cand.0 - upper).abs();
            if d < best_dist {
                best_dist = d;
                best = cand;
            }
        }
        best
    } else {
        (0.0, 0.0)
    };

    // keep total cache-walk error proportional to the distance covered
    let tol = if ctx.use_cache {
        (ctx.quad_tol * (upper - start).abs()).clamp(1e-15, ctx.quad_tol)
    } else {
        ctx.quad_tol
    };

    let segment = {
        scope.push((var.to_string(), 0.0));
        let result = integrate_adaptive(
            &mut |x, scope, ctx| {
                scope.last_mut().expect("pushed binding").1 = x;
                eval_scoped(body, scope, ctx)
            },
            start,
            upper,
            tol,
            span,
            scope,
            ctx,
        );
        scope.pop();
        result?
    };
    let value = base_value + segment;

    if ctx.use_cache {
        let entries = ctx.cache.get_mut(&fp).expect("entry created above");
        let idx = entries.partition_point(|(u, _)| *u < upper);
        let near_left = idx > 0 && (entries[idx - 1].0 - upper).abs() < CHECKPOINT_MIN_SEP;
        let near_right = idx < entries.len() && (entries[idx].0 - upper).abs() < CHECKPOINT_MIN_SEP;
        if !near_left && !near_right {
            entries.insert(idx, (upper, value));
        }
    }
    Ok(value)
}

type Integrand<'a> =
    dyn FnMut(f64, &mut Vec<(String, f64)>, &mut EvalCtx) -> Result<f64, EvalError> + 'a;

/// Adaptive Simpson with Richardson extrapolation on [a, b] (signed).
fn integrate_adaptive(
    f: &mut Integrand<'_>,
    a: f64,
    b: f64,
    tol: f64,
    span: Span,
    scope: &mut Vec<(String, f64)>,
    ctx: &mut EvalCtx,
) -> Result<f64, EvalError> {
    if a == b {
        return Ok(0.0);
    }
    let mid = 0.5 * (a + b);
    let fa = f(a, scope, ctx)?;
    let fm = f(mid, scope, ctx)?;
    let fb = f(b, scope, ctx)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(
        f,
        a,
        fa,
        mid,
        fm,
        b,
        fb,
        whole,
        tol,
        MAX_QUAD_DEPTH,
        span,
        scope,
        ctx,
    )
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &mut Integrand<'_>,
    a: f64,
    fa: f64,
    m: f64,
    fm: f64,
    b: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
    span: Span,
    scope: &mut Vec<(String, f64)>,
    ctx: &mut EvalCtx,
) -> Result<f64, EvalError> {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm, scope, ctx)?;
    let frm = f(rm, scope, ctx)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(EvalError::QuadratureNonConvergence {
            span,
            depth: MAX_QUAD_DEPTH,
        });
    }
    let first = simpson_step(
        f,
        a,
        fa,
        lm,
        flm,
        m,
        fm,
        left,
        0.5 * tol,
        depth - 1,
        span,
        scope,
        ctx,
    )?;
    let second = simpson_step(
        f,
        m,
        fm,
        rm,
        frm,
        b,
        fb,
        right,
        0.5 * tol,
        depth - 1,
        span,
        scope,
        ctx,
    )?;
    Ok(first + second)
}
