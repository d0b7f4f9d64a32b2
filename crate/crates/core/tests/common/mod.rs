//! Shared test support: a seeded random expression generator with correct
//! binder scoping, and the 5-point finite-difference oracle used to check
//! symbolic derivatives.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use slant_curves::curvelang::ast::Span;
use slant_curves::curvelang::{Expr, ExprKind, Func};

fn span0() -> Span {
    Span::new(0, 0)
}

fn leaf(rng: &mut ChaCha8Rng, var: &str) -> Expr {
    if rng.random_bool(0.45) {
        Expr::new(ExprKind::Var(var.to_string()), span0())
    } else {
        let c = (rng.random_range(-200..=200) as f64) / 100.0;
        Expr::new(ExprKind::Num(c.abs()), span0())
    }
}

/// Random well-scoped expression. `scope` carries the binder stack
/// (innermost last); integrands only reference their own binder.
pub fn random_expr(rng: &mut ChaCha8Rng, depth: usize, scope: &[&'static str]) -> Expr {
    let var = *scope.last().expect("non-empty scope");
    if depth == 0 {
        return leaf(rng, var);
    }
    let binders: [&'static str; 3] = ["u", "v", "w"];
    let choice = rng.random_range(0..12u32);
    let sub = |rng: &mut ChaCha8Rng| random_expr(rng, depth - 1, scope);
    match choice {
        0 => Expr::new(
            ExprKind::Add(Box::new(sub(rng)), Box::new(sub(rng))),
            span0(),
        ),
        1 => Expr::new(
            ExprKind::Sub(Box::new(sub(rng)), Box::new(sub(rng))),
            span0(),
        ),
        2 => Expr::new(
            ExprKind::Mul(Box::new(sub(rng)), Box::new(sub(rng))),
            span0(),
        ),
        3 => Expr::new(ExprKind::Neg(Box::new(sub(rng))), span0()),
        4 => Expr::new(
            ExprKind::Pow(Box::new(sub(rng)), rng.random_range(2..=3)),
            span0(),
        ),
        5 => Expr::new(ExprKind::Apply(Func::Sin, Box::new(sub(rng))), span0()),
        6 => Expr::new(ExprKind::Apply(Func::Cos, Box::new(sub(rng))), span0()),
        7 => Expr::new(ExprKind::Apply(Func::Exp, Box::new(sub(rng))), span0()),
        8 => {
            // ln and sqrt over a positively-bounded argument: 2.5 + sin(..)
            let bounded = Expr::new(
                ExprKind::Add(
                    Box::new(Expr::new(ExprKind::Num(2.5), span0())),
                    Box::new(Expr::new(
                        ExprKind::Apply(Func::Sin, Box::new(sub(rng))),
                        span0(),
                    )),
                ),
                span0(),
            );
            let f = if rng.random_bool(0.5) {
                Func::Ln
            } else {
                Func::Sqrt
            };
            Expr::new(ExprKind::Apply(f, Box::new(bounded)), span0())
        }
        9 => {
            // division with a denominator bounded away from zero
            let den = Expr::new(
                ExprKind::Add(
                    Box::new(Expr::new(ExprKind::Num(2.0), span0())),
                    Box::new(Expr::new(ExprKind::Pow(Box::new(sub(rng)), 2), span0())),
                ),
                span0(),
            );
            Expr::new(ExprKind::Div(Box::new(sub(rng)), Box::new(den)), span0())
        }
        10 if scope.len() <= binders.len() => {
            let bound = binders[scope.len() - 1];
            let mut inner_scope = scope.to_vec();
            inner_scope.push(bound);
            let body = random_expr(rng, depth - 1, &inner_scope);
            Expr::integral(bound.to_string(), body, span0())
        }
        _ => Expr::new(
            ExprKind::Apply(Func::Tan, Box::new(leaf(rng, var))),
            span0(),
        ),
    }
}

/// 5-point central difference with step 1e-4.
pub fn fd5<F: FnMut(f64) -> Option<f64>>(mut f: F, t: f64) -> Option<f64> {
    let h = 1e-4;
    Some((f(t - 2.0 * h)? - 8.0 * f(t - h)? + 8.0 * f(t + h)? - f(t + 2.0 * h)?) / (12.0 * h))
}
