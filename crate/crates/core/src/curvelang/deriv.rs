//! Exact symbolic differentiation with respect to the outer variable.
//!
//! Integral nodes differentiate by the fundamental theorem of calculus:
//! d/dt integral(u, f(u)) = f(t). The parser guarantees integrands never
//! reference outer variables, so no Leibniz boundary/interior terms arise
//! and the derivative is total for every well-formed expression.

use super::ast::{Expr, ExprKind, Func, Span};

// Smart constructors with constant folding; derivative trees would grow
// fast without the trivial-identity cases.

fn num(v: f64, span: Span) -> Expr {
    Expr::new(ExprKind::Num(v), span)
}

fn is_zero(e: &Expr) -> bool {
    matches!(e.kind, ExprKind::Num(v) if v == 0.0)
}

fn is_one(e: &Expr) -> bool {
    matches!(e.kind, ExprKind::Num(v) if v == 1.0)
}

fn add(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) {
        return b;
    }
    if is_zero(&b) {
        return a;
    }
    if let (ExprKind::Num(x), ExprKind::Num(y)) = (&a.kind, &b.kind) {
        return num(x + y, a.span);
    }
    let span = a.span;
    Expr::new(ExprKind::Add(Box::new(a), Box::new(b)), span)
}

fn sub(a: Expr, b: Expr) -> Expr {
    if is_zero(&b) {
        return a;
    }
    if let (ExprKind::Num(x), ExprKind::Num(y)) = (&a.kind, &b.kind) {
        return num(x - y, a.span);
    }
    if is_zero(&a) {
        return neg(b);
    }
    let span = a.span;
    Expr::new(ExprKind::Sub(Box::new(a), Box::new(b)), span)
}

fn mul(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) || is_zero(&b) {
        return num(0.0, a.span);
    }
    if is_one(&a) {
        return b;
    }
    if is_one(&b) {
        return a;
    }
    if let (ExprKind::Num(x), ExprKind::Num(y)) = (&a.kind, &b.kind) {
        return num(x * y, a.span);
    }
    let span = a.span;
    Expr::new(ExprKind::Mul(Box::new(a), Box::new(b)), span)
}

fn div(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) {
        return a;
    }
    if is_one(&b) {
        return a;
    }
    let span = a.span;
    Expr::new(ExprKind::Div(Box::new(a), Box::new(b)), span)
}

fn neg(a: Expr) -> Expr {
    match a.kind {
        ExprKind::Neg(inner) => *inner,
        ExprKind::Num(v) => num(-v, a.span),
        _ => {
            let span = a.span;
            Expr::new(ExprKind::Neg(Box::new(a)), span)
        }
    }
}

fn pow(a: Expr, k: i32) -> Expr {
    match k {
        0 => num(1.0, a.span),
        1 => a,
        _ => {
            let span = a.span;
            Expr::new(ExprKind::Pow(Box::new(a), k), span)
        }
    }
}

fn apply(f: Func, a: Expr) -> Expr {
    let span = a.span;
    Expr::new(ExprKind::Apply(f, Box::new(a)), span)
}

/// Replaces references to `from` with a variable named `to`, recomputing
/// integral fingerprints along the way.
fn substitute_var(e: &Expr, from: &str, to: &str) -> Expr {
    match &e.kind {
        ExprKind::Num(v) => num(*v, e.span),
        ExprKind::Var(name) => {
            if name == from {
                Expr::new(ExprKind::Var(to.to_string()), e.span)
            } else {
                e.clone()
            }
        }
        ExprKind::Neg(a) => Expr::new(ExprKind::Neg(Box::new(substitute_var(a, from, to))), e.span),
        ExprKind::Add(a, b) => Expr::new(
            ExprKind::Add(
                Box::new(substitute_var(a, from, to)),
                Box::new(substitute_var(b, from, to)),
            ),
            e.span,
        ),
        ExprKind::Sub(a, b) => Expr::new(
            ExprKind::Sub(
                Box::new(substitute_var(a, from, to)),
                Box::new(substitute_var(b, from, to)),
            ),
            e.span,
        ),
        ExprKind::Mul(a, b) => Expr::new(
            ExprKind::Mul(
                Box::new(substitute_var(a, from, to)),
                Box::new(substitute_var(b, from, to)),
            ),
            e.span,
        ),
        ExprKind::Div(a, b) => Expr::new(
            ExprKind::Div(
                Box::new(substitute_var(a, from, to)),
                Box::new(substitute_var(b, from, to)),
            ),
            e.span,
        ),
        ExprKind::Pow(a, k) => Expr::new(
            ExprKind::Pow(Box::new(substitute_var(a, from, to)), *k),
            e.span,
        ),
        ExprKind::Apply(f, a) => Expr::new(
            ExprKind::Apply(*f, Box::new(substitute_var(a, from, to))),
            e.span,
        ),
        ExprKind::Integral { var, body, .. } => {
            // binders never shadow, so `from` cannot be rebound here
            Expr::integral(var.clone(), substitute_var(body, from, to), e.span)
        }
    }
}

/// Symbolic derivative with respect to the expression's outer variable.
pub fn differentiate(e: &Expr) -> Expr {
    differentiate_in(e, "t")
}

/// Symbolic derivative with respect to the named outer variable.
pub fn differentiate_in(e: &Expr, outer_var: &str) -> Expr {
    match &e.kind {
        ExprKind::Num(_) => num(0.0, e.span),
        // scope discipline means any variable reachable here is the outer one
        ExprKind::Var(_) => num(1.0, e.span),
        ExprKind::Neg(a) => neg(differentiate_in(a, outer_var)),
        ExprKind::Add(a, b) => add(
            differentiate_in(a, outer_var),
            differentiate_in(b, outer_var),
        ),
        ExprKind::Sub(a, b) => sub(
            differentiate_in(a, outer_var),
            differentiate_in(b, outer_var),
        ),
        ExprKind::Mul(a, b) => add(
            mul(differentiate_in(a, outer_var), (**b).clone()),
            mul((**a).clone(), differentiate_in(b, outer_var)),
        ),
        ExprKind::Div(a, b) => div(
            sub(
                mul(differentiate_in(a, outer_var), (**b).clone()),
                mul((**a).clone(), differentiate_in(b, outer_var)),
            ),
            pow((**b).clone(), 2),
        ),
        ExprKind::Pow(a, k) => mul(
            mul(num(*k as f64, e.span), pow((**a).clone(), k - 1)),
            differentiate_in(a, outer_var),
        ),
        ExprKind::Apply(f, a) => {
            let da = differentiate_in(a, outer_var);
            let arg = (**a).clone();
            match f {
                Func::Sin => mul(apply(Func::Cos, arg), da),
                Func::Cos => mul(neg(apply(Func::Sin, arg)), da),
                Func::Tan => mul(add(num(1.0, e.span), pow(apply(Func::Tan, arg), 2)), da),
                Func::Exp => mul(apply(Func::Exp, arg), da),
                Func::Ln => div(da, arg),
                Func::Sqrt => div(da, mul(num(2.0, e.span), apply(Func::Sqrt, arg))),
            }
        }
        // fundamental theorem of calculus
        ExprKind::Integral { var, body, .. } => substitute_var(body, var, outer_var),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvelang::parser::parse_expr;

    #[test]
    fn derivative_of_sin_is_cos() {
        let e = parse_expr("sin(t)").unwrap();
        assert_eq!(differentiate(&e), parse_expr("cos(t)").unwrap());
    }

    #[test]
    fn fundamental_theorem_substitutes_bound_variable() {
        let e = parse_expr("integral(u, cos(exp(2*u)))").unwrap();
        assert_eq!(differentiate(&e), parse_expr("cos(exp(2*t))").unwrap());
    }

    #[test]
    fn nested_integral_derivative_keeps_inner_integral() {
        let e = parse_expr("integral(u, cos(exp(2*u))*integral(v, sin(exp(2*v))))").unwrap();
        let d = differentiate(&e);
        assert_eq!(
            d,
            parse_expr("cos(exp(2*t))*integral(v, sin(exp(2*v)))").unwrap()
        );
    }

    #[test]
    fn power_rule() {
        let e = parse_expr("t^3").unwrap();
        let d = differentiate(&e);
        assert_eq!(d, parse_expr("3*t^2").unwrap());
    }

    #[test]
    fn quotient_rule_structure() {
        let e = parse_expr("t/(1 + t)").unwrap();
        let d = differentiate(&e);
        // (1*(1+t) - t*1) / (1+t)^2
        let at = |t: f64| 1.0 / ((1.0 + t) * (1.0 + t));
        for t in [0.0, 0.5, 2.0] {
            let v = d.eval(t, 1e-10).unwrap();
            assert!((v - at(t)).abs() < 1e-12);
        }
    }
}
