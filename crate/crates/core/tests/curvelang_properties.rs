//! Property tests for the expression language: printing round-trips to a
//! structurally equal AST, and symbolic derivatives agree with a 5-point
//! finite-difference oracle on randomly generated expressions.

mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use slant_curves::curvelang::ast::Span;
use slant_curves::curvelang::{differentiate, parse_expr, Expr, ExprKind, Func};

fn span0() -> Span {
    Span::new(0, 0)
}

fn num(v: f64) -> Expr {
    Expr::new(ExprKind::Num(v), span0())
}

fn printable_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0u32..400).prop_map(|k| num(k as f64 / 100.0)),
        Just(Expr::new(ExprKind::Var("t".into()), span0())),
    ];
    leaf.prop_recursive(4, 48, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::new(ExprKind::Add(Box::new(a), Box::new(b)), span0())),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::new(ExprKind::Sub(Box::new(a), Box::new(b)), span0())),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::new(ExprKind::Mul(Box::new(a), Box::new(b)), span0())),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::new(ExprKind::Div(Box::new(a), Box::new(b)), span0())),
            inner
                .clone()
                .prop_map(|a| Expr::new(ExprKind::Neg(Box::new(a)), span0())),
            (inner.clone(), -2i32..5)
                .prop_map(|(a, k)| Expr::new(ExprKind::Pow(Box::new(a), k), span0())),
            (
                inner,
                prop_oneof![
                    Just(Func::Sin),
                    Just(Func::Cos),
                    Just(Func::Tan),
                    Just(Func::Exp),
                    Just(Func::Ln),
                    Just(Func::Sqrt)
                ]
            )
                .prop_map(|(a, f)| Expr::new(ExprKind::Apply(f, Box::new(a)), span0())),
        ]
    })
}

proptest! {
    /// print -> parse reproduces the AST (spans aside).
    #[test]
    fn printing_round_trips(e in printable_expr()) {
        let text = e.to_string();
        let back = parse_expr(&text)
            .unwrap_or_else(|err| panic!("reparse of '{text}' failed: {err}"));
        prop_assert_eq!(&back, &e, "printed as '{}'", text);
    }
}

#[test]
fn integral_expressions_round_trip_too() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut seen_integral = 0;
    let mut count = 0;
    while count < 80 {
        let e = common::random_expr(&mut rng, 3, &["t"]);
        let text = e.to_string();
        if text.contains("integral") {
            seen_integral += 1;
        }
        let back = parse_expr(&text).unwrap_or_else(|err| panic!("'{text}': {err}"));
        assert_eq!(back, e, "printed as '{text}'");
        count += 1;
    }
    assert!(seen_integral >= 5, "generator produced too few integrals");
}

/// Deterministic 50-case suite: symbolic derivative against the 5-point
/// finite-difference oracle at several parameter values.
#[test]
fn derivative_matches_finite_differences_on_50_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let mut tested = 0;
    let mut attempts = 0;
    while tested < 50 {
        attempts += 1;
        assert!(
            attempts < 2000,
            "generator keeps producing degenerate cases"
        );
        let e = common::random_expr(&mut rng, 3, &["t"]);
        let d = differentiate(&e);
        let mut ok = true;
        for t in [0.2, 0.45, 0.8] {
            let eval = |x: f64| e.eval(x, 1e-10).ok().filter(|v| v.abs() < 1e3);
            let sym = match d.eval(t, 1e-10) {
                Ok(v) if v.abs() < 1e6 => v,
                _ => {
                    ok = false;
                    break;
                }
            };
            let fd = match common::fd5(eval, t) {
                Some(v) => v,
                None => {
                    ok = false;
                    break;
                }
            };
            let tol = 1e-5 * sym.abs().max(1.0);
            assert!(
                (fd - sym).abs() <= tol,
                "case {tested} at t = {t}: fd {fd} vs symbolic {sym}\nexpr: {e}\nderiv: {d}"
            );
        }
        if ok {
            tested += 1;
        }
    }
}

#[test]
fn second_derivative_of_slant_component_matches_oracle() {
    // d^2/dt^2 of -2t - sin(t)cos(t) evaluates like 2 sin(2t)
    let e = parse_expr("-2*t - sin(t)*cos(t)").unwrap();
    let d2 = differentiate(&differentiate(&e));
    for t in [0.0, 0.3, 1.2, 2.9] {
        let got = d2.eval(t, 1e-10).unwrap();
        let want = 2.0 * (2.0 * t).sin();
        assert!((got - want).abs() < 1e-12, "t = {t}: {got} vs {want}");
        let fd = common::fd5(|x| differentiate(&e).eval(x, 1e-10).ok(), t).unwrap();
        assert!((fd - got).abs() < 1e-5 * got.abs().max(1.0));
    }
}

#[test]
fn nested_integral_cumulative_cache_matches_direct_on_grid() {
    // the third component family of the nested-integral curve over [0, 1]
    let e = parse_expr("-4*integral(u, cos(exp(2*u))*integral(v, sin(exp(2*v))))").unwrap();
    let mut ctx = slant_curves::curvelang::EvalCtx::cached(1e-10);
    let n = 128;
    for j in 0..=n {
        let t = j as f64 / n as f64;
        let cached = e.eval_with(t, &mut ctx).unwrap();
        let direct = e.eval(t, 1e-10).unwrap();
        assert!(
            (cached - direct).abs() < 1e-8,
            "t = {t}: cumulative {cached} vs direct {direct}"
        );
    }
}
