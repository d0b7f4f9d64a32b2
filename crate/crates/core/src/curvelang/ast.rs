//! Expression AST for curve components.
//!
//! Expressions are functions of a single outer variable `t`. Integral nodes
//! bind a fresh variable and integrate from 0 to the value of the enclosing
//! variable; their integrands may only reference their own bound variable
//! (and deeper binders), which keeps differentiation Leibniz-free.

use std::fmt;

/// Byte range into the source text, kept for error messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
}

impl Func {
    pub fn name(&self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone)]
pub enum ExprKind {
    Num(f64),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Integer power of the base expression.
    Pow(Box<Expr>, i32),
    Apply(Func, Box<Expr>),
    /// integral(var, body): integrates body over var from 0 to the value of
    /// the enclosing variable. `fp` is a structural fingerprint used to key
    /// the cumulative evaluation cache; structurally identical integrals
    /// share cached antiderivative checkpoints.
    Integral {
        var: String,
        body: Box<Expr>,
        fp: u64,
    },
}

#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    pub fn integral(var: String, body: Expr, span: Span) -> Self {
        let fp = {
            let mut h = Fnv::new();
            h.write_str("integral");
            h.write_str(&var);
            hash_expr(&body, &mut h);
            h.finish()
        };
        Expr {
            kind: ExprKind::Integral {
                var,
                body: Box::new(body),
                fp,
            },
            span,
        }
    }
}

/// Structural equality; spans are ignored.
impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        use ExprKind::*;
        match (&self.kind, &other.kind) {
            (Num(a), Num(b)) => a == b,
            (Var(a), Var(b)) => a == b,
            (Neg(a), Neg(b)) => a == b,
            (Add(a1, a2), Add(b1, b2))
            | (Sub(a1, a2), Sub(b1, b2))
            | (Mul(a1, a2), Mul(b1, b2))
            | (Div(a1, a2), Div(b1, b2)) => a1 == b1 && a2 == b2,
            (Pow(a, i), Pow(b, j)) => i == j && a == b,
            (Apply(f, a), Apply(g, b)) => f == g && a == b,
            (
                Integral {
                    var: va, body: ba, ..
                },
                Integral {
                    var: vb, body: bb, ..
                },
            ) => va == vb && ba == bb,
            _ => false,
        }
    }
}

struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(0xcbf29ce484222325)
    }
    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x100000001b3);
        }
    }
    fn write_str(&mut self, s: &str) {
        self.write(s.as_bytes());
        self.write(&[0xff]);
    }
    fn finish(&self) -> u64 {
        self.0
    }
}

fn hash_expr(e: &Expr, h: &mut Fnv) {
    use ExprKind::*;
    match &e.kind {
        Num(v) => {
            h.write_str("num");
            h.write(&v.to_bits().to_le_bytes());
        }
        Var(v) => {
            h.write_str("var");
            h.write_str(v);
        }
        Neg(a) => {
            h.write_str("neg");
            hash_expr(a, h);
        }
        Add(a, b) => {
            h.write_str("add");
            hash_expr(a, h);
            hash_expr(b, h);
        }
        Sub(a, b) => {
            h.write_str("sub");
            hash_expr(a, h);
            hash_expr(b, h);
        }
        Mul(a, b) => {
            h.write_str("mul");
            hash_expr(a, h);
            hash_expr(b, h);
        }
        Div(a, b) => {
            h.write_str("div");
            hash_expr(a, h);
            hash_expr(b, h);
        }
        Pow(a, k) => {
            h.write_str("pow");
            h.write(&k.to_le_bytes());
            hash_expr(a, h);
        }
        Apply(f, a) => {
            h.write_str(f.name());
            hash_expr(a, h);
        }
        Integral { var, body, .. } => {
            h.write_str("integral");
            h.write_str(var);
            hash_expr(body, h);
        }
    }
}

// Printing with minimal parentheses: the output reparses to the same AST.
// Precedence: additive 1, multiplicative 2, unary minus 3, power 4, atoms 5.

fn prec(e: &Expr) -> u8 {
    use ExprKind::*;
    match &e.kind {
        Add(..) | Sub(..) => 1,
        Mul(..) | Div(..) => 2,
        Neg(..) => 3,
        Pow(..) => 4,
        Num(..) | Var(..) | Apply(..) | Integral { .. } => 5,
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &Expr, min_prec: u8) -> fmt::Result {
    if prec(child) < min_prec {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ExprKind::*;
        match &self.kind {
            Num(v) => {
                if *v < 0.0 {
                    // negative constants only arise from folding; print in a
                    // form the grammar reparses as a negation
                    write!(f, "(-{})", -v)
                } else {
                    write!(f, "{v}")
                }
            }
            Var(v) => write!(f, "{v}"),
            Neg(a) => {
                write!(f, "-")?;
                // the grammar requires a base after unary minus, and a '^'
                // after that base would bind to it: parenthesize powers too
                if prec(a) == 5 || matches!(a.kind, Neg(..)) {
                    write!(f, "{a}")
                } else {
                    write!(f, "({a})")
                }
            }
            Add(a, b) => {
                write_child(f, a, 1)?;
                write!(f, " + ")?;
                write_child(f, b, 2)
            }
            Sub(a, b) => {
                write_child(f, a, 1)?;
                write!(f, " - ")?;
                write_child(f, b, 2)
            }
            Mul(a, b) => {
                write_child(f, a, 2)?;
                write!(f, "*")?;
                write_child(f, b, 3)
            }
            Div(a, b) => {
                write_child(f, a, 2)?;
                write!(f, "/")?;
                write_child(f, b, 3)
            }
            Pow(a, k) => {
                // parenthesize non-atomic bases, including unary minus
                if prec(a) < 5 {
                    write!(f, "({a})^{k}")
                } else {
                    write!(f, "{a}^{k}")
                }
            }
            Apply(func, a) => write!(f, "{}({a})", func.name()),
            Integral { var, body, .. } => write!(f, "integral({var}, {body})"),
        }
    }
}
