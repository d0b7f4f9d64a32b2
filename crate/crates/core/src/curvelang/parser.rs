//! Recursive-descent parser for the curve expression grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := base ('^' int)?
//! base   := number | ident | func '(' expr ')'
//!         | 'integral' '(' ident ',' expr ')'
//!         | '(' expr ')' | '-' base
//! ```
//!
//! Scope discipline is enforced here: a variable reference must name the
//! innermost enclosing binder (`t` at top level, the bound variable inside
//! an integral). Referencing an outer variable from an integrand is a parse
//! error, which is what keeps [`differentiate`](super::differentiate) free
//! of Leibniz terms. Integral binders may not shadow an enclosing variable.

use super::ast::{Expr, ExprKind, Func, Span};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("syntax error at {pos}: unexpected character '{ch}'")]
    UnexpectedChar { ch: char, pos: usize },
    #[error("syntax error at {pos}: malformed number literal")]
    BadNumber { pos: usize },
    #[error("syntax error at {pos}: expected {expected}, found {found}")]
    Unexpected {
        expected: String,
        found: String,
        pos: usize,
    },
    #[error("unknown function '{name}' at {pos}")]
    UnknownFunction { name: String, pos: usize },
    #[error("unknown variable '{name}' at {pos} (expected '{binder}')")]
    UnknownVariable {
        name: String,
        binder: String,
        pos: usize,
    },
    #[error("integrand at {pos} references outer variable '{name}'; integrands may only use their own bound variable")]
    OuterVariable { name: String, pos: usize },
    #[error("integral bound variable '{name}' at {pos} shadows an enclosing variable")]
    ShadowedBinder { name: String, pos: usize },
    #[error("exponent at {pos} must be an integer literal")]
    NonIntegerExponent { pos: usize },
    #[error("trailing input at {pos}")]
    TrailingInput { pos: usize },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, Span)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => {
                i += 1;
                Tok::Plus
            }
            '-' => {
                i += 1;
                Tok::Minus
            }
            '*' => {
                i += 1;
                Tok::Star
            }
            '/' => {
                i += 1;
                Tok::Slash
            }
            '^' => {
                i += 1;
                Tok::Caret
            }
            '(' => {
                i += 1;
                Tok::LParen
            }
            ')' => {
                i += 1;
                Tok::RParen
            }
            ',' => {
                i += 1;
                Tok::Comma
            }
            '0'..='9' | '.' => {
                while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &src[start..i];
                let v: f64 = text
                    .parse()
                    .map_err(|_| ParseError::BadNumber { pos: start })?;
                Tok::Num(v)
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                Tok::Ident(src[start..i].to_string())
            }
            other => return Err(ParseError::UnexpectedChar { ch: other, pos: i }),
        };
        out.push((tok, Span::new(start, i)));
    }
    out.push((Tok::Eof, Span::new(src.len(), src.len())));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    /// Binder stack: the outer variable, then integral bound variables.
    scope: Vec<String>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<Span, ParseError> {
        if *self.peek() == want {
            Ok(self.bump().1)
        } else {
            Err(ParseError::Unexpected {
                expected: what.to_string(),
                found: self.peek().describe(),
                pos: self.span().start,
            })
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let add = match self.peek() {
                Tok::Plus => true,
                Tok::Minus => false,
                _ => break,
            };
            self.bump();
            let rhs = self.term()?;
            let span = Span::new(lhs.span.start, rhs.span.end);
            let kind = if add {
                ExprKind::Add(Box::new(lhs), Box::new(rhs))
            } else {
                ExprKind::Sub(Box::new(lhs), Box::new(rhs))
            };
            lhs = Expr::new(kind, span);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let mul = match self.peek() {
                Tok::Star => true,
                Tok::Slash => false,
                _ => break,
            };
            self.bump();
            let rhs = self.factor()?;
            let span = Span::new(lhs.span.start, rhs.span.end);
            let kind = if mul {
                ExprKind::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                ExprKind::Div(Box::new(lhs), Box::new(rhs))
            };
            lhs = Expr::new(kind, span);
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let (tok, span) = self.bump();
        let k = match tok {
            Tok::Num(v) if v.fract() == 0.0 && v.abs() <= i32::MAX as f64 => v as i32,
            _ => return Err(ParseError::NonIntegerExponent { pos: span.start }),
        };
        let k = if neg { -k } else { k };
        let full = Span::new(base.span.start, span.end);
        Ok(Expr::new(ExprKind::Pow(Box::new(base), k), full))
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let (tok, span) = self.bump();
        match tok {
            Tok::Num(v) => Ok(Expr::new(ExprKind::Num(v), span)),
            Tok::Minus => {
                let inner = self.base()?;
                let full = Span::new(span.start, inner.span.end);
                Ok(Expr::new(ExprKind::Neg(Box::new(inner)), full))
            }
            Tok::LParen => {
                let inner = self.expr()?;
                let close = self.expect(Tok::RParen, "')'")?;
                Ok(Expr::new(inner.kind, Span::new(span.start, close.end)))
            }
            Tok::Ident(name) => {
                if *self.peek() == Tok::LParen {
                    self.bump();
                    if name == "integral" {
                        let (var_tok, var_span) = self.bump();
                        let var = match var_tok {
                            Tok::Ident(v) => v,
                            other => {
                                return Err(ParseError::Unexpected {
                                    expected: "bound variable name".into(),
                                    found: other.describe(),
                                    pos: var_span.start,
                                })
                            }
                        };
                        if self.scope.contains(&var) {
                            return Err(ParseError::ShadowedBinder {
                                name: var,
                                pos: var_span.start,
                            });
                        }
                        self.expect(Tok::Comma, "','")?;
                        self.scope.push(var.clone());
                        let body = self.expr()?;
                        self.scope.pop();
                        let close = self.expect(Tok::RParen, "')'")?;
                        Ok(Expr::integral(var, body, Span::new(span.start, close.end)))
                    } else if let Some(func) = Func::from_name(&name) {
                        let arg = self.expr()?;
                        let close = self.expect(Tok::RParen, "')'")?;
                        Ok(Expr::new(
                            ExprKind::Apply(func, Box::new(arg)),
                            Span::new(span.start, close.end),
                        ))
                    } else {
                        Err(ParseError::UnknownFunction {
                            name,
                            pos: span.start,
                        })
                    }
                } else {
                    // variable reference: must be the innermost binder
                    let binder = self.scope.last().expect("scope never empty");
                    if name == *binder {
                        Ok(Expr::new(ExprKind::Var(name), span))
                    } else if self.scope.contains(&name) {
                        Err(ParseError::OuterVariable {
                            name,
                            pos: span.start,
                        })
                    } else {
                        Err(ParseError::UnknownVariable {
                            name,
                            binder: binder.clone(),
                            pos: span.start,
                        })
                    }
                }
            }
            other => Err(ParseError::Unexpected {
                expected: "a number, variable, function call, '(' or '-'".into(),
                found: other.describe(),
                pos: span.start,
            }),
        }
    }
}

/// Parses an expression in the outer variable `t`.
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    parse_expr_in(src, "t")
}

/// Parses an expression whose outer variable has the given name.
pub fn parse_expr_in(src: &str, outer_var: &str) -> Result<Expr, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        scope: vec![outer_var.to_string()],
    };
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(ParseError::TrailingInput {
            pos: p.span().start,
        });
    }
    Ok(e)
}
