//! Prefix notation for expression trees.
//!
//! ```text
//! expr   := "s" | "(" head args ")"
//! head   := const c | affine c (+|-) | log e | exp e | pow e c
//!         | sum e+ | prod e+ | quot e e | scale c e
//! ```
//! Scalars `c` use the scalar grammar (`1.93`, `5/7`, `4*e+2`, `[lo, hi]`)
//! and must not contain spaces outside brackets.

use std::fmt;

use thiserror::Error;

use super::{GExpr, Sign};
use crate::interval::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Atom(String),
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let b = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c == b'(' {
            out.push((i, Tok::Open));
            i += 1;
        } else if c == b')' {
            out.push((i, Tok::Close));
            i += 1;
        } else {
            let start = i;
            let mut depth = 0;
            while i < b.len() {
                let c = b[i];
                if c == b'[' {
                    depth += 1;
                } else if c == b']' {
                    depth -= 1;
                } else if depth == 0 && (c.is_ascii_whitespace() || c == b'(' || c == b')') {
                    break;
                }
                i += 1;
            }
            if depth != 0 {
                return Err(ParseError { pos: start, msg: "unbalanced '['".into() });
            }
            out.push((start, Tok::Atom(text[start..i].to_string())));
        }
    }
    Ok(out)
}

struct P {
    toks: Vec<(usize, Tok)>,
    i: usize,
    end: usize,
}

impl P {
    fn pos(&self) -> usize {
        self.toks.get(self.i).map(|t| t.0).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { pos: self.pos(), msg: msg.into() })
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.i).map(|t| t.1.clone());
        self.i += 1;
        t
    }

    fn scalar(&mut self) -> Result<Scalar, ParseError> {
        let pos = self.pos();
        match self.next() {
            Some(Tok::Atom(a)) => {
                Scalar::parse(&a).map_err(|e| ParseError { pos: pos + e.pos, msg: e.msg })
            }
            _ => Err(ParseError { pos, msg: "expected scalar".into() }),
        }
    }

    fn expr(&mut self) -> Result<GExpr, ParseError> {
        let pos = self.pos();
        match self.next() {
            Some(Tok::Atom(a)) if a == "s" => Ok(GExpr::Var),
            Some(Tok::Atom(a)) => Scalar::parse(&a)
                .map(GExpr::Const)
                .map_err(|e| ParseError { pos: pos + e.pos, msg: e.msg }),
            Some(Tok::Open) => {
                let head = match self.next() {
                    Some(Tok::Atom(h)) => h,
                    _ => return Err(ParseError { pos, msg: "expected operator".into() }),
                };
                let e = match head.as_str() {
                    "const" => GExpr::Const(self.scalar()?),
                    "affine" => {
                        let q = self.scalar()?;
                        let sign = match self.next() {
                            Some(Tok::Atom(s)) if s == "+" => Sign::Plus,
                            Some(Tok::Atom(s)) if s == "-" => Sign::Minus,
                            _ => return self.err("expected '+' or '-'"),
                        };
                        GExpr::Affine { q, sign }
                    }
                    "log" => self.expr()?.log(),
                    "exp" => self.expr()?.exp(),
                    "pow" => {
                        let x = self.expr()?;
                        x.pow(self.scalar()?)
                    }
                    "scale" => {
                        let c = self.scalar()?;
                        self.expr()?.scale(c)
                    }
                    "quot" => {
                        let n = self.expr()?;
                        n.over(self.expr()?)
                    }
                    "sum" | "prod" => {
                        let mut v = Vec::new();
                        while !matches!(self.toks.get(self.i), Some((_, Tok::Close)) | None) {
                            v.push(self.expr()?);
                        }
                        if v.is_empty() {
                            return self.err("empty argument list");
                        }
                        if head == "sum" {
                            GExpr::Sum(v)
                        } else {
                            GExpr::Product(v)
                        }
                    }
                    other => return Err(ParseError { pos, msg: format!("unknown operator {other:?}") }),
                };
                match self.next() {
                    Some(Tok::Close) => Ok(e),
                    _ => self.err("expected ')'"),
                }
            }
            _ => Err(ParseError { pos, msg: "expected expression".into() }),
        }
    }
}

pub(super) fn parse(text: &str) -> Result<GExpr, ParseError> {
    let mut p = P { toks: lex(text)?, i: 0, end: text.len() };
    let e = p.expr()?;
    if p.i < p.toks.len() {
        return p.err("trailing input");
    }
    e.check_size().map_err(|e| ParseError { pos: 0, msg: e.to_string() })?;
    Ok(e)
}

pub(super) fn write(e: &GExpr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        GExpr::Const(c) => write!(f, "(const {c})"),
        GExpr::Var => f.write_str("s"),
        GExpr::Affine { q, sign } => {
            write!(f, "(affine {q} {})", if *sign == Sign::Plus { "+" } else { "-" })
        }
        GExpr::Log(x) => write!(f, "(log {x})"),
        GExpr::Exp(x) => write!(f, "(exp {x})"),
        GExpr::Pow(x, p) => write!(f, "(pow {x} {p})"),
        GExpr::Scale(c, x) => write!(f, "(scale {c} {x})"),
        GExpr::Quotient(n, d) => write!(f, "(quot {n} {d})"),
        GExpr::Sum(v) | GExpr::Product(v) => {
            f.write_str(if matches!(e, GExpr::Sum(_)) { "(sum" } else { "(prod" })?;
            for x in v {
                write!(f, " {x}")?;
            }
            f.write_str(")")
        }
    }
}
