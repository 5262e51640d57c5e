//! Arithmetic over named dimensions.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | primary
//! primary := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Names are resolved to slots when the expression is compiled, so evaluation
//! is a walk over a small tree with indexed loads. `pi` is predefined;
//! functions are `min`, `max` (two or more arguments), `abs`, `sqrt`, `sin`,
//! `cos` (radians).

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("unexpected character `{ch}` at offset {pos}")]
    UnexpectedChar { ch: char, pos: usize },
    #[error("unexpected end of expression")]
    UnexpectedEnd,
    #[error("expected {expected} at offset {pos}")]
    Expected { expected: &'static str, pos: usize },
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("`{name}` takes {expected} argument(s), got {got}")]
    Arity {
        name: String,
        expected: &'static str,
        got: usize,
    },
    #[error("invalid number `{0}`")]
    Number(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tok {
    Num(f64),
    Ident(usize, usize),
    Op(u8),
    LParen,
    RParen,
    Comma,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' | b'-' | b'*' | b'/' => {
                out.push((Tok::Op(c), i));
                i += 1;
            }
            b'(' => {
                out.push((Tok::LParen, i));
                i += 1;
            }
            b')' => {
                out.push((Tok::RParen, i));
                i += 1;
            }
            b',' => {
                out.push((Tok::Comma, i));
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    i += 1;
                    if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
                        i += 1;
                    }
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                let text = &src[start..i];
                let v = text.parse().map_err(|_| ExprError::Number(text.to_string()))?;
                out.push((Tok::Num(v), start));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(start, i), start));
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(ExprError::UnexpectedChar { ch, pos: i });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Func {
    Min,
    Max,
    Abs,
    Sqrt,
    Sin,
    Cos,
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    Slot(usize),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

impl Node {
    fn eval(&self, slots: &[f64]) -> f64 {
        match self {
            Node::Num(v) => *v,
            Node::Slot(i) => slots[*i],
            Node::Neg(a) => -a.eval(slots),
            Node::Add(a, b) => a.eval(slots) + b.eval(slots),
            Node::Sub(a, b) => a.eval(slots) - b.eval(slots),
            Node::Mul(a, b) => a.eval(slots) * b.eval(slots),
            Node::Div(a, b) => a.eval(slots) / b.eval(slots),
            Node::Call(f, args) => match f {
                Func::Min => args.iter().map(|a| a.eval(slots)).fold(f64::INFINITY, f64::min),
                Func::Max => args.iter().map(|a| a.eval(slots)).fold(f64::NEG_INFINITY, f64::max),
                Func::Abs => args[0].eval(slots).abs(),
                Func::Sqrt => args[0].eval(slots).sqrt(),
                Func::Sin => args[0].eval(slots).sin(),
                Func::Cos => args[0].eval(slots).cos(),
            },
        }
    }

    fn collect_slots(&self, out: &mut Vec<usize>) {
        match self {
            Node::Num(_) => {}
            Node::Slot(i) => out.push(*i),
            Node::Neg(a) => a.collect_slots(out),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.collect_slots(out);
                b.collect_slots(out);
            }
            Node::Call(_, args) => args.iter().for_each(|a| a.collect_slots(out)),
        }
    }

    /// Folds constant subtrees.
    fn fold(self) -> Node {
        let constant = |n: &Node| matches!(n, Node::Num(_));
        let node = match self {
            Node::Neg(a) => Node::Neg(Box::new(a.fold())),
            Node::Add(a, b) => Node::Add(Box::new(a.fold()), Box::new(b.fold())),
            Node::Sub(a, b) => Node::Sub(Box::new(a.fold()), Box::new(b.fold())),
            Node::Mul(a, b) => Node::Mul(Box::new(a.fold()), Box::new(b.fold())),
            Node::Div(a, b) => Node::Div(Box::new(a.fold()), Box::new(b.fold())),
            Node::Call(f, args) => Node::Call(f, args.into_iter().map(Node::fold).collect()),
            leaf => leaf,
        };
        let all_const = match &node {
            Node::Neg(a) => constant(a),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => constant(a) && constant(b),
            Node::Call(_, args) => args.iter().all(constant),
            _ => false,
        };
        if all_const {
            Node::Num(node.eval(&[]))
        } else {
            node
        }
    }
}

struct Parser<'a, R> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    resolve: R,
}

impl<R: FnMut(&str) -> Option<usize>> Parser<'_, R> {
    fn peek(&self) -> Option<Tok> {
        self.toks.get(self.pos).map(|t| t.0)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.src.len(), |t| t.1)
    }

    fn expect(&mut self, want: Tok, expected: &'static str) -> Result<(), ExprError> {
        if self.peek() == Some(want) {
            self.pos += 1;
            Ok(())
        } else if self.peek().is_none() {
            Err(ExprError::UnexpectedEnd)
        } else {
            Err(ExprError::Expected {
                expected,
                pos: self.offset(),
            })
        }
    }

    fn expr(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.term()?;
        while let Some(Tok::Op(op @ (b'+' | b'-'))) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if op == b'+' {
                Node::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Node::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op(op @ (b'*' | b'/'))) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if op == b'*' {
                Node::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Node::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, ExprError> {
        if self.peek() == Some(Tok::Op(b'-')) {
            self.pos += 1;
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Node, ExprError> {
        let at = self.offset();
        match self.peek() {
            None => Err(ExprError::UnexpectedEnd),
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Node::Num(v))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Tok::Ident(s, e)) => {
                self.pos += 1;
                let name = &self.src[s..e];
                if self.peek() == Some(Tok::LParen) {
                    self.pos += 1;
                    let mut args = vec![self.expr()?];
                    while self.peek() == Some(Tok::Comma) {
                        self.pos += 1;
                        args.push(self.expr()?);
                    }
                    self.expect(Tok::RParen, "`)` or `,`")?;
                    return call(name, args);
                }
                if name == "pi" {
                    return Ok(Node::Num(std::f64::consts::PI));
                }
                (self.resolve)(name)
                    .map(Node::Slot)
                    .ok_or_else(|| ExprError::UnknownName(name.to_string()))
            }
            Some(_) => Err(ExprError::Expected {
                expected: "a number, name or `(`",
                pos: at,
            }),
        }
    }
}

fn call(name: &str, args: Vec<Node>) -> Result<Node, ExprError> {
    let (func, variadic) = match name {
        "min" => (Func::Min, true),
        "max" => (Func::Max, true),
        "abs" => (Func::Abs, false),
        "sqrt" => (Func::Sqrt, false),
        "sin" => (Func::Sin, false),
        "cos" => (Func::Cos, false),
        _ => return Err(ExprError::UnknownFunction(name.to_string())),
    };
    let ok = if variadic { args.len() >= 2 } else { args.len() == 1 };
    if !ok {
        return Err(ExprError::Arity {
            name: name.to_string(),
            expected: if variadic { "two or more" } else { "one" },
            got: args.len(),
        });
    }
    Ok(Node::Call(func, args))
}

/// A compiled expression. Keeps its source for display and error messages.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    source: String,
    root: Node,
}

impl Expr {
    /// Compiles `src`, mapping every free name through `resolve`.
    pub fn compile(src: &str, resolve: impl FnMut(&str) -> Option<usize>) -> Result<Expr, ExprError> {
        let toks = lex(src)?;
        let mut p = Parser {
            src,
            toks,
            pos: 0,
            resolve,
        };
        let root = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(ExprError::Expected {
                expected: "an operator or end of expression",
                pos: p.offset(),
            });
        }
        Ok(Expr {
            source: src.trim().to_string(),
            root: root.fold(),
        })
    }

    /// Compiles against an ordered list of names; slot `i` is `names[i]`.
    pub fn compile_with_names(src: &str, names: &[&str]) -> Result<Expr, ExprError> {
        Expr::compile(src, |n| names.iter().position(|k| *k == n))
    }

    pub fn eval(&self, slots: &[f64]) -> f64 {
        self.root.eval(slots)
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Sorted, de-duplicated slots the expression reads.
    pub fn slots(&self) -> Vec<usize> {
        let mut v = Vec::new();
        self.root.collect_slots(&mut v);
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn constant_value(&self) -> Option<f64> {
        match self.root {
            Node::Num(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}
