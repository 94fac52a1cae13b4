//! Recursive-descent parser for potentials written in the variable `r`.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' unary)?
//! primary := number | 'r' | func '(' expr (',' expr)* ')' | '(' expr ')'
//! func    := abs | exp | log | min | max
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-r^4`
//! reads as `-(r^4)`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Abs,
    Exp,
    Log,
    Min,
    Max,
}

impl Func {
    fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max => 2,
            _ => 1,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Func::Abs => "abs",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Min => "min",
            Func::Max => "max",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

/// Value and first derivative carried together through evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub v: f64,
    pub d: f64,
}

impl Dual {
    fn cst(v: f64) -> Self {
        Dual { v, d: 0.0 }
    }
}

fn pow_dual(b: Dual, e: Dual) -> Dual {
    if e.d == 0.0 {
        let k = e.v;
        if k == 0.0 {
            return Dual::cst(1.0);
        }
        let v = if k.fract() == 0.0 && k.abs() < 1e9 { b.v.powi(k as i32) } else { b.v.powf(k) };
        let dv = if b.d == 0.0 {
            0.0
        } else if k.fract() == 0.0 && k.abs() < 1e9 {
            k * b.v.powi(k as i32 - 1) * b.d
        } else {
            k * b.v.powf(k - 1.0) * b.d
        };
        Dual { v, d: dv }
    } else {
        let lb = b.v.ln();
        let v = (e.v * lb).exp();
        Dual { v, d: v * (e.d * lb + e.v * b.d / b.v) }
    }
}

impl Expr {
    pub fn eval(&self, r: f64) -> f64 {
        self.eval_dual(r).v
    }

    /// Value and derivative with respect to `r`.
    pub fn eval_dual(&self, r: f64) -> Dual {
        match self {
            Expr::Num(c) => Dual::cst(*c),
            Expr::Var => Dual { v: r, d: 1.0 },
            Expr::Neg(a) => {
                let a = a.eval_dual(r);
                Dual { v: -a.v, d: -a.d }
            }
            Expr::Add(a, b) => {
                let (a, b) = (a.eval_dual(r), b.eval_dual(r));
                Dual { v: a.v + b.v, d: a.d + b.d }
            }
            Expr::Sub(a, b) => {
                let (a, b) = (a.eval_dual(r), b.eval_dual(r));
                Dual { v: a.v - b.v, d: a.d - b.d }
            }
            Expr::Mul(a, b) => {
                let (a, b) = (a.eval_dual(r), b.eval_dual(r));
                Dual { v: a.v * b.v, d: a.d * b.v + a.v * b.d }
            }
            Expr::Div(a, b) => {
                let (a, b) = (a.eval_dual(r), b.eval_dual(r));
                Dual { v: a.v / b.v, d: (a.d * b.v - a.v * b.d) / (b.v * b.v) }
            }
            Expr::Pow(a, b) => pow_dual(a.eval_dual(r), b.eval_dual(r)),
            Expr::Call(f, args) => {
                let a = args[0].eval_dual(r);
                match f {
                    Func::Abs => Dual { v: a.v.abs(), d: if a.v < 0.0 { -a.d } else { a.d } },
                    Func::Exp => {
                        let e = a.v.exp();
                        Dual { v: e, d: e * a.d }
                    }
                    Func::Log => Dual { v: a.v.ln(), d: a.d / a.v },
                    Func::Min | Func::Max => {
                        let b = args[1].eval_dual(r);
                        let pick_a = if *f == Func::Min { a.v <= b.v } else { a.v >= b.v };
                        if pick_a {
                            a
                        } else {
                            b
                        }
                    }
                }
            }
        }
    }

    /// The value if the expression does not involve `r`.
    pub fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Num(c) => Some(*c),
            Expr::Var => None,
            _ => {
                if self.mentions_var() {
                    None
                } else {
                    Some(self.eval(0.0))
                }
            }
        }
    }

    fn mentions_var(&self) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Var => true,
            Expr::Neg(a) => a.mentions_var(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.mentions_var() || b.mentions_var()
            }
            Expr::Call(_, args) => args.iter().any(Expr::mentions_var),
        }
    }

    /// Recognise `c * r^theta` and return `(c, theta)`.
    fn as_monomial(&self) -> Option<(f64, f64)> {
        match self {
            Expr::Var => Some((1.0, 1.0)),
            Expr::Pow(b, e) if **b == Expr::Var => e.as_const().map(|t| (1.0, t)),
            Expr::Neg(a) => a.as_monomial().map(|(c, t)| (-c, t)),
            Expr::Mul(a, b) => match (a.as_const(), b.as_const()) {
                (Some(c), None) => b.as_monomial().map(|(k, t)| (c * k, t)),
                (None, Some(c)) => a.as_monomial().map(|(k, t)| (c * k, t)),
                _ => None,
            },
            Expr::Div(a, b) => b.as_const().and_then(|c| a.as_monomial().map(|(k, t)| (k / c, t))),
            _ => None,
        }
    }

    /// Recognise `-a * r^theta + b` with `a > 0`, `theta > 0`; returns `(a, theta, b)`.
    pub fn as_power_family(&self) -> Option<(f64, f64, f64)> {
        let (c, theta, b) = match self {
            Expr::Add(x, y) => match (x.as_const(), y.as_const()) {
                (None, Some(b)) => x.as_monomial().map(|(c, t)| (c, t, b))?,
                (Some(b), None) => y.as_monomial().map(|(c, t)| (c, t, b))?,
                _ => return None,
            },
            Expr::Sub(x, y) => match (x.as_const(), y.as_const()) {
                (None, Some(b)) => x.as_monomial().map(|(c, t)| (c, t, -b))?,
                (Some(b), None) => y.as_monomial().map(|(c, t)| (-c, t, b))?,
                _ => return None,
            },
            _ => self.as_monomial().map(|(c, t)| (c, t, 0.0))?,
        };
        (c < 0.0 && theta > 0.0).then_some((-c, theta, b))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(c) => write!(f, "{c}"),
            Expr::Var => write!(f, "r"),
            Expr::Neg(a) => write!(f, "-({a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, b) => write!(f, "({a})^({b})"),
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err<T>(&self, offset: usize, message: &str) -> Result<T> {
        Err(Error::Syntax { offset, message: message.to_string() })
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if c == b'+' { Expr::Add(lhs.into(), rhs.into()) } else { Expr::Sub(lhs.into(), rhs.into()) };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if c == b'*' { Expr::Mul(lhs.into(), rhs.into()) } else { Expr::Div(lhs.into(), rhs.into()) };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(Expr::Neg(self.unary()?.into()))
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Pow(base.into(), exp.into()));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        let start = {
            self.skip_ws();
            self.pos
        };
        match self.peek() {
            None => self.err(start, "unexpected end of input"),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err(self.pos, "expected `)`");
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
                let func = match name {
                    "r" => return Ok(Expr::Var),
                    "abs" => Func::Abs,
                    "exp" => Func::Exp,
                    "log" => Func::Log,
                    "min" => Func::Min,
                    "max" => Func::Max,
                    _ => return Err(Error::UnknownIdentifier { name: name.to_string(), offset: start }),
                };
                if self.peek() != Some(b'(') {
                    return self.err(self.pos, "expected `(` after function name");
                }
                self.pos += 1;
                let mut args = vec![self.expr()?];
                while self.peek() == Some(b',') {
                    self.pos += 1;
                    args.push(self.expr()?);
                }
                if self.peek() != Some(b')') {
                    return self.err(self.pos, "expected `)`");
                }
                self.pos += 1;
                if args.len() != func.arity() {
                    return self.err(start, &format!("{} takes {} argument(s)", func.name(), func.arity()));
                }
                Ok(Expr::Call(func, args))
            }
            Some(_) => self.err(start, "unexpected character"),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let s = self.src;
        let mut i = self.pos;
        while i < s.len() && (s[i].is_ascii_digit() || s[i] == b'.') {
            i += 1;
        }
        if i < s.len() && (s[i] == b'e' || s[i] == b'E') {
            let mut j = i + 1;
            if j < s.len() && (s[j] == b'+' || s[j] == b'-') {
                j += 1;
            }
            if j < s.len() && s[j].is_ascii_digit() {
                while j < s.len() && s[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        let text = std::str::from_utf8(&s[start..i]).unwrap_or("");
        match text.parse::<f64>() {
            Ok(v) => {
                self.pos = i;
                Ok(Expr::Num(v))
            }
            Err(_) => self.err(start, "malformed number"),
        }
    }
}

/// Parse an expression in the variable `r`.
pub fn parse_expr(text: &str) -> Result<Expr> {
    if text.trim().is_empty() {
        return Err(Error::Syntax { offset: 0, message: "empty expression".into() });
    }
    if let Some(p) = text.bytes().position(|b| !b.is_ascii()) {
        return Err(Error::Syntax { offset: p, message: "non-ASCII input".into() });
    }
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(Error::Syntax { offset: p.pos, message: "unexpected trailing input".into() });
    }
    Ok(e)
}
