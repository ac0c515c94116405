//! Arithmetic expressions in one variable `x`, evaluated on truncated Taylor
//! series so that derivatives of every order come out exactly (no differencing).
//!
//! Grammar (lowest to highest precedence):
//! `sum := product (('+' | '-') product)*`,
//! `product := unary (('*' | '/') unary)*`,
//! `unary := '-' unary | power`,
//! `power := atom ('^' unary)?` (right associative),
//! `atom := number | 'x' | 'pi' | ('sqrt' | 'ln' | 'exp') '(' sum ')' | '(' sum ')'`.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("expression error at column {column}: {message}")]
pub struct ParseError {
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Ln,
    Exp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr, ParseError> {
        let mut p = Parser {
            chars: src.chars().collect(),
            pos: 0,
        };
        let e = p.sum()?;
        p.skip_ws();
        if p.pos < p.chars.len() {
            return Err(p.error(format!("unexpected '{}'", p.chars[p.pos])));
        }
        Ok(e)
    }

    fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) => true,
            Expr::Var => false,
            Expr::Neg(a) | Expr::Call(_, a) => a.is_constant(),
            Expr::Bin(_, a, b) => a.is_constant() && b.is_constant(),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.jet(t, 0)[0]
    }

    /// Taylor coefficients `c_0..=c_degree` of the expression about `t`.
    pub fn jet(&self, t: f64, degree: usize) -> Vec<f64> {
        let n = degree + 1;
        match self {
            Expr::Num(c) => constant(*c, n),
            Expr::Var => {
                let mut v = constant(t, n);
                if n > 1 {
                    v[1] = 1.0;
                }
                v
            }
            Expr::Neg(a) => a.jet(t, degree).into_iter().map(|c| -c).collect(),
            Expr::Call(f, a) => {
                let a = a.jet(t, degree);
                match f {
                    Func::Sqrt => pow_real(&a, 0.5),
                    Func::Ln => ln(&a),
                    Func::Exp => exp(&a),
                }
            }
            Expr::Bin(op, a, b) => {
                if *op == BinOp::Pow && b.is_constant() {
                    return pow_const(&a.jet(t, degree), b.eval(t));
                }
                let (u, v) = (a.jet(t, degree), b.jet(t, degree));
                match op {
                    BinOp::Add => u.iter().zip(&v).map(|(p, q)| p + q).collect(),
                    BinOp::Sub => u.iter().zip(&v).map(|(p, q)| p - q).collect(),
                    BinOp::Mul => mul(&u, &v),
                    BinOp::Div => div(&u, &v),
                    // u^v = exp(v ln u)
                    BinOp::Pow => exp(&mul(&v, &ln(&u))),
                }
            }
        }
    }

    /// m-th derivative at t.
    pub fn derivative(&self, m: usize, t: f64) -> f64 {
        let c = self.jet(t, m)[m];
        (1..=m).fold(c, |acc, k| acc * k as f64)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(c) => write!(f, "{c}"),
            Expr::Var => write!(f, "x"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Call(func, a) => {
                let name = match func {
                    Func::Sqrt => "sqrt",
                    Func::Ln => "ln",
                    Func::Exp => "exp",
                };
                write!(f, "{name}({a})")
            }
            Expr::Bin(op, a, b) => {
                let s = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(f, "({a} {s} {b})")
            }
        }
    }
}

fn constant(c: f64, n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[0] = c;
    v
}

fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    (0..a.len()).map(|k| (0..=k).map(|j| a[j] * b[k - j]).sum()).collect()
}

fn div(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut c = vec![0.0; a.len()];
    for k in 0..a.len() {
        let s: f64 = (1..=k).map(|j| b[j] * c[k - j]).sum();
        c[k] = (a[k] - s) / b[0];
    }
    c
}

fn exp(a: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; a.len()];
    e[0] = a[0].exp();
    for k in 1..a.len() {
        let s: f64 = (1..=k).map(|j| j as f64 * a[j] * e[k - j]).sum();
        e[k] = s / k as f64;
    }
    e
}

fn ln(a: &[f64]) -> Vec<f64> {
    let mut l = vec![0.0; a.len()];
    l[0] = a[0].ln();
    for k in 1..a.len() {
        let s: f64 = (1..k).map(|j| j as f64 * l[j] * a[k - j]).sum();
        l[k] = (a[k] - s / k as f64) / a[0];
    }
    l
}

/// `a^p` for constant p; small non-negative integers use repeated products so
/// that a vanishing leading coefficient is handled exactly.
fn pow_const(a: &[f64], p: f64) -> Vec<f64> {
    if p >= 0.0 && p.fract() == 0.0 && p <= 64.0 {
        let mut result = constant(1.0, a.len());
        let mut base = a.to_vec();
        let mut e = p as u32;
        while e > 0 {
            if e & 1 == 1 {
                result = mul(&result, &base);
            }
            base = mul(&base, &base);
            e >>= 1;
        }
        return result;
    }
    pow_real(a, p)
}

fn pow_real(a: &[f64], p: f64) -> Vec<f64> {
    let mut b = vec![0.0; a.len()];
    b[0] = a[0].powf(p);
    for k in 1..a.len() {
        let s: f64 = (1..=k)
            .map(|j| ((p + 1.0) * j as f64 - k as f64) * a[j] * b[k - j])
            .sum();
        b[k] = s / (k as f64 * a[0]);
    }
    b
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn error(&self, message: String) -> ParseError {
        ParseError {
            column: self.pos + 1,
            message,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.product()?;
        loop {
            let op = match self.peek() {
                Some('+') => BinOp::Add,
                Some('-') => BinOp::Sub,
                _ => return Ok(e),
            };
            self.pos += 1;
            e = Expr::Bin(op, Box::new(e), Box::new(self.product()?));
        }
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.unary()?;
        loop {
            let op = match self.peek() {
                Some('*') | Some('×') => BinOp::Mul,
                Some('/') => BinOp::Div,
                _ => return Ok(e),
            };
            self.pos += 1;
            e = Expr::Bin(op, Box::new(e), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some('-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let exponent = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            None => Err(self.error("unexpected end of expression".into())),
            Some('(') => {
                self.pos += 1;
                let e = self.sum()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                let func = match name.as_str() {
                    "x" => return Ok(Expr::Var),
                    "pi" => return Ok(Expr::Num(std::f64::consts::PI)),
                    "sqrt" => Func::Sqrt,
                    "ln" => Func::Ln,
                    "exp" => Func::Exp,
                    _ => {
                        self.pos = start;
                        return Err(self.error(format!("unknown name '{name}'")));
                    }
                };
                self.expect('(')?;
                let arg = self.sum()?;
                self.expect(')')?;
                Ok(Expr::Call(func, Box::new(arg)))
            }
            Some(c) => Err(self.error(format!("unexpected '{c}'"))),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let digits = |p: &mut Parser| {
            while p.pos < p.chars.len() && (p.chars[p.pos].is_ascii_digit() || p.chars[p.pos] == '.') {
                p.pos += 1;
            }
        };
        digits(self);
        if self.pos < self.chars.len() && matches!(self.chars[self.pos], 'e' | 'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < self.chars.len() && matches!(self.chars[self.pos], '+' | '-') {
                self.pos += 1;
            }
            if self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                digits(self);
            } else {
                self.pos = save;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse().map(Expr::Num).map_err(|_| ParseError {
            column: start + 1,
            message: format!("malformed number '{text}'"),
        })
    }
}
