//! Plain-text syntax for coefficient expressions and differential forms.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' (integer | atom))*
//! atom   := number | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` followed by an integer literal (optionally signed) is an integer
//! power; any other right operand makes it a wedge product. Identifiers:
//! `x1..xn` (also `x`, `y`, `z`), `t`, `pi`, the functions `sin cos exp ln
//! sqrt` (`ln` is `ln|.|`), and for forms `dx1..dxn` (also `dx dy dz`) and
//! `th` / `theta` for the connection one-form.

use crate::error::{Error, Result};
use crate::scalar::{Func, ScalarExpr, Var};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text.parse::<f64>().map_err(|_| Error::Parse {
                pos: start,
                msg: format!("bad number `{text}`"),
            })?;
            out.push((start, Tok::Num(v)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start, Tok::Ident(chars[start..i].iter().collect())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(Error::Parse { pos: i, msg: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

/// Syntax tree shared by the scalar and form front ends.
#[derive(Clone, Debug, PartialEq)]
pub enum Ast {
    Num(f64),
    Var(Var),
    /// `dx^{axis+1}`
    Dx(usize),
    Theta,
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, i32),
    Wedge(Box<Ast>, Box<Ast>),
    Call(Func, Box<Ast>),
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.here(), msg: msg.into() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Ast> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Ast::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Ast::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Ast> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Ast::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Ast::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Ast> {
        if self.eat('-') {
            Ok(Ast::Neg(Box::new(self.unary()?)))
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn integer_exponent(&mut self) -> Option<i32> {
        let save = self.pos;
        let negative = self.eat('-');
        if let Some(Tok::Num(v)) = self.peek() {
            let v = *v;
            if v.fract() == 0.0 && v.abs() <= i32::MAX as f64 {
                self.pos += 1;
                return Some(if negative { -(v as i32) } else { v as i32 });
            }
        }
        self.pos = save;
        None
    }

    fn power(&mut self) -> Result<Ast> {
        let mut lhs = self.atom()?;
        while self.eat('^') {
            if let Some(n) = self.integer_exponent() {
                lhs = Ast::Pow(Box::new(lhs), n);
            } else if matches!(self.peek(), Some(Tok::Num(_))) {
                return self.err("exponents must be integers");
            } else {
                lhs = Ast::Wedge(Box::new(lhs), Box::new(self.atom()?));
            }
        }
        Ok(lhs)
    }

    fn atom(&mut self) -> Result<Ast> {
        let at = self.here();
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Ast::Num(v))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected `)`");
                }
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let func = match name.as_str() {
                    "sin" => Some(Func::Sin),
                    "cos" => Some(Func::Cos),
                    "exp" => Some(Func::Exp),
                    "ln" => Some(Func::LnAbs),
                    "sqrt" => Some(Func::Sqrt),
                    _ => None,
                };
                if let Some(f) = func {
                    if !self.eat('(') {
                        return self.err(format!("expected `(` after `{name}`"));
                    }
                    let arg = self.expr()?;
                    if !self.eat(')') {
                        return self.err("expected `)`");
                    }
                    return Ok(Ast::Call(f, Box::new(arg)));
                }
                ident(&name).ok_or(Error::Parse { pos: at, msg: format!("unknown identifier `{name}`") })
            }
            Some(Tok::Op(c)) => self.err(format!("unexpected `{c}`")),
            None => self.err("unexpected end of input"),
        }
    }
}

fn indexed(name: &str, prefix: &str) -> Option<usize> {
    let rest = name.strip_prefix(prefix)?;
    let k: usize = rest.parse().ok()?;
    (k >= 1 && !rest.starts_with('0')).then(|| k - 1)
}

fn ident(name: &str) -> Option<Ast> {
    match name {
        "t" => return Some(Ast::Var(Var::Fibre)),
        "x" => return Some(Ast::Var(Var::Base(0))),
        "y" => return Some(Ast::Var(Var::Base(1))),
        "z" => return Some(Ast::Var(Var::Base(2))),
        "dx" => return Some(Ast::Dx(0)),
        "dy" => return Some(Ast::Dx(1)),
        "dz" => return Some(Ast::Dx(2)),
        "th" | "theta" => return Some(Ast::Theta),
        "pi" => return Some(Ast::Num(std::f64::consts::PI)),
        _ => {}
    }
    if let Some(k) = indexed(name, "dx") {
        return Some(Ast::Dx(k));
    }
    indexed(name, "x").map(|k| Ast::Var(Var::Base(k)))
}

/// Parses text into a syntax tree that may contain differentials.
pub fn parse_ast(src: &str) -> Result<Ast> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0, end: src.chars().count() };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

/// Lowers a differential-free syntax tree.
pub fn lower_scalar(ast: &Ast) -> Result<ScalarExpr> {
    Ok(match ast {
        Ast::Num(v) => ScalarExpr::constant(*v),
        Ast::Var(v) => ScalarExpr::var(*v),
        Ast::Dx(_) | Ast::Theta | Ast::Wedge(..) => {
            return Err(Error::Parse { pos: 0, msg: "differentials are not allowed in a scalar expression".into() })
        }
        Ast::Neg(a) => -lower_scalar(a)?,
        Ast::Add(a, b) => lower_scalar(a)? + lower_scalar(b)?,
        Ast::Sub(a, b) => lower_scalar(a)? - lower_scalar(b)?,
        Ast::Mul(a, b) => lower_scalar(a)? * lower_scalar(b)?,
        Ast::Div(a, b) => lower_scalar(a)? / lower_scalar(b)?,
        Ast::Pow(a, n) => lower_scalar(a)?.powi(*n),
        Ast::Call(f, a) => ScalarExpr::apply(*f, lower_scalar(a)?),
    })
}

/// Parses a scalar expression such as `exp(x1)*sin(t) + t^-2`.
pub fn parse_scalar(src: &str) -> Result<ScalarExpr> {
    lower_scalar(&parse_ast(src)?)
}

impl std::str::FromStr for ScalarExpr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_scalar(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Point;

    fn at(e: &str, x: &[f64], t: f64) -> f64 {
        parse_scalar(e).unwrap().eval(&Point::new(x.to_vec(), t).unwrap()).unwrap()
    }

    #[test]
    fn precedence() {
        assert_eq!(at("1 + 2*3", &[], 1.0), 7.0);
        assert_eq!(at("-x1^2", &[3.0], 1.0), -9.0);
        assert_eq!(at("2^-1", &[], 1.0), 0.5);
        assert_eq!(at("x1/x2/x3", &[8.0, 2.0, 2.0], 1.0), 2.0);
        assert!((at("sin(pi/2) + ln(t)", &[], -1.0) - 1.0).abs() < 1e-15);
        assert_eq!(at("x*y*z", &[1.0, 2.0, 3.0], 1.0), 6.0);
    }

    #[test]
    fn errors_carry_position() {
        match parse_scalar("1 + foo") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{other:?}"),
        }
        assert!(parse_scalar("x1^1.5").is_err());
        assert!(parse_scalar("(x1").is_err());
        assert!(parse_scalar("dx1").is_err());
        assert!(parse_scalar("x0").is_err());
    }

    #[test]
    fn wedge_versus_power() {
        let a = parse_ast("t^2 * dx1^dx2").unwrap();
        assert_eq!(
            a,
            Ast::Mul(
                Box::new(Ast::Pow(Box::new(Ast::Var(Var::Fibre)), 2)),
                Box::new(Ast::Wedge(Box::new(Ast::Dx(0)), Box::new(Ast::Dx(1))))
            )
        );
    }
}
