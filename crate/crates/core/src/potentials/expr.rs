//! Tiny arithmetic language for user-supplied wells.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | 'r' | func '(' expr ')' | '(' expr ')'
//! func   := exp | sqrt | ln
//! ```

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sqrt,
    Ln,
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
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Expr::Num(c) => *c,
            Expr::Var => r,
            Expr::Neg(a) => -a.eval(r),
            Expr::Add(a, b) => a.eval(r) + b.eval(r),
            Expr::Sub(a, b) => a.eval(r) - b.eval(r),
            Expr::Mul(a, b) => a.eval(r) * b.eval(r),
            Expr::Div(a, b) => a.eval(r) / b.eval(r),
            Expr::Pow(a, b) => a.eval(r).powf(b.eval(r)),
            Expr::Call(f, a) => {
                let x = a.eval(r);
                match f {
                    Func::Exp => x.exp(),
                    Func::Sqrt => x.sqrt(),
                    Func::Ln => x.ln(),
                }
            }
        }
    }
}

pub fn parse(src: &str) -> Result<Expr> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(b'/') => {
                    self.pos += 1;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let ident = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
                let func = match ident {
                    "r" => return Ok(Expr::Var),
                    "exp" => Func::Exp,
                    "sqrt" => Func::Sqrt,
                    "ln" => Func::Ln,
                    _ => {
                        self.pos = start;
                        return Err(self.error(&format!("unknown identifier '{ident}'")));
                    }
                };
                self.expect(b'(')?;
                let arg = self.expr()?;
                self.expect(b')')?;
                Ok(Expr::Call(func, Box::new(arg)))
            }
            Some(c) => Err(self.error(&format!("unexpected character '{}'", c as char))),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let s = self.src;
        let digits = |p: &mut usize| {
            while *p < s.len() && s[*p].is_ascii_digit() {
                *p += 1;
            }
        };
        digits(&mut self.pos);
        if self.pos < s.len() && s[self.pos] == b'.' {
            self.pos += 1;
            digits(&mut self.pos);
        }
        if self.pos < s.len() && (s[self.pos] == b'e' || s[self.pos] == b'E') {
            let mark = self.pos;
            self.pos += 1;
            if self.pos < s.len() && (s[self.pos] == b'+' || s[self.pos] == b'-') {
                self.pos += 1;
            }
            let before = self.pos;
            digits(&mut self.pos);
            if self.pos == before {
                // not an exponent, e.g. "2exp(..)"; leave it for the caller
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&s[start..self.pos]).unwrap_or("");
        text.parse::<f64>()
            .map(Expr::Num)
            .map_err(|_| Error::Syntax {
                offset: start,
                message: format!("bad number '{text}'"),
            })
    }
}
