//! A small closed-form expression grammar for user-supplied metrics, map
//! components and warping functions:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := unary ('^' factor)?
//! unary  := '-' unary | atom
//! atom   := number | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! Known functions: exp, sin, cos, log, sqrt. Identifiers that are not
//! function names are variables resolved against a caller-supplied list.

use std::sync::Arc;

use crate::dual::Dual;
use crate::error::{GeomError, Result};
use crate::geometry::ScalarField;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(String, Box<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(GeomError::Config(format!("trailing input in expression `{src}`")));
        }
        Ok(e)
    }

    pub fn eval(&self, vars: &[(&str, Dual)]) -> Result<Dual> {
        Ok(match self {
            Expr::Num(x) => Dual::constant(*x),
            Expr::Var(name) => vars
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, v)| v.clone())
                .ok_or_else(|| GeomError::Config(format!("unknown variable `{name}`")))?,
            Expr::Neg(a) => -a.eval(vars)?,
            Expr::Add(a, b) => a.eval(vars)? + b.eval(vars)?,
            Expr::Sub(a, b) => a.eval(vars)? - b.eval(vars)?,
            Expr::Mul(a, b) => a.eval(vars)? * b.eval(vars)?,
            Expr::Div(a, b) => a.eval(vars)? / b.eval(vars)?,
            Expr::Pow(a, b) => a.eval(vars)?.pow(&b.eval(vars)?),
            Expr::Call(f, a) => {
                let x = a.eval(vars)?;
                match f.as_str() {
                    "exp" => x.exp(),
                    "sin" => x.sin(),
                    "cos" => x.cos(),
                    "log" => x.ln(),
                    "sqrt" => x.sqrt(),
                    other => return Err(GeomError::Config(format!("unknown function `{other}`"))),
                }
            }
        })
    }

    /// Compile against a fixed variable ordering.
    pub fn to_scalar_field(&self, var_names: &[String]) -> ScalarField {
        let expr = self.clone();
        let names = var_names.to_vec();
        ScalarField::analytic(
            var_names.len(),
            Arc::new(move |p: &[Dual]| {
                let vars: Vec<(&str, Dual)> = names
                    .iter()
                    .map(String::as_str)
                    .zip(p.iter().cloned())
                    .collect();
                vec![expr.eval(&vars).expect("variables bound at compile time")]
            }),
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => { out.push(Token::Plus); i += 1 }
            '-' => { out.push(Token::Minus); i += 1 }
            '*' => { out.push(Token::Star); i += 1 }
            '/' => { out.push(Token::Slash); i += 1 }
            '^' => { out.push(Token::Caret); i += 1 }
            '(' => { out.push(Token::LParen); i += 1 }
            ')' => { out.push(Token::RParen); i += 1 }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_digit() || chars[i] == '.' || chars[i] == 'e'
                        || (chars[i] == '-' && i > start && chars[i - 1] == 'e'))
                {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let num = text
                    .parse()
                    .map_err(|_| GeomError::Config(format!("bad number `{text}`")))?;
                out.push(Token::Num(num));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Token::Ident(chars[start..i].iter().collect()));
            }
            other => return Err(GeomError::Config(format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Token::Minus) => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Some(Token::Slash) => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.unary()?;
        if let Some(Token::Caret) = self.peek() {
            self.bump();
            let exp = self.factor()?; // right-associative
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Expr> {
        if let Some(Token::Minus) = self.peek() {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.bump() {
            Some(Token::Num(x)) => Ok(Expr::Num(x)),
            Some(Token::Ident(name)) => {
                if let Some(Token::LParen) = self.peek() {
                    self.bump();
                    let arg = self.expr()?;
                    match self.bump() {
                        Some(Token::RParen) => Ok(Expr::Call(name, Box::new(arg))),
                        _ => Err(GeomError::Config("missing `)` after function call".into())),
                    }
                } else {
                    Ok(Expr::Var(name))
                }
            }
            Some(Token::LParen) => {
                let e = self.expr()?;
                match self.bump() {
                    Some(Token::RParen) => Ok(e),
                    _ => Err(GeomError::Config("missing `)`".into())),
                }
            }
            other => Err(GeomError::Config(format!("unexpected token {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval1(src: &str, t: f64) -> f64 {
        Expr::parse(src)
            .unwrap()
            .eval(&[("t", Dual::constant(t))])
            .unwrap()
            .re
    }

    #[test]
    fn arithmetic_and_precedence() {
        assert_eq!(eval1("1 + 2 * 3", 0.0), 7.0);
        assert_eq!(eval1("(1 + 2) * 3", 0.0), 9.0);
        assert_eq!(eval1("2 ^ 3 ^ 2", 0.0), 512.0); // right-assoc
        assert_eq!(eval1("-t + 1", 3.0), -2.0);
    }

    #[test]
    fn functions() {
        assert!((eval1("exp(t) * sin(t)", 0.5) - 0.5f64.exp() * 0.5f64.sin()).abs() < 1e-14);
        assert!((eval1("2 + sin(t)", 1.0) - (2.0 + 1.0f64.sin())).abs() < 1e-14);
    }

    #[test]
    fn derivative_through_duals() {
        let e = Expr::parse("exp(2*t)").unwrap();
        let d = e.eval(&[("t", Dual::var(0.3, 0, 1))]).unwrap();
        assert!((d.grad(0) - 2.0 * (0.6f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn rejects_garbage() {
        assert!(Expr::parse("1 +").is_err());
        assert!(Expr::parse("foo(").is_err());
        assert!(Expr::parse("1 2").is_err());
        assert!(Expr::parse("@").is_err());
    }

    #[test]
    fn unknown_variable_is_an_error() {
        let e = Expr::parse("q + 1").unwrap();
        assert!(e.eval(&[("t", Dual::constant(0.0))]).is_err());
    }
}
