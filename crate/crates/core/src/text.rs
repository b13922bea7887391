//! Text syntax shared by all exact types.
//!
//! Grammar (whitespace insignificant, `*` optional between factors):
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor (['*'|'/'] factor)*
//! factor := ['-'] atom ['^' exponent]
//! atom   := number | symbol | 'sqrt' '(' expr ')' | '(' expr ')'
//! exponent := ['-'] number | '(' expr ')'
//! ```
//!
//! Symbols are `q`, `s` (= q^{1/2}), `L`, `EG` and the generators `a b c d`. A run of letters
//! such as `bc` reads as the product `b*c`.

use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::scalars::{parse_rational, ConstExt, QRat, RadScalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symbol {
    Q,
    S,
    L,
    EulerGamma,
    A,
    B,
    C,
    D,
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(BigRational),
    Sym(Symbol),
    Sqrt,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        match ch {
            c if c.is_whitespace() => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1
            }
            '-' => {
                out.push(Token::Minus);
                i += 1
            }
            '*' | '·' => {
                out.push(Token::Star);
                i += 1
            }
            '/' => {
                out.push(Token::Slash);
                i += 1
            }
            '^' => {
                out.push(Token::Caret);
                i += 1
            }
            '(' | '{' => {
                out.push(Token::LParen);
                i += 1
            }
            ')' | '}' => {
                out.push(Token::RParen);
                i += 1
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                // scientific notation only when an exponent digit follows
                if i + 1 < chars.len()
                    && (chars[i] == 'e' || chars[i] == 'E')
                    && (chars[i + 1].is_ascii_digit()
                        || ((chars[i + 1] == '-' || chars[i + 1] == '+')
                            && i + 2 < chars.len()
                            && chars[i + 2].is_ascii_digit()))
                {
                    i += 2;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                let lit: String = chars[start..i].iter().collect();
                out.push(Token::Num(parse_rational(&lit)?));
            }
            c if c.is_alphabetic() => {
                let start = i;
                while i < chars.len() && chars[i].is_alphabetic() {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                lex_word(&word, &mut out)?;
            }
            other => {
                return Err(Error::Parse(format!(
                    "unexpected character {other:?} in {text:?}"
                )))
            }
        }
    }
    Ok(out)
}

fn lex_word(word: &str, out: &mut Vec<Token>) -> Result<()> {
    let mut rest = word;
    while !rest.is_empty() {
        if let Some(r) = rest.strip_prefix("sqrt") {
            out.push(Token::Sqrt);
            rest = r;
            continue;
        }
        if let Some(r) = rest.strip_prefix("EG") {
            out.push(Token::Sym(Symbol::EulerGamma));
            rest = r;
            continue;
        }
        let c = rest.chars().next().unwrap();
        let sym = match c {
            'q' => Symbol::Q,
            's' => Symbol::S,
            'L' => Symbol::L,
            'a' => Symbol::A,
            'b' => Symbol::B,
            'c' => Symbol::C,
            'd' => Symbol::D,
            _ => return Err(Error::Parse(format!("unknown symbol {c:?} in {word:?}"))),
        };
        out.push(Token::Sym(sym));
        rest = &rest[c.len_utf8()..];
    }
    Ok(())
}

/// Parsed expression tree.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(BigRational),
    Sym(Symbol),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, BigRational),
    Sqrt(Box<Expr>),
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: Token) -> Result<()> {
        match self.next() {
            Some(t) if t == tok => Ok(()),
            other => Err(Error::Parse(format!("expected {tok:?}, found {other:?}"))),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = match self.peek() {
            Some(Token::Minus) => {
                self.pos += 1;
                Expr::Neg(Box::new(self.term()?))
            }
            Some(Token::Plus) => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Token::Minus) => {
                    self.pos += 1;
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
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                Some(Token::Num(_) | Token::Sym(_) | Token::Sqrt | Token::LParen) => {
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.atom()?;
        if self.peek() == Some(&Token::Caret) {
            self.pos += 1;
            let e = self.exponent()?;
            return Ok(Expr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<BigRational> {
        match self.next() {
            Some(Token::Minus) => Ok(-self.exponent()?),
            Some(Token::Plus) => self.exponent(),
            Some(Token::Num(n)) => Ok(n),
            Some(Token::LParen) => {
                let inner = self.expr()?;
                self.expect(Token::RParen)?;
                let value: QRat = eval(&inner)?;
                value
                    .to_rational()
                    .ok_or_else(|| Error::Parse("exponent must be a rational constant".into()))
            }
            other => Err(Error::Parse(format!("bad exponent {other:?}"))),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.next() {
            Some(Token::Num(n)) => Ok(Expr::Num(n)),
            Some(Token::Sym(s)) => Ok(Expr::Sym(s)),
            Some(Token::Sqrt) => {
                self.expect(Token::LParen)?;
                let inner = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(Expr::Sqrt(Box::new(inner)))
            }
            Some(Token::LParen) => {
                let inner = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(inner)
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

pub fn parse_expr(text: &str) -> Result<Expr> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut p = Parser { tokens, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(Error::Parse(format!("trailing input in {text:?}")));
    }
    Ok(e)
}

/// A ring that parsed expressions can be evaluated in.
pub trait TextRing: Sized + Clone {
    fn from_rational(c: BigRational) -> Self;
    fn symbol(sym: Symbol) -> Result<Self>;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn div(&self, other: &Self) -> Result<Self>;

    /// Powers with a non-integral exponent; integral exponents are handled generically.
    fn fractional_pow(&self, e: &BigRational) -> Result<Self> {
        let _ = e;
        Err(Error::Parse(
            "fractional exponent not supported here".into(),
        ))
    }

    fn sqrt(&self) -> Result<Self> {
        Err(Error::Parse("sqrt not supported here".into()))
    }

    fn pow(&self, e: &BigRational) -> Result<Self> {
        if !e.is_integer() {
            return self.fractional_pow(e);
        }
        let n = e
            .to_integer()
            .to_i64()
            .ok_or_else(|| Error::Parse("exponent too large".into()))?;
        let mut acc = Self::from_rational(BigRational::one());
        let mut base = self.clone();
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        if n < 0 {
            Self::from_rational(BigRational::one()).div(&acc)
        } else {
            Ok(acc)
        }
    }
}

pub fn eval<R: TextRing>(e: &Expr) -> Result<R> {
    Ok(match e {
        Expr::Num(n) => R::from_rational(n.clone()),
        Expr::Sym(s) => R::symbol(*s)?,
        Expr::Add(a, b) => eval::<R>(a)?.add(&eval::<R>(b)?),
        Expr::Sub(a, b) => eval::<R>(a)?.add(&eval::<R>(b)?.neg()),
        Expr::Mul(a, b) => eval::<R>(a)?.mul(&eval::<R>(b)?),
        Expr::Div(a, b) => eval::<R>(a)?.div(&eval::<R>(b)?)?,
        Expr::Neg(a) => eval::<R>(a)?.neg(),
        Expr::Pow(a, k) => eval::<R>(a)?.pow(k)?,
        Expr::Sqrt(a) => eval::<R>(a)?.sqrt()?,
    })
}

pub fn parse_as<R: TextRing>(text: &str) -> Result<R> {
    eval(&parse_expr(text)?)
}

fn scalar_symbol(sym: Symbol) -> Result<QRat> {
    match sym {
        Symbol::Q => Ok(QRat::q_pow(1)),
        Symbol::S => Ok(QRat::s_pow(1)),
        other => Err(Error::Parse(format!(
            "symbol {other:?} not allowed in this context"
        ))),
    }
}

/// `(c s^k)^e` for rational `e`, provided the result is again a monomial in `s`.
fn monomial_pow(x: &QRat, e: &BigRational) -> Result<QRat> {
    let terms = x.s_laurent_terms().filter(|t| t.len() == 1);
    let Some(terms) = terms else {
        return Err(Error::Parse(format!(
            "fractional power of non-monomial {x}"
        )));
    };
    let (k, c) = &terms[0];
    if !c.is_one() {
        return Err(Error::Parse(format!("fractional power of {x}")));
    }
    let ke = e * BigRational::from_integer((*k).into());
    if !ke.is_integer() {
        return Err(Error::Parse(format!("{x}^{e} leaves the field")));
    }
    Ok(QRat::s_pow(ke.to_integer().to_i64().unwrap()))
}

impl TextRing for QRat {
    fn from_rational(c: BigRational) -> Self {
        QRat::from_rational(c)
    }
    fn symbol(sym: Symbol) -> Result<Self> {
        scalar_symbol(sym)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div(&self, other: &Self) -> Result<Self> {
        self.checked_div(other)
    }
    fn fractional_pow(&self, e: &BigRational) -> Result<Self> {
        monomial_pow(self, e)
    }
}

impl TextRing for RadScalar {
    fn from_rational(c: BigRational) -> Self {
        RadScalar::from_qrat(QRat::from_rational(c))
    }
    fn symbol(sym: Symbol) -> Result<Self> {
        scalar_symbol(sym).map(RadScalar::from_qrat)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.recip()?)
    }
    fn fractional_pow(&self, e: &BigRational) -> Result<Self> {
        let c = self
            .to_qrat()
            .ok_or_else(|| Error::Parse("fractional power of a radical".into()))?;
        if e.denom() == &2.into() {
            // x^{p/2} = sqrt(x^p)
            let p = e
                .numer()
                .to_i64()
                .ok_or_else(|| Error::Parse("exponent too large".into()))?;
            if let Ok(m) = monomial_pow(&c, e) {
                return Ok(RadScalar::from_qrat(m));
            }
            return RadScalar::sqrt(&c.pow(p)?);
        }
        monomial_pow(&c, e).map(RadScalar::from_qrat)
    }
    fn sqrt(&self) -> Result<Self> {
        let c = self
            .to_qrat()
            .ok_or_else(|| Error::Parse("nested radicals are not supported".into()))?;
        RadScalar::sqrt(&c)
    }
}

impl TextRing for ConstExt {
    fn from_rational(c: BigRational) -> Self {
        ConstExt::from_qrat(QRat::from_rational(c))
    }
    fn symbol(sym: Symbol) -> Result<Self> {
        match sym {
            Symbol::L => Ok(ConstExt::log_q_inv()),
            Symbol::EulerGamma => Ok(ConstExt::euler_gamma()),
            other => scalar_symbol(other).map(ConstExt::from_qrat),
        }
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div(&self, other: &Self) -> Result<Self> {
        self.checked_div(other)
    }
    fn fractional_pow(&self, e: &BigRational) -> Result<Self> {
        let c = self
            .to_qrat()
            .ok_or_else(|| Error::Parse("fractional power of a symbol".into()))?;
        monomial_pow(&c, e).map(ConstExt::from_qrat)
    }
}

/// Shorthand used in tests and examples: parse a `QRat`, panicking on malformed input.
pub fn qr(text: &str) -> QRat {
    parse_as::<QRat>(text).unwrap_or_else(|e| panic!("bad scalar {text:?}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{qnum, HalfInt};

    #[test]
    fn scalar_round_trip() {
        let samples = [
            "0",
            "1",
            "-3/2",
            "q^-1 + q",
            "(-q + q^3)/(1 - q^4)",
            "q^(1/2)",
            "q^(-3/2) + 2*q^(1/2)",
            "1/(1 + q)",
            "(1 + q)/(2*q)",
        ];
        for text in samples {
            let x: QRat = text.parse().unwrap();
            let again: QRat = x.to_string().parse().unwrap();
            assert_eq!(x, again, "{text} -> {x}");
        }
        assert_eq!(qr("q^-1 + q"), qnum(HalfInt::from_int(2)));
        assert_eq!(qr("s^2"), qr("q"));
        assert_eq!(qr("0.5q"), qr("q/2"));
        assert_eq!(qr("2q^2"), qr("2*q*q"));
    }

    #[test]
    fn extension_round_trip() {
        let x: ConstExt = "1/2*(1 - EG/L) - q/(q^-1 - q)".parse().unwrap();
        let again: ConstExt = x.to_string().parse().unwrap();
        assert_eq!(x, again);
        assert!(x.has_symbols());
        let r: RadScalar = "sqrt(q + q^-1) * sqrt(q^-1 + q)".parse().unwrap();
        assert_eq!(r.to_qrat().unwrap(), qr("q + q^-1"));
    }

    #[test]
    fn malformed_input_is_rejected() {
        for bad in ["", "q +", "(q", "x", "q^(q)", "1/0", "q^(1/3)"] {
            assert!(parse_as::<QRat>(bad).is_err(), "{bad}");
        }
        assert!(parse_as::<QRat>("L").is_err());
        assert!(parse_as::<ConstExt>("1/(1 + L)").is_err());
    }
}
