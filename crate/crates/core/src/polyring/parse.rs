//! Recursive-descent parser for polynomial expressions.
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') ['-'] term)*
//! term   := factor (('*' | '/') factor)*
//! factor := base ('^' nat)?
//! base   := identifier | integer | '(' expr ')'
//! ```
//!
//! Division is only accepted by a nonzero constant, which lets printed
//! coefficients such as `3/2*x` parse back.

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use super::polynomial::{Polynomial, Roster};
use super::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("exponent must be a non-negative integer literal")]
    BadExponent,
    #[error("division by a non-constant expression")]
    DivisionByNonConstant,
    #[error("division by zero")]
    DivisionByZero,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at byte {position}: {kind}")]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Dot,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, usize)>, ParseError> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        loop {
            let (t, p) = lx.next_token()?;
            let end = t == Tok::End;
            out.push((t, p));
            if end {
                return Ok(out);
            }
        }
    }

    fn peek_char(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn next_token(&mut self) -> Result<(Tok, usize), ParseError> {
        while let Some(c) = self.peek_char() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        let start = self.pos;
        let c = match self.peek_char() {
            None => return Ok((Tok::End, start)),
            Some(c) => c,
        };
        if c.is_alphabetic() {
            while let Some(c) = self.peek_char() {
                if c.is_alphanumeric() || c == '_' {
                    self.pos += c.len_utf8();
                } else {
                    break;
                }
            }
            return Ok((Tok::Ident(self.src[start..self.pos].to_string()), start));
        }
        if c.is_ascii_digit() {
            while matches!(self.peek_char(), Some(d) if d.is_ascii_digit()) {
                self.pos += 1;
            }
            let n: BigInt = self.src[start..self.pos].parse().expect("digits");
            return Ok((Tok::Int(n), start));
        }
        self.pos += c.len_utf8();
        let t = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '.' => Tok::Dot,
            other => {
                return Err(ParseError {
                    position: start,
                    kind: ParseErrorKind::Syntax(format!("unexpected character `{other}`")),
                })
            }
        };
        Ok((t, start))
    }
}

struct Parser<'r> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    vars: &'r Roster,
}

impl<'r> Parser<'r> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            position: self.pos(),
            kind: ParseErrorKind::Syntax(msg.into()),
        })
    }

    fn expr(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.signed_term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    let t = self.signed_term()?;
                    acc = &acc + &t;
                }
                Tok::Minus => {
                    self.bump();
                    let t = self.signed_term()?;
                    acc = &acc - &t;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn signed_term(&mut self) -> Result<Polynomial, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            let t = self.term()?;
            Ok(-&t)
        } else {
            self.term()
        }
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    let f = self.factor()?;
                    acc = &acc * &f;
                }
                Tok::Slash => {
                    self.bump();
                    let at = self.pos();
                    let f = self.factor()?;
                    if !f.is_constant() {
                        return Err(ParseError {
                            position: at,
                            kind: ParseErrorKind::DivisionByNonConstant,
                        });
                    }
                    let c = f.constant_term();
                    if c.is_zero() {
                        return Err(ParseError {
                            position: at,
                            kind: ParseErrorKind::DivisionByZero,
                        });
                    }
                    acc = acc.scale(&(Rational::from_integer(1.into()) / c));
                }
                Tok::Ident(_) | Tok::Int(_) | Tok::LParen => {
                    return self.syntax("implicit multiplication is not allowed; use `*`");
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Polynomial, ParseError> {
        let base = self.base()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let at = self.pos();
        let bad = Err(ParseError {
            position: at,
            kind: ParseErrorKind::BadExponent,
        });
        match self.bump() {
            Tok::Int(n) => {
                if matches!(self.peek(), Tok::Dot | Tok::Slash) {
                    return bad;
                }
                match u32::try_from(n) {
                    Ok(k) => Ok(base.pow(k)),
                    Err(_) => bad,
                }
            }
            _ => bad,
        }
    }

    fn base(&mut self) -> Result<Polynomial, ParseError> {
        let at = self.pos();
        match self.bump() {
            Tok::Ident(name) => Polynomial::var(self.vars, &name).map_err(|_| ParseError {
                position: at,
                kind: ParseErrorKind::UnknownIdentifier(name),
            }),
            Tok::Int(n) => Ok(Polynomial::constant(self.vars, Rational::from_integer(n))),
            Tok::LParen => {
                let e = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return self.syntax("expected `)`");
                }
                self.bump();
                Ok(e)
            }
            Tok::End => self.syntax("unexpected end of input"),
            _ => {
                self.at -= 1;
                self.syntax("expected identifier, integer or `(`")
            }
        }
    }
}

/// Parses `text` into a canonical polynomial over `vars`.
pub fn parse_polynomial(text: &str, vars: &Roster) -> Result<Polynomial, ParseError> {
    let toks = Lexer::tokens(text)?;
    let mut p = Parser { toks, at: 0, vars };
    let out = p.expr()?;
    if *p.peek() != Tok::End {
        return p.syntax("unexpected trailing input");
    }
    Ok(out)
}
