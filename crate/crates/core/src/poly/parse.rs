//! Recursive-descent parser for the polynomial text grammar.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | '+' unary | power
//! power := atom ('^' INTEGER)?
//! atom  := INTEGER | IDENT | '(' expr ')'
//! ```
//!
//! Division is only allowed by expressions that reduce to a nonzero constant,
//! which covers literals such as `a/b` and `y^2/2`. Juxtaposition (`2x`) is
//! rejected.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{Poly, PolyError};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, PolyError> {
    let bytes = text.as_bytes();
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
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '0'..='9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    if matches!(out.last(), Some((Tok::Caret, _))) {
                        return Err(PolyError::BadExponent { pos: start });
                    }
                    return Err(PolyError::Syntax {
                        pos: i,
                        msg: "decimal literals are not supported; write a/b".into(),
                    });
                }
                out.push((Tok::Int(text[start..i].parse().unwrap()), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            other => {
                return Err(PolyError::Syntax {
                    pos: i,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    template: &'a Poly,
}

impl Parser<'_> {
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

    fn expr(&mut self) -> Result<Poly, PolyError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = acc + self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = acc - self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly, PolyError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    acc = acc * self.unary()?;
                }
                Tok::Slash => {
                    let pos = self.pos();
                    self.bump();
                    let d = self.unary()?;
                    if !d.is_constant() {
                        return Err(PolyError::DivisionByNonConstant { pos });
                    }
                    let c = d.constant_term();
                    if c.is_zero() {
                        return Err(PolyError::DivisionByZero { pos });
                    }
                    acc = acc.scale(&(BigRational::from_integer(1.into()) / c));
                }
                Tok::Int(_) | Tok::Ident(_) | Tok::LParen => {
                    return Err(PolyError::Syntax {
                        pos: self.pos(),
                        msg: "implicit multiplication is not allowed; use `*`".into(),
                    })
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Poly, PolyError> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(-self.unary()?)
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Poly, PolyError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let pos = self.pos();
        let e = match self.bump() {
            Tok::Int(n) => u32::try_from(n).map_err(|_| PolyError::BadExponent { pos })?,
            _ => return Err(PolyError::BadExponent { pos }),
        };
        if *self.peek() == Tok::Caret {
            return Err(PolyError::Syntax {
                pos: self.pos(),
                msg: "chained exponents need parentheses".into(),
            });
        }
        Ok(base.pow(e))
    }

    fn atom(&mut self) -> Result<Poly, PolyError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Int(n) => Ok(self.template.constant_like(BigRational::from_integer(n))),
            Tok::Ident(name) => {
                let i = self
                    .template
                    .index_of(&name)
                    .map_err(|_| PolyError::UnknownVariable { name, pos })?;
                Ok(self.template.monomial(i, 1, BigRational::from_integer(1.into())))
            }
            Tok::LParen => {
                let inner = self.expr()?;
                if self.bump() != Tok::RParen {
                    return Err(PolyError::Syntax {
                        pos: self.toks[self.at.saturating_sub(1)].1,
                        msg: "expected `)`".into(),
                    });
                }
                Ok(inner)
            }
            Tok::End => Err(PolyError::Syntax {
                pos,
                msg: "unexpected end of input".into(),
            }),
            other => Err(PolyError::Syntax {
                pos,
                msg: format!("unexpected token {other:?}"),
            }),
        }
    }
}

/// Parses `text` as a polynomial over `variables`.
pub fn parse_poly<S: AsRef<str>>(text: &str, variables: &[S]) -> Result<Poly, PolyError> {
    let template = Poly::zero(variables);
    let mut parser = Parser {
        toks: lex(text)?,
        at: 0,
        template: &template,
    };
    let p = parser.expr()?;
    if *parser.peek() != Tok::End {
        return Err(PolyError::Syntax {
            pos: parser.pos(),
            msg: "trailing input".into(),
        });
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, rat};

    const XYZ: [&str; 3] = ["x", "y", "Z"];

    #[test]
    fn fold_deformation_terms() {
        let t = parse_poly("y^2/2 - x^2*Z/2 + Z^3/6", &XYZ).unwrap();
        assert_eq!(t.num_terms(), 3);
        assert_eq!(t.coeff(&[0, 2, 0]), rat(1, 2));
        assert_eq!(t.coeff(&[2, 0, 1]), rat(-1, 2));
        assert_eq!(t.coeff(&[0, 0, 3]), rat(1, 6));
    }

    #[test]
    fn zero_and_binomial() {
        assert!(parse_poly("0", &XYZ).unwrap().is_zero());
        let b = parse_poly("(x + y)^2", &XYZ).unwrap();
        assert_eq!(b.coeff(&[2, 0, 0]), int(1));
        assert_eq!(b.coeff(&[1, 1, 0]), int(2));
        assert_eq!(b.coeff(&[0, 2, 0]), int(1));
        assert_eq!(b.num_terms(), 3);
    }

    #[test]
    fn unary_minus_binds_below_power() {
        let a = parse_poly("-x^2", &XYZ).unwrap();
        assert_eq!(a.coeff(&[2, 0, 0]), int(-1));
        let b = parse_poly("--x", &XYZ).unwrap();
        assert_eq!(b.coeff(&[1, 0, 0]), int(1));
    }

    #[test]
    fn errors_carry_positions() {
        assert!(matches!(
            parse_poly("x + w", &XYZ),
            Err(PolyError::UnknownVariable { pos: 4, .. })
        ));
        assert!(matches!(
            parse_poly("x^-1", &XYZ),
            Err(PolyError::BadExponent { pos: 2 })
        ));
        assert!(matches!(
            parse_poly("x^y", &XYZ),
            Err(PolyError::BadExponent { .. })
        ));
        assert!(matches!(
            parse_poly("x^1.5", &XYZ),
            Err(PolyError::BadExponent { pos: 2 })
        ));
        assert!(matches!(
            parse_poly("1.5*x", &XYZ),
            Err(PolyError::Syntax { pos: 1, .. })
        ));
        assert!(matches!(
            parse_poly("2x", &XYZ),
            Err(PolyError::Syntax { pos: 1, .. })
        ));
        assert!(matches!(
            parse_poly("(x + 1", &XYZ),
            Err(PolyError::Syntax { .. })
        ));
        assert!(matches!(
            parse_poly("x / y", &XYZ),
            Err(PolyError::DivisionByNonConstant { pos: 2 })
        ));
        assert!(matches!(
            parse_poly("x / (1 - 1)", &XYZ),
            Err(PolyError::DivisionByZero { .. })
        ));
        assert!(matches!(
            parse_poly("x $ 1", &XYZ),
            Err(PolyError::Syntax { pos: 2, .. })
        ));
        assert!(parse_poly("", &XYZ).is_err());
        assert!(parse_poly("x)", &XYZ).is_err());
    }
}
