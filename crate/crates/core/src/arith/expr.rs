//! Text form of field elements.
//!
//! Elements print through `Display` using generator labels; this module reads
//! that form back. Grammar: sums and differences of products and quotients of
//! factors, where a factor is an optionally negated atom with an optional
//! `^n`. Atoms are integers, generator labels or parenthesized expressions.
//! Labels start with a letter and may contain letters, digits, `_`, `,`, `'`
//! and `.`.

use std::sync::Arc;

use num_bigint::BigInt;

use super::element::FieldElement;
use super::tower::Tower;
use super::{ArithError, Rational};

pub fn parse_element(tower: &Arc<Tower>, text: &str) -> Result<FieldElement, ArithError> {
    let mut p = Parser {
        tower,
        src: text.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("trailing input"));
    }
    Ok(e)
}

pub(crate) fn is_label_char(c: u8) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, b'_' | b',' | b'\'' | b'.')
}

struct Parser<'a> {
    tower: &'a Arc<Tower>,
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, what: &str) -> ArithError {
        ArithError::Parse(format!("{what} at offset {}", self.pos))
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

    fn expr(&mut self) -> Result<FieldElement, ArithError> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == b'+' {
                acc.add(&rhs)?
            } else {
                acc.sub(&rhs)?
            };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<FieldElement, ArithError> {
        let mut acc = self.factor()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.factor()?;
            acc = if c == b'*' {
                acc.mul(&rhs)?
            } else {
                acc.div(&rhs)?
            };
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<FieldElement, ArithError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(self.factor()?.neg());
        }
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let n = self
                .digits()
                .ok_or_else(|| self.error("expected exponent"))?;
            let e: u32 = n.try_into().map_err(|_| self.error("exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn digits(&mut self) -> Option<BigInt> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).ok()?;
        s.parse().ok()
    }

    fn atom(&mut self) -> Result<FieldElement, ArithError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.digits().expect("digit present");
                Ok(FieldElement::rational(
                    self.tower,
                    Rational::from_integer(n),
                ))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && is_label_char(self.src[self.pos]) {
                    self.pos += 1;
                }
                let label = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                FieldElement::generator(self.tower, label)
            }
            _ => Err(self.error("expected a number, label or `(`")),
        }
    }
}
