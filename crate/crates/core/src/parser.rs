//! Recursive-descent parser for the formula text grammar.
//!
//! ```text
//! phi  := or
//! or   := and ("|" and)*
//! and  := until ("&" until)*
//! until:= unary ("U[" int "," int "]" until)?
//! unary:= "!" unary | ("F"|"G") "[" int "," int "]" unary | atom
//! atom := "T" | "F" | pred | "(" phi ")"
//! pred := "x" index ("<=" | ">=") decimal
//! ```
//!
//! A bare `F` not followed by `[` is the false constant, which is how
//! negation normal form prints `!T`.

use crate::error::{Error, Result};
use crate::formula::{Cmp, Formula, Interval, Predicate};
use crate::scalar::Scalar;

/// Parses `text` as a formula over signals with `dims` components.
///
/// `#` starts a comment that runs to the end of the line.
pub fn parse_formula<S: Scalar>(text: &str, dims: usize) -> Result<Formula<S>> {
    let mut parser = Parser { src: text.as_bytes(), pos: 0, dims };
    let formula = parser.or()?;
    parser.skip_ws();
    if parser.pos < parser.src.len() {
        return Err(parser.syntax("unexpected trailing input"));
    }
    Ok(formula)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    dims: usize,
}

impl Parser<'_> {
    fn syntax(&self, message: impl Into<String>) -> Error {
        Error::Syntax { position: self.pos, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while let Some(&c) = self.src.get(self.pos) {
            if c == b'#' {
                while self.src.get(self.pos).is_some_and(|&c| c != b'\n') {
                    self.pos += 1;
                }
            } else if c.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    /// Next non-whitespace byte after the current one.
    fn peek_after(&mut self) -> Option<u8> {
        self.skip_ws();
        let saved = self.pos;
        self.pos += 1;
        let next = self.peek();
        self.pos = saved;
        next
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.syntax(format!("expected '{}'", c as char)))
        }
    }

    fn or<S: Scalar>(&mut self) -> Result<Formula<S>> {
        let mut lhs = self.and()?;
        while self.eat(b'|') {
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and<S: Scalar>(&mut self) -> Result<Formula<S>> {
        let mut lhs = self.until()?;
        while self.eat(b'&') {
            lhs = Formula::and(lhs, self.until()?);
        }
        Ok(lhs)
    }

    fn until<S: Scalar>(&mut self) -> Result<Formula<S>> {
        let lhs = self.unary()?;
        if self.peek() == Some(b'U') {
            self.pos += 1;
            let interval = self.interval()?;
            let rhs = self.until()?;
            return Ok(Formula::until(lhs, interval, rhs));
        }
        Ok(lhs)
    }

    fn unary<S: Scalar>(&mut self) -> Result<Formula<S>> {
        match self.peek() {
            Some(b'!') => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(op @ (b'F' | b'G')) if self.peek_after() == Some(b'[') => {
                self.pos += 1;
                let interval = self.interval()?;
                let inner = self.unary()?;
                Ok(if op == b'F' {
                    Formula::eventually(interval, inner)
                } else {
                    Formula::globally(interval, inner)
                })
            }
            _ => self.atom(),
        }
    }

    fn atom<S: Scalar>(&mut self) -> Result<Formula<S>> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.or()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(b'T') => {
                self.pos += 1;
                Ok(Formula::True)
            }
            Some(b'F') => {
                self.pos += 1;
                Ok(Formula::False)
            }
            Some(b'x') => self.predicate().map(Formula::Pred),
            Some(c) => Err(self.syntax(format!("unexpected '{}'", c as char))),
            None => Err(self.syntax("unexpected end of input")),
        }
    }

    fn predicate<S: Scalar>(&mut self) -> Result<Predicate<S>> {
        self.pos += 1;
        let start = self.pos;
        let index = self.integer()?;
        if index == 0 || index > self.dims {
            self.pos = start;
            return Err(Error::DimensionOutOfRange { index, dims: self.dims });
        }
        self.skip_ws();
        let cmp = match self.src.get(self.pos..self.pos + 2) {
            Some(b"<=") => Cmp::Le,
            Some(b">=") => Cmp::Ge,
            _ => return Err(self.syntax("expected '<=' or '>='")),
        };
        self.pos += 2;
        self.skip_ws();
        let start = self.pos;
        while self
            .src
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_digit() || matches!(c, b'.' | b'-' | b'+' | b'e' | b'E'))
        {
            self.pos += 1;
        }
        let literal = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        let threshold = S::parse_decimal(literal).ok_or_else(|| Error::Syntax {
            position: start,
            message: format!("invalid decimal '{literal}'"),
        })?;
        Ok(Predicate::new(index - 1, cmp, threshold))
    }

    fn integer(&mut self) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.syntax("expected an integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Syntax { position: start, message: "integer out of range".into() })
    }

    fn interval(&mut self) -> Result<Interval> {
        let start = self.pos;
        self.expect(b'[')?;
        let lo = self.bound()?;
        self.expect(b',')?;
        let hi = self.bound()?;
        self.expect(b']')?;
        Interval::new(lo, hi).ok_or(Error::BadInterval {
            position: start,
            message: format!("lower bound {lo} exceeds upper bound {hi}"),
        })
    }

    fn bound(&mut self) -> Result<usize> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        if rest.starts_with(b"inf") || rest.starts_with(b"oo") || rest.starts_with("∞".as_bytes()) {
            return Err(Error::BadInterval {
                position: self.pos,
                message: "temporal operators must be bounded".into(),
            });
        }
        self.integer()
    }
}
