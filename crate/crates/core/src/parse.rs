//! Text syntax for multisets (`2a + 3b`) and distributions (`1/3 R + 2/3 B`).
//!
//! ```text
//! multiset     := term ("+" term)*      term := NAT "*"? LABEL
//! distribution := term ("+" term)*      term := RAT "*"? LABEL
//! RAT          := NAT ("/" NAT)?
//! ```
//!
//! Whitespace is ignored between tokens and repeated labels are summed.
//! The lone literal `0` denotes the empty multiset.

use num_bigint::BigUint;

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::multiset::{Color, Multiset};
use crate::numeric::Rational;

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    fn skip_ws(&mut self) {
        while let Some(b) = self.peek() {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos == self.src.len()
    }

    fn nat(&mut self) -> Result<BigUint> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(b) if b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a number"));
        }
        Ok(self.src[start..self.pos].parse().expect("digits"))
    }

    fn label(&mut self) -> Result<Color> {
        self.skip_ws();
        let start = self.pos;
        if !matches!(self.peek(), Some(b) if b.is_ascii_alphabetic()) {
            return Err(self.error("expected a colour label"));
        }
        while matches!(self.peek(), Some(b) if b.is_ascii_alphanumeric() || b == b'_') {
            self.pos += 1;
        }
        Color::new(&self.src[start..self.pos])
    }

    fn error(&self, msg: &str) -> Error {
        let found = match self.src[self.pos..].chars().next() {
            Some(c) => format!("found {c:?}"),
            None => "found end of input".to_string(),
        };
        Error::parse(self.pos, format!("{msg}, {found}"))
    }

    fn terms<T>(&mut self, mut term: impl FnMut(&mut Self) -> Result<T>) -> Result<Vec<T>> {
        let mut out = vec![term(self)?];
        while self.eat(b'+') {
            out.push(term(self)?);
        }
        if !self.at_end() {
            return Err(self.error("expected '+' or end of input"));
        }
        Ok(out)
    }
}

/// Parses `2a + 3b` style text.
pub fn parse_multiset(text: &str) -> Result<Multiset> {
    if text.trim() == "0" {
        return Ok(Multiset::new());
    }
    let mut cur = Cursor::new(text);
    let terms = cur.terms(|c| {
        let at = {
            c.skip_ws();
            c.pos
        };
        let n = c.nat()?;
        c.eat(b'*');
        let label = c.label()?;
        let n: u64 = u64::try_from(n).map_err(|_| Error::parse(at, "count too large"))?;
        if n == 0 {
            return Err(Error::parse(at, format!("zero count for {label}")));
        }
        Ok((label, n))
    })?;
    Ok(Multiset::from_counts(terms))
}

/// Parses `1/3 R + 2/3 B` style text; the probabilities must sum to exactly 1.
pub fn parse_distribution(text: &str) -> Result<Dist<Color>> {
    let mut cur = Cursor::new(text);
    let terms = cur.terms(|c| {
        let at = {
            c.skip_ws();
            c.pos
        };
        let num = c.nat()?;
        let den = if c.eat(b'/') { c.nat()? } else { BigUint::from(1u8) };
        if den == BigUint::default() {
            return Err(Error::parse(at, "zero denominator"));
        }
        c.eat(b'*');
        let label = c.label()?;
        if num == BigUint::default() {
            return Err(Error::parse(at, format!("zero probability for {label}")));
        }
        Ok((label, Rational::from_naturals(num, den)))
    })?;
    let total: Rational = terms.iter().map(|(_, p)| p).sum();
    if !total.is_one() {
        return Err(Error::parse(0, format!("probabilities sum to {total}")));
    }
    Dist::from_pairs(terms)
}

/// Prints a distribution in the syntax accepted by [`parse_distribution`].
pub fn format_distribution(d: &Dist<Color>) -> String {
    d.iter()
        .map(|(c, p)| {
            if p.denom() == &1.into() {
                format!("{} {c}", p.numer())
            } else {
                format!("{p} {c}")
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}
