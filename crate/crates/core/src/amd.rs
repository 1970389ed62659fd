//! Systematic algebraic manipulation detection (AMD) code over `F_{q^m}`.
//!
//! `x -> (x, r, t)` with `t = r^(l+2) + sum_{i=1..l} x_i r^i`. An additive
//! offset applied without knowledge of the codeword passes verification
//! for at most `l + 1` of the `q^m` choices of `r`.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{ExtElement, ExtField, FieldError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AmdError {
    #[error("invalid AMD parameters: {0}")]
    Param(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmdParams {
    ext: ExtField,
    blocks: usize,
}

impl AmdParams {
    /// `blocks` is the number `l` of message elements. `l + 2` must not be
    /// divisible by the characteristic, otherwise the leading term of the
    /// tamper polynomial can vanish.
    pub fn new(ext: ExtField, blocks: usize) -> Result<Self, AmdError> {
        if blocks == 0 {
            return Err(AmdError::Param("at least one message block is required".into()));
        }
        let q = ext.base().modulus();
        if (blocks as u64 + 2).is_multiple_of(q) {
            return Err(AmdError::Param(format!(
                "l + 2 = {} is divisible by q = {q}",
                blocks + 2
            )));
        }
        Ok(AmdParams { ext, blocks })
    }

    pub fn ext(&self) -> &ExtField {
        &self.ext
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    /// Codeword length over the base field: `(l + 2) m`.
    pub fn symbol_len(&self) -> usize {
        (self.blocks + 2) * self.ext.degree()
    }

    /// Tamper-success bound `(l + 1) / q^m` as `(numerator, denominator)`.
    pub fn security_bound(&self) -> (u128, Option<u128>) {
        (self.blocks as u128 + 1, self.ext.order())
    }

    pub fn tag(&self, x: &[ExtElement], r: &ExtElement) -> Result<ExtElement, AmdError> {
        if x.len() != self.blocks {
            return Err(FieldError::LengthMismatch { expected: self.blocks, got: x.len() }.into());
        }
        Ok(self.tag_unchecked(x, r))
    }

    /// Horner form: `r (x_1 + r (x_2 + ... + r (x_l + r^2)))`.
    fn tag_unchecked(&self, x: &[ExtElement], r: &ExtElement) -> ExtElement {
        let e = &self.ext;
        let mut acc = e.mul(r, r);
        for xi in x.iter().rev() {
            acc = e.mul(r, &e.add(xi, &acc));
        }
        acc
    }

    pub fn encode<R: Rng + ?Sized>(&self, x: Vec<ExtElement>, rng: &mut R) -> Result<AmdCodeword, AmdError> {
        let r = self.ext.random(rng);
        self.encode_with(x, r)
    }

    /// Encoding with explicit randomness `r`.
    pub fn encode_with(&self, x: Vec<ExtElement>, r: ExtElement) -> Result<AmdCodeword, AmdError> {
        let t = self.tag(&x, &r)?;
        Ok(AmdCodeword { x, r, t })
    }

    /// Returns the message iff the tag is consistent.
    pub fn verify<'a>(&self, c: &'a AmdCodeword) -> Option<&'a [ExtElement]> {
        if c.x.len() != self.blocks {
            return None;
        }
        (self.tag_unchecked(&c.x, &c.r) == c.t).then_some(c.x.as_slice())
    }

    /// Splits a base-field symbol string `x_1 .. x_l || r || t` into a codeword.
    pub fn from_symbols(&self, symbols: &[u64]) -> Result<AmdCodeword, AmdError> {
        let m = self.ext.degree();
        if symbols.len() != self.symbol_len() {
            return Err(FieldError::LengthMismatch { expected: self.symbol_len(), got: symbols.len() }.into());
        }
        let mut chunks = symbols.chunks(m).map(|c| self.ext.phi(c));
        let x = (&mut chunks).take(self.blocks).collect::<Result<Vec<_>, _>>()?;
        let r = chunks.next().expect("length checked")?;
        let t = chunks.next().expect("length checked")?;
        Ok(AmdCodeword { x, r, t })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AmdCodeword {
    pub x: Vec<ExtElement>,
    pub r: ExtElement,
    pub t: ExtElement,
}

impl AmdCodeword {
    /// Base-field serialisation: message chunks ascending, then `r`, then `t`.
    pub fn to_symbols(&self) -> Vec<u64> {
        self.x
            .iter()
            .chain([&self.r, &self.t])
            .flat_map(|e| e.coeffs().iter().copied())
            .collect()
    }
}
