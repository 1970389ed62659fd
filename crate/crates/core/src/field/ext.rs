//! Extension fields `F_{q^m} = F_q[X]/(p(X))` and the coefficient-vector
//! bijection between `F_q^m` and `F_{q^m}`.

use serde::{Deserialize, Serialize};

use super::{poly, FieldError, PrimeField};

/// `F_{q^m}` with a fixed monic irreducible modulus.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ExtField {
    base: PrimeField,
    /// Ascending coefficients of the modulus, length `m + 1`, last entry 1.
    modulus: Vec<u64>,
}

/// An element of an [`ExtField`]; `coeffs[i]` is the coefficient of `X^i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExtElement {
    coeffs: Vec<u64>,
}

impl ExtElement {
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<u64> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtOp {
    Add,
    Sub,
    Mul,
}

/// Lexicographically smallest monic irreducible polynomial of degree `m`
/// over `F_q`, ordering candidates by their coefficient vectors read from
/// the highest non-leading coefficient down.
pub fn find_irreducible(base: &PrimeField, m: usize) -> Vec<u64> {
    assert!(m >= 1, "extension degree must be positive");
    let q = base.modulus();
    let mut cand = vec![0u64; m + 1];
    cand[m] = 1;
    loop {
        if poly::is_irreducible(base, &cand) {
            return cand;
        }
        // odometer increment over the low m coefficients, X^0 fastest
        let mut i = 0;
        loop {
            cand[i] += 1;
            if cand[i] < q {
                break;
            }
            cand[i] = 0;
            i += 1;
            assert!(i < m, "an irreducible polynomial of every degree exists");
        }
    }
}

impl ExtField {
    /// Builds `F_{q^m}` with the deterministic modulus from [`find_irreducible`].
    pub fn new(base: PrimeField, m: usize) -> Result<Self, FieldError> {
        if m == 0 {
            return Err(FieldError::LengthMismatch { expected: 1, got: 0 });
        }
        let modulus = find_irreducible(&base, m);
        Ok(ExtField { base, modulus })
    }

    /// Uses a caller-supplied monic modulus after checking irreducibility.
    pub fn with_modulus(base: PrimeField, modulus: Vec<u64>) -> Result<Self, FieldError> {
        let m = poly::degree(&modulus).unwrap_or(0);
        if m == 0 || modulus.len() != m + 1 || modulus[m] != 1 {
            return Err(FieldError::Reducible);
        }
        if !poly::is_irreducible(&base, &modulus) {
            return Err(FieldError::Reducible);
        }
        Ok(ExtField { base, modulus })
    }

    pub fn base(&self) -> &PrimeField {
        &self.base
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Field size `q^m`, if it fits in a `u128`.
    pub fn order(&self) -> Option<u128> {
        (self.base.modulus() as u128).checked_pow(self.degree() as u32)
    }

    pub fn zero(&self) -> ExtElement {
        ExtElement { coeffs: vec![0; self.degree()] }
    }

    pub fn one(&self) -> ExtElement {
        let mut coeffs = vec![0; self.degree()];
        coeffs[0] = 1;
        ExtElement { coeffs }
    }

    /// The bijection `F_q^m -> F_{q^m}`: `vec[i]` becomes the `X^i` coefficient.
    pub fn phi(&self, vec: &[u64]) -> Result<ExtElement, FieldError> {
        if vec.len() != self.degree() {
            return Err(FieldError::LengthMismatch {
                expected: self.degree(),
                got: vec.len(),
            });
        }
        Ok(ExtElement {
            coeffs: vec.iter().map(|&c| self.base.elem(c)).collect(),
        })
    }

    pub fn phi_inv(&self, e: &ExtElement) -> Vec<u64> {
        e.coeffs.clone()
    }

    /// Element with index `idx` in the base-q enumeration (`X^0` digit fastest).
    pub fn from_index(&self, mut idx: u128) -> ExtElement {
        let q = self.base.modulus() as u128;
        let coeffs = (0..self.degree())
            .map(|_| {
                let c = (idx % q) as u64;
                idx /= q;
                c
            })
            .collect();
        ExtElement { coeffs }
    }

    pub fn index_of(&self, e: &ExtElement) -> u128 {
        let q = self.base.modulus() as u128;
        e.coeffs.iter().rev().fold(0u128, |acc, &c| acc * q + c as u128)
    }

    pub fn random<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> ExtElement {
        ExtElement {
            coeffs: (0..self.degree()).map(|_| self.base.random(rng)).collect(),
        }
    }

    pub fn add(&self, a: &ExtElement, b: &ExtElement) -> ExtElement {
        ExtElement {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(&x, &y)| self.base.add(x, y))
                .collect(),
        }
    }

    pub fn sub(&self, a: &ExtElement, b: &ExtElement) -> ExtElement {
        ExtElement {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(&x, &y)| self.base.sub(x, y))
                .collect(),
        }
    }

    pub fn neg(&self, a: &ExtElement) -> ExtElement {
        ExtElement {
            coeffs: a.coeffs.iter().map(|&x| self.base.neg(x)).collect(),
        }
    }

    pub fn mul(&self, a: &ExtElement, b: &ExtElement) -> ExtElement {
        let f = &self.base;
        let m = self.degree();
        let mut prod = vec![0u64; 2 * m - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                prod[i + j] = f.mul_add(prod[i + j], x, y);
            }
        }
        // X^m = -(p_0 + ... + p_{m-1} X^{m-1})
        for d in (m..prod.len()).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            for (i, &pi) in self.modulus[..m].iter().enumerate() {
                prod[d - m + i] = f.sub(prod[d - m + i], f.mul(c, pi));
            }
        }
        prod.truncate(m);
        ExtElement { coeffs: prod }
    }

    pub fn pow(&self, a: &ExtElement, mut exp: u64) -> ExtElement {
        let mut acc = self.one();
        let mut b = a.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            exp >>= 1;
        }
        acc
    }

    fn check(&self, e: &ExtElement) -> Result<(), FieldError> {
        if e.coeffs.len() != self.degree() {
            return Err(FieldError::LengthMismatch {
                expected: self.degree(),
                got: e.coeffs.len(),
            });
        }
        Ok(())
    }
}

/// Checked binary operation on elements that each carry their field.
pub fn ext_arith(
    (fa, a): (&ExtField, &ExtElement),
    (fb, b): (&ExtField, &ExtElement),
    op: ExtOp,
) -> Result<ExtElement, FieldError> {
    if fa != fb {
        return Err(FieldError::ContextMismatch);
    }
    fa.check(a)?;
    fa.check(b)?;
    Ok(match op {
        ExtOp::Add => fa.add(a, b),
        ExtOp::Sub => fa.sub(a, b),
        ExtOp::Mul => fa.mul(a, b),
    })
}
