//! Prime field arithmetic with a runtime modulus.
//!
//! Elements are plain `u64` values kept in canonical form `[0, q)`. Moduli
//! above 32 bits widen products to `u128` before reduction, so any prime
//! below 2^63 is supported.

use serde::{Deserialize, Serialize};

use super::FieldError;

/// The prime field `F_q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PrimeField {
    q: u64,
}

impl TryFrom<u64> for PrimeField {
    type Error = FieldError;

    fn try_from(q: u64) -> Result<Self, Self::Error> {
        PrimeField::new(q)
    }
}

impl From<PrimeField> for u64 {
    fn from(f: PrimeField) -> u64 {
        f.q
    }
}

impl PrimeField {
    pub fn new(q: u64) -> Result<Self, FieldError> {
        if q >= 1 << 63 {
            return Err(FieldError::ModulusTooLarge(q));
        }
        if !is_prime(q) {
            return Err(FieldError::NotPrime(q));
        }
        Ok(PrimeField { q })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// Reduces an arbitrary integer into the field.
    #[inline]
    pub fn elem(&self, v: u64) -> u64 {
        v % self.q
    }

    /// Maps a signed integer into the field.
    #[inline]
    pub fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.q as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if self.q <= u32::MAX as u64 {
            (a * b) % self.q
        } else {
            ((a as u128 * b as u128) % self.q as u128) as u64
        }
    }

    /// `a + b * c`
    #[inline]
    pub fn mul_add(&self, a: u64, b: u64, c: u64) -> u64 {
        if self.q <= u32::MAX as u64 {
            self.add(a, (b * c) % self.q)
        } else {
            ((a as u128 + b as u128 * c as u128) % self.q as u128) as u64
        }
    }

    pub fn pow(&self, base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.q;
        let mut b = base % self.q;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat's little theorem.
    pub fn inv(&self, a: u64) -> Result<u64, FieldError> {
        let a = a % self.q;
        if a == 0 {
            return Err(FieldError::ZeroInverse);
        }
        Ok(self.pow(a, self.q - 2))
    }

    pub fn div(&self, a: u64, b: u64) -> Result<u64, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: u64) -> Option<u64> {
        let a = a % self.q;
        if a == 0 {
            return None;
        }
        let n = self.q - 1;
        let mut ord = n;
        for p in prime_factors(n) {
            while ord.is_multiple_of(p) && self.pow(a, ord / p) == 1 {
                ord /= p;
            }
        }
        Some(ord)
    }

    /// Smallest primitive root of `F_q^*`.
    pub fn generator(&self) -> u64 {
        if self.q == 2 {
            return 1;
        }
        let n = self.q - 1;
        let factors = prime_factors(n);
        (2..self.q)
            .find(|&g| factors.iter().all(|&p| self.pow(g, n / p) != 1))
            .expect("every prime field has a primitive root")
    }

    /// Draws a uniform element.
    pub fn random<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.random_range(0..self.q)
    }

    /// Draws a uniform nonzero element.
    pub fn random_nonzero<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.random_range(1..self.q)
    }

    /// Evaluates a polynomial given by ascending coefficients (Horner).
    pub fn eval_poly(&self, coeffs: &[u64], x: u64) -> u64 {
        coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| self.mul_add(c, acc, x))
    }
}

/// Deterministic trial-division primality test; adequate for desk-scale moduli.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Distinct prime factors in ascending order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_inverse(q: u64, a: u64) -> Option<u64> {
        (1..q).find(|x| (a * x) % q == 1)
    }

    fn brute_order(q: u64, a: u64) -> u64 {
        let mut x = a % q;
        let mut k = 1;
        while x != 1 {
            x = (x * a) % q;
            k += 1;
        }
        k
    }

    #[test]
    fn inverse_examples() {
        let f = PrimeField::new(7).unwrap();
        assert_eq!(brute_inverse(7, 3), Some(5));
        assert_eq!(f.inv(3).unwrap(), 5);
        assert_eq!(f.inv(1).unwrap(), 1);
        assert_eq!(f.inv(0), Err(FieldError::ZeroInverse));
    }

    #[test]
    fn inverse_exhaustive_small_primes() {
        for q in [2u64, 3, 5, 7, 11, 13, 17] {
            let f = PrimeField::new(q).unwrap();
            for a in 1..q {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1, "q={q} a={a}");
                assert_eq!(Some(f.inv(a).unwrap()), brute_inverse(q, a));
            }
        }
    }

    #[test]
    fn inverse_randomized_large_prime() {
        use rand::SeedableRng;
        let f = PrimeField::new(2_147_483_647).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let a = f.random_nonzero(&mut rng);
            assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
    }

    #[test]
    fn generator_examples() {
        // brute-force orders over F_7: ord(2)=3, ord(3)=6
        assert_eq!(brute_order(7, 2), 3);
        assert_eq!(brute_order(7, 3), 6);
        assert_eq!(PrimeField::new(7).unwrap().generator(), 3);
        assert_eq!(brute_order(5, 2), 4);
        assert_eq!(PrimeField::new(5).unwrap().generator(), 2);
        assert_eq!(PrimeField::new(2).unwrap().generator(), 1);
    }

    #[test]
    fn generator_has_full_order() {
        for q in [3u64, 11, 13, 37, 241, 257, 65537] {
            let f = PrimeField::new(q).unwrap();
            let g = f.generator();
            assert_eq!(f.order(g), Some(q - 1));
            if q < 1000 {
                assert_eq!(brute_order(q, g), q - 1);
                // smallest: every smaller candidate has a shorter order
                for h in 2..g {
                    assert!(brute_order(q, h) < q - 1);
                }
            }
        }
    }

    #[test]
    fn rejects_composites() {
        assert_eq!(PrimeField::new(1), Err(FieldError::NotPrime(1)));
        assert_eq!(PrimeField::new(9), Err(FieldError::NotPrime(9)));
        assert!(PrimeField::new(241).is_ok());
    }

    #[test]
    fn horner_matches_naive() {
        let f = PrimeField::new(13).unwrap();
        let coeffs = [3, 0, 5, 12];
        for x in 0..13 {
            let naive = coeffs
                .iter()
                .enumerate()
                .fold(0, |acc, (i, &c)| f.add(acc, f.mul(c, f.pow(x, i as u64))));
            assert_eq!(f.eval_poly(&coeffs, x), naive);
        }
    }
}
