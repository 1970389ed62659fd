//! Dense univariate polynomials over a prime field.
//!
//! Coefficients are stored in ascending order; the zero polynomial is the
//! empty vector after [`trim`].

use super::PrimeField;

pub fn trim(p: &mut Vec<u64>) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

pub fn degree(p: &[u64]) -> Option<usize> {
    p.iter().rposition(|&c| c != 0)
}

pub fn add(f: &PrimeField, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out: Vec<u64> = (0..a.len().max(b.len()))
        .map(|i| f.add(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0)))
        .collect();
    trim(&mut out);
    out
}

pub fn sub(f: &PrimeField, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out: Vec<u64> = (0..a.len().max(b.len()))
        .map(|i| f.sub(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0)))
        .collect();
    trim(&mut out);
    out
}

pub fn mul(f: &PrimeField, a: &[u64], b: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.mul_add(out[i + j], x, y);
        }
    }
    trim(&mut out);
    out
}

/// Remainder of `a` modulo a nonzero `m`.
pub fn rem(f: &PrimeField, a: &[u64], m: &[u64]) -> Vec<u64> {
    let dm = degree(m).expect("division by the zero polynomial");
    let lead_inv = f.inv(m[dm]).expect("nonzero leading coefficient");
    let mut r = a.to_vec();
    trim(&mut r);
    while let Some(dr) = degree(&r) {
        if dr < dm {
            break;
        }
        let c = f.mul(r[dr], lead_inv);
        let shift = dr - dm;
        for (i, &mi) in m[..=dm].iter().enumerate() {
            r[shift + i] = f.sub(r[shift + i], f.mul(c, mi));
        }
        trim(&mut r);
    }
    r
}

pub fn mulmod(f: &PrimeField, a: &[u64], b: &[u64], m: &[u64]) -> Vec<u64> {
    rem(f, &mul(f, a, b), m)
}

/// `base^exp mod m` with a big-endian limb exponent so `q^k` never overflows.
pub fn powmod(f: &PrimeField, base: &[u64], exp: u128, m: &[u64]) -> Vec<u64> {
    let mut acc = rem(f, &[1], m);
    let mut b = rem(f, base, m);
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(f, &acc, &b, m);
        }
        b = mulmod(f, &b, &b, m);
        e >>= 1;
    }
    acc
}

/// `X^(q^k) mod m`, computed by repeated q-th powering.
pub fn frobenius_x(f: &PrimeField, k: usize, m: &[u64]) -> Vec<u64> {
    let mut x = rem(f, &[0, 1], m);
    for _ in 0..k {
        x = powmod(f, &x, f.modulus() as u128, m);
    }
    x
}

pub fn gcd(f: &PrimeField, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = rem(f, &a, &b);
        a = b;
        b = r;
    }
    // normalise to monic
    if let Some(d) = degree(&a) {
        let inv = f.inv(a[d]).expect("nonzero");
        for c in a.iter_mut() {
            *c = f.mul(*c, inv);
        }
    }
    a
}

/// Rabin's irreducibility test for a monic polynomial of degree `m >= 1`.
pub fn is_irreducible(f: &PrimeField, p: &[u64]) -> bool {
    let Some(m) = degree(p) else {
        return false;
    };
    if m == 0 {
        return false;
    }
    if m == 1 {
        return true;
    }
    let x = vec![0, 1];
    if sub(f, &frobenius_x(f, m, p), &x) != Vec::<u64>::new() {
        return false;
    }
    super::prime_factors(m as u64).into_iter().all(|r| {
        let h = sub(f, &frobenius_x(f, m / r as usize, p), &x);
        degree(&gcd(f, &h, p)) == Some(0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exhaustive oracle: no monic factor of degree 1..=m/2 divides p.
    fn brute_irreducible(f: &PrimeField, p: &[u64]) -> bool {
        let m = degree(p).unwrap();
        let q = f.modulus();
        for d in 1..=m / 2 {
            for idx in 0..q.pow(d as u32) {
                let mut g: Vec<u64> = (0..d).map(|i| (idx / q.pow(i as u32)) % q).collect();
                g.push(1);
                if rem(f, p, &g).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn rabin_agrees_with_factor_search() {
        for (q, m) in [(2u64, 2usize), (2, 3), (2, 4), (3, 2), (3, 3), (5, 2), (5, 3), (7, 2)] {
            let f = PrimeField::new(q).unwrap();
            for idx in 0..q.pow(m as u32) {
                let mut p: Vec<u64> = (0..m).map(|i| (idx / q.pow(i as u32)) % q).collect();
                p.push(1);
                assert_eq!(is_irreducible(&f, &p), brute_irreducible(&f, &p), "q={q} p={p:?}");
            }
        }
    }

    #[test]
    fn rem_and_gcd() {
        let f = PrimeField::new(7).unwrap();
        // (X+1)(X+2) = X^2 + 3X + 2
        let a = mul(&f, &[1, 1], &[2, 1]);
        assert_eq!(a, vec![2, 3, 1]);
        assert!(rem(&f, &a, &[1, 1]).is_empty());
        assert_eq!(gcd(&f, &a, &mul(&f, &[1, 1], &[3, 1])), vec![1, 1]);
    }
}
