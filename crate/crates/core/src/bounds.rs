//! Closed-form rate, capacity and failure bounds.
//!
//! Each formula is generic over [`BoundScalar`] so the same expression is
//! evaluated exactly (with [`Rational`]) for assertions and approximately
//! (with `f64`) for display.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::scalar::BoundScalar;
use crate::Rational;

fn int<T: BoundScalar>(n: i64) -> T {
    T::from_int(n)
}

/// Agreement `N (1/(v+1) + v/(v+1) * (k/N)/(u-v+1))` above which the FRS
/// list decoder is guaranteed to capture the transmitted polynomial.
pub fn agreement_threshold<T: BoundScalar>(n: i64, u: i64, v: i64, k: i64) -> T {
    let v1 = int::<T>(v + 1);
    let folded_rate = T::from_ratio(k, n);
    int::<T>(n)
        * (T::one() / v1.clone() + int::<T>(v) / v1 * folded_rate / int::<T>(u - v + 1))
}

/// Largest admissible write fraction for reliability at `(u, v, R, rho_r)`:
/// `v/(v+1) - v/(v+1) * ((v/(v-1)) (uR + 3) + u rho_r) / (u - v + 1)`.
/// Negative values mean no write budget is tolerable.
pub fn rate_condition<T: BoundScalar>(u: i64, v: i64, rate: &T, rho_r: &T) -> T {
    let uu = int::<T>(u);
    let vv = int::<T>(v);
    let head = vv.clone() / int::<T>(v + 1);
    let slack = vv / int::<T>(v - 1) * (uu.clone() * rate.clone() + int::<T>(3)) + uu * rho_r.clone();
    head.clone() - head * slack / int::<T>(u - v + 1)
}

/// Upper bound on the achievable rate of a perfectly secure code: `1 - rho_r - rho_w`.
pub fn perfect_capacity<T: BoundScalar>(rho_r: &T, rho_w: &T) -> T {
    T::one() - rho_r.clone() - rho_w.clone()
}

/// Capacity bound for leakage `eps`: an exact part `1 - rho_r - rho_w` and
/// the additive term `2 eps rho_r N log_|Sigma| (1 + 1/eps)`, which involves
/// a logarithm and is therefore kept in floating point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityBound<T> {
    pub exact: T,
    pub leakage_term: f64,
}

impl<T: BoundScalar> CapacityBound<T> {
    pub fn value_f64(&self) -> f64 {
        self.exact.to_f64() + self.leakage_term
    }

    /// `true` when the bound leaves no positive rate.
    pub fn is_infeasible(&self) -> bool {
        self.value_f64() <= 0.0
    }
}

pub fn capacity_bound<T: BoundScalar>(
    rho_r: &T,
    rho_w: &T,
    eps: f64,
    n: u64,
    alphabet_bits: f64,
) -> CapacityBound<T> {
    let exact = perfect_capacity(rho_r, rho_w);
    let leakage_term = if eps > 0.0 {
        2.0 * eps * rho_r.to_f64() * n as f64 * (1.0 + 1.0 / eps).log2() / alphabet_bits
    } else {
        0.0
    };
    CapacityBound { exact, leakage_term }
}

/// Decoding-failure bound `(l + 1) d_1^v / q^N` for one instance.
pub fn failure_bound(blocks: u64, d1: u64, v: u32, q: u64, n: u32) -> Rational {
    let num = BigInt::from(blocks + 1) * BigInt::from(d1).pow(v);
    let den = BigInt::from(q).pow(n);
    Rational::new(num, den)
}

/// Code rate `log_|Sigma| |M| / N = uRN / (uN)`.
pub fn code_rate(u: i64, n: i64, message_len: i64) -> Rational {
    Rational::new(message_len.into(), (u * n).into())
}

/// Numeric check of the parameter schedule `v = 1/xi1`, `u = 1/xi1^2`,
/// `R = 1 - rho_r - rho_w - 12 xi1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleCheck {
    pub xi1: String,
    pub u: i64,
    pub v: i64,
    pub rate: String,
    /// The reliability bound evaluated at the integer `(u, v)`.
    pub max_rho_w: String,
    /// The same bound written directly in terms of `xi1`.
    pub max_rho_w_xi_form: String,
    /// Both forms agree exactly.
    pub forms_agree: bool,
    /// `1 - R - rho_r - 12 xi1 <= max_rho_w`.
    pub display_inequality: bool,
    /// `rho_w < max_rho_w`, i.e. the schedule yields a reliable code.
    pub reliable: bool,
}

pub fn schedule_check(xi1: &Rational, rho_r: &Rational, rho_w: &Rational) -> Option<ScheduleCheck> {
    let inv = xi1.recip();
    if !inv.is_integer() || xi1 <= &Rational::zero() {
        return None;
    }
    let v: i64 = inv.to_integer().try_into().ok()?;
    let u = v.checked_mul(v)?;
    if v < 2 {
        return None;
    }
    let twelve = Rational::from_integer(12.into());
    let one = Rational::one();
    let rate = &one - rho_r - rho_w - &twelve * xi1;
    let max_rho_w = rate_condition(u, v, &rate, rho_r);
    let three = Rational::from_integer(3.into());
    let x1 = &one + xi1;
    let xi_form = (&one / &x1)
        - (&one / &x1) * ((&one / (&one - xi1)) * (&rate + &three * xi1 * xi1) + rho_r)
            / (&one - xi1 + xi1 * xi1);
    let lhs = &one - &rate - rho_r - &twelve * xi1;
    Some(ScheduleCheck {
        xi1: xi1.to_string(),
        u,
        v,
        rate: rate.to_string(),
        forms_agree: xi_form == max_rho_w,
        display_inequality: lhs <= max_rho_w,
        reliable: rho_w < &max_rho_w,
        max_rho_w: max_rho_w.to_string(),
        max_rho_w_xi_form: xi_form.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn threshold_desk_config() {
        // 8 (1/4 + 3/4 * (66/8) / 28) = 211/56
        assert_eq!(agreement_threshold::<Rational>(8, 30, 3, 66), r(211, 56));
        assert!((agreement_threshold::<f64>(8, 30, 3, 66) - 3.767857).abs() < 1e-6);
        assert_eq!(agreement_threshold::<Rational>(8, 30, 3, 0), r(2, 1));
        // v = u, k = uN: threshold exceeds N
        assert!(agreement_threshold::<Rational>(4, 3, 3, 12) > r(4, 1));
    }

    #[test]
    fn rate_condition_values() {
        assert_eq!(rate_condition(100, 10, &r(1, 2), &r(1, 10)), r(1990, 9009));
        assert_eq!(rate_condition(16, 4, &r(1, 4), &r(1, 4)), r(-4, 195));
        assert!((rate_condition(100, 10, &0.5f64, &0.1) - 0.22089).abs() < 1e-5);
    }

    #[test]
    fn rate_condition_limit() {
        let big = rate_condition(1_000_000, 3, &r(0, 1), &r(0, 1));
        assert!(big < r(3, 4));
        assert!(r(3, 4) - big < r(1, 100_000));
    }

    #[test]
    fn capacity_examples() {
        let c = capacity_bound(&r(1, 4), &r(1, 4), 0.0, 8, 240.0);
        assert_eq!(c.exact, r(1, 2));
        assert_eq!(c.leakage_term, 0.0);
        assert_eq!(perfect_capacity(&r(0, 1), &r(0, 1)), r(1, 1));
        let e = capacity_bound(&r(1, 4), &r(1, 4), 0.01, 8, 240.0);
        let expected = 2.0 * 0.01 * 0.25 * 8.0 * (101.0f64).log2() / 240.0;
        assert!((e.leakage_term - expected).abs() < 1e-15);
        assert!(capacity_bound(&r(1, 2), &r(1, 2), 0.0, 8, 1.0).is_infeasible());
    }

    #[test]
    fn failure_bound_desk() {
        let b = failure_bound(1, 13, 3, 241, 8);
        assert_eq!(b, Rational::new(4394.into(), BigInt::from(241u64).pow(8)));
        assert!(b < r(1, 1_000_000_000_000_000));
    }

    #[test]
    fn schedule_examples() {
        let c = schedule_check(&r(1, 100), &r(1, 5), &r(1, 5)).unwrap();
        assert_eq!((c.u, c.v), (10_000, 100));
        assert_eq!(c.max_rho_w, "10063300/33000033");
        assert!(c.forms_agree && c.display_inequality && c.reliable);
        assert!(schedule_check(&r(2, 7), &r(1, 5), &r(1, 5)).is_none());
    }

    #[test]
    fn code_rate_is_exact() {
        assert_eq!(code_rate(30, 8, 8), r(1, 30));
    }
}
