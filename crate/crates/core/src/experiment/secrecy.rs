use std::collections::HashMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{Assertion, ExperimentConfig, ExperimentError, ModeResult, Outcome, TrialOutcome};
use crate::field::PrimeField;
use crate::frs::FrsParams;
use crate::wire::format_rational;
use crate::Rational;

/// Exhaustive view-distribution comparison at the FRS layer: the first
/// `|s|` coefficients carry a fixed SES point and the remaining
/// `u * reads` are uniform coins.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SecrecyConfig {
    pub q: u64,
    pub u: usize,
    #[serde(rename = "N", alias = "n")]
    pub n: usize,
    /// Read budget `rho_r N`; fixes the number of random coefficients.
    pub reads: usize,
    /// Positions observed by the adversary; defaults to `0..reads`.
    #[serde(default)]
    pub read_set: Option<Vec<usize>>,
    pub s1: Vec<u64>,
    pub s2: Vec<u64>,
    #[serde(default = "default_cap")]
    pub cap: u64,
}

fn default_cap() -> u64 {
    1_000_000
}

impl Default for SecrecyConfig {
    fn default() -> Self {
        SecrecyConfig {
            q: 13,
            u: 3,
            n: 4,
            reads: 1,
            read_set: None,
            s1: vec![1, 2, 3, 4],
            s2: vec![4, 3, 2, 1],
            cap: default_cap(),
        }
    }
}

/// Multiset of views over every coin value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViewDistribution {
    pub counts: HashMap<Vec<u64>, u64>,
    pub total: u64,
}

impl ViewDistribution {
    /// Every observed view occurs equally often.
    pub fn is_uniform(&self) -> bool {
        let mut it = self.counts.values();
        let first = it.next().copied();
        it.all(|&c| Some(c) == first)
    }

    /// Exact statistical distance `1/2 sum |p(x) - p'(x)|`.
    pub fn distance(&self, other: &ViewDistribution) -> Rational {
        let mut sum = Rational::zero();
        let p = |d: &ViewDistribution, k: &Vec<u64>| {
            Rational::new((*d.counts.get(k).unwrap_or(&0)).into(), d.total.into())
        };
        for k in self.counts.keys().chain(other.counts.keys().filter(|k| !self.counts.contains_key(*k))) {
            sum += (p(self, k) - p(other, k)).abs();
        }
        sum / Rational::from_integer(2.into())
    }
}

/// Enumerates all `q^(u * reads)` coin vectors for fixed `s`.
pub fn exact_view_distribution(
    frs: &FrsParams,
    s: &[u64],
    read_set: &[usize],
    coins: usize,
    cap: u64,
) -> Result<ViewDistribution, ExperimentError> {
    let f = frs.field();
    let q = f.modulus();
    let total = q
        .checked_pow(coins as u32)
        .filter(|&t| t <= cap)
        .ok_or_else(|| ExperimentError::Scale(format!("q^{coins} coin values exceed the cap {cap}")))?;
    let u = frs.u();
    let points: Vec<u64> = read_set.iter().flat_map(|&j| frs.points()[j * u..(j + 1) * u].iter().copied()).collect();
    // contribution of s is fixed; coins add a linear term
    let base: Vec<u64> = points.iter().map(|&x| f.eval_poly(s, x)).collect();
    let shift: Vec<u64> = points.iter().map(|&x| f.pow(x, s.len() as u64)).collect();
    let mut counts = HashMap::new();
    let mut a = vec![0u64; coins];
    for mut idx in 0..total {
        for c in a.iter_mut() {
            *c = idx % q;
            idx /= q;
        }
        let view: Vec<u64> = points
            .iter()
            .zip(&base)
            .zip(&shift)
            .map(|((&x, &b), &sh)| f.mul_add(b, sh, f.eval_poly(&a, x)))
            .collect();
        *counts.entry(view).or_insert(0) += 1;
    }
    Ok(ViewDistribution { counts, total })
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<ModeResult, ExperimentError> {
    let sc = cfg.secrecy.clone().unwrap_or_default();
    let config = |e: String| ExperimentError::Config(e);
    if sc.s1.len() != sc.s2.len() {
        return Err(config("s1 and s2 must have equal length".into()));
    }
    let coins = sc.u * sc.reads;
    let k = sc.s1.len() + coins;
    let field = PrimeField::new(sc.q).map_err(|e| config(e.to_string()))?;
    let frs = FrsParams::new(field, sc.u, sc.n, k, 1).map_err(|e| config(e.to_string()))?;
    let read_set = sc.read_set.clone().unwrap_or_else(|| (0..sc.reads.min(sc.n)).collect());
    if read_set.len() > sc.reads {
        return Err(config(format!("read set of size {} exceeds budget {}", read_set.len(), sc.reads)));
    }
    if let Some(&bad) = read_set.iter().find(|&&j| j >= sc.n) {
        return Err(config(format!("read position {bad} out of range")));
    }
    let s1: Vec<u64> = sc.s1.iter().map(|&x| field.elem(x)).collect();
    let s2: Vec<u64> = sc.s2.iter().map(|&x| field.elem(x)).collect();
    let d1 = exact_view_distribution(&frs, &s1, &read_set, coins, sc.cap)?;
    let d2 = exact_view_distribution(&frs, &s2, &read_set, coins, sc.cap)?;
    let sd = d1.distance(&d2);
    let view_space = (sc.q as u128).pow((sc.u * read_set.len()) as u32);
    let full_read = read_set.len() == sc.reads;
    let bijection = |d: &ViewDistribution| d.counts.len() as u128 == view_space && d.is_uniform() && (!full_read || d.counts.len() as u64 == d.total);

    let params = json!({
        "secrecy": sc,
        "k": k,
        "coins": coins,
        "read_set": read_set,
        "coin_values": d1.total,
    });
    let outcome = if sd.is_zero() { Outcome::Ok } else { Outcome::Mismatch };
    let mut res = ModeResult::new(params, vec![TrialOutcome { trial: 0, outcome, detail: None }]);
    res.aggregates.exact_sd = Some(format_rational(&sd));
    res.aggregates.extra.insert("distinct_views".into(), json!([d1.counts.len(), d2.counts.len()]));
    res.assertions.push(Assertion::new("exact_sd_zero", sd.is_zero(), format!("SD = {}", format_rational(&sd))));
    res.assertions.push(Assertion::new(
        "coins_to_view_regular",
        bijection(&d1) && bijection(&d2),
        format!(
            "{} and {} distinct views of {view_space} possible from {} coin values",
            d1.counts.len(),
            d2.counts.len(),
            d1.total
        ),
    ));
    Ok(res)
}
