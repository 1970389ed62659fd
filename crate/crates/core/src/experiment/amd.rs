use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{Assertion, ExperimentConfig, ExperimentError, ModeResult, Outcome, TrialOutcome};
use crate::amd::AmdParams;
use crate::field::{ExtField, PrimeField};
use crate::wire::format_rational;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmdConfig {
    pub q: u64,
    pub m: usize,
    pub blocks: usize,
}

impl Default for AmdConfig {
    fn default() -> Self {
        AmdConfig { q: 5, m: 2, blocks: 1 }
    }
}

/// Largest field this exhaustive search accepts.
const MAX_ORDER: u128 = 32;

/// Field arithmetic on element indices via full tables.
struct Tables {
    order: usize,
    add: Vec<usize>,
    mul: Vec<usize>,
    neg: Vec<usize>,
}

impl Tables {
    fn new(ext: &ExtField, order: usize) -> Self {
        let els: Vec<_> = (0..order).map(|i| ext.from_index(i as u128)).collect();
        let idx = |e| ext.index_of(&e) as usize;
        let mut add = vec![0; order * order];
        let mut mul = vec![0; order * order];
        for a in 0..order {
            for b in 0..order {
                add[a * order + b] = idx(ext.add(&els[a], &els[b]));
                mul[a * order + b] = idx(ext.mul(&els[a], &els[b]));
            }
        }
        let neg = (0..order).map(|a| idx(ext.neg(&els[a]))).collect();
        Tables { order, add, mul, neg }
    }

    fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.order + b]
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b]
    }

    fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg[b])
    }

    fn tag(&self, x: &[usize], r: usize) -> usize {
        let mut acc = self.mul(r, r);
        for &xi in x.iter().rev() {
            acc = self.mul(r, self.add(xi, acc));
        }
        acc
    }
}

fn digits(mut idx: usize, base: usize, len: usize) -> Vec<usize> {
    (0..len)
        .map(|_| {
            let d = idx % base;
            idx /= base;
            d
        })
        .collect()
}

/// For every message `x` and offset `(dx, dr, dt) != 0`, counts the keys `r`
/// with `tag(x + dx, r + dr) = tag(x, r) + dt` and returns the maximum.
///
/// For fixed `(x, dx, dr)` a histogram of `tag(x + dx, r + dr) - tag(x, r)`
/// over `r` gives the pass count of every `dt` at once.
pub fn max_tamper_passes(p: &AmdParams) -> Result<(usize, u128), ExperimentError> {
    let order = p
        .ext()
        .order()
        .filter(|&o| o <= MAX_ORDER)
        .ok_or_else(|| ExperimentError::Scale(format!("q^m must be at most {MAX_ORDER}")))? as usize;
    let t = Tables::new(p.ext(), order);
    let l = p.blocks();
    let messages = order.pow(l as u32);
    let checks = (messages as u128).pow(2) * (order as u128).pow(3);
    let best = (0..messages)
        .into_par_iter()
        .map(|xi| {
            let x = digits(xi, order, l);
            let base: Vec<usize> = (0..order).map(|r| t.tag(&x, r)).collect();
            let mut best = 0;
            let mut hist = vec![0usize; order];
            for dxi in 0..messages {
                let dx = digits(dxi, order, l);
                let xx: Vec<usize> = x.iter().zip(&dx).map(|(&a, &b)| t.add(a, b)).collect();
                for dr in 0..order {
                    hist.iter_mut().for_each(|h| *h = 0);
                    for (r, &b) in base.iter().enumerate() {
                        hist[t.sub(t.tag(&xx, t.add(r, dr)), b)] += 1;
                    }
                    // dt = 0 is excluded only when dx = 0 and dr = 0
                    let skip_zero = dxi == 0 && dr == 0;
                    let m = hist.iter().enumerate().filter(|&(dt, _)| !(skip_zero && dt == 0)).map(|(_, &c)| c).max();
                    best = best.max(m.unwrap_or(0));
                }
            }
            best
        })
        .max()
        .unwrap_or(0);
    Ok((best, checks))
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<ModeResult, ExperimentError> {
    let ac = cfg.amd.clone().unwrap_or_default();
    let config = |e: String| ExperimentError::Config(e);
    let base = PrimeField::new(ac.q).map_err(|e| config(e.to_string()))?;
    let ext = ExtField::new(base, ac.m).map_err(|e| config(e.to_string()))?;
    let p = AmdParams::new(ext, ac.blocks).map_err(|e| config(e.to_string()))?;
    let (best, checks) = max_tamper_passes(&p)?;
    let (num, den) = p.security_bound();
    let den = den.expect("bounded by the scale check");
    let observed = Rational::new((best as u64).into(), (den as u64).into());
    let bound = Rational::new((num as u64).into(), (den as u64).into());
    let ok = observed <= bound;
    let params = json!({
        "amd": ac,
        "modulus": p.ext().modulus(),
        "bound": format_rational(&bound),
        "equivalent_checks": checks.to_string(),
    });
    let outcome = if ok { Outcome::Ok } else { Outcome::Mismatch };
    let mut res = ModeResult::new(params, vec![TrialOutcome { trial: 0, outcome, detail: None }]);
    res.aggregates.max_tamper_pass = Some(format!("{best}/{den}"));
    res.assertions.push(Assertion::new(
        "tamper_bound",
        ok,
        format!("max pass {best}/{den} against bound {num}/{den}"),
    ));
    Ok(res)
}
