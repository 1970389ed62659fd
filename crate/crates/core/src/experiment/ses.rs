use std::collections::BTreeSet;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{trial_rng, Assertion, ExperimentConfig, ExperimentError, ModeResult, Outcome, TrialOutcome};
use crate::field::{AffineSpace, Matrix, PrimeField};
use crate::ses::SesParams;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SesConfig {
    pub q: u64,
    pub v: usize,
    pub blocks: usize,
    /// Largest subspace dimension sampled.
    pub max_dim: usize,
    #[serde(default = "default_cap")]
    pub cap: u64,
}

fn default_cap() -> u64 {
    1_000_000
}

impl Default for SesConfig {
    fn default() -> Self {
        SesConfig { q: 11, v: 2, blocks: 1, max_dim: 2, cap: default_cap() }
    }
}

/// Random affine subspace of dimension at most `dim`. Every other trial is
/// anchored at a point of the set so that intersections are non-empty.
pub fn random_subspace<R: Rng + ?Sized>(ses: &SesParams, dim: usize, anchored: bool, rng: &mut R) -> AffineSpace {
    let f = ses.field();
    let n = ses.output_len();
    let offset: Vec<u64> = if anchored {
        let input: Vec<u64> = (0..ses.input_len()).map(|_| f.random(rng)).collect();
        ses.encode(&input).expect("input length")
    } else {
        (0..n).map(|_| f.random(rng)).collect()
    };
    let cols: Vec<Vec<u64>> = (0..dim).map(|_| (0..n).map(|_| f.random(rng)).collect()).collect();
    AffineSpace::new(f, &Matrix::from_columns(n, &cols), offset).expect("shapes agree")
}

/// Round trip over every input: encode lands in the set, inverts, and is injective.
pub fn check_bijection(ses: &SesParams, cap: u64) -> Result<bool, ExperimentError> {
    let q = ses.field().modulus();
    let n1 = ses.input_len();
    let total = q
        .checked_pow(n1 as u32)
        .filter(|&t| t <= cap)
        .ok_or_else(|| ExperimentError::Scale(format!("q^{n1} inputs exceed the cap {cap}")))?;
    let mut seen = BTreeSet::new();
    let mut input = vec![0u64; n1];
    for mut idx in 0..total {
        for c in input.iter_mut() {
            *c = idx % q;
            idx /= q;
        }
        let s = ses.encode(&input).expect("input length");
        if !ses.contains(&s) || ses.inverse(&s).expect("output length") != input || !seen.insert(s) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub(super) fn run(cfg: &ExperimentConfig, seed: u64, trials: u64) -> Result<ModeResult, ExperimentError> {
    let sc = cfg.ses.clone().unwrap_or_default();
    let config = |e: String| ExperimentError::Config(e);
    let field = PrimeField::new(sc.q).map_err(|e| config(e.to_string()))?;
    let w = sc.v * sc.v;
    let ses = SesParams::setup(field, sc.v, sc.blocks * w.saturating_sub(sc.v)).map_err(|e| config(e.to_string()))?;
    if sc.max_dim > sc.v {
        return Err(config(format!("max_dim = {} exceeds v = {}", sc.max_dim, sc.v)));
    }
    let q = sc.q as u128;
    if q.checked_pow(ses.input_len() as u32).is_none_or(|t| t > sc.cap as u128) {
        return Err(ExperimentError::Scale(format!("set of size q^{} exceeds the cap {}", ses.input_len(), sc.cap)));
    }
    let bound = ses.list_bound();
    let outcomes: Vec<(TrialOutcome, u64)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let dim = rng.random_range(0..=sc.max_dim);
            let h = random_subspace(&ses, dim, i % 2 == 0, &mut rng);
            let fast = ses.intersect(&h).expect("dimension checked");
            let slow = ses.brute_force_intersect(&h, sc.cap as u128).expect("size checked");
            let size = fast.len() as u64;
            let (outcome, detail) = if fast != slow {
                (Outcome::Mismatch, Some(format!("intersect found {}, oracle {}", fast.len(), slow.len())))
            } else if size as u128 > bound {
                (Outcome::Mismatch, Some(format!("|S n H| = {size} exceeds {bound}")))
            } else {
                (Outcome::Ok, None)
            };
            (TrialOutcome { trial: i, outcome, detail }, size)
        })
        .collect();
    let max_size = outcomes.iter().map(|o| o.1).max().unwrap_or(0);
    let bijective = check_bijection(&ses, sc.cap)?;
    let params = json!({
        "ses": sc,
        "w": w,
        "degrees": ses.degrees(),
        "solved_coords": ses.solved_coords(),
        "list_bound": bound.to_string(),
    });
    let mut res = ModeResult::new(params, outcomes.into_iter().map(|o| o.0).collect());
    res.aggregates.max_intersection = Some(max_size);
    let mism = res.aggregates.mismatches;
    res.assertions.push(Assertion::new(
        "oracle_equivalence",
        mism == 0,
        format!("{mism} mismatches over {trials} subspaces"),
    ));
    res.assertions.push(Assertion::new(
        "intersection_bound",
        max_size as u128 <= bound,
        format!("max |S n H| = {max_size}, bound {bound}"),
    ));
    res.assertions.push(Assertion::new(
        "bijection",
        bijective,
        format!("round trip over all {} inputs", q.pow(ses.input_len() as u32)),
    ));
    Ok(res)
}
