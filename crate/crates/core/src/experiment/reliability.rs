use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{trial_rng, Assertion, ExperimentConfig, ExperimentError, ModeResult, Outcome, TrialOutcome};
use crate::field::PrimeField;
use crate::frs::FrsParams;
use crate::wire::format_rational;
use crate::Rational;

/// Raw FRS list-decoding check: random message, `errors` fully random
/// nonzero symbol corruptions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReliabilityConfig {
    pub q: u64,
    pub u: usize,
    pub v: usize,
    #[serde(rename = "N", alias = "n")]
    pub n: usize,
    pub k: usize,
    pub errors: usize,
}

impl Default for ReliabilityConfig {
    fn default() -> Self {
        ReliabilityConfig { q: 241, u: 30, v: 3, n: 8, k: 66, errors: 4 }
    }
}

pub(super) fn run(cfg: &ExperimentConfig, seed: u64, trials: u64) -> Result<ModeResult, ExperimentError> {
    let rc = cfg.reliability.clone().unwrap_or_default();
    let config = |e: String| ExperimentError::Config(e);
    let field = PrimeField::new(rc.q).map_err(|e| config(e.to_string()))?;
    let frs = FrsParams::new(field, rc.u, rc.n, rc.k, rc.v).map_err(|e| config(e.to_string()))?;
    if rc.errors > rc.n {
        return Err(config(format!("errors = {} exceeds N = {}", rc.errors, rc.n)));
    }
    let threshold = frs.agreement_threshold();
    let applies = Rational::from_integer(((rc.n - rc.errors) as i64).into()) > threshold;
    let max_dim = rc.v - 1;

    let outcomes: Vec<(TrialOutcome, usize)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let msg: Vec<u64> = (0..rc.k).map(|_| field.random(&mut rng)).collect();
            let mut y = frs.encode(&msg).expect("length k");
            for pos in sample(&mut rng, rc.n, rc.errors) {
                loop {
                    let d: Vec<u64> = (0..rc.u).map(|_| field.random(&mut rng)).collect();
                    if d.iter().any(|&x| x != 0) {
                        for (x, dx) in y.symbols[pos].iter_mut().zip(d) {
                            *x = field.add(*x, dx);
                        }
                        break;
                    }
                }
            }
            let (outcome, detail, dim) = match frs.list_decode(&y) {
                Ok(Some(space)) => {
                    let dim = space.dim();
                    if !space.contains(&field, &msg) {
                        (Outcome::Mismatch, Some("message not in output space".to_string()), dim)
                    } else if dim > max_dim {
                        (Outcome::Mismatch, Some(format!("output dimension {dim} > {max_dim}")), dim)
                    } else {
                        (Outcome::Ok, None, dim)
                    }
                }
                Ok(None) => (Outcome::Bottom, Some("empty output space".into()), 0),
                Err(e) => (Outcome::Bottom, Some(e.to_string()), 0),
            };
            (TrialOutcome { trial: i, outcome, detail }, dim)
        })
        .collect();

    let max_seen = outcomes.iter().map(|o| o.1).max().unwrap_or(0);
    let params = json!({
        "reliability": rc,
        "gamma": frs.gamma(),
        "degree_budget": frs.choose_degree_budget().map_err(|e| config(e.to_string()))?,
        "agreement_threshold": format_rational(&threshold),
        "guarantee_applies": applies,
    });
    let mut res = ModeResult::new(params, outcomes.into_iter().map(|o| o.0).collect());
    res.aggregates.extra.insert("max_dimension".into(), json!(max_seen));
    if applies {
        let ok = res.aggregates.ok;
        res.assertions.push(Assertion::new(
            "message_in_space",
            ok == trials,
            format!("{ok}/{trials} trials recovered the message in a space of dimension <= {max_dim}"),
        ));
    }
    Ok(res)
}
