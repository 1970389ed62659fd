use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use super::{trial_rng, Assertion, ExperimentConfig, ExperimentError, ModeResult, Outcome, TrialOutcome};
use crate::channel::{channel_run, ChannelBudget, StrategySpec};
use crate::codec::{AwtpCode, Decoded, EncodingCoins, ParamSpec};
use crate::wire::format_rational;
use crate::Rational;

struct Trial {
    outcome: TrialOutcome,
    /// The list-decoding guarantee applied and failed to hold.
    guarantee_broken: bool,
    guarantee_applies: bool,
}

/// Encode, attack and decode one random message.
fn trial(code: &AwtpCode, strategy: &StrategySpec, budget: ChannelBudget, seed: u64, i: u64) -> Trial {
    let p = code.params();
    let f = *code.field();
    let mut rng = trial_rng(seed, i);
    let m: Vec<u64> = (0..p.message_len).map(|_| f.random(&mut rng)).collect();
    let coins = EncodingCoins::random(p, &mut rng);
    let c = code.encode(&m, &coins).expect("validated lengths");
    let mut strat = strategy.build(i, ChaCha8Rng::seed_from_u64(rng.random()), p.n());
    let (y, transcript) = match channel_run(&f, &c, strat.as_mut(), budget) {
        Ok(r) => r,
        Err(e) => {
            return Trial {
                outcome: TrialOutcome { trial: i, outcome: Outcome::Aborted, detail: Some(e.to_string()) },
                guarantee_broken: false,
                guarantee_applies: false,
            }
        }
    };
    let t = code.decode_trace(&y);
    let agreement = (p.n() - transcript.write_set.len()) as i64;
    let applies = Rational::from_integer(agreement.into()) > code.frs().agreement_threshold();
    let mut broken = false;
    if applies {
        let s = code.inner_encode(&m, &coins.r_amd).expect("validated lengths");
        let mut full = s.clone();
        full.extend(&coins.a);
        let in_space = t.space.as_ref().is_some_and(|sp| sp.contains(&f, &full));
        broken = !in_space || !t.candidates.contains(&s);
    }
    let (outcome, detail) = match &t.outcome {
        Decoded::Message(out) if *out == m => (Outcome::Ok, None),
        Decoded::Message(_) => (Outcome::Incorrect, Some("decoder returned a different message".into())),
        Decoded::Bottom => (Outcome::Bottom, t.diagnostic.clone()),
    };
    Trial {
        outcome: TrialOutcome { trial: i, outcome, detail },
        guarantee_broken: broken,
        guarantee_applies: applies,
    }
}

pub(super) fn run(cfg: &ExperimentConfig, seed: u64, trials: u64) -> Result<ModeResult, ExperimentError> {
    let spec = cfg.params.clone().unwrap_or_else(ParamSpec::desk);
    let code = AwtpCode::from_spec(&spec, cfg.rho_mode).map_err(|e| ExperimentError::Config(e.to_string()))?;
    let p = code.params();
    let budget = cfg.channel.unwrap_or(ChannelBudget { reads_max: p.reads, writes_max: p.writes });
    if budget.reads_max > p.n() || budget.writes_max > p.n() {
        return Err(ExperimentError::Config(format!("channel budget exceeds N = {}", p.n())));
    }
    let strategy = cfg.strategy.clone().unwrap_or(StrategySpec::Mixed);
    let results: Vec<Trial> = (0..trials).into_par_iter().map(|i| trial(&code, &strategy, budget, seed, i)).collect();

    let broken = results.iter().filter(|t| t.guarantee_broken).count();
    let applicable = results.iter().filter(|t| t.guarantee_applies).count();
    let bottom_in_range = results
        .iter()
        .filter(|t| t.guarantee_applies && t.outcome.outcome == Outcome::Bottom)
        .count();
    let failure_bound = code.failure_bound();

    let params = json!({
        "spec": spec,
        "derived": p,
        "budget": budget,
        "strategy": strategy,
        "agreement_threshold": format_rational(&code.frs().agreement_threshold()),
        "failure_bound": format_rational(&failure_bound),
        "ses_degrees": code.ses().degrees(),
        "amd_modulus": code.amd().ext().modulus(),
    });
    let mut res = ModeResult::new(params, results.into_iter().map(|t| t.outcome).collect());
    res.aggregates.extra.insert("guarantee_applicable".into(), json!(applicable));
    res.aggregates.extra.insert("guarantee_violations".into(), json!(broken));
    let agg = &res.aggregates;
    res.assertions.push(Assertion::new(
        "no_incorrect_output",
        agg.incorrect == 0,
        format!("{} incorrect of {trials}", agg.incorrect),
    ));
    res.assertions.push(Assertion::new(
        "list_guarantee",
        broken == 0,
        format!("true codeword and SES point recovered in {}/{applicable} in-threshold trials", applicable - broken),
    ));
    // with a failure bound this small any in-threshold abstention is a bug
    let tiny = failure_bound * Rational::from_integer(trials.into()) < Rational::new(1.into(), 1_000_000.into());
    if tiny {
        res.assertions.push(Assertion::new(
            "no_bottom_within_threshold",
            bottom_in_range == 0,
            format!("{bottom_in_range} abstentions among {applicable} in-threshold trials"),
        ));
    }
    Ok(res)
}
