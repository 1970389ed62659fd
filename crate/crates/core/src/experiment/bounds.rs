use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{Assertion, ExperimentConfig, ExperimentError, ModeResult, Outcome, TrialOutcome};
use crate::bounds::{capacity_bound, rate_condition, schedule_check};
use crate::codec::{AwtpParams, ParamSpec};
use crate::wire::{format_rational, parse_rational};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsConfig {
    /// `(rho_r, rho_w)` pairs as rational strings.
    pub grid: Vec<(String, String)>,
    pub eps: Vec<f64>,
    pub xi1: Vec<String>,
    pub schedule_rho_r: String,
    pub schedule_rho_w: String,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        let s = |a: &str, b: &str| (a.to_string(), b.to_string());
        BoundsConfig {
            grid: vec![s("0", "0"), s("1/8", "1/2"), s("1/4", "1/4"), s("1/5", "1/5"), s("1/2", "1/2"), s("3/5", "1/2")],
            eps: vec![0.0, 0.01],
            xi1: vec!["1/100".into(), "1/200".into()],
            schedule_rho_r: "1/5".into(),
            schedule_rho_w: "1/5".into(),
        }
    }
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<ModeResult, ExperimentError> {
    let bc = cfg.bounds.clone().unwrap_or_default();
    let parse = |s: &str| parse_rational(s).map_err(|e| ExperimentError::Config(e.to_string()));
    let spec = cfg.params.clone().unwrap_or_else(ParamSpec::desk);
    let desk = AwtpParams::derive(&spec, cfg.rho_mode).map_err(|e| ExperimentError::Config(e.to_string()))?;
    let alphabet_bits = desk.u() as f64 * (desk.q() as f64).log2();
    let (u, v) = (desk.u() as i64, desk.v() as i64);

    let mut table = Vec::new();
    let mut capacity_ok = true;
    let mut infeasible_ok = true;
    for (a, b) in &bc.grid {
        let (rr, rw) = (parse(a)?, parse(b)?);
        for &eps in &bc.eps {
            let c = capacity_bound(&rr, &rw, eps, desk.n() as u64, alphabet_bits);
            let lemma9 = rate_condition(u, v, &spec.rate, &rr);
            if eps == 0.0 {
                capacity_ok &= c.exact == Rational::one() - &rr - &rw && c.leakage_term == 0.0;
                let sum_ge_one = &rr + &rw >= Rational::one();
                infeasible_ok &= c.is_infeasible() == sum_ge_one;
            }
            let row: BTreeMap<String, String> = [
                ("rho_r", format_rational(&rr)),
                ("rho_w", format_rational(&rw)),
                ("eps", eps.to_string()),
                ("capacity_exact_part", format_rational(&c.exact)),
                ("capacity_leakage_term", format!("{:.6e}", c.leakage_term)),
                ("capacity", format!("{:.6}", c.value_f64())),
                ("infeasible", c.is_infeasible().to_string()),
                ("achieved_rate", format_rational(&desk.rate())),
                ("max_rho_w", format_rational(&lemma9)),
                ("max_rho_w_approx", format!("{:.6}", crate::scalar::BoundScalar::to_f64(&lemma9))),
            ]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
            table.push(row);
        }
    }

    let rho_r = parse(&bc.schedule_rho_r)?;
    let rho_w = parse(&bc.schedule_rho_w)?;
    let mut checks = Vec::new();
    for x in &bc.xi1 {
        let xi = parse(x)?;
        if xi <= Rational::zero() {
            return Err(ExperimentError::Config(format!("xi1 = {x} must be positive")));
        }
        let c = schedule_check(&xi, &rho_r, &rho_w)
            .ok_or_else(|| ExperimentError::Config(format!("1/xi1 must be an integer >= 2, got xi1 = {x}")))?;
        checks.push(c);
    }

    let params = json!({
        "bounds": bc,
        "desk": desk,
        "alphabet_bits": alphabet_bits,
        "schedule": checks,
    });
    let mut res = ModeResult::new(params, vec![TrialOutcome { trial: 0, outcome: Outcome::Ok, detail: None }]);
    res.table = table;
    res.assertions.push(Assertion::new("perfect_capacity_column", capacity_ok, "eps = 0 bound equals 1 - rho_r - rho_w"));
    res.assertions.push(Assertion::new("infeasible_flagged", infeasible_ok, "bound <= 0 exactly when rho_r + rho_w >= 1"));
    res.assertions.push(Assertion::new(
        "rate_accounting",
        desk.rate() == spec.rate,
        format!("uRN / uN = {}", format_rational(&desk.rate())),
    ));
    for c in &checks {
        res.assertions.push(Assertion::new(
            &format!("schedule_xi1_{}", c.xi1.replace('/', "_")),
            c.forms_agree && c.display_inequality && c.reliable,
            format!("u = {}, v = {}, R = {}, max rho_w = {}", c.u, c.v, c.rate, c.max_rho_w),
        ));
    }
    if res.assertions.iter().any(|a| !a.passed) {
        res.outcomes[0].outcome = Outcome::Mismatch;
        res.aggregates.ok = 0;
        res.aggregates.mismatches = 1;
    }
    Ok(res)
}
