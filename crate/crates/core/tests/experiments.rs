use awtp_core::experiment::{run, ExperimentConfig, ExperimentReport, Mode};

fn quick(mode: Mode, seed: u64) -> ExperimentReport {
    let trials = match mode {
        Mode::Roundtrip | Mode::Reliability => Some(20),
        Mode::Ses => Some(30),
        _ => None,
    };
    run(mode, &ExperimentConfig::default(), Some(seed), trials).unwrap()
}

#[test]
fn every_mode_passes_with_defaults() {
    for mode in Mode::ALL {
        let rep = quick(mode, 1);
        assert!(rep.passed(), "{mode}: {:?}", rep.assertions);
        assert_eq!(rep.aggregates.incorrect, 0);
        assert_eq!(rep.outcomes.len() as u64, rep.aggregates.ok + rep.aggregates.mismatches + rep.aggregates.bottom + rep.aggregates.aborted);
    }
}

#[test]
fn identical_seeds_give_identical_reports() {
    for mode in [Mode::Roundtrip, Mode::Reliability, Mode::Ses] {
        let mut a = quick(mode, 9);
        let mut b = quick(mode, 9);
        a.wall_clock_ms = 0.0;
        b.wall_clock_ms = 0.0;
        assert_eq!(a, b, "{mode}");
    }
}

#[test]
fn reports_always_carry_the_incorrect_count() {
    let rep = quick(Mode::Secrecy, 0);
    let v = serde_json::to_value(&rep).unwrap();
    assert_eq!(v["aggregates"]["incorrect"], 0);
    assert_eq!(v["aggregates"]["exact_sd"], "0");
    assert!(v["seed_scheme"].as_str().unwrap().contains("ChaCha8"));
}

#[test]
fn config_seed_applies_unless_overridden() {
    let cfg = ExperimentConfig::from_json(r#"{"seed": 42, "trials": 3}"#).unwrap();
    let rep = run(Mode::Roundtrip, &cfg, None, None).unwrap();
    assert_eq!((rep.seed, rep.trials), (42, 3));
    let rep = run(Mode::Roundtrip, &cfg, Some(7), Some(2)).unwrap();
    assert_eq!((rep.seed, rep.trials), (7, 2));
}

#[test]
fn over_threshold_budget_abstains_or_succeeds() {
    let cfg = ExperimentConfig::from_json(
        r#"{"strategy": {"name": "random"}, "channel": {"reads_max": 1, "writes_max": 8}}"#,
    )
    .unwrap();
    let rep = run(Mode::Roundtrip, &cfg, Some(3), Some(10)).unwrap();
    assert_eq!(rep.aggregates.incorrect, 0);
    assert_eq!(rep.aggregates.ok + rep.aggregates.bottom, 10);
}
