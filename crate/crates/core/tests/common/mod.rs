//! Property suites shared by the `properties` tests and the acceptance run.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::OnceLock;

use awtp_core::channel::{channel_run, Action, AdversaryStrategy, ChannelBudget, ChannelError, ReadResult, StrategySpec, transcript_view};
use awtp_core::field::{ExtField, PrimeField};
use awtp_core::frs::{FrsCodeword, FrsParams};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const PRIMES: [u64; 7] = [2, 13, 31, 97, 241, 257, 65537];

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() })
}

fn report<T: std::fmt::Debug>(r: Result<(), proptest::test_runner::TestError<T>>) -> Result<(), String> {
    r.map_err(|e| e.to_string())
}

fn random_word(f: &PrimeField, n: usize, u: usize, rng: &mut ChaCha8Rng) -> FrsCodeword {
    FrsCodeword { symbols: (0..n).map(|_| (0..u).map(|_| f.random(rng)).collect()).collect() }
}

/// `y_i = c_i` off the write set, `y_i != c_i` on it, budgets respected and
/// the view equals `c` restricted to the read positions.
pub fn channel_conservation(cases: u32) -> Result<(), String> {
    let strat = (1usize..12, 1usize..5, 0usize..13, 0usize..13, any::<u64>(), 0u8..4, 0usize..7);
    report(runner(cases).run(&strat, |(n, u, reads, writes, seed, kind, prime)| {
        let f = PrimeField::new(PRIMES[prime]).unwrap();
        let budget = ChannelBudget { reads_max: reads.min(n), writes_max: writes.min(n) };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_word(&f, n, u, &mut rng);
        let spec = match kind {
            0 => StrategySpec::Random { reads: None, writes: None },
            1 => StrategySpec::Burst { start: None, len: None },
            2 => StrategySpec::Mixed,
            _ => StrategySpec::Informed { rule: Default::default() },
        };
        let mut s = spec.build(seed, ChaCha8Rng::seed_from_u64(rng.random()), n);
        let (y, t) = channel_run(&f, &c, s.as_mut(), budget).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let ws: BTreeSet<usize> = t.write_set.iter().copied().collect();
        prop_assert!(t.read_set.len() <= budget.reads_max);
        prop_assert!(ws.len() <= budget.writes_max);
        for i in 0..n {
            if ws.contains(&i) {
                prop_assert_ne!(&y.symbols[i], &c.symbols[i]);
            } else {
                prop_assert_eq!(&y.symbols[i], &c.symbols[i]);
                prop_assert!(t.error[i].iter().all(|&x| x == 0));
            }
        }
        for r in transcript_view(&t) {
            prop_assert_eq!(&r.symbol, &c.symbols[r.pos]);
        }
        Ok(())
    }))
}

struct Replay(Vec<Action>);

impl AdversaryStrategy for Replay {
    fn next_action(&mut self, _view: &[ReadResult]) -> Action {
        if self.0.is_empty() {
            Action::Done
        } else {
            self.0.remove(0)
        }
    }
}

/// Independent model of the channel rules.
fn expected_fault(actions: &[Action], n: usize, u: usize, q: u64, budget: ChannelBudget) -> Option<ChannelError> {
    let mut reads = BTreeSet::new();
    let mut writes = BTreeSet::new();
    for a in actions {
        match a {
            Action::Done => return None,
            Action::Read(p) => {
                if *p >= n {
                    return Some(ChannelError::PositionOutOfRange { pos: *p, n });
                }
                reads.insert(*p);
                if reads.len() > budget.reads_max {
                    return Some(ChannelError::BudgetViolation { kind: "read", max: budget.reads_max });
                }
            }
            Action::Write(p, d) => {
                if *p >= n {
                    return Some(ChannelError::PositionOutOfRange { pos: *p, n });
                }
                if d.len() != u {
                    return Some(ChannelError::DeltaLength { expected: u, got: d.len() });
                }
                if d.iter().all(|&x| x % q == 0) {
                    return Some(ChannelError::ZeroDelta(*p));
                }
                if !writes.insert(*p) {
                    return Some(ChannelError::DuplicateWrite(*p));
                }
                if writes.len() > budget.writes_max {
                    return Some(ChannelError::BudgetViolation { kind: "write", max: budget.writes_max });
                }
            }
        }
    }
    None
}

/// Arbitrary action scripts are accepted or rejected exactly as the model predicts.
pub fn budget_enforcement(cases: u32) -> Result<(), String> {
    let n = 6usize;
    let u = 2usize;
    let action = prop_oneof![
        (0usize..8).prop_map(Action::Read),
        ((0usize..8), prop::collection::vec(0u64..4, 1..3)).prop_map(|(p, d)| Action::Write(p, d)),
    ];
    let strat = (prop::collection::vec(action, 0..14), 0usize..7, 0usize..7);
    report(runner(cases).run(&strat, |(actions, rm, wm)| {
        let f = PrimeField::new(3).unwrap();
        let budget = ChannelBudget { reads_max: rm, writes_max: wm };
        let c = FrsCodeword { symbols: (0..n).map(|i| vec![(i % 3) as u64; u]).collect() };
        let expected = expected_fault(&actions, n, u, 3, budget);
        let got = channel_run(&f, &c, &mut Replay(actions.clone()), budget);
        match (expected, got) {
            (Some(e), Err(g)) => prop_assert_eq!(e, g),
            (None, Ok((_, t))) => {
                prop_assert!(t.read_set.len() <= rm);
                prop_assert!(t.write_set.len() <= wm);
            }
            (e, g) => return Err(TestCaseError::fail(format!("model {e:?}, channel {:?}", g.err()))),
        }
        Ok(())
    }))
}

/// `encode(a f + g) = a encode(f) + encode(g)`.
pub fn frs_linearity(cases: u32) -> Result<(), String> {
    let strat = (3usize..7, 1usize..6, 1usize..9, any::<u64>());
    report(runner(cases).run(&strat, |(prime, u, n, seed)| {
        let f = PrimeField::new(PRIMES[prime]).unwrap();
        prop_assume!(f.modulus() > (n * u) as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rng.random_range(1..=n * u);
        let frs = FrsParams::new(f, u, n, k, 1).unwrap();
        let a = f.random(&mut rng);
        let m1: Vec<u64> = (0..k).map(|_| f.random(&mut rng)).collect();
        let m2: Vec<u64> = (0..k).map(|_| f.random(&mut rng)).collect();
        let combo: Vec<u64> = m1.iter().zip(&m2).map(|(&x, &y)| f.mul_add(y, a, x)).collect();
        let lhs = frs.encode(&combo).unwrap();
        let c1 = frs.encode(&m1).unwrap();
        let scaled = FrsCodeword {
            symbols: c1.symbols.iter().map(|s| s.iter().map(|&x| f.mul(a, x)).collect()).collect(),
        };
        prop_assert_eq!(lhs, scaled.add(&f, &frs.encode(&m2).unwrap()));
        Ok(())
    }))
}

/// Extension fields for the homomorphism suite, built once. Degrees 3, 5
/// and 6 over `F_65537` are skipped: their smallest irreducible lies deep
/// in the search order and takes seconds to find.
fn ext_fields() -> &'static [ExtField] {
    static FIELDS: OnceLock<Vec<ExtField>> = OnceLock::new();
    FIELDS.get_or_init(|| {
        PRIMES
            .iter()
            .flat_map(|&q| (1..7).map(move |m| (q, m)))
            .filter(|&(q, m)| q != 65537 || matches!(m, 1 | 2 | 4))
            .map(|(q, m)| ExtField::new(PrimeField::new(q).unwrap(), m).unwrap())
            .collect()
    })
}

/// `phi(a + b) = phi(a) + phi(b)`, `phi(c a) = c phi(a)` and `phi^-1 phi = id`.
pub fn phi_homomorphism(cases: u32) -> Result<(), String> {
    let fields = ext_fields();
    let strat = (0..fields.len(), any::<u64>());
    report(runner(cases).run(&strat, |(idx, seed)| {
        let ext = &fields[idx];
        let base = *ext.base();
        let m = ext.degree();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: Vec<u64> = (0..m).map(|_| base.random(&mut rng)).collect();
        let b: Vec<u64> = (0..m).map(|_| base.random(&mut rng)).collect();
        let c = base.random(&mut rng);
        let sum: Vec<u64> = a.iter().zip(&b).map(|(&x, &y)| base.add(x, y)).collect();
        let (pa, pb) = (ext.phi(&a).unwrap(), ext.phi(&b).unwrap());
        prop_assert_eq!(ext.phi(&sum).unwrap(), ext.add(&pa, &pb));
        let scaled: Vec<u64> = a.iter().map(|&x| base.mul(c, x)).collect();
        let mut cvec = vec![0; m];
        cvec[0] = c;
        prop_assert_eq!(ext.phi(&scaled).unwrap(), ext.mul(&ext.phi(&cvec).unwrap(), &pa));
        prop_assert_eq!(ext.phi_inv(&pa), a);
        Ok(())
    }))
}
