//! Budgeted adversarial channel.
//!
//! A strategy adaptively reads and additively corrupts codeword symbols.
//! Reads always return the transmitted symbol `c_i`; the corrupted word is
//! `y = c + e` with `e` supported exactly on the written positions.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::PrimeField;
use crate::frs::FrsCodeword;

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum ChannelError {
    #[error("budget violation: {kind} budget of {max} exceeded")]
    BudgetViolation { kind: &'static str, max: usize },
    #[error("write at position {0} has a zero delta")]
    ZeroDelta(usize),
    #[error("position {0} written twice")]
    DuplicateWrite(usize),
    #[error("position {pos} out of range for N = {n}")]
    PositionOutOfRange { pos: usize, n: usize },
    #[error("delta has length {got}, expected u = {expected}")]
    DeltaLength { expected: usize, got: usize },
    #[error("strategy issued more than {0} actions without finishing")]
    ActionLimit(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelBudget {
    pub reads_max: usize,
    pub writes_max: usize,
}

/// Static facts a strategy may know before it acts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChannelInfo {
    pub n: usize,
    pub u: usize,
    pub field: PrimeField,
    pub budget: ChannelBudget,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Action {
    Read(usize),
    Write(usize, Vec<u64>),
    Done,
}

/// One observed symbol.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReadResult {
    pub pos: usize,
    pub symbol: Vec<u64>,
}

/// An adaptive adversary. Its only inputs are the channel facts and the
/// results of its own reads so far.
pub trait AdversaryStrategy {
    fn start(&mut self, _info: &ChannelInfo) {}

    fn next_action(&mut self, view: &[ReadResult]) -> Action;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Event {
    Read(ReadResult),
    Write { pos: usize, delta: Vec<u64> },
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ChannelTranscript {
    pub events: Vec<Event>,
    /// Distinct read positions in first-read order.
    pub read_set: Vec<usize>,
    /// Written positions in write order.
    pub write_set: Vec<usize>,
    /// The full error word `e`.
    pub error: Vec<Vec<u64>>,
}

impl ChannelTranscript {
    pub fn reads(&self) -> impl Iterator<Item = &ReadResult> {
        self.events.iter().filter_map(|e| match e {
            Event::Read(r) => Some(r),
            Event::Write { .. } => None,
        })
    }
}

/// The ordered `(position, symbol)` list of everything the adversary read.
pub fn transcript_view(t: &ChannelTranscript) -> Vec<ReadResult> {
    t.reads().cloned().collect()
}

fn action_limit(n: usize) -> usize {
    16 * n + 64
}

/// Drives `strat` to `Done` against codeword `c`.
pub fn channel_run(
    field: &PrimeField,
    c: &FrsCodeword,
    strat: &mut dyn AdversaryStrategy,
    budget: ChannelBudget,
) -> Result<(FrsCodeword, ChannelTranscript), ChannelError> {
    let n = c.len();
    let u = c.symbols.first().map_or(0, Vec::len);
    strat.start(&ChannelInfo { n, u, field: *field, budget });
    let mut t = ChannelTranscript { error: vec![vec![0; u]; n], ..Default::default() };
    let mut view: Vec<ReadResult> = Vec::new();
    let mut read_seen = BTreeSet::new();
    let mut written = BTreeSet::new();
    for _ in 0..action_limit(n) {
        match strat.next_action(&view) {
            Action::Done => {
                let y = FrsCodeword {
                    symbols: c
                        .symbols
                        .iter()
                        .zip(&t.error)
                        .map(|(ci, ei)| ci.iter().zip(ei).map(|(&a, &b)| field.add(a, b)).collect())
                        .collect(),
                };
                return Ok((y, t));
            }
            Action::Read(pos) => {
                if pos >= n {
                    return Err(ChannelError::PositionOutOfRange { pos, n });
                }
                if read_seen.insert(pos) {
                    if read_seen.len() > budget.reads_max {
                        return Err(ChannelError::BudgetViolation { kind: "read", max: budget.reads_max });
                    }
                    t.read_set.push(pos);
                }
                let r = ReadResult { pos, symbol: c.symbols[pos].clone() };
                view.push(r.clone());
                t.events.push(Event::Read(r));
            }
            Action::Write(pos, delta) => {
                if pos >= n {
                    return Err(ChannelError::PositionOutOfRange { pos, n });
                }
                if delta.len() != u {
                    return Err(ChannelError::DeltaLength { expected: u, got: delta.len() });
                }
                let delta: Vec<u64> = delta.iter().map(|&d| field.elem(d)).collect();
                if delta.iter().all(|&d| d == 0) {
                    return Err(ChannelError::ZeroDelta(pos));
                }
                if !written.insert(pos) {
                    return Err(ChannelError::DuplicateWrite(pos));
                }
                if written.len() > budget.writes_max {
                    return Err(ChannelError::BudgetViolation { kind: "write", max: budget.writes_max });
                }
                t.write_set.push(pos);
                t.error[pos] = delta.clone();
                t.events.push(Event::Write { pos, delta });
            }
        }
    }
    Err(ChannelError::ActionLimit(action_limit(n)))
}

fn random_delta<R: Rng + ?Sized>(f: &PrimeField, u: usize, rng: &mut R) -> Vec<u64> {
    loop {
        let d: Vec<u64> = (0..u).map(|_| f.random(rng)).collect();
        if d.iter().any(|&x| x != 0) {
            return d;
        }
    }
}

/// Reads nothing and leaves the word untouched.
#[derive(Debug, Default, Clone)]
pub struct NoopStrategy;

impl AdversaryStrategy for NoopStrategy {
    fn next_action(&mut self, _view: &[ReadResult]) -> Action {
        Action::Done
    }
}

/// Plans a queue of actions at start; subsequent reads do not alter it.
#[derive(Debug, Clone)]
struct Script {
    queue: std::collections::VecDeque<Action>,
}

impl Script {
    fn pop(&mut self) -> Action {
        self.queue.pop_front().unwrap_or(Action::Done)
    }
}

/// Reads random positions, then adds random nonzero deltas on random positions.
#[derive(Debug, Clone)]
pub struct RandomStrategy {
    rng: ChaCha8Rng,
    reads: Option<usize>,
    writes: Option<usize>,
    script: Option<Script>,
}

impl RandomStrategy {
    /// `None` uses the full budget.
    pub fn new(rng: ChaCha8Rng, reads: Option<usize>, writes: Option<usize>) -> Self {
        RandomStrategy { rng, reads, writes, script: None }
    }
}

impl AdversaryStrategy for RandomStrategy {
    fn start(&mut self, info: &ChannelInfo) {
        let reads = self.reads.unwrap_or(info.budget.reads_max).min(info.n);
        let writes = self.writes.unwrap_or(info.budget.writes_max).min(info.n);
        let mut queue: std::collections::VecDeque<Action> =
            sample(&mut self.rng, info.n, reads).into_iter().map(Action::Read).collect();
        for pos in sample(&mut self.rng, info.n, writes) {
            queue.push_back(Action::Write(pos, random_delta(&info.field, info.u, &mut self.rng)));
        }
        self.script = Some(Script { queue });
    }

    fn next_action(&mut self, _view: &[ReadResult]) -> Action {
        self.script.as_mut().map_or(Action::Done, Script::pop)
    }
}

/// Corrupts the contiguous window `start, start + 1, ...` (cyclically).
#[derive(Debug, Clone)]
pub struct BurstStrategy {
    rng: ChaCha8Rng,
    start: usize,
    len: Option<usize>,
    script: Option<Script>,
}

impl BurstStrategy {
    pub fn new(rng: ChaCha8Rng, start: usize, len: Option<usize>) -> Self {
        BurstStrategy { rng, start, len, script: None }
    }
}

impl AdversaryStrategy for BurstStrategy {
    fn start(&mut self, info: &ChannelInfo) {
        let len = self.len.unwrap_or(info.budget.writes_max).min(info.n);
        let reads = info.budget.reads_max.min(info.n);
        let mut queue: std::collections::VecDeque<Action> =
            (0..reads).map(|i| Action::Read((self.start + i) % info.n)).collect();
        for i in 0..len {
            let pos = (self.start + i) % info.n;
            queue.push_back(Action::Write(pos, random_delta(&info.field, info.u, &mut self.rng)));
        }
        self.script = Some(Script { queue });
    }

    fn next_action(&mut self, _view: &[ReadResult]) -> Action {
        self.script.as_mut().map_or(Action::Done, Script::pop)
    }
}

/// Deterministic read-to-write rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InformedRule {
    /// Window start and deltas are derived from the sum of everything read.
    #[default]
    ShiftBySum,
    /// Zero out the read symbols, then continue with derived deltas.
    NegateRead,
}

/// Reads its full budget first, then chooses positions and deltas as a
/// deterministic function of what it saw.
#[derive(Debug, Clone)]
pub struct InformedStrategy {
    rule: InformedRule,
    info: Option<ChannelInfo>,
    plan: Option<Script>,
}

impl InformedStrategy {
    pub fn new(rule: InformedRule) -> Self {
        InformedStrategy { rule, info: None, plan: None }
    }

    fn plan(&self, info: &ChannelInfo, view: &[ReadResult]) -> Script {
        let f = &info.field;
        let sum = view.iter().flat_map(|r| r.symbol.iter()).fold(0, |a, &b| f.add(a, b));
        let derived = |i: usize| -> Vec<u64> {
            let mut d: Vec<u64> = (0..info.u).map(|t| f.add(f.mul(sum, f.elem((t + 1) as u64)), f.elem((i + t) as u64))).collect();
            if d.iter().all(|&x| x == 0) {
                d[0] = 1;
            }
            d
        };
        let mut positions: Vec<(usize, Vec<u64>)> = Vec::new();
        if self.rule == InformedRule::NegateRead {
            for r in view {
                if positions.iter().any(|(p, _)| *p == r.pos) {
                    continue;
                }
                let d: Vec<u64> = r.symbol.iter().map(|&x| f.neg(x)).collect();
                let d = if d.iter().all(|&x| x == 0) { derived(r.pos) } else { d };
                positions.push((r.pos, d));
            }
        }
        let start = (sum as usize) % info.n.max(1);
        let mut i = 0;
        while positions.len() < info.budget.writes_max.min(info.n) {
            let pos = (start + i) % info.n;
            if !positions.iter().any(|(p, _)| *p == pos) {
                positions.push((pos, derived(pos)));
            }
            i += 1;
        }
        positions.truncate(info.budget.writes_max);
        Script { queue: positions.into_iter().map(|(p, d)| Action::Write(p, d)).collect() }
    }
}

impl AdversaryStrategy for InformedStrategy {
    fn start(&mut self, info: &ChannelInfo) {
        self.info = Some(*info);
        self.plan = None;
    }

    fn next_action(&mut self, view: &[ReadResult]) -> Action {
        let Some(info) = self.info else {
            return Action::Done;
        };
        if view.len() < info.budget.reads_max.min(info.n) {
            // spread reads evenly
            let step = (info.n / info.budget.reads_max.max(1)).max(1);
            return Action::Read((view.len() * step) % info.n);
        }
        if self.plan.is_none() {
            self.plan = Some(self.plan(&info, view));
        }
        self.plan.as_mut().map_or(Action::Done, Script::pop)
    }
}

/// Reads one more position than allowed.
#[derive(Debug, Default, Clone)]
pub struct OverReadStrategy {
    issued: usize,
}

impl AdversaryStrategy for OverReadStrategy {
    fn next_action(&mut self, _view: &[ReadResult]) -> Action {
        self.issued += 1;
        Action::Read(self.issued - 1)
    }
}

/// Serializable strategy selection for experiment configs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum StrategySpec {
    Noop,
    Random {
        #[serde(default)]
        reads: Option<usize>,
        #[serde(default)]
        writes: Option<usize>,
    },
    Burst {
        #[serde(default)]
        start: Option<usize>,
        #[serde(default)]
        len: Option<usize>,
    },
    Informed {
        #[serde(default)]
        rule: InformedRule,
    },
    Overread,
    /// Cycles through random, burst and informed by trial index.
    Mixed,
}

impl StrategySpec {
    /// Instantiates the strategy for one trial. Randomised strategies draw
    /// from `rng`; burst windows without an explicit start are chosen from it.
    pub fn build(&self, trial: u64, mut rng: ChaCha8Rng, n: usize) -> Box<dyn AdversaryStrategy + Send> {
        match self {
            StrategySpec::Noop => Box::new(NoopStrategy),
            StrategySpec::Random { reads, writes } => Box::new(RandomStrategy::new(rng, *reads, *writes)),
            StrategySpec::Burst { start, len } => {
                let s = start.unwrap_or_else(|| rng.random_range(0..n.max(1)));
                Box::new(BurstStrategy::new(rng, s, *len))
            }
            StrategySpec::Informed { rule } => Box::new(InformedStrategy::new(*rule)),
            StrategySpec::Overread => Box::new(OverReadStrategy::default()),
            StrategySpec::Mixed => {
                let seed: u64 = rng.random();
                let pick = match trial % 4 {
                    0 => StrategySpec::Random { reads: None, writes: None },
                    1 => StrategySpec::Burst { start: None, len: None },
                    2 => StrategySpec::Informed { rule: InformedRule::ShiftBySum },
                    _ => StrategySpec::Informed { rule: InformedRule::NegateRead },
                };
                pick.build(trial, ChaCha8Rng::seed_from_u64(seed), n)
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            StrategySpec::Noop => "noop",
            StrategySpec::Random { .. } => "random",
            StrategySpec::Burst { .. } => "burst",
            StrategySpec::Informed { .. } => "informed",
            StrategySpec::Overread => "overread",
            StrategySpec::Mixed => "mixed",
        }
    }
}
