//! Product-based test derivation: prune the usage model to one product's
//! behaviour and draw statistical test cases from it.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::behavior::{FiniteTrace, TransitionSystem, UsageModel};
use crate::report::round_significant;

/// Name of the random source recorded in every suite. Walk `k` of a suite
/// with seed `s` uses `ChaCha8Rng::seed_from_u64(s)` on stream `k`, drawing one
/// `f64` in `[0, 1)` per step.
pub const GENERATOR: &str = "rand_chacha-0.3/ChaCha8Rng(seed_from_u64, stream=walk)";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DerivationError {
    #[error("the initial state has no remaining behaviour for this product")]
    InitialDead,
    #[error("invalid generation parameters: {0}")]
    InvalidParams(String),
}

/// Restricts `um` to the transitions present in `ts` (typically a product
/// projection of the FTS `um` was validated against).
///
/// States whose outgoing transitions are all removed are removed too, to a
/// fixpoint, as are states no longer reachable from the initial state. A
/// state that lost some transitions has the rest rescaled proportionally so
/// its row sums to 1 again; untouched rows keep their exact values.
pub fn prune_usage_model(um: &UsageModel, ts: &TransitionSystem) -> Result<UsageModel, DerivationError> {
    let src = um.ts();
    let all = src.transitions();
    let mut kept: Vec<bool> = all.iter().map(|t| ts.contains_transition(t)).collect();
    let mut dead: BTreeSet<&str> =
        src.states().iter().filter(|s| !ts.states().contains(*s)).map(String::as_str).collect();

    loop {
        let mut changed = false;
        for s in src.states() {
            if dead.contains(s.as_str()) || src.outgoing(s).is_empty() {
                continue;
            }
            let mass: f64 = src
                .outgoing(s)
                .iter()
                .filter(|&&i| kept[i] && !dead.contains(all[i].to.as_str()))
                .map(|&i| um.probability(i))
                .sum();
            if mass == 0.0 {
                dead.insert(s);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if dead.contains(um.initial()) {
        return Err(DerivationError::InitialDead);
    }
    for (i, t) in all.iter().enumerate() {
        if dead.contains(t.from.as_str()) || dead.contains(t.to.as_str()) {
            kept[i] = false;
        }
    }

    let live = src.restrict((0..all.len()).filter(|&i| kept[i]), true);
    let mut row_total: BTreeMap<&str, f64> = BTreeMap::new();
    let mut row_lost: BTreeSet<&str> = BTreeSet::new();
    for (i, t) in all.iter().enumerate() {
        if live.contains_transition(t) {
            *row_total.entry(t.from.as_str()).or_default() += um.probability(i);
        } else {
            row_lost.insert(t.from.as_str());
        }
    }
    let probabilities = live
        .transitions()
        .iter()
        .map(|t| {
            let p = um.probability_of(t).expect("pruned transition comes from the model");
            if row_lost.contains(t.from.as_str()) { p / row_total[t.from.as_str()] } else { p }
        })
        .collect();
    let tau = um
        .initial_distribution()
        .iter()
        .filter(|(s, _)| live.states().contains(*s))
        .map(|(s, &p)| (s.clone(), p))
        .collect();
    Ok(UsageModel::new(live, probabilities, tau).expect("pruned model keeps probabilities in range"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenerationParams {
    /// Number of walks.
    pub count: usize,
    /// Walks still running after this many steps are truncated and partial.
    pub max_len: usize,
    pub include_partial: bool,
}

impl GenerationParams {
    pub fn new(count: usize, max_len: usize) -> Self {
        GenerationParams { count, max_len, include_partial: false }
    }

    fn validate(&self) -> Result<(), DerivationError> {
        if self.count == 0 {
            return Err(DerivationError::InvalidParams("count must be positive".into()));
        }
        if self.max_len == 0 {
            return Err(DerivationError::InvalidParams("max_len must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestCase {
    /// Actions of the walk, with the product of the probabilities taken.
    pub trace: FiniteTrace,
    /// The walk did not return to the initial state.
    pub partial: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestSuite {
    pub seed: u64,
    pub params: GenerationParams,
    pub generator: &'static str,
    pub cases: Vec<TestCase>,
    /// Walks that ended without returning to the initial state.
    pub partial_walks: usize,
}

impl TestSuite {
    pub fn to_json(&self) -> serde_json::Value {
        let cases: Vec<_> = self.cases.iter().map(|c| &c.trace.actions).collect();
        serde_json::json!({
            "seed": self.seed,
            "count": self.params.count,
            "maxLen": self.params.max_len,
            "generator": self.generator,
            "cases": cases,
        })
    }

    /// Analytic probability of each case, rounded like the reports.
    pub fn case_probabilities(&self) -> Vec<f64> {
        self.cases.iter().map(|c| round_significant(c.trace.probability.unwrap_or(0.0))).collect()
    }
}

/// Seeded random walks from the initial state, each ending on return to the
/// initial state or after `max_len` steps.
pub fn generate_tests(um: &UsageModel, params: GenerationParams, seed: u64) -> Result<TestSuite, DerivationError> {
    params.validate()?;
    let mut cases = Vec::new();
    let mut partial_walks = 0;
    for walk in 0..params.count {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(walk as u64);
        let case = random_walk(um, params.max_len, &mut rng);
        if case.partial {
            partial_walks += 1;
            if !params.include_partial {
                continue;
            }
        }
        cases.push(case);
    }
    Ok(TestSuite { seed, params, generator: GENERATOR, cases, partial_walks })
}

fn random_walk(um: &UsageModel, max_len: usize, rng: &mut impl Rng) -> TestCase {
    let ts = um.ts();
    let mut state = ts.initial();
    let mut actions = Vec::new();
    let mut probability = 1.0;
    while actions.len() < max_len {
        let out = ts.outgoing(state);
        let total: f64 = out.iter().map(|&i| um.probability(i)).sum();
        if total <= 0.0 {
            break;
        }
        let target = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        // the last positive transition absorbs rounding at the top of the range
        let mut chosen = *out.iter().rev().find(|&&i| um.probability(i) > 0.0).expect("positive mass");
        for &i in out {
            acc += um.probability(i);
            if target < acc {
                chosen = i;
                break;
            }
        }
        let t = &ts.transitions()[chosen];
        actions.push(t.action.clone());
        probability *= um.probability(chosen);
        state = &t.to;
        if state == ts.initial() {
            return TestCase { trace: FiniteTrace::new(actions).with_probability(probability), partial: false };
        }
    }
    TestCase { trace: FiniteTrace::new(actions).with_probability(probability), partial: true }
}
