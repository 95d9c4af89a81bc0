//! Family-based prioritization: filter traces through the FTS, build the
//! pruned FTS they exercise, and compute the products able to run each trace.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::behavior::{FeaturedTransitionSystem, FiniteTrace, TransitionSystem};
use crate::feature_model::{FeatureExpr, FeatureModelError, Product, SatOracle};
use crate::report::round_significant;
use crate::selection::TraceSet;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FamilyError {
    #[error("trace {0} cannot be executed by any product")]
    TraceRejected(FiniteTrace),
    #[error("trace {0} carries no probability")]
    MissingProbability(FiniteTrace),
    #[error("{0}")]
    Feature(#[from] FeatureModelError),
}

/// An FTS restricted to the behaviour exercised by a set of accepted traces.
/// Initial state and feature diagram are those of the source FTS.
#[derive(Debug, Clone, PartialEq)]
pub struct PrunedFts(FeaturedTransitionSystem);

impl PrunedFts {
    pub fn fts(&self) -> &FeaturedTransitionSystem {
        &self.0
    }

    pub fn into_inner(self) -> FeaturedTransitionSystem {
        self.0
    }

    pub fn to_json(&self) -> serde_json::Value {
        self.0.to_json()
    }
}

/// One satisfiable path labelled by a trace: transition indices and the
/// conjunction of their guards.
struct GuardedPath {
    transitions: Vec<usize>,
    guard: FeatureExpr,
}

/// Depth-first search over the FTS paths labelled by `t`, abandoning a path
/// as soon as its guards are jointly unsatisfiable with the diagram.
fn satisfiable_paths(
    fts: &FeaturedTransitionSystem,
    oracle: &SatOracle,
    t: &FiniteTrace,
    first_only: bool,
) -> Vec<GuardedPath> {
    struct Walk<'a> {
        fts: &'a FeaturedTransitionSystem,
        oracle: &'a SatOracle,
        actions: &'a [String],
        first_only: bool,
        transitions: Vec<usize>,
        guards: Vec<FeatureExpr>,
        found: Vec<GuardedPath>,
        // conjunction text -> satisfiable, shared across branches
        memo: HashMap<FeatureExpr, bool>,
    }

    impl Walk<'_> {
        fn satisfiable(&mut self, e: FeatureExpr) -> bool {
            if let Some(&known) = self.memo.get(&e) {
                return known;
            }
            let sat = self.oracle.is_satisfiable(&e).expect("guards are checked against the diagram");
            self.memo.insert(e, sat);
            sat
        }

        fn go(&mut self, state: &str) {
            let depth = self.transitions.len();
            let Some(action) = self.actions.get(depth) else {
                self.found.push(GuardedPath {
                    transitions: self.transitions.clone(),
                    guard: FeatureExpr::And(self.guards.clone()).simplify(),
                });
                return;
            };
            let ts = self.fts.ts();
            for &i in ts.outgoing(state) {
                if self.first_only && !self.found.is_empty() {
                    return;
                }
                let tr = &ts.transitions()[i];
                if tr.action != *action {
                    continue;
                }
                self.guards.push(self.fts.guard(i).clone());
                let conj = FeatureExpr::And(self.guards.clone()).simplify();
                if self.satisfiable(conj) {
                    self.transitions.push(i);
                    self.go(&tr.to);
                    self.transitions.pop();
                }
                self.guards.pop();
            }
        }
    }

    let mut walk = Walk {
        fts,
        oracle,
        actions: &t.actions,
        first_only,
        transitions: Vec::new(),
        guards: Vec::new(),
        found: Vec::new(),
        memo: HashMap::new(),
    };
    if t.actions.is_empty() {
        if walk.satisfiable(FeatureExpr::True) {
            walk.found.push(GuardedPath { transitions: Vec::new(), guard: FeatureExpr::True });
        }
    } else {
        walk.go(fts.ts().initial());
    }
    walk.found
}

/// Whether at least one valid product can execute `t` on `fts`.
pub fn accept(fts: &FeaturedTransitionSystem, t: &FiniteTrace) -> bool {
    let oracle = SatOracle::new(fts.diagram());
    !satisfiable_paths(fts, &oracle, t, true).is_empty()
}

/// Keeps the traces some product can execute and collects the states,
/// actions and transitions (with their guards) they visit. Every satisfiable
/// path of a trace contributes.
pub fn build_fts_prime(fts: &FeaturedTransitionSystem, traces: &TraceSet) -> (PrunedFts, TraceSet) {
    let oracle = SatOracle::new(fts.diagram());
    let ts = fts.ts();
    let mut states = BTreeSet::from([ts.initial().to_string()]);
    let mut visited = BTreeSet::new();
    let mut accepted = Vec::new();
    for t in traces {
        let paths = satisfiable_paths(fts, &oracle, t, false);
        if paths.is_empty() {
            continue;
        }
        for path in &paths {
            for &i in &path.transitions {
                let tr = &ts.transitions()[i];
                states.insert(tr.from.clone());
                states.insert(tr.to.clone());
                visited.insert(i);
            }
        }
        accepted.push(t.clone());
    }
    // construction order of the source FTS is kept
    let transitions: Vec<_> = visited.iter().map(|&i| ts.transitions()[i].clone()).collect();
    let guards = visited.iter().map(|&i| fts.guard(i).clone()).collect();
    let pruned_ts = TransitionSystem::new(ts.initial(), states, transitions).expect("sub-structure of a valid TS");
    let pruned = FeaturedTransitionSystem::new(pruned_ts, fts.diagram().clone(), guards)
        .expect("guards come from the source FTS");
    (PrunedFts(pruned), TraceSet::from_traces(accepted))
}

/// The guard under which `t` runs on the pruned FTS and the products
/// satisfying it. With several satisfiable paths the guard is the
/// disjunction of the per-path conjunctions.
pub fn products_for_trace(
    fts_prime: &PrunedFts,
    t: &FiniteTrace,
) -> Result<(FeatureExpr, BTreeSet<Product>), FamilyError> {
    let oracle = SatOracle::new(fts_prime.fts().diagram());
    products_with(fts_prime.fts(), &oracle, t)
}

fn products_with(
    fts: &FeaturedTransitionSystem,
    oracle: &SatOracle,
    t: &FiniteTrace,
) -> Result<(FeatureExpr, BTreeSet<Product>), FamilyError> {
    let paths = satisfiable_paths(fts, oracle, t, false);
    let guard = match paths.len() {
        0 => return Err(FamilyError::TraceRejected(t.clone())),
        1 => paths.into_iter().next().unwrap().guard,
        _ => FeatureExpr::Or(paths.into_iter().map(|p| p.guard).collect()).simplify(),
    };
    let products = oracle.products(&guard)?;
    Ok((guard, products))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Order {
    Asc,
    Desc,
}

impl FromStr for Order {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "ASC" => Ok(Order::Asc),
            "DESC" => Ok(Order::Desc),
            _ => Err(format!("unknown order `{s}`, expected ASC or DESC")),
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Order::Asc => "ASC",
            Order::Desc => "DESC",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrioritizedEntry {
    pub trace: FiniteTrace,
    pub probability: f64,
    pub guard: FeatureExpr,
    pub products: BTreeSet<Product>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrioritizedReport {
    pub order: Order,
    pub entries: Vec<PrioritizedEntry>,
}

impl PrioritizedReport {
    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<_> = self
            .entries
            .iter()
            .map(|e| {
                serde_json::json!({
                    "trace": e.trace.actions,
                    "probability": round_significant(e.probability),
                    "guard": e.guard.to_string(),
                    "products": e.products,
                })
            })
            .collect();
        serde_json::json!({ "order": self.order, "entries": entries })
    }
}

/// One entry per trace, ranked by the probability the trace carries from
/// extraction; ties are broken by action sequence.
pub fn prioritize(fts_prime: &PrunedFts, traces: &TraceSet, order: Order) -> Result<PrioritizedReport, FamilyError> {
    let fts = fts_prime.fts();
    let oracle = SatOracle::new(fts.diagram());
    let mut entries = Vec::with_capacity(traces.len());
    for t in traces {
        let probability = t.probability.ok_or_else(|| FamilyError::MissingProbability(t.clone()))?;
        let (guard, products) = products_with(fts, &oracle, t)?;
        debug_assert!(!products.is_empty(), "accepted trace with no product");
        entries.push(PrioritizedEntry { trace: t.clone(), probability, guard, products });
    }
    entries.sort_by(|a, b| {
        let by_p = a.probability.total_cmp(&b.probability);
        let by_p = if order == Order::Desc { by_p.reverse() } else { by_p };
        by_p.then_with(|| a.trace.actions.cmp(&b.trace.actions))
    });
    Ok(PrioritizedReport { order, entries })
}
