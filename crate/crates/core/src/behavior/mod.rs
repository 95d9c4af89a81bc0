//! Transition systems, featured transition systems and usage models.

mod json;
mod validate;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::feature_model::{FeatureDiagram, FeatureExpr, FeatureModelError, Product};

pub use validate::{validate_triple, ValidationReport, Violation, ViolationCode};

/// Tolerance for row sums of a usage model.
pub const STOCHASTIC_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("duplicate transition {0}")]
    DuplicateTransition(Transition),
    #[error("probability {value} of {transition} is outside [0, 1]")]
    InvalidProbability { transition: String, value: f64 },
    #[error("{0}")]
    Feature(#[from] FeatureModelError),
    #[error("product {0} is not valid for the feature diagram")]
    InvalidProduct(Product),
    #[error("trace {0} cannot be executed")]
    NoSuchPath(FiniteTrace),
}

/// A labelled transition; identity is the whole `(from, action, to)` triple.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Transition {
    pub from: String,
    pub action: String,
    pub to: String,
}

impl Transition {
    pub fn new(from: impl Into<String>, action: impl Into<String>, to: impl Into<String>) -> Self {
        Transition { from: from.into(), action: action.into(), to: to.into() }
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -{}-> {}", self.from, self.action, self.to)
    }
}

/// `(S, Act, trans, i)`. Transitions keep their construction order and are
/// addressed by index by the structures layered on top.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionSystem {
    initial: String,
    states: BTreeSet<String>,
    actions: BTreeSet<String>,
    transitions: Vec<Transition>,
    index: BTreeMap<Transition, usize>,
    outgoing: BTreeMap<String, Vec<usize>>,
}

impl TransitionSystem {
    /// Builds a TS; the action set is the set of transition labels.
    pub fn new(
        initial: impl Into<String>,
        states: impl IntoIterator<Item = impl Into<String>>,
        transitions: impl IntoIterator<Item = Transition>,
    ) -> Result<Self, ModelError> {
        let initial = initial.into();
        let states: BTreeSet<String> = states.into_iter().map(Into::into).collect();
        if !states.contains(&initial) {
            return Err(ModelError::UnknownState(initial));
        }
        let mut ts = TransitionSystem {
            initial,
            states,
            actions: BTreeSet::new(),
            transitions: Vec::new(),
            index: BTreeMap::new(),
            outgoing: BTreeMap::new(),
        };
        for t in transitions {
            for s in [&t.from, &t.to] {
                if !ts.states.contains(s) {
                    return Err(ModelError::UnknownState(s.clone()));
                }
            }
            if ts.index.contains_key(&t) {
                return Err(ModelError::DuplicateTransition(t));
            }
            let i = ts.transitions.len();
            ts.index.insert(t.clone(), i);
            ts.outgoing.entry(t.from.clone()).or_default().push(i);
            ts.actions.insert(t.action.clone());
            ts.transitions.push(t);
        }
        Ok(ts)
    }

    pub fn initial(&self) -> &str {
        &self.initial
    }

    pub fn states(&self) -> &BTreeSet<String> {
        &self.states
    }

    pub fn actions(&self) -> &BTreeSet<String> {
        &self.actions
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn index_of(&self, t: &Transition) -> Option<usize> {
        self.index.get(t).copied()
    }

    pub fn contains_transition(&self, t: &Transition) -> bool {
        self.index.contains_key(t)
    }

    /// Indices of the transitions leaving `state`, in construction order.
    pub fn outgoing(&self, state: &str) -> &[usize] {
        self.outgoing.get(state).map_or(&[], Vec::as_slice)
    }

    /// States reachable from the initial state (including it).
    pub fn reachable_states(&self) -> BTreeSet<String> {
        let mut seen = BTreeSet::from([self.initial.clone()]);
        let mut queue = VecDeque::from([self.initial.as_str()]);
        while let Some(s) = queue.pop_front() {
            for &i in self.outgoing(s) {
                let to = &self.transitions[i].to;
                if seen.insert(to.clone()) {
                    queue.push_back(to);
                }
            }
        }
        seen
    }

    /// The sub-system restricted to the given transition indices, optionally
    /// dropping states unreachable from the initial state.
    pub(crate) fn restrict(&self, keep: impl IntoIterator<Item = usize>, drop_unreachable: bool) -> TransitionSystem {
        let kept: Vec<Transition> = keep.into_iter().map(|i| self.transitions[i].clone()).collect();
        let full = TransitionSystem::new(self.initial.clone(), self.states.iter().cloned(), kept)
            .expect("restriction of a valid TS is valid");
        if !drop_unreachable {
            return full;
        }
        let live = full.reachable_states();
        let transitions = full.transitions.iter().filter(|t| live.contains(&t.from)).cloned();
        TransitionSystem::new(full.initial.clone(), live.iter().cloned(), transitions.collect::<Vec<_>>())
            .expect("reachable part of a valid TS is valid")
    }
}

/// `(S, Act, trans, i, d, gamma)`: a TS whose transitions carry feature expressions.
#[derive(Debug, Clone, PartialEq)]
pub struct FeaturedTransitionSystem {
    ts: TransitionSystem,
    diagram: FeatureDiagram,
    guards: Vec<FeatureExpr>,
}

impl FeaturedTransitionSystem {
    /// `guards[k]` labels `ts.transitions()[k]`; every guard variable must be a feature of `diagram`.
    pub fn new(
        ts: TransitionSystem,
        diagram: FeatureDiagram,
        guards: Vec<FeatureExpr>,
    ) -> Result<Self, ModelError> {
        if guards.len() != ts.transitions().len() {
            return Err(ModelError::Syntax(format!(
                "{} guards for {} transitions",
                guards.len(),
                ts.transitions().len()
            )));
        }
        for g in &guards {
            if let Some(v) = diagram.unknown_variable(g) {
                return Err(FeatureModelError::UnknownFeature(v.to_string()).into());
            }
        }
        Ok(FeaturedTransitionSystem { ts, diagram, guards })
    }

    pub fn ts(&self) -> &TransitionSystem {
        &self.ts
    }

    pub fn diagram(&self) -> &FeatureDiagram {
        &self.diagram
    }

    pub fn guard(&self, index: usize) -> &FeatureExpr {
        &self.guards[index]
    }

    pub fn guard_of(&self, t: &Transition) -> Option<&FeatureExpr> {
        self.ts.index_of(t).map(|i| &self.guards[i])
    }

    /// `(transition, guard)` pairs in construction order.
    pub fn featured_transitions(&self) -> impl Iterator<Item = (&Transition, &FeatureExpr)> {
        self.ts.transitions().iter().zip(&self.guards)
    }
}

/// A DTMC usage model: a TS with per-transition probabilities and an initial
/// distribution.
///
/// Construction only checks that values are probabilities; row sums and the
/// shape of the initial distribution are reported by [`UsageModel::check`].
#[derive(Debug, Clone, PartialEq)]
pub struct UsageModel {
    ts: TransitionSystem,
    probabilities: Vec<f64>,
    initial_distribution: BTreeMap<String, f64>,
}

impl UsageModel {
    pub fn new(
        ts: TransitionSystem,
        probabilities: Vec<f64>,
        initial_distribution: BTreeMap<String, f64>,
    ) -> Result<Self, ModelError> {
        if probabilities.len() != ts.transitions().len() {
            return Err(ModelError::Syntax(format!(
                "{} probabilities for {} transitions",
                probabilities.len(),
                ts.transitions().len()
            )));
        }
        for (t, &p) in ts.transitions().iter().zip(&probabilities) {
            if !(0.0..=1.0).contains(&p) {
                return Err(ModelError::InvalidProbability { transition: t.to_string(), value: p });
            }
        }
        for (s, &p) in &initial_distribution {
            if !ts.states().contains(s) {
                return Err(ModelError::UnknownState(s.clone()));
            }
            if !(0.0..=1.0).contains(&p) {
                return Err(ModelError::InvalidProbability { transition: format!("initial({s})"), value: p });
            }
        }
        Ok(UsageModel { ts, probabilities, initial_distribution })
    }

    /// Convenience constructor: the initial state gets probability 1.
    pub fn with_initial(ts: TransitionSystem, probabilities: Vec<f64>) -> Result<Self, ModelError> {
        let tau = BTreeMap::from([(ts.initial().to_string(), 1.0)]);
        Self::new(ts, probabilities, tau)
    }

    pub fn ts(&self) -> &TransitionSystem {
        &self.ts
    }

    pub fn initial(&self) -> &str {
        self.ts.initial()
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.probabilities[index]
    }

    pub fn probability_of(&self, t: &Transition) -> Option<f64> {
        self.ts.index_of(t).map(|i| self.probabilities[i])
    }

    /// tau(s); states absent from the document have probability 0.
    pub fn initial_probability(&self, state: &str) -> f64 {
        self.initial_distribution.get(state).copied().unwrap_or(0.0)
    }

    pub fn initial_distribution(&self) -> &BTreeMap<String, f64> {
        &self.initial_distribution
    }

    /// Derived `P(s, s')`: sum over the transitions from `s` to `s'`.
    pub fn state_probability(&self, from: &str, to: &str) -> f64 {
        self.ts
            .outgoing(from)
            .iter()
            .filter(|&&i| self.ts.transitions()[i].to == to)
            .map(|&i| self.probabilities[i])
            .sum()
    }

    /// Sum of outgoing probabilities per state that has outgoing transitions.
    pub fn row_sums(&self) -> BTreeMap<&str, f64> {
        self.ts
            .states()
            .iter()
            .filter(|s| !self.ts.outgoing(s).is_empty())
            .map(|s| (s.as_str(), self.ts.outgoing(s).iter().map(|&i| self.probabilities[i]).sum()))
            .collect()
    }

    /// Violations of the DTMC invariants: initial vector shape and row-stochasticity.
    pub fn check(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let ones: Vec<&String> =
            self.initial_distribution.iter().filter(|(_, &p)| p == 1.0).map(|(s, _)| s).collect();
        let others = self.initial_distribution.iter().any(|(_, &p)| p != 0.0 && p != 1.0);
        if ones.len() != 1 || others {
            out.push(Violation::new(
                ViolationCode::BadInitialVector,
                format!("initial distribution must give exactly one state probability 1, got {:?}", self.initial_distribution),
            ));
        } else if ones[0] != self.initial() {
            out.push(Violation::new(
                ViolationCode::InitialProbability,
                format!("initial state {} has probability {}", self.initial(), self.initial_probability(self.initial())),
            ));
        }
        for (state, sum) in self.row_sums() {
            if (sum - 1.0).abs() > STOCHASTIC_EPSILON {
                out.push(Violation::new(
                    ViolationCode::NotStochastic,
                    format!("outgoing probabilities of state {state} sum to {sum}"),
                ));
            }
        }
        out
    }
}

/// A sequence of action labels, with its execution probability once known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteTrace {
    pub actions: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probability: Option<f64>,
}

impl FiniteTrace {
    pub fn new<S: Into<String>>(actions: impl IntoIterator<Item = S>) -> Self {
        FiniteTrace { actions: actions.into_iter().map(Into::into).collect(), probability: None }
    }

    pub fn with_probability(mut self, p: f64) -> Self {
        self.probability = Some(p);
        self
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }
}

impl fmt::Display for FiniteTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.actions.join(", "))
    }
}

/// `fts|p`: transitions whose guard `p` satisfies. States unreachable from
/// the initial state are dropped.
pub fn project(fts: &FeaturedTransitionSystem, p: &Product) -> Result<TransitionSystem, ModelError> {
    project_with(fts, p, true)
}

pub fn project_with(
    fts: &FeaturedTransitionSystem,
    p: &Product,
    drop_unreachable: bool,
) -> Result<TransitionSystem, ModelError> {
    if !p.is_valid_for(fts.diagram()) {
        return Err(ModelError::InvalidProduct(p.clone()));
    }
    let keep = (0..fts.ts().transitions().len()).filter(|&i| fts.guard(i).evaluate(p));
    Ok(fts.ts().restrict(keep, drop_unreachable))
}

/// Whether some path from the initial state is labelled exactly by `t`.
pub fn execute_trace(ts: &TransitionSystem, t: &FiniteTrace) -> bool {
    let mut frontier = BTreeSet::from([ts.initial()]);
    for action in &t.actions {
        frontier = frontier
            .iter()
            .flat_map(|s| ts.outgoing(s))
            .map(|&i| &ts.transitions()[i])
            .filter(|tr| tr.action == *action)
            .map(|tr| tr.to.as_str())
            .collect();
        if frontier.is_empty() {
            return false;
        }
    }
    true
}

/// Product of transition probabilities along the most probable path from the
/// initial state labelled by `t`.
pub fn trace_probability(um: &UsageModel, t: &FiniteTrace) -> Result<f64, ModelError> {
    let ts = um.ts();
    let mut best: BTreeMap<&str, f64> = BTreeMap::from([(ts.initial(), 1.0)]);
    for action in &t.actions {
        let mut next: BTreeMap<&str, f64> = BTreeMap::new();
        for (&s, &p) in &best {
            for &i in ts.outgoing(s) {
                let tr = &ts.transitions()[i];
                if tr.action == *action {
                    let q = p * um.probability(i);
                    let slot = next.entry(tr.to.as_str()).or_insert(q);
                    if q > *slot {
                        *slot = q;
                    }
                }
            }
        }
        if next.is_empty() {
            return Err(ModelError::NoSuchPath(FiniteTrace::new(t.actions.iter().cloned())));
        }
        best = next;
    }
    Ok(best.values().copied().fold(0.0, f64::max))
}
