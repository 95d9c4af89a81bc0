//! JSON interchange for featured transition systems and usage models.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{FeaturedTransitionSystem, ModelError, Transition, TransitionSystem, UsageModel};
use crate::feature_model::{FeatureDiagram, FeatureExpr};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FtsDoc {
    initial: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    states: Option<Vec<String>>,
    transitions: Vec<GuardedDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GuardedDoc {
    from: String,
    action: String,
    to: String,
    #[serde(default = "default_guard")]
    guard: String,
}

fn default_guard() -> String {
    "TRUE".into()
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct UsageDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    initial: Option<String>,
    initial_prob: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    states: Option<Vec<String>>,
    transitions: Vec<WeightedDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightedDoc {
    from: String,
    action: String,
    to: String,
    p: f64,
}

/// Explicit state list, or every state mentioned anywhere when it is omitted.
fn state_list<'a>(
    explicit: Option<Vec<String>>,
    mentioned: impl Iterator<Item = &'a String>,
) -> Vec<String> {
    explicit.unwrap_or_else(|| mentioned.cloned().collect())
}

impl FeaturedTransitionSystem {
    /// Parses an FTS document; guards are checked against `diagram`.
    pub fn from_json(text: &str, diagram: FeatureDiagram) -> Result<Self, ModelError> {
        let doc: FtsDoc = serde_json::from_str(text).map_err(|e| ModelError::Syntax(e.to_string()))?;
        let states = state_list(
            doc.states,
            std::iter::once(&doc.initial).chain(doc.transitions.iter().flat_map(|t| [&t.from, &t.to])),
        );
        let guards = doc
            .transitions
            .iter()
            .map(|t| t.guard.parse::<FeatureExpr>())
            .collect::<Result<Vec<_>, _>>()?;
        let transitions = doc.transitions.into_iter().map(|t| Transition::new(t.from, t.action, t.to));
        let ts = TransitionSystem::new(doc.initial, states, transitions.collect::<Vec<_>>())?;
        FeaturedTransitionSystem::new(ts, diagram, guards)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let doc = FtsDoc {
            initial: self.ts.initial().to_string(),
            states: Some(self.ts.states().iter().cloned().collect()),
            transitions: self
                .featured_transitions()
                .map(|(t, g)| GuardedDoc {
                    from: t.from.clone(),
                    action: t.action.clone(),
                    to: t.to.clone(),
                    guard: g.to_string(),
                })
                .collect(),
        };
        serde_json::to_value(doc).expect("fts serializes")
    }
}

impl UsageModel {
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let doc: UsageDoc = serde_json::from_str(text).map_err(|e| ModelError::Syntax(e.to_string()))?;
        // the initial state is the explicit one, else the most probable start state
        let initial = match doc.initial {
            Some(i) => i,
            None => doc
                .initial_prob
                .iter()
                .fold(None::<(&String, f64)>, |best, (s, &p)| match best {
                    Some((_, bp)) if bp >= p => best,
                    _ => Some((s, p)),
                })
                .map(|(s, _)| s.clone())
                .ok_or_else(|| ModelError::Syntax("initialProb is empty".into()))?,
        };
        let states = state_list(
            doc.states,
            std::iter::once(&initial)
                .chain(doc.initial_prob.keys())
                .chain(doc.transitions.iter().flat_map(|t| [&t.from, &t.to])),
        );
        let probabilities = doc.transitions.iter().map(|t| t.p).collect();
        let transitions = doc.transitions.into_iter().map(|t| Transition::new(t.from, t.action, t.to));
        let ts = TransitionSystem::new(initial, states, transitions.collect::<Vec<_>>())?;
        UsageModel::new(ts, probabilities, doc.initial_prob)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let doc = UsageDoc {
            initial: Some(self.initial().to_string()),
            initial_prob: self.initial_distribution.clone(),
            states: Some(self.ts.states().iter().cloned().collect()),
            transitions: self
                .ts
                .transitions()
                .iter()
                .zip(&self.probabilities)
                .map(|(t, &p)| WeightedDoc { from: t.from.clone(), action: t.action.clone(), to: t.to.clone(), p })
                .collect(),
        };
        serde_json::to_value(doc).expect("usage model serializes")
    }
}
