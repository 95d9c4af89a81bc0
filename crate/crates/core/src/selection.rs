//! Probability-bounded extraction of finite traces from a usage model.
//!
//! A selected trace labels a path that leaves the initial state, returns to
//! it, and does not visit it in between. The search unrolls the usage model
//! depth-first from the initial state carrying the running path
//! probability; a branch ends when it re-enters the initial state or when
//! it would exceed the length bound.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::behavior::{FiniteTrace, UsageModel};
use crate::report::round_significant;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SelectionError {
    #[error("invalid selection parameters: {0}")]
    InvalidParams(String),
}

/// Length bound (in transitions) and inclusive probability interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionParams {
    pub max_length: usize,
    pub min_probability: f64,
    pub max_probability: f64,
}

impl SelectionParams {
    pub fn new(max_length: usize, min_probability: f64, max_probability: f64) -> Result<Self, SelectionError> {
        let params = SelectionParams { max_length, min_probability, max_probability };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), SelectionError> {
        if self.max_length < 1 {
            return Err(SelectionError::InvalidParams("maximum length must be at least 1".into()));
        }
        let (lo, hi) = (self.min_probability, self.max_probability);
        if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
            return Err(SelectionError::InvalidParams(format!(
                "need 0 <= pr_min <= pr_max <= 1, got [{lo}, {hi}]"
            )));
        }
        Ok(())
    }

    pub fn admits(&self, probability: f64) -> bool {
        self.min_probability <= probability && probability <= self.max_probability
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelectOptions {
    /// Abandon branches whose running probability already fell below `pr_min`.
    pub prune: bool,
    pub audit: bool,
}

impl Default for SelectOptions {
    fn default() -> Self {
        SelectOptions { prune: true, audit: false }
    }
}

/// Traces without duplicate action sequences, ordered lexicographically by actions.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TraceSet {
    traces: Vec<FiniteTrace>,
}

impl TraceSet {
    /// Sorts and keeps the first occurrence of each action sequence.
    pub fn from_traces(traces: impl IntoIterator<Item = FiniteTrace>) -> Self {
        let mut traces: Vec<FiniteTrace> = traces.into_iter().collect();
        traces.sort_by(|a, b| a.actions.cmp(&b.actions));
        traces.dedup_by(|a, b| a.actions == b.actions);
        TraceSet { traces }
    }

    pub fn iter(&self) -> std::slice::Iter<'_, FiniteTrace> {
        self.traces.iter()
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    pub fn get(&self, actions: &[&str]) -> Option<&FiniteTrace> {
        self.traces.iter().find(|t| t.actions.iter().map(String::as_str).eq(actions.iter().copied()))
    }

    pub fn contains(&self, actions: &[&str]) -> bool {
        self.get(actions).is_some()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(self.traces.iter().map(trace_json).collect())
    }
}

impl<'a> IntoIterator for &'a TraceSet {
    type Item = &'a FiniteTrace;
    type IntoIter = std::slice::Iter<'a, FiniteTrace>;

    fn into_iter(self) -> Self::IntoIter {
        self.traces.iter()
    }
}

pub(crate) fn trace_json(t: &FiniteTrace) -> serde_json::Value {
    let mut v = serde_json::json!({ "trace": t.actions });
    if let Some(p) = t.probability {
        v["probability"] = serde_json::json!(round_significant(p));
    }
    v
}

/// Counters and rejections observed during one search.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SelectionAudit {
    /// Branches cut because their running probability fell below `pr_min`.
    pub pruned_branches: usize,
    /// Branches cut by the length bound.
    pub depth_cutoffs: usize,
    /// Completed cycles whose probability lies outside the interval.
    #[serde(skip)]
    pub rejected: Vec<FiniteTrace>,
}

impl SelectionAudit {
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("audit serializes");
        v["rejected"] = self
            .rejected
            .iter()
            .map(|t| {
                let mut j = trace_json(t);
                j["reason"] = "interval".into();
                j
            })
            .collect();
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub traces: TraceSet,
    pub audit: Option<SelectionAudit>,
}

/// Selected i-to-i traces with default options (pruning on, no audit).
pub fn dfs_select(um: &UsageModel, params: &SelectionParams) -> Result<TraceSet, SelectionError> {
    Ok(dfs_select_with(um, params, SelectOptions::default())?.traces)
}

pub fn dfs_select_with(
    um: &UsageModel,
    params: &SelectionParams,
    options: SelectOptions,
) -> Result<Selection, SelectionError> {
    params.validate()?;
    let mut search = Search { um, params, options, completed: BTreeMap::new(), audit: SelectionAudit::default(), path: Vec::new() };
    search.explore(um.initial(), 1.0);

    let mut selected = Vec::new();
    let mut rejected = Vec::new();
    for (actions, p) in search.completed {
        let trace = FiniteTrace::new(actions).with_probability(p);
        if params.admits(p) {
            selected.push(trace);
        } else {
            rejected.push(trace);
        }
    }
    search.audit.rejected = rejected;
    Ok(Selection { traces: TraceSet::from_traces(selected), audit: options.audit.then_some(search.audit) })
}

struct Search<'a> {
    um: &'a UsageModel,
    params: &'a SelectionParams,
    options: SelectOptions,
    /// action sequence -> best probability over the cycles it labels
    completed: BTreeMap<Vec<String>, f64>,
    audit: SelectionAudit,
    path: Vec<String>,
}

impl Search<'_> {
    fn explore(&mut self, state: &str, probability: f64) {
        let ts = self.um.ts();
        for &i in ts.outgoing(state) {
            let t = &ts.transitions()[i];
            if self.path.len() + 1 > self.params.max_length {
                self.audit.depth_cutoffs += 1;
                continue;
            }
            let p = probability * self.um.probability(i);
            if self.options.prune && p < self.params.min_probability {
                self.audit.pruned_branches += 1;
                continue;
            }
            self.path.push(t.action.clone());
            if t.to == ts.initial() {
                let slot = self.completed.entry(self.path.clone()).or_insert(p);
                if p > *slot {
                    *slot = p;
                }
            } else {
                self.explore(&t.to, p);
            }
            self.path.pop();
        }
    }
}
