use std::fmt;

use serde::Serialize;

use super::{FeaturedTransitionSystem, UsageModel};
use crate::feature_model::FeatureDiagram;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationCode {
    /// The FTS is not defined over the given diagram.
    FdMismatch,
    StateNotSubset,
    ActNotSubset,
    TransNotSubset,
    /// The FTS initial state does not start with probability 1.
    #[serde(rename = "INITIAL_PROB")]
    InitialProbability,
    /// The initial distribution is not a point mass.
    #[serde(rename = "BAD_TAU")]
    BadInitialVector,
    NotStochastic,
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("code serializes");
        f.write_str(s.as_str().expect("code is a string"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub detail: String,
}

impl Violation {
    pub fn new(code: ViolationCode, detail: impl Into<String>) -> Self {
        Violation { code, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn from_violations(violations: Vec<Violation>) -> Self {
        ValidationReport { valid: violations.is_empty(), violations }
    }

    pub fn has(&self, code: ViolationCode) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }
}

/// Checks the cross-model constraints between a diagram, an FTS and a usage
/// model, plus the usage model's own DTMC invariants. Every violation is reported.
pub fn validate_triple(d: &FeatureDiagram, fts: &FeaturedTransitionSystem, um: &UsageModel) -> ValidationReport {
    let mut out = Vec::new();
    if fts.diagram() != d {
        out.push(Violation::new(ViolationCode::FdMismatch, "the FTS is defined over a different feature diagram"));
    }
    let (big, small) = (fts.ts(), um.ts());
    for s in small.states().difference(big.states()) {
        out.push(Violation::new(ViolationCode::StateNotSubset, format!("state {s} is not in the FTS")));
    }
    for a in small.actions().difference(big.actions()) {
        out.push(Violation::new(ViolationCode::ActNotSubset, format!("action {a} is not in the FTS")));
    }
    for t in small.transitions().iter().filter(|t| !big.contains_transition(t)) {
        out.push(Violation::new(ViolationCode::TransNotSubset, format!("transition {t} is not in the FTS")));
    }
    let mut own = um.check();
    // a badly shaped vector is reported once; otherwise tie tau to the FTS initial state
    if !own.iter().any(|v| v.code == ViolationCode::BadInitialVector) {
        own.retain(|v| v.code != ViolationCode::InitialProbability);
        let tau = um.initial_probability(big.initial());
        if tau != 1.0 {
            own.insert(
                0,
                Violation::new(
                    ViolationCode::InitialProbability,
                    format!("FTS initial state {} has initial probability {tau}", big.initial()),
                ),
            );
        }
    }
    out.extend(own);
    ValidationReport::from_violations(out)
}
