//! Brute-force reference computations shared by the integration tests.
//! None of these go through the search, SAT or projection code they check.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use splprio::feature_model::GroupKind;
use splprio::{FeatureDiagram, FeatureExpr, FeaturedTransitionSystem, Product, UsageModel};

/// Valid products by truth table over the structural rules of the diagram.
pub fn products(d: &FeatureDiagram) -> BTreeSet<Product> {
    let names = d.features();
    let mut out = BTreeSet::new();
    for mask in 0u64..(1 << names.len()) {
        let p: Product = names.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, n)| n.clone()).collect();
        let sel = |f: &str| p.contains(f);
        let ok = sel(d.root())
            && names.iter().skip(1).all(|f| !sel(f) || sel(d.parent(f).unwrap()))
            && d.groups().iter().all(|g| {
                let n = g.members.iter().filter(|m| sel(m)).count();
                !sel(&g.parent)
                    || match g.kind {
                        GroupKind::Mandatory => n == g.members.len(),
                        GroupKind::Optional => true,
                        GroupKind::Or => n >= 1,
                        GroupKind::Xor => n == 1,
                    }
            })
            && d.constraints().iter().all(|c| c.evaluate(&p));
        if ok {
            out.insert(p);
        }
    }
    out
}

/// i-to-i cycles of length <= `max_len` with their best probability, by
/// level-wise enumeration of every walk.
pub fn cycles(um: &UsageModel, max_len: usize) -> BTreeMap<Vec<String>, f64> {
    let ts = um.ts();
    let init = ts.initial().to_string();
    let mut level = vec![(init.clone(), Vec::<String>::new(), 1.0f64, false)];
    let mut best: BTreeMap<Vec<String>, f64> = BTreeMap::new();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (state, labels, p, interior) in &level {
            for (k, t) in ts.transitions().iter().enumerate() {
                if t.from != *state {
                    continue;
                }
                let mut l = labels.clone();
                l.push(t.action.clone());
                let q = p * um.probability(k);
                if t.to == init && !interior {
                    let e = best.entry(l.clone()).or_insert(q);
                    *e = e.max(q);
                }
                next.push((t.to.clone(), l, q, *interior || t.to == init));
            }
        }
        level = next;
    }
    best
}

/// Whether product `p` can run `actions` from the initial state of the full FTS.
pub fn runs(fts: &FeaturedTransitionSystem, p: &Product, actions: &[String]) -> bool {
    fn go(fts: &FeaturedTransitionSystem, p: &Product, state: &str, rest: &[String]) -> bool {
        let Some((head, tail)) = rest.split_first() else { return true };
        fts.featured_transitions()
            .filter(|(t, g)| t.from == state && t.action == *head && g.evaluate(p))
            .any(|(t, _)| go(fts, p, &t.to, tail))
    }
    go(fts, p, fts.ts().initial(), actions)
}

/// Label sequences of all FTS walks of length <= `max`, plus every one-action
/// extension of the shorter ones (covering non-executable sequences).
pub fn candidate_traces(fts: &FeaturedTransitionSystem, max: usize) -> BTreeSet<Vec<String>> {
    let mut walks = BTreeSet::new();
    let mut stack = vec![(fts.ts().initial().to_string(), Vec::<String>::new())];
    while let Some((s, path)) = stack.pop() {
        walks.insert(path.clone());
        if path.len() == max {
            continue;
        }
        for t in fts.ts().transitions().iter().filter(|t| t.from == s) {
            let mut n = path.clone();
            n.push(t.action.clone());
            stack.push((t.to.clone(), n));
        }
    }
    let mut out = walks.clone();
    for w in walks.iter().filter(|w| w.len() < max) {
        for a in fts.ts().actions() {
            let mut n = w.clone();
            n.push(a.clone());
            out.insert(n);
        }
    }
    out
}

/// Conjunctions of two literals over the diagram's features, plus TRUE.
pub fn literal_pairs(d: &FeatureDiagram) -> Vec<FeatureExpr> {
    let lits: Vec<FeatureExpr> = d
        .features()
        .iter()
        .flat_map(|f| [FeatureExpr::var(f), FeatureExpr::var(f).negate()])
        .collect();
    let mut out = vec![FeatureExpr::True];
    for (i, a) in lits.iter().enumerate() {
        for b in &lits[i..] {
            out.push(FeatureExpr::and([a.clone(), b.clone()]));
        }
    }
    out
}
