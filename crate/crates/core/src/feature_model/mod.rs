//! Feature diagrams, feature expressions and product-set queries.

mod diagram;
mod expr;
mod sat;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use diagram::{DiagramBuilder, FeatureDiagram, Group, GroupKind};
pub use expr::FeatureExpr;
pub use sat::SatOracle;

/// Exhaustive enumeration refuses diagrams with more features than this.
pub const DEFAULT_ENUMERATION_CAP: usize = 30;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeatureModelError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("duplicate feature `{0}`")]
    DuplicateFeature(String),
    #[error("not a tree: {0}")]
    NotATree(String),
    #[error("diagram has {features} features, above the enumeration cap of {cap}")]
    TooLarge { features: usize, cap: usize },
}

/// A set of selected features. Ordered and serialized as a sorted name list.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Product(BTreeSet<String>);

impl Product {
    pub fn contains(&self, feature: &str) -> bool {
        self.0.contains(feature)
    }

    pub fn features(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Parses a comma-separated feature list such as `v,b,cur,t`.
    pub fn from_list(list: &str) -> Self {
        list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
    }

    /// True iff every selected feature exists in `d` and the product satisfies `boolean_form(d)`.
    pub fn is_valid_for(&self, d: &FeatureDiagram) -> bool {
        self.features().all(|f| d.contains(f)) && boolean_form(d).evaluate(self)
    }
}

impl<S: Into<String>> FromIterator<S> for Product {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Product(iter.into_iter().map(Into::into).collect())
    }
}

impl fmt::Display for Product {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, name) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(name)?;
        }
        f.write_str("}")
    }
}

/// Propositional encoding of a diagram: its models are exactly the valid products.
///
/// Conjuncts, in order: the root, `child -> parent` for every non-root
/// feature, one clause set per group, then the cross-tree constraints.
pub fn boolean_form(d: &FeatureDiagram) -> FeatureExpr {
    use FeatureExpr as E;
    let mut parts = vec![E::var(d.root())];
    for f in d.features().iter().skip(1) {
        let parent = d.parent(f).expect("non-root feature has a parent");
        parts.push(E::implies(E::var(f), E::var(parent)));
    }
    for g in d.groups() {
        let parent = E::var(&g.parent);
        let members = || g.members.iter().map(E::var);
        match g.kind {
            GroupKind::Optional => {}
            GroupKind::Mandatory => {
                for m in members() {
                    parts.push(E::implies(parent.clone(), m));
                }
            }
            GroupKind::Or => parts.push(E::implies(parent, E::or(members()))),
            GroupKind::Xor => {
                let mut exactly_one = vec![E::or(members())];
                for (i, a) in g.members.iter().enumerate() {
                    for b in &g.members[i + 1..] {
                        exactly_one.push(E::and([E::var(a), E::var(b)]).negate());
                    }
                }
                parts.push(E::implies(parent, E::and(exactly_one)));
            }
        }
    }
    parts.extend(d.constraints().iter().cloned());
    E::And(parts)
}

/// Every valid product of `d`, refusing diagrams above [`DEFAULT_ENUMERATION_CAP`] features.
pub fn enumerate_products(d: &FeatureDiagram) -> Result<BTreeSet<Product>, FeatureModelError> {
    enumerate_products_capped(d, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_products_capped(
    d: &FeatureDiagram,
    cap: usize,
) -> Result<BTreeSet<Product>, FeatureModelError> {
    if d.features().len() > cap {
        return Err(FeatureModelError::TooLarge { features: d.features().len(), cap });
    }
    SatOracle::new(d).products(&FeatureExpr::True)
}

/// `{ p in [[d]] | p satisfies e }`, by all-solutions SAT over `boolean_form(d) && e`.
pub fn sat_products(d: &FeatureDiagram, e: &FeatureExpr) -> Result<BTreeSet<Product>, FeatureModelError> {
    if let Some(v) = d.unknown_variable(e) {
        return Err(FeatureModelError::UnknownFeature(v.to_string()));
    }
    SatOracle::new(d).products(e)
}
