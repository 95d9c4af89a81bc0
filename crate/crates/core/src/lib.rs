//! Usage-model driven test prioritization for software product lines.
//!
//! Three models describe a product line: a [`FeatureDiagram`] whose valid
//! products are the family members, a [`FeaturedTransitionSystem`] giving
//! the behaviour of every member at once, and a [`UsageModel`] (a DTMC over
//! part of that behaviour) saying how likely each step is in practice.
//!
//! The family-based pipeline extracts probability-bounded cycles from the
//! usage model ([`dfs_select`]), drops those no product can execute and
//! builds the pruned FTS ([`build_fts_prime`]), then computes which products
//! execute each remaining trace and ranks them by probability
//! ([`prioritize`]). The product-based route projects the FTS onto one
//! product, prunes the usage model accordingly and draws statistical test
//! cases from it ([`prune_usage_model`], [`generate_tests`]).

pub mod behavior;
pub mod cli;
pub mod derivation;
pub mod family;
pub mod feature_model;
pub mod fixtures;
pub mod report;
pub mod selection;

pub use behavior::{
    execute_trace, project, trace_probability, validate_triple, FeaturedTransitionSystem, FiniteTrace,
    ModelError, Transition, TransitionSystem, UsageModel, ValidationReport,
};
pub use derivation::{generate_tests, prune_usage_model, GenerationParams, TestSuite};
pub use family::{accept, build_fts_prime, prioritize, products_for_trace, Order, PrioritizedReport, PrunedFts};
pub use feature_model::{
    boolean_form, enumerate_products, sat_products, FeatureDiagram, FeatureExpr, FeatureModelError, Product,
};
pub use selection::{dfs_select, SelectionParams, TraceSet};
