//! The soda vending machine product line, bundled as JSON documents.
//!
//! Nine features (`v` root; `b` and `cur` mandatory; `s`, `t` optional
//! beverages; `eur`/`usd` alternative currencies; `c` cancel and `f` free
//! optional), a nine-state FTS and a usage model that never exercises soda.

use std::path::PathBuf;

use crate::behavior::{FeaturedTransitionSystem, UsageModel};
use crate::feature_model::FeatureDiagram;

pub const FEATURE_DIAGRAM_JSON: &str = include_str!("../fixtures/vending-machine/fd.json");
pub const FTS_JSON: &str = include_str!("../fixtures/vending-machine/fts.json");
pub const USAGE_MODEL_JSON: &str = include_str!("../fixtures/vending-machine/um.json");

#[derive(Debug, Clone)]
pub struct VendingMachine {
    pub diagram: FeatureDiagram,
    pub fts: FeaturedTransitionSystem,
    pub usage: UsageModel,
}

pub fn vending_machine() -> VendingMachine {
    let diagram = FeatureDiagram::from_json(FEATURE_DIAGRAM_JSON).expect("bundled diagram parses");
    let fts = FeaturedTransitionSystem::from_json(FTS_JSON, diagram.clone()).expect("bundled FTS parses");
    let usage = UsageModel::from_json(USAGE_MODEL_JSON).expect("bundled usage model parses");
    VendingMachine { diagram, fts, usage }
}

/// On-disk location of the bundled documents, for file-based tools.
pub fn vending_machine_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join("vending-machine")
}
