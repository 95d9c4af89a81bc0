//! Loads a feature diagram, FTS and usage model and checks that they fit
//! together. With no argument the bundled vending machine is used.
//!
//!     cargo run --example validate_models [DIR]

use std::path::PathBuf;

use splprio::fixtures::vending_machine_dir;
use splprio::{validate_triple, FeatureDiagram, FeaturedTransitionSystem, UsageModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(vending_machine_dir);
    let read = |f: &str| std::fs::read_to_string(dir.join(f));
    let diagram = FeatureDiagram::from_json(&read("fd.json")?)?;
    let fts = FeaturedTransitionSystem::from_json(&read("fts.json")?, diagram.clone())?;
    let um = UsageModel::from_json(&read("um.json")?)?;

    println!("{} features, {} FTS transitions, {} usage transitions", diagram.features().len(), fts.ts().transitions().len(), um.ts().transitions().len());
    for (state, sum) in um.row_sums() {
        println!("  row {state}: {sum}");
    }
    let report = validate_triple(&diagram, &fts, &um);
    if report.valid {
        println!("valid");
    }
    for v in &report.violations {
        println!("{}: {}", v.code, v.detail);
    }
    Ok(())
}
