//! Builds a small feature diagram in code, then queries the bundled one.
//!
//!     cargo run --example feature_model

use splprio::fixtures::vending_machine;
use splprio::{boolean_form, enumerate_products, sat_products, FeatureDiagram, FeatureExpr};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let phone = FeatureDiagram::builder("phone")
        .mandatory("phone", "screen")
        .xor_group("screen", &["basic", "hd"])
        .optional("phone", "camera")
        .or_group("phone", &["gps", "wifi"])
        .constraint("!camera || hd".parse()?)
        .build()?;
    println!("phone diagram as a formula:\n  {}", boolean_form(&phone));
    for p in enumerate_products(&phone)? {
        println!("  {p}");
    }

    let vm = vending_machine();
    println!("\nvending machine: {} products", enumerate_products(&vm.diagram)?.len());
    for query in ["!f && t", "f && c", "s && usd"] {
        let e: FeatureExpr = query.parse()?;
        let matching = sat_products(&vm.diagram, &e)?;
        println!("  {query}: {} products, e.g. {}", matching.len(), matching.iter().next().unwrap());
    }
    Ok(())
}
