//! Product-based derivation: project the FTS onto one product, fit the usage
//! model to it and draw seeded random walks.
//!
//!     cargo run --example product_tests [PRODUCT] [SEED]

use std::collections::BTreeMap;

use splprio::derivation::{generate_tests, prune_usage_model, GenerationParams};
use splprio::fixtures::vending_machine;
use splprio::{project, Product};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let product = Product::from_list(&args.next().unwrap_or_else(|| "v,b,cur,t,c,eur,f".into()));
    let seed = args.next().map(|a| a.parse()).transpose()?.unwrap_or(42);

    let vm = vending_machine();
    let ts = project(&vm.fts, &product)?;
    let um = prune_usage_model(&vm.usage, &ts)?;
    println!("usage model fitted to {product}:");
    for (i, t) in um.ts().transitions().iter().enumerate() {
        println!("  {t}  p={}", um.probability(i));
    }

    let suite = generate_tests(&um, GenerationParams::new(1000, 20), seed)?;
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for case in &suite.cases {
        *counts.entry(case.trace.to_string()).or_default() += 1;
    }
    println!("\n{} walks with seed {seed} ({} partial):", suite.params.count, suite.partial_walks);
    for (trace, n) in counts {
        println!("  {n:>5}  {trace}");
    }
    Ok(())
}
