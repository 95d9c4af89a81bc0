//! The family-based pipeline: select traces from the usage model, keep the
//! ones some product can run, and rank them with the products that run them.
//!
//!     cargo run --example family_prioritization

use splprio::fixtures::vending_machine;
use splprio::report::round_significant;
use splprio::{build_fts_prime, dfs_select, prioritize, Order, SelectionParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let vm = vending_machine();
    let traces = dfs_select(&vm.usage, &SelectionParams::new(7, 0.0, 0.1)?)?;
    let (prime, kept) = build_fts_prime(&vm.fts, &traces);

    for t in &traces {
        if kept.get(&t.actions.iter().map(String::as_str).collect::<Vec<_>>()).is_none() {
            println!("no product runs {t}");
        }
    }
    println!("pruned FTS keeps {} of {} transitions:", prime.fts().ts().transitions().len(), vm.fts.ts().transitions().len());
    for (t, guard) in prime.fts().featured_transitions() {
        println!("  {t}  [{guard}]");
    }

    let report = prioritize(&prime, &kept, Order::Desc)?;
    println!("\nmost probable first:");
    for e in &report.entries {
        println!("  {:<6} {}  under {} ({} products)", round_significant(e.probability), e.trace, e.guard, e.products.len());
        for p in &e.products {
            println!("           {p}");
        }
    }
    Ok(())
}
