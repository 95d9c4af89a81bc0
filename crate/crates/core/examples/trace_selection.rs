//! Extracts i-to-i traces within a probability interval and shows what the
//! search discarded.
//!
//!     cargo run --example trace_selection [LMAX] [PMIN] [PMAX]

use splprio::fixtures::vending_machine;
use splprio::selection::{dfs_select_with, SelectOptions};
use splprio::report::round_significant;
use splprio::SelectionParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let lmax = args.next().map(|a| a.parse()).transpose()?.unwrap_or(7);
    let pmin = args.next().map(|a| a.parse()).transpose()?.unwrap_or(0.0);
    let pmax = args.next().map(|a| a.parse()).transpose()?.unwrap_or(0.1);

    let um = vending_machine().usage;
    let params = SelectionParams::new(lmax, pmin, pmax)?;
    let sel = dfs_select_with(&um, &params, SelectOptions { audit: true, ..Default::default() })?;

    println!("{} traces with lmax {lmax} and probability in [{pmin}, {pmax}]:", sel.traces.len());
    for t in &sel.traces {
        println!("  {:<12} {t}", round_significant(t.probability.unwrap()));
    }
    let audit = sel.audit.unwrap();
    println!("{} branches pruned below pmin, {} cut at lmax", audit.pruned_branches, audit.depth_cutoffs);
    for t in &audit.rejected {
        println!("  outside the interval: {t} ({})", round_significant(t.probability.unwrap()));
    }
    Ok(())
}
