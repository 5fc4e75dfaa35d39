//! The same integral estimated two ways: drawing the ordering chamber from
//! the subset recursion, and sampling every chamber separately with its own
//! fixed share of the budget. Both are unbiased; the errors differ.
//!
//!     cargo run --release --example stratified_vs_tropical

use troquad::feynman::generate;
use troquad::sector::estimate_per_sector;
use troquad::{build_feynman_tables, estimate, FeynmanIntegrand, RunOptions, SectorTable, TableOptions};

fn main() -> troquad::Result<()> {
    let n = 1_000_000;
    for g in [generate::triangle_d6(), generate::wheel3()] {
        let table = build_feynman_tables(&g, &TableOptions::default())?;
        let f = FeynmanIntegrand::new(&g, &table, 0)?;
        let chambers = SectorTable::braid(g.num_edges(), |m| table.r(m))?;
        let direct = estimate(&table, &f, RunOptions::new(n, 1))?;
        let per = estimate_per_sector(&chambers, &f, n / chambers.len() as u64, 2, 1e-6)?;
        println!(
            "{:<9} {:>5} chambers  subset sampler {:.5} +- {:.1e}  per chamber {:.5} +- {:.1e}",
            g.name(),
            chambers.len(),
            direct.estimate[0],
            direct.std_error[0],
            per.report.estimate[0],
            per.report.std_error[0]
        );
    }
    Ok(())
}
