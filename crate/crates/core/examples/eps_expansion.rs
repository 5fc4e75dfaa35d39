//! Coefficients of the expansion around D = 4 - 2 eps of the massless bubble,
//! all from one set of samples. The order 1 coefficient is 2.
//!
//!     cargo run --release --example eps_expansion -- 3

use troquad::feynman::generate;
use troquad::{build_feynman_tables, estimate, FeynmanIntegrand, RunOptions, TableOptions};

fn main() -> troquad::Result<()> {
    let order = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let g = generate::bubble(1.0);
    let table = build_feynman_tables(&g, &TableOptions::default())?;
    let f = FeynmanIntegrand::new(&g, &table, order)?;
    let r = estimate(&table, &f, RunOptions::new(2_000_000, 3))?;
    for (k, (v, e)) in r.estimate.iter().zip(&r.std_error).enumerate() {
        println!("eps^{k}: {v:>10.5} +- {e:.1e}");
    }
    Ok(())
}
