//! The two smallest finite periods: the massless bubble in D = 4 (exactly 1)
//! and the vacuum triangle in D = 6 (exactly 1/2).
//!
//!     cargo run --release --example bubble_period -- 1000000

use troquad::feynman::generate;
use troquad::{build_feynman_tables, estimate, FeynmanIntegrand, RunOptions, TableOptions};

fn main() -> troquad::Result<()> {
    let n = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1_000_000);
    for (g, exact) in [(generate::bubble(1.0), 1.0), (generate::triangle_d6(), 0.5)] {
        let table = build_feynman_tables(&g, &TableOptions::default())?;
        let f = FeynmanIntegrand::new(&g, &table, 0)?;
        let r = estimate(&table, &f, RunOptions::new(n, 1))?;
        println!(
            "{:<9} I_tr = {:.3}  I = {:.6} +- {:.1e}  (exact {exact}, {:.1} sigma)",
            g.name(),
            r.i_tr,
            r.estimate[0],
            r.std_error[0],
            (r.estimate[0] - exact) / r.std_error[0]
        );
    }
    Ok(())
}
