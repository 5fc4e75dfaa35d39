//! The complete graph on four vertices has period 6 zeta(3). Multi-worker
//! runs are deterministic for a fixed `(seed, workers)`.
//!
//!     cargo run --release --example k4_period -- 10000000 4

use troquad::feynman::generate;
use troquad::{build_feynman_tables, estimate, FeynmanIntegrand, RunOptions, TableOptions};

const SIX_ZETA3: f64 = 7.212_341_418_957_565;

fn main() -> troquad::Result<()> {
    let mut args = std::env::args().skip(1);
    let n = args.next().and_then(|s| s.parse().ok()).unwrap_or(10_000_000);
    let workers = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let g = generate::wheel3();
    let table = build_feynman_tables(&g, &TableOptions::default())?;
    let f = FeynmanIntegrand::new(&g, &table, 0)?;
    let r = estimate(&table, &f, RunOptions::new(n, 7).workers(workers))?;
    println!("Hepp bound  {}", r.i_tr);
    println!("estimate    {:.6} +- {:.1e}", r.estimate[0], r.std_error[0]);
    println!("6 zeta(3)   {SIX_ZETA3:.6}");
    println!("sigma/I     {:.3}", r.sigma_over_i);
    println!("{:.3e} samples/s on {workers} worker(s)", r.samples_per_second);
    Ok(())
}
