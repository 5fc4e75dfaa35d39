//! The sampler is not tied to Feynman graphs: any positive table `r(A)` over
//! subsets defines a tropical measure that can be sampled, and any closure
//! can be integrated against it.
//!
//! With `r(A) = |A|` every ordering chamber has weight `1/(n-1)!`, so the
//! normalization is `n`.
//!
//!     cargo run --release --example custom_integrand

use troquad::permutahedron::check_supermodular;
use troquad::{estimate, BooleanTable, RunOptions, ScalarFn, SubsetTable, TableOptions, TropicalSample};

fn main() -> troquad::Result<()> {
    let n = 5;
    let r = BooleanTable::from_fn(n, |m| f64::from(m.count_ones()))?;
    let table = SubsetTable::build(&r, &TableOptions::default())?;
    println!("normalization {} (expected {n})", table.itr());

    // Z(A) = |A|(|A|+1)/2 is the support function of the permutahedron itself.
    let z = BooleanTable::from_fn(n, |m| f64::from(m.count_ones() * (m.count_ones() + 1)) / 2.0)?;
    println!("supermodular: {}", check_supermodular(&z, 0, 0).passed());

    // Ratio of the sum to the largest coordinate, a bounded function.
    let f = ScalarFn(|s: &TropicalSample| {
        let m = s.log_x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Some(s.log_x.iter().map(|y| (y - m).exp()).sum::<f64>())
    });
    let rep = estimate(&table, &f, RunOptions::new(500_000, 4))?;
    println!("int = {:.5} +- {:.1e}", rep.estimate[0], rep.std_error[0]);
    Ok(())
}
