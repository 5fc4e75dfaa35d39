//! Hepp bounds, i.e. the normalization of the tropical measure, computed by
//! the subset recursion in O(E 2^E) and checked against the sum over all
//! orderings of the edges for small graphs.
//!
//!     cargo run --release --example hepp_bound

use troquad::feynman::generate;
use troquad::sector::next_permutation;
use troquad::{build_feynman_tables, FeynmanGraph, TableOptions};

fn by_orderings(g: &FeynmanGraph) -> f64 {
    let n = g.num_edges();
    let mut sigma: Vec<usize> = (0..n).collect();
    let mut total = 0.0;
    loop {
        let mut mask = 0u64;
        total += sigma[..n - 1]
            .iter()
            .map(|&e| {
                mask |= 1 << e;
                1.0 / g.r_of(mask)
            })
            .product::<f64>();
        if !next_permutation(&mut sigma) {
            return total;
        }
    }
}

fn main() -> troquad::Result<()> {
    for k in 3..=7 {
        let g = generate::wheel(k);
        let t = build_feynman_tables(&g, &TableOptions::default())?;
        let check = if g.num_edges() <= 10 {
            format!("{:.6}", by_orderings(&g))
        } else {
            "-".into()
        };
        println!("{:<3} E={:<2} Hepp bound {:>14.6}  by orderings {check}", g.name(), g.num_edges(), t.itr());
    }
    let g = generate::eight_loop();
    let t = build_feynman_tables(&g, &TableOptions::default())?;
    println!("{:<3} E={:<2} Hepp bound {:>14.6}", g.name(), g.num_edges(), t.itr());
    Ok(())
}
