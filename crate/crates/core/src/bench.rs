//! Scaling benchmark over random phi^4 period graphs.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feynman::{build_feynman_tables, generate, FeynmanIntegrand};
use crate::mc::{estimate, RunOptions};
use crate::permutahedron::{check_size_for, file_bytes, TableOptions};
use crate::rng::RandomStream;

/// Published per-sample relative deviations `sigma_I / I` for phi^4 period
/// graphs, by edge count. The graphs behind them are not known, so these are
/// only a trend reference.
pub const REFERENCE_SIGMA_OVER_I: [(usize, f64); 15] = [
    (6, 0.9),
    (8, 1.1),
    (10, 1.3),
    (12, 1.6),
    (14, 1.8),
    (16, 2.1),
    (18, 2.5),
    (20, 2.8),
    (22, 3.2),
    (24, 3.7),
    (26, 4.2),
    (28, 4.8),
    (30, 5.3),
    (32, 6.3),
    (34, 7.2),
];

pub fn reference_sigma_over_i(edges: usize) -> Option<f64> {
    REFERENCE_SIGMA_OVER_I.iter().find(|(e, _)| *e == edges).map(|(_, s)| *s)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchRow {
    pub edges: usize,
    pub loops: u32,
    pub graph: Vec<(usize, usize)>,
    pub hepp_bound: f64,
    pub estimate: f64,
    pub std_error: f64,
    #[serde(rename = "sigma_over_I")]
    pub sigma_over_i: f64,
    #[serde(rename = "reference_sigma_over_I")]
    pub reference_sigma_over_i: Option<f64>,
    pub samples_per_second: f64,
    pub seconds_preprocess: f64,
    pub table_bytes: u128,
    /// Set when the row was skipped.
    pub note: Option<String>,
}

/// One row: draw a convergent phi^4 graph with `edges` edges, build its
/// table and run `samples` single-worker samples. Rows over the memory cap
/// come back with a note instead of numbers.
pub fn bench_row(edges: usize, samples: u64, seed: u64, opts: &TableOptions) -> Result<BenchRow> {
    let mut row = BenchRow {
        edges,
        loops: (edges / 2) as u32,
        graph: Vec::new(),
        hepp_bound: f64::NAN,
        estimate: f64::NAN,
        std_error: f64::NAN,
        sigma_over_i: f64::NAN,
        reference_sigma_over_i: reference_sigma_over_i(edges),
        samples_per_second: f64::NAN,
        seconds_preprocess: f64::NAN,
        table_bytes: file_bytes(edges),
        note: None,
    };
    if let Err(e @ Error::MemoryLimit { .. }) = check_size_for(edges, opts) {
        row.note = Some(format!("skipped: {e}"));
        return Ok(row);
    }
    let mut rng = RandomStream::new(seed, edges as u64);
    let g = generate::random_phi4(edges, &mut rng, 100_000)?;
    row.graph = g.edges().to_vec();
    row.loops = g.loops();

    let start = Instant::now();
    let table = build_feynman_tables(&g, opts)?;
    row.seconds_preprocess = start.elapsed().as_secs_f64();
    row.hepp_bound = table.itr();
    row.table_bytes = table.file_bytes();

    let f = FeynmanIntegrand::new(&g, &table, 0)?;
    let rep = estimate(&table, &f, RunOptions::new(samples, seed))?;
    row.estimate = rep.estimate[0];
    row.std_error = rep.std_error[0];
    row.sigma_over_i = rep.sigma_over_i;
    row.samples_per_second = rep.samples_per_second;
    Ok(row)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_row() {
        let row = bench_row(6, 20_000, 1, &TableOptions::default()).unwrap();
        assert_eq!(row.table_bytes, 1536);
        assert_eq!(row.loops, 3);
        // The only 6-edge phi^4 period graph is K4, so `r(A) = |A| - 2 loops(A)`.
        let g = crate::feynman::generate::complete(4, 4.0);
        let mut sigma: Vec<usize> = (0..6).collect();
        let mut brute = 0.0;
        loop {
            let mut mask = 0u64;
            let mut term = 1.0;
            for &e in &sigma[..5] {
                mask |= 1 << e;
                term /= mask.count_ones() as f64 - 2.0 * f64::from(g.loops_of(mask));
            }
            brute += term;
            if !crate::sector::next_permutation(&mut sigma) {
                break;
            }
        }
        assert!((row.hepp_bound - brute).abs() < 1e-12 * brute, "{} vs {brute}", row.hepp_bound);
        assert!(row.sigma_over_i > 0.0 && row.sigma_over_i < 3.0);
        let capped = bench_row(30, 10, 1, &TableOptions { memory_cap: 1 << 20 }).unwrap();
        assert!(capped.note.is_some());
    }
}
