//! Scaling of the estimator on random phi^4 period graphs: relative standard
//! deviation per sample, throughput, preprocessing time and table size.
//!
//!     cargo run --release --example phi4_bench -- 6,8,10,12,14 1000000

use troquad::bench::bench_row;
use troquad::TableOptions;

fn main() -> troquad::Result<()> {
    let mut args = std::env::args().skip(1);
    let sizes: Vec<usize> = args
        .next()
        .map(|s| s.split(',').filter_map(|x| x.parse().ok()).collect())
        .unwrap_or_else(|| vec![6, 8, 10, 12]);
    let n = args.next().and_then(|s| s.parse().ok()).unwrap_or(1_000_000);
    println!("{:>3} {:>8} {:>6} {:>11} {:>11} {:>12}", "E", "sigma/I", "ref", "samples/s", "preproc s", "table bytes");
    for e in sizes {
        let row = bench_row(e, n, 0, &TableOptions::default())?;
        if let Some(note) = row.note {
            println!("{e:>3} {note}");
            continue;
        }
        println!(
            "{:>3} {:>8.3} {:>6} {:>11.3e} {:>11.3e} {:>12}",
            e,
            row.sigma_over_i,
            row.reference_sigma_over_i.map_or("-".into(), |v| v.to_string()),
            row.samples_per_second,
            row.seconds_preprocess,
            row.table_bytes
        );
    }
    Ok(())
}
