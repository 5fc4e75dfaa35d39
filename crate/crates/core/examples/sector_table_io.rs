//! Building a simplicial sector table for a polynomial ratio, writing it in
//! the text format, reading it back and drawing the same samples from both.
//! Subset tables for graphs round-trip through their binary format the same
//! way.
//!
//!     cargo run --release --example sector_table_io

use troquad::feynman::generate;
use troquad::{build_feynman_tables, EulerMellin, RandomStream, Sampler, SectorTable, SubsetTable, TableOptions, TropicalSample};

fn main() -> troquad::Result<()> {
    let dir = std::env::temp_dir().join("troquad-example");
    std::fs::create_dir_all(&dir)?;

    let g = generate::triangle_d6();
    let problem = EulerMellin::from_feynman(&g)?;
    let sectors = problem.sector_table()?;
    let path = dir.join("triangle.sectors");
    sectors.save(&path)?;
    print!("{}", sectors.to_text());
    let back = SectorTable::load(&path)?;

    let (mut a, mut b) = (RandomStream::new(9, 0), RandomStream::new(9, 0));
    let (mut sa, mut sb) = (TropicalSample::with_dim(3), TropicalSample::with_dim(3));
    for _ in 0..3 {
        sectors.draw(&mut a, &mut sa);
        back.draw(&mut b, &mut sb);
        assert_eq!(sa.log_x, sb.log_x);
        println!("sector {:?} log x {:?}", sa.sector, sa.log_x);
    }

    let table = build_feynman_tables(&generate::wheel(5), &TableOptions::default())?;
    let path = dir.join("w5.table");
    table.save(&path)?;
    let loaded = SubsetTable::load(&path, &TableOptions::default())?;
    println!("W5 table: {} bytes on disk, Hepp bound {} after reload", loaded.file_bytes(), loaded.itr());
    Ok(())
}
