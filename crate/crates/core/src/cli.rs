//! The `troquad` command line. JSON goes to stdout, everything meant for
//! humans to stderr.
//!
//! Exit codes: 0 success, 1 other failure, 2 invalid input, 3 divergent
//! integral, 4 rejection budget exceeded, 5 memory cap exceeded.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::bench::bench_row;
use crate::error::{Error, Result};
use crate::euler_mellin::{EulerMellin, Factor, Power};
use crate::feynman::{build_feynman_tables, subgraph_data, FeynmanGraph, FeynmanIntegrand};
use crate::mc::{estimate, EstimateReport, RunOptions, DEFAULT_REJECT_THRESHOLD};
use crate::permutahedron::{SubsetTable, TableOptions, DEFAULT_MEMORY_CAP};
use crate::poly::SparsePolynomial;
use crate::rng::RandomStream;
use crate::sample::{Sampler, TropicalSample};
use crate::sector::SectorTable;

/// Bumped whenever the table contents for a given graph file could change.
pub const CACHE_VERSION: &str = "troquad-table-1";

#[derive(Debug, Parser)]
#[command(name = "troquad", version, about = "Tropical Monte Carlo quadrature of Feynman and Euler-Mellin integrals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convergence check: omega, loops, smallest r with a witness subgraph.
    Check {
        graph: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MEMORY_CAP)]
        max_mem: u128,
    },
    /// Build the subset table and write it to a file.
    Preprocess {
        graph: PathBuf,
        /// Output file; defaults to the cache location.
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_MEMORY_CAP)]
        max_mem: u128,
    },
    /// The Hepp bound, i.e. the normalization of the tropical measure.
    Hepp {
        graph: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MEMORY_CAP)]
        max_mem: u128,
    },
    /// Estimate a Feynman integral and its epsilon expansion.
    Integrate {
        graph: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 0)]
        eps_order: usize,
        /// Read the table from this file instead of building it.
        #[arg(long)]
        table: Option<PathBuf>,
        /// Neither read nor write the table cache.
        #[arg(long)]
        no_cache: bool,
        /// Use the exact sector decomposition of the expanded Symanzik
        /// polynomials instead of the subset table (small graphs only).
        #[arg(long)]
        general: bool,
    },
    /// Print tropical samples as JSON lines.
    Sample {
        /// Graph file; mutually exclusive with --sectors.
        graph: Option<PathBuf>,
        /// Sector table file in the text format.
        #[arg(long)]
        sectors: Option<PathBuf>,
        #[arg(short = 'n', long, default_value_t = 10)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MEMORY_CAP)]
        max_mem: u128,
    },
    /// Integrate a ratio of powers of homogeneous polynomials.
    EulerMellin {
        #[arg(long = "poly-num", num_args = 1..)]
        poly_num: Vec<PathBuf>,
        #[arg(long = "poly-den", num_args = 1..)]
        poly_den: Vec<PathBuf>,
        /// Comma-separated powers `re` or `re:im`, numerators first.
        #[arg(long, allow_hyphen_values = true)]
        powers: String,
        /// Sector table file, or `auto` to build one.
        #[arg(long, default_value = "auto")]
        sectors: String,
        /// Write the sector table used to this file.
        #[arg(long)]
        save_sectors: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Scaling benchmark on random phi^4 period graphs.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "6,8,10,12")]
        sizes: Vec<usize>,
        #[arg(short = 'n', long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MEMORY_CAP)]
        max_mem: u128,
    },
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(short = 'n', long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long, default_value_t = DEFAULT_REJECT_THRESHOLD)]
    pub reject_threshold: f64,
    #[arg(long, default_value_t = DEFAULT_MEMORY_CAP)]
    pub max_mem: u128,
}

impl RunArgs {
    fn options(&self) -> RunOptions {
        RunOptions {
            samples: self.samples,
            seed: self.seed,
            workers: self.workers,
            reject_threshold: self.reject_threshold,
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Divergent { .. }
        | Error::R1Violated { .. }
        | Error::R2Violated { .. }
        | Error::ExceptionalKinematics { .. } => 3,
        Error::RejectionBudget { .. } => 4,
        Error::MemoryLimit { .. } => 5,
        Error::Io(_) => 1,
        _ => 2,
    }
}

fn emit(out: &mut dyn Write, v: &serde_json::Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(v)?)?;
    Ok(())
}

fn edge_list(mask: u64, e: usize) -> Vec<usize> {
    (0..e).filter(|i| mask >> i & 1 == 1).collect()
}

fn cache_dir() -> Option<PathBuf> {
    if let Some(d) = std::env::var_os("TROQUAD_CACHE_DIR") {
        return Some(PathBuf::from(d));
    }
    if let Some(d) = std::env::var_os("XDG_CACHE_HOME") {
        return Some(PathBuf::from(d).join("troquad"));
    }
    std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache").join("troquad"))
}

/// Cache file for a graph: keyed by the SHA-256 of the file bytes and the
/// format version.
pub fn cache_path(graph_bytes: &[u8]) -> Option<PathBuf> {
    let mut h = Sha256::new();
    h.update(CACHE_VERSION.as_bytes());
    h.update(graph_bytes);
    cache_dir().map(|d| d.join(format!("{}.tropfeyn", hex::encode(h.finalize()))))
}

fn read_graph(path: &Path) -> Result<(FeynmanGraph, Vec<u8>)> {
    let bytes = std::fs::read(path)?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| Error::InvalidInput("graph file is not UTF-8".into()))?;
    Ok((FeynmanGraph::from_json(&text)?, bytes))
}

fn warn_exceptional(g: &FeynmanGraph) {
    for w in g.exceptional_witnesses() {
        log::warn!("external momenta at vertices {:?} add up to zero (exceptional kinematics)", w.vertices);
    }
}

/// Table for `g`: from `table` if given, else from the cache, else built
/// (and cached unless `no_cache`).
fn obtain_table(
    g: &FeynmanGraph,
    bytes: &[u8],
    table: Option<&Path>,
    no_cache: bool,
    opts: &TableOptions,
) -> Result<(SubsetTable, f64)> {
    let start = Instant::now();
    if let Some(p) = table {
        let t = SubsetTable::load(p, opts)?;
        if t.n() != g.num_edges() {
            return Err(Error::TableFormat(format!(
                "{} has {} elements, graph has {} edges",
                p.display(),
                t.n(),
                g.num_edges()
            )));
        }
        return Ok((t, start.elapsed().as_secs_f64()));
    }
    let cached = if no_cache { None } else { cache_path(bytes) };
    if let Some(p) = cached.as_ref().filter(|p| p.exists()) {
        match SubsetTable::load(p, opts) {
            Ok(t) if t.n() == g.num_edges() => {
                log::info!("loaded cached table {}", p.display());
                return Ok((t, start.elapsed().as_secs_f64()));
            }
            _ => log::warn!("ignoring unreadable cache entry {}", p.display()),
        }
    }
    let t = build_feynman_tables(g, opts)?;
    let secs = start.elapsed().as_secs_f64();
    if let Some(p) = cached {
        let saved = p
            .parent()
            .map_or(Ok(()), std::fs::create_dir_all)
            .map_err(Error::from)
            .and_then(|()| t.save(&p));
        if let Err(e) = saved {
            log::warn!("could not write cache entry {}: {e}", p.display());
        }
    }
    Ok((t, secs))
}

fn human_report(err: &mut dyn Write, r: &EstimateReport) -> Result<()> {
    for (k, (e, s)) in r.estimate.iter().zip(&r.std_error).enumerate() {
        writeln!(err, "component {k}: {e:.10} +- {s:.3e}")?;
    }
    writeln!(
        err,
        "I_tr = {:.10}, N = {}, rejected = {}, sigma/I = {:.4}, {:.3e} samples/s",
        r.i_tr, r.n_samples, r.n_rejected, r.sigma_over_i, r.samples_per_second
    )?;
    Ok(())
}

pub fn cmd_check(graph: &Path, max_mem: u128, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let (g, _) = read_graph(graph)?;
    warn_exceptional(&g);
    let e = g.num_edges();
    let data = subgraph_data(&g, &TableOptions { memory_cap: max_mem })?;
    let (arg, min_r) = data.min_r();
    let divergent = data.divergent();
    let witnesses: Vec<Vec<usize>> = g.exceptional_witnesses().into_iter().map(|w| w.vertices).collect();
    let convergent = divergent.is_empty() && !(g.phi_vanishes() && g.omega() != 0.0);
    writeln!(err, "{}: E = {e}, loops = {}, omega = {}", g.name(), g.loops(), g.omega())?;
    writeln!(err, "min r = {min_r} on edges {:?}", edge_list(arg, e))?;
    writeln!(err, "{}", if convergent { "convergent" } else { "DIVERGENT" })?;
    emit(
        out,
        &json!({
            "name": g.name(),
            "edges": e,
            "loops": g.loops(),
            "omega": g.omega(),
            "min_r": min_r,
            "min_r_subgraph": edge_list(arg, e),
            "mm_subgraphs": data.mm_count(),
            "divergent_subgraphs": divergent.iter().map(|(m, _)| edge_list(*m, e)).collect::<Vec<_>>(),
            "exceptional_witnesses": witnesses,
            "convergent": convergent,
        }),
    )?;
    Ok(if convergent { 0 } else { 3 })
}

pub fn cmd_preprocess(graph: &Path, table: Option<&Path>, max_mem: u128, out: &mut dyn Write) -> Result<i32> {
    let (g, bytes) = read_graph(graph)?;
    warn_exceptional(&g);
    let start = Instant::now();
    let t = build_feynman_tables(&g, &TableOptions { memory_cap: max_mem })?;
    let secs = start.elapsed().as_secs_f64();
    let path = match table {
        Some(p) => p.to_path_buf(),
        None => cache_path(&bytes).ok_or_else(|| Error::InvalidInput("no cache directory; pass --table".into()))?,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    t.save(&path)?;
    emit(
        out,
        &json!({
            "table": path,
            "I_tr": t.itr(),
            "table_bytes": t.file_bytes(),
            "seconds_preprocess": secs,
        }),
    )?;
    Ok(0)
}

pub fn cmd_hepp(graph: &Path, max_mem: u128, out: &mut dyn Write) -> Result<i32> {
    let (g, _) = read_graph(graph)?;
    let t = build_feynman_tables(&g, &TableOptions { memory_cap: max_mem })?;
    emit(out, &json!({ "name": g.name(), "I_tr": t.itr(), "log_I_tr": t.log_itr() }))?;
    Ok(0)
}

pub struct IntegrateArgs<'a> {
    pub graph: &'a Path,
    pub run: RunArgs,
    pub eps_order: usize,
    pub table: Option<&'a Path>,
    pub no_cache: bool,
    pub general: bool,
}

pub fn integrate_report(a: &IntegrateArgs) -> Result<EstimateReport> {
    let (g, bytes) = read_graph(a.graph)?;
    warn_exceptional(&g);
    let opts = TableOptions { memory_cap: a.run.max_mem };
    if a.general {
        if a.eps_order > 0 {
            return Err(Error::InvalidInput("--general supports --eps-order 0 only".into()));
        }
        let start = Instant::now();
        let p = EulerMellin::from_feynman(&g)?;
        let sectors = p.sector_table()?;
        let secs = start.elapsed().as_secs_f64();
        let mut r = estimate(&sectors, &p.integrand(), a.run.options())?;
        r.seconds_preprocess = secs;
        return Ok(r);
    }
    let (t, secs) = obtain_table(&g, &bytes, a.table, a.no_cache, &opts)?;
    let f = FeynmanIntegrand::new(&g, &t, a.eps_order)?;
    let mut r = estimate(&t, &f, a.run.options())?;
    r.seconds_preprocess = secs;
    Ok(r)
}

fn sample_lines(s: &dyn Sampler, n: u64, seed: u64, out: &mut dyn Write) -> Result<()> {
    let mut rng = RandomStream::new(seed, 0);
    let mut ts = TropicalSample::with_dim(s.dim());
    for _ in 0..n {
        s.draw(&mut rng, &mut ts);
        writeln!(
            out,
            "{}",
            json!({ "log_x": ts.log_x, "chamber": ts.permutation, "sector": ts.sector })
        )?;
    }
    Ok(())
}

fn read_poly(p: &Path) -> Result<SparsePolynomial> {
    SparsePolynomial::load(p).map_err(|e| match e {
        Error::Parse { line, msg } => Error::InvalidInput(format!("{}: line {line}: {msg}", p.display())),
        other => other,
    })
}

pub fn euler_mellin_problem(num: &[PathBuf], den: &[PathBuf], powers: &str) -> Result<EulerMellin> {
    let powers: Vec<Power> = powers
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse())
        .collect::<Result<_>>()?;
    if powers.len() != num.len() + den.len() {
        return Err(Error::InvalidInput(format!(
            "{} powers given for {} polynomials",
            powers.len(),
            num.len() + den.len()
        )));
    }
    let mut it = powers.into_iter();
    let mut factors = |paths: &[PathBuf]| -> Result<Vec<Factor>> {
        paths
            .iter()
            .map(|p| Ok(Factor::new(read_poly(p)?, it.next().expect("counted"))))
            .collect()
    };
    let n = factors(num)?;
    let d = factors(den)?;
    EulerMellin::new(n, d)
}

/// Parse arguments and run; returns the process exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if let Error::Divergent { subsets, values } = &e {
                for (m, v) in subsets.iter().zip(values).take(20) {
                    let _ = writeln!(err, "  r = {v} on subset mask {m:#b}");
                }
            }
            exit_code(&e)
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Check { graph, max_mem } => cmd_check(&graph, max_mem, out, err),
        Command::Preprocess { graph, table, max_mem } => cmd_preprocess(&graph, table.as_deref(), max_mem, out),
        Command::Hepp { graph, max_mem } => cmd_hepp(&graph, max_mem, out),
        Command::Integrate {
            graph,
            run,
            eps_order,
            table,
            no_cache,
            general,
        } => {
            let r = integrate_report(&IntegrateArgs {
                graph: &graph,
                run,
                eps_order,
                table: table.as_deref(),
                no_cache,
                general,
            })?;
            human_report(err, &r)?;
            writeln!(out, "{}", r.to_json())?;
            Ok(0)
        }
        Command::Sample {
            graph,
            sectors,
            samples,
            seed,
            max_mem,
        } => match (graph, sectors) {
            (Some(g), None) => {
                let (g, _) = read_graph(&g)?;
                let t = build_feynman_tables(&g, &TableOptions { memory_cap: max_mem })?;
                sample_lines(&t, samples, seed, out)?;
                Ok(0)
            }
            (None, Some(p)) => {
                sample_lines(&SectorTable::load(&p)?, samples, seed, out)?;
                Ok(0)
            }
            _ => Err(Error::InvalidInput("give exactly one of a graph file or --sectors".into())),
        },
        Command::EulerMellin {
            poly_num,
            poly_den,
            powers,
            sectors,
            save_sectors,
            run,
        } => {
            let p = euler_mellin_problem(&poly_num, &poly_den, &powers)?;
            let start = Instant::now();
            let table = if sectors == "auto" {
                p.sector_table()?
            } else {
                SectorTable::load(&sectors)?
            };
            if table.dim() != p.dim() {
                return Err(Error::InvalidInput(format!(
                    "sector table has dimension {}, polynomials have {} variables",
                    table.dim(),
                    p.dim()
                )));
            }
            let secs = start.elapsed().as_secs_f64();
            if let Some(path) = save_sectors {
                table.save(path)?;
            }
            writeln!(err, "{} sectors, I_tr = {}", table.len(), table.total())?;
            let mut r = estimate(&table, &p.integrand(), run.options())?;
            r.seconds_preprocess = secs;
            human_report(err, &r)?;
            writeln!(out, "{}", r.to_json())?;
            Ok(0)
        }
        Command::Bench {
            sizes,
            samples,
            seed,
            max_mem,
        } => {
            let opts = TableOptions { memory_cap: max_mem };
            writeln!(err, "trend comparison only: reference graphs and hardware are not reproduced")?;
            writeln!(
                err,
                "{:>3} {:>5} {:>9} {:>9} {:>12} {:>12} {:>12}",
                "E", "loops", "sigma/I", "ref", "samples/s", "preproc s", "table bytes"
            )?;
            let mut rows = Vec::new();
            for e in sizes {
                let row = bench_row(e, samples, seed, &opts)?;
                match &row.note {
                    Some(n) => writeln!(err, "{e:>3} {n}")?,
                    None => writeln!(
                        err,
                        "{:>3} {:>5} {:>9.3} {:>9} {:>12.3e} {:>12.3e} {:>12}",
                        row.edges,
                        row.loops,
                        row.sigma_over_i,
                        row.reference_sigma_over_i.map_or("-".into(), |v| format!("{v:.1}")),
                        row.samples_per_second,
                        row.seconds_preprocess,
                        row.table_bytes
                    )?,
                }
                rows.push(row);
            }
            emit(out, &json!({ "note": "trend comparison only", "rows": rows }))?;
            Ok(0)
        }
    }
}

/// Entry point for the binary.
pub fn main() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(cli, &mut stdout.lock(), &mut stderr.lock())
}
