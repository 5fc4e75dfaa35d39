use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use num_traits::{One, Signed, Zero};

use super::alias::AliasTable;
use crate::error::{Error, Result};
use crate::exact::{self, fmt_q, Q};
use crate::mc::{EstimateReport, EstimatorState};
use crate::rng::RandomStream;
use crate::sample::{chamber_of, Integrand, Sampler, TropicalSample};

/// One simplicial cone of a unimodular-or-not fan on `R^n / 1R` together with
/// the linear form `w` that the log of the tropical integrand equals (up to
/// sign) on it.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplicialSector {
    generators: Vec<Vec<Q>>,
    weight: Vec<Q>,
    factor: f64,
    // Row k holds u_i[k] / <u_i, w> for i = 0..n-1.
    coeff: Vec<f64>,
}

impl SimplicialSector {
    /// Validate the cone data and compute its tropical volume
    /// `|det(u_1, ..., u_{n-1}, 1)| / prod_k <u_k, w>`.
    pub fn new(generators: Vec<Vec<Q>>, weight: Vec<Q>) -> std::result::Result<Self, String> {
        let n = weight.len();
        if n < 2 {
            return Err("need at least two coordinates".into());
        }
        if generators.len() != n - 1 {
            return Err(format!("expected {} generators, found {}", n - 1, generators.len()));
        }
        if let Some(k) = generators.iter().position(|u| u.len() != n) {
            return Err(format!("generator {k} has the wrong length"));
        }
        let wsum: Q = weight.iter().sum();
        if !wsum.is_zero() {
            return Err(format!("weight does not sum to zero (sum {})", fmt_q(&wsum)));
        }
        let pairings: Vec<Q> = generators.iter().map(|u| exact::dot(u, &weight)).collect();
        if let Some(k) = pairings.iter().position(|p| !p.is_positive()) {
            return Err(format!("non-positive pairing <u_{k}, w> = {}", fmt_q(&pairings[k])));
        }
        let mut m: Vec<Vec<Q>> = generators.clone();
        m.push(vec![Q::one(); n]);
        let d = exact::det(&m);
        if d.is_zero() {
            return Err("degenerate cone: det(u, 1) = 0".into());
        }
        let prod = pairings.iter().fold(Q::one(), |acc, p| acc * p);
        let factor = exact::q_to_f64(&(d.abs() / prod));

        let p: Vec<f64> = pairings.iter().map(exact::q_to_f64).collect();
        let mut coeff = vec![0.0; n * (n - 1)];
        for k in 0..n {
            for i in 0..n - 1 {
                coeff[k * (n - 1) + i] = exact::q_to_f64(&generators[i][k]) / p[i];
            }
        }
        Ok(Self {
            generators,
            weight,
            factor,
            coeff,
        })
    }

    pub fn dim(&self) -> usize {
        self.weight.len()
    }

    pub fn generators(&self) -> &[Vec<Q>] {
        &self.generators
    }

    pub fn weight(&self) -> &[Q] {
        &self.weight
    }

    pub fn sector_factor(&self) -> f64 {
        self.factor
    }

    /// Sample `y = sum_i lambda_i u_i` with `lambda_i ~ Exp(<u_i, w>)`.
    pub fn draw(&self, rng: &mut RandomStream, out: &mut TropicalSample) {
        let n = self.dim();
        let m = n - 1;
        let mut lam = [0.0f64; 32];
        let lam: &mut [f64] = if m <= 32 { &mut lam[..m] } else { return self.draw_slow(rng, out) };
        for l in lam.iter_mut() {
            *l = -rng.uniform_open().ln();
        }
        out.log_x.resize(n, 0.0);
        for k in 0..n {
            let row = &self.coeff[k * m..(k + 1) * m];
            out.log_x[k] = row.iter().zip(lam.iter()).map(|(c, l)| c * l).sum();
        }
        out.normalize();
        out.permutation = chamber_of(&out.log_x);
    }

    fn draw_slow(&self, rng: &mut RandomStream, out: &mut TropicalSample) {
        let n = self.dim();
        let m = n - 1;
        let lam: Vec<f64> = (0..m).map(|_| -rng.uniform_open().ln()).collect();
        out.log_x.resize(n, 0.0);
        for k in 0..n {
            out.log_x[k] = (0..m).map(|i| self.coeff[k * m + i] * lam[i]).sum();
        }
        out.normalize();
        out.permutation = chamber_of(&out.log_x);
    }

    /// Coordinates of `y` in the basis `(u_1, ..., u_{n-1}, 1)`, dropping the
    /// last one. `y` lies in the closed cone iff all returned entries are >= 0.
    pub fn barycentric(&self, y: &[Q]) -> Option<Vec<Q>> {
        let mut cols = self.generators.clone();
        cols.push(vec![Q::one(); self.dim()]);
        let mut c = exact::solve_in_span(&cols, y)?;
        c.pop();
        Some(c)
    }

    pub fn contains(&self, y: &[Q]) -> bool {
        self.barycentric(y)
            .is_some_and(|c| c.iter().all(|v| !v.is_negative()))
    }
}

/// A complete simplicial fan with its tropical volumes and an alias table
/// over them.
#[derive(Debug, Clone)]
pub struct SectorTable {
    n: usize,
    sectors: Vec<SimplicialSector>,
    total: f64,
    alias: AliasTable,
}

impl SectorTable {
    pub fn new(n: usize, sectors: Vec<SimplicialSector>) -> Result<Self> {
        if sectors.is_empty() {
            return Err(Error::InvalidInput("sector table is empty".into()));
        }
        if let Some(i) = sectors.iter().position(|s| s.dim() != n) {
            return Err(Error::Sector {
                index: i,
                msg: format!("dimension {} differs from n = {n}", sectors[i].dim()),
            });
        }
        let factors: Vec<f64> = sectors.iter().map(|s| s.factor).collect();
        let total: f64 = factors.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::InvalidInput(format!("total I^tr = {total} is not positive and finite")));
        }
        let alias = AliasTable::new(&factors)?;
        Ok(Self {
            n,
            sectors,
            total,
            alias,
        })
    }

    /// The braid fan of Weyl chambers, with weights determined by `r` on
    /// subsets (bitmasks). Only proper non-empty subsets are queried.
    pub fn braid(n: usize, r: impl Fn(u64) -> f64) -> Result<Self> {
        if !(2..=9).contains(&n) {
            return Err(Error::TooLarge {
                what: "explicit braid fan",
                size: n,
                limit: 9,
            });
        }
        let full = (1u64 << n) - 1;
        let rq = |mask: u64| -> Result<Q> {
            if mask == 0 || mask == full {
                Ok(Q::zero())
            } else {
                exact::q_from_f64(r(mask))
            }
        };
        let mut sectors = Vec::new();
        let mut sigma: Vec<usize> = (0..n).collect();
        loop {
            let mut gens = Vec::with_capacity(n - 1);
            let mut weight = vec![Q::zero(); n];
            let mut prev_mask = 0u64;
            let mut prev = Q::zero();
            for k in 0..n {
                let mask = prev_mask | (1 << sigma[k]);
                let cur = rq(mask)?;
                weight[sigma[k]] = -(&cur - &prev);
                if k + 1 < n {
                    let mut u = vec![Q::zero(); n];
                    for &e in &sigma[..=k] {
                        u[e] = -Q::one();
                    }
                    gens.push(u);
                }
                prev = cur;
                prev_mask = mask;
            }
            let index = sectors.len();
            sectors.push(SimplicialSector::new(gens, weight).map_err(|msg| Error::Sector { index, msg })?);
            if !next_permutation(&mut sigma) {
                break;
            }
        }
        Self::new(n, sectors)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn sectors(&self) -> &[SimplicialSector] {
        &self.sectors
    }

    pub fn len(&self) -> usize {
        self.sectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sectors.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn alias(&self) -> &AliasTable {
        &self.alias
    }

    /// Indices of all sectors whose closure contains `y`.
    pub fn locate(&self, y: &[Q]) -> Vec<usize> {
        (0..self.sectors.len()).filter(|&i| self.sectors[i].contains(y)).collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("TROPSEC 1\nn {}\n", self.n);
        for sec in &self.sectors {
            s.push('\n');
            s.push('w');
            for x in &sec.weight {
                let _ = write!(s, " {}", fmt_q(x));
            }
            s.push('\n');
            for u in &sec.generators {
                s.push('u');
                for x in u {
                    let _ = write!(s, " {}", fmt_q(x));
                }
                s.push('\n');
            }
            let _ = writeln!(s, "f {:?}", sec.factor);
        }
        s
    }

    /// Parse the text format. Blocks start with a `w` line followed by `n-1`
    /// `u` lines and an optional `f` line holding the expected sector factor.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let perr = |line: usize, msg: &str| Error::Parse { line, msg: msg.into() };

        let (l, header) = lines.next().ok_or_else(|| perr(1, "empty sector table"))?;
        if header.split_whitespace().collect::<Vec<_>>() != ["TROPSEC", "1"] {
            return Err(perr(l, "expected header `TROPSEC 1`"));
        }
        let (l, nline) = lines.next().ok_or_else(|| perr(l, "missing `n` line"))?;
        let n: usize = match nline.split_whitespace().collect::<Vec<_>>()[..] {
            ["n", v] => v.parse().map_err(|_| perr(l, "bad dimension"))?,
            _ => return Err(perr(l, "expected `n <n>`")),
        };
        if n < 2 {
            return Err(perr(l, "dimension must be at least 2"));
        }

        struct Block {
            line: usize,
            w: Vec<Q>,
            u: Vec<Vec<Q>>,
            f: Option<f64>,
        }
        let mut blocks: Vec<Block> = Vec::new();
        for (l, line) in lines {
            let mut parts = line.split_whitespace();
            let tag = parts.next().unwrap_or("");
            let rest: Vec<&str> = parts.collect();
            let vec = |rest: &[&str]| -> Result<Vec<Q>> {
                if rest.len() != n {
                    return Err(perr(l, &format!("expected {n} entries, found {}", rest.len())));
                }
                rest.iter()
                    .map(|s| exact::parse_q(s).ok_or_else(|| perr(l, &format!("bad rational `{s}`"))))
                    .collect()
            };
            match tag {
                "w" => blocks.push(Block {
                    line: l,
                    w: vec(&rest)?,
                    u: Vec::new(),
                    f: None,
                }),
                "u" => blocks
                    .last_mut()
                    .ok_or_else(|| perr(l, "`u` line before any `w` line"))?
                    .u
                    .push(vec(&rest)?),
                "f" => {
                    let b = blocks.last_mut().ok_or_else(|| perr(l, "`f` line before any `w` line"))?;
                    let v = match rest[..] {
                        [v] => v.parse::<f64>().map_err(|_| perr(l, "bad sector factor"))?,
                        _ => return Err(perr(l, "expected `f <factor>`")),
                    };
                    b.f = Some(v);
                }
                _ => return Err(perr(l, &format!("unknown line tag `{tag}`"))),
            }
        }
        let mut sectors = Vec::with_capacity(blocks.len());
        for (index, b) in blocks.into_iter().enumerate() {
            let sec = SimplicialSector::new(b.u, b.w).map_err(|msg| Error::Sector {
                index,
                msg: format!("{msg} (block at line {})", b.line),
            })?;
            if let Some(f) = b.f {
                if (f - sec.factor).abs() > 1e-9 * sec.factor.abs() {
                    return Err(Error::Sector {
                        index,
                        msg: format!("stored factor {f} differs from recomputed {}", sec.factor),
                    });
                }
            }
            sectors.push(sec);
        }
        Self::new(n, sectors)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    /// Draw a sample conditioned on sector `c`.
    pub fn draw_in(&self, c: usize, rng: &mut RandomStream, out: &mut TropicalSample) {
        self.sectors[c].draw(rng, out);
        out.sector = Some(c);
    }
}

impl Sampler for SectorTable {
    fn dim(&self) -> usize {
        self.n
    }

    fn normalization(&self) -> f64 {
        self.total
    }

    fn draw(&self, rng: &mut RandomStream, out: &mut TropicalSample) {
        let c = self.alias.sample(rng);
        self.draw_in(c, rng, out);
    }
}

/// Lexicographic successor; `false` once the last permutation is reached.
pub fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorEstimate {
    pub factor: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub n_samples: u64,
}

#[derive(Debug, Clone)]
pub struct StratifiedReport {
    pub report: EstimateReport,
    pub per_sector: Vec<SectorEstimate>,
}

/// Plain sector-by-sector Monte Carlo: `sum_C I^tr_C * mean_C(f)`, each
/// sector sampled `n_per_sector` times from its own stream. Errors combine in
/// quadrature. Only the first component feeds `per_sector`.
pub fn estimate_per_sector<F: Integrand>(
    table: &SectorTable,
    f: &F,
    n_per_sector: u64,
    seed: u64,
    reject_threshold: f64,
) -> Result<StratifiedReport> {
    if n_per_sector == 0 {
        return Err(Error::InvalidInput("need at least one sample per sector".into()));
    }
    let start = Instant::now();
    let comps = f.components();
    let mut ws = f.workspace();
    let mut s = TropicalSample::with_dim(table.dim());
    let mut out = vec![0.0; comps];
    let mut est = vec![0.0; comps];
    let mut var = vec![0.0; comps];
    let mut n_total = 0u64;
    let mut rejected = 0u64;
    let mut per_sector = Vec::with_capacity(table.len());
    for (c, sec) in table.sectors().iter().enumerate() {
        let mut rng = RandomStream::new(seed, c as u64);
        let mut st = EstimatorState::new(comps, sec.sector_factor());
        for _ in 0..n_per_sector {
            table.draw_in(c, &mut rng, &mut s);
            if f.eval(&mut ws, &s, &mut out) && out.iter().all(|v| v.is_finite()) {
                st.push(&out);
            } else {
                st.reject();
            }
        }
        let e = st.estimate();
        let se = st.std_error();
        for k in 0..comps {
            est[k] += e[k];
            var[k] += se[k] * se[k];
        }
        n_total += st.count();
        rejected += st.rejected();
        per_sector.push(SectorEstimate {
            factor: sec.sector_factor(),
            estimate: e[0],
            std_error: se[0],
            n_samples: st.count(),
        });
    }
    let attempted = n_total + rejected;
    if rejected as f64 > reject_threshold * attempted as f64 {
        return Err(Error::RejectionBudget {
            rejected,
            attempted,
            threshold: reject_threshold,
        });
    }
    let secs = start.elapsed().as_secs_f64();
    let std_error: Vec<f64> = var.iter().map(|v| v.sqrt()).collect();
    let sigma = if est[0] != 0.0 && std_error[0].is_finite() {
        std_error[0] * (n_total as f64).sqrt() / est[0].abs()
    } else {
        f64::NAN
    };
    let report = EstimateReport {
        i_tr: table.total(),
        estimate: est,
        std_error,
        n_samples: n_total,
        n_rejected: rejected,
        sigma_over_i: sigma,
        kurtosis: vec![f64::NAN; comps],
        seconds_preprocess: 0.0,
        seconds_sampling: secs,
        samples_per_second: attempted as f64 / secs.max(1e-9),
        seed,
        workers: 1,
    };
    Ok(StratifiedReport { report, per_sector })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;
    use crate::sample::ScalarFn;

    fn qv(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| q(x)).collect()
    }

    fn two_sector() -> SectorTable {
        let a = SimplicialSector::new(vec![qv(&[-1, 0])], qv(&[-1, 1])).unwrap();
        let b = SimplicialSector::new(vec![qv(&[1, 0])], qv(&[1, -1])).unwrap();
        SectorTable::new(2, vec![a, b]).unwrap()
    }

    #[test]
    fn bubble_sectors() {
        let t = two_sector();
        assert_eq!(t.total(), 2.0);
        assert!(t.sectors().iter().all(|s| s.sector_factor() == 1.0));
    }

    #[test]
    fn text_round_trip() {
        let t = two_sector();
        let back = SectorTable::from_text(&t.to_text()).unwrap();
        assert_eq!(back.total(), t.total());
        assert_eq!(back.sectors(), t.sectors());
    }

    #[test]
    fn validation_messages() {
        let zero = "TROPSEC 1\nn 2\nw 0 0\nu 1 0\n";
        let e = SectorTable::from_text(zero).unwrap_err().to_string();
        assert!(e.contains("non-positive pairing"), "{e}");
        let degenerate = "TROPSEC 1\nn 2\nw 1 -1\nu 1 1\n";
        let e = SectorTable::from_text(degenerate).unwrap_err().to_string();
        assert!(e.contains("non-positive pairing") || e.contains("degenerate cone"), "{e}");
        let degenerate = "TROPSEC 1\nn 3\nw 2 -1 -1\nu 1 0 0\nu 2 1 1\n";
        let e = SectorTable::from_text(degenerate).unwrap_err().to_string();
        assert!(e.contains("degenerate cone"), "{e}");
        let wrong_f = "TROPSEC 1\nn 2\nw 1 -1\nu 1 0\nf 2\n";
        assert!(SectorTable::from_text(wrong_f).is_err());
        assert!(matches!(SectorTable::from_text("TROPSEC 2\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn samples_respect_sector() {
        let t = two_sector();
        let mut rng = RandomStream::new(3, 0);
        let mut s = TropicalSample::with_dim(2);
        for _ in 0..100 {
            t.draw(&mut rng, &mut s);
            let c = s.sector.unwrap();
            let y: Vec<Q> = s.log_x.iter().map(|v| exact::q_from_f64(*v).unwrap()).collect();
            assert!(t.sectors()[c].contains(&y));
            assert_eq!(s.log_x.iter().cloned().fold(f64::MIN, f64::max), 0.0);
        }
    }

    #[test]
    fn braid_fan_of_uniform_r() {
        let t = SectorTable::braid(3, |_| 1.0).unwrap();
        assert_eq!(t.len(), 6);
        assert!((t.total() - 6.0).abs() < 1e-12);
        let tri = SectorTable::braid(3, |m: u64| m.count_ones() as f64).unwrap();
        assert!((tri.total() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn constant_integrand_is_exact() {
        let t = two_sector();
        let f = ScalarFn(|_: &TropicalSample| Some(1.0));
        let r = estimate_per_sector(&t, &f, 10, 1, 1e-6).unwrap();
        assert_eq!(r.report.estimate[0], 2.0);
        assert_eq!(r.report.std_error[0], 0.0);
        let r1 = estimate_per_sector(&t, &f, 1, 1, 1e-6).unwrap();
        assert!(r1.report.estimate[0].is_finite());
        assert!(r1.report.std_error[0].is_nan());
    }

    #[test]
    fn permutations_enumerate() {
        let mut p = vec![0, 1, 2, 3];
        let mut count = 1;
        while next_permutation(&mut p) {
            count += 1;
        }
        assert_eq!(count, 24);
    }
}
