//! Boolean functions on subsets, generalized permutahedra and the
//! triangulation-free sampler over the braid fan.
//!
//! Subsets of `{0, .., n-1}` are bitmasks. A chamber of the braid fan is a
//! permutation `sigma` listing the coordinates in ascending order; its flag is
//! `A_k = {sigma(0), .., sigma(k-1)}`.

use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::sample::{Sampler, TropicalSample};

/// Largest ground set a subset table may have.
pub const MAX_SUBSET_N: usize = 32;
/// Default cap on the in-memory table size.
pub const DEFAULT_MEMORY_CAP: u128 = 2 << 30;
/// Bytes per record in the table file.
pub const FILE_RECORD_BYTES: u128 = 24;
/// Bytes per record in memory (the file record plus a cached log weight).
pub const MEMORY_RECORD_BYTES: u128 = 32;

pub const FLAG_MASS_MOMENTUM_SPANNING: u32 = 1;

const MAGIC: &[u8; 8] = b"TROPFEYN";
const VERSION: u32 = 1;

/// A real function on the subsets of an `n`-element set.
#[derive(Debug, Clone, PartialEq)]
pub struct BooleanTable {
    n: usize,
    values: Vec<f64>,
}

impl BooleanTable {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n > MAX_SUBSET_N {
            return Err(Error::TooLarge {
                what: "boolean table",
                size: n,
                limit: MAX_SUBSET_N,
            });
        }
        if values.len() != 1 << n {
            return Err(Error::InvalidInput(format!(
                "boolean table for n = {n} needs {} values, got {}",
                1u64 << n,
                values.len()
            )));
        }
        Ok(Self { n, values })
    }

    pub fn from_fn(n: usize, f: impl Fn(u64) -> f64) -> Result<Self> {
        if n > MAX_SUBSET_N {
            return Err(Error::TooLarge {
                what: "boolean table",
                size: n,
                limit: MAX_SUBSET_N,
            });
        }
        Self::new(n, (0..1u64 << n).map(f).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, mask: u64) -> f64 {
        self.values[mask as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn full(&self) -> u64 {
        full_mask(self.n)
    }

    /// `w_{sigma(k)} = z(A_k) - z(A_{k-1})`, the vertex of the polytope of
    /// `z` maximizing every linear functional in the chamber of `sigma`.
    pub fn vertex(&self, sigma: &Permutation) -> Vec<f64> {
        let mut w = vec![0.0; self.n];
        let mut prev = 0u64;
        for &e in sigma.as_slice() {
            let cur = prev | 1 << e;
            w[e] = self.get(cur) - self.get(prev);
            prev = cur;
        }
        w
    }

    /// `<log x, w^(sigma, z)>` for the chamber the sample lies in. For a facet
    /// function `z` of a Newton polytope this is the log of the tropical
    /// polynomial.
    pub fn trop_value(&self, s: &TropicalSample) -> f64 {
        let sigma = s.chamber();
        let mut acc = 0.0;
        let mut prev = 0u64;
        for &e in &sigma {
            let cur = prev | 1 << e;
            acc += s.log_x[e] * (self.get(cur) - self.get(prev));
            prev = cur;
        }
        acc
    }
}

pub fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// A bijection `position -> element`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(sigma: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; sigma.len()];
        for &e in &sigma {
            if e >= sigma.len() || std::mem::replace(&mut seen[e], true) {
                return Err(Error::InvalidInput(format!("{sigma:?} is not a permutation")));
            }
        }
        Ok(Self(sigma))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Bitmasks of `A_1, .., A_n`.
    pub fn flag(&self) -> Vec<u64> {
        let mut m = 0u64;
        self.0
            .iter()
            .map(|&e| {
                m |= 1 << e;
                m
            })
            .collect()
    }
}

/// Outcome of a supermodularity check.
#[derive(Debug, Clone, PartialEq)]
pub enum SupermodularReport {
    Pass { checked: u64 },
    /// `z(a) + z(b) > z(a & b) + z(a | b)`.
    Violation { a: u64, b: u64, z_a: f64, z_b: f64, z_cap: f64, z_cup: f64 },
}

impl SupermodularReport {
    pub fn passed(&self) -> bool {
        matches!(self, Self::Pass { .. })
    }
}

fn local_check(z: &BooleanTable, a: u64, i: usize, j: usize, tol: f64) -> Option<SupermodularReport> {
    let ai = a | 1 << i;
    let aj = a | 1 << j;
    let aij = ai | aj;
    let (z_a, z_b, z_cap, z_cup) = (z.get(ai), z.get(aj), z.get(a), z.get(aij));
    (z_a + z_b > z_cap + z_cup + tol).then_some(SupermodularReport::Violation {
        a: ai,
        b: aj,
        z_a,
        z_b,
        z_cap,
        z_cup,
    })
}

/// Supermodularity via the equivalent local condition
/// `z(A+i) + z(A+j) <= z(A) + z(A+i+j)` for all `A` and `i, j` outside `A`.
/// Exhaustive up to `n = 20`; beyond that `samples` random triples are tried.
pub fn check_supermodular(z: &BooleanTable, samples: u64, seed: u64) -> SupermodularReport {
    let n = z.n();
    let scale = z.values().iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-12 * scale;
    if n <= 20 {
        let mut checked = 0;
        for a in 0..1u64 << n {
            for i in 0..n {
                if a >> i & 1 == 1 {
                    continue;
                }
                for j in i + 1..n {
                    if a >> j & 1 == 1 {
                        continue;
                    }
                    checked += 1;
                    if let Some(v) = local_check(z, a, i, j, tol) {
                        return v;
                    }
                }
            }
        }
        return SupermodularReport::Pass { checked };
    }
    let mut rng = RandomStream::new(seed, 0);
    let full = z.full();
    for _ in 0..samples {
        let i = rng.index(n);
        let mut j = rng.index(n - 1);
        if j >= i {
            j += 1;
        }
        let a = rng.bits() & full & !(1 << i) & !(1 << j);
        if let Some(v) = local_check(z, a, i.min(j), i.max(j), tol) {
            return v;
        }
    }
    SupermodularReport::Pass { checked: samples }
}

/// Limits for building subset tables.
#[derive(Debug, Clone, Copy)]
pub struct TableOptions {
    pub memory_cap: u128,
}

impl Default for TableOptions {
    fn default() -> Self {
        Self {
            memory_cap: DEFAULT_MEMORY_CAP,
        }
    }
}

/// Estimated in-memory size of a table over `n` elements.
pub fn memory_estimate(n: usize) -> u128 {
    MEMORY_RECORD_BYTES << n
}

/// Size of the table file over `n` elements, header excluded.
pub fn file_bytes(n: usize) -> u128 {
    FILE_RECORD_BYTES << n
}

/// Per-subset data for the generalized permutahedron sampler.
///
/// `log_weight[A] = log J(A) - log r(A)` is cached so the sampler needs one
/// exponential per candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetTable {
    n: usize,
    r: Vec<f64>,
    log_j: Vec<f64>,
    log_weight: Vec<f64>,
    loops: Vec<u32>,
    flags: Vec<u32>,
}

/// Refuse tables over more than 32 elements or above the memory cap.
pub fn check_size_for(n: usize, opts: &TableOptions) -> Result<()> {
    if n == 0 || n > MAX_SUBSET_N {
        return Err(Error::TooLarge {
            what: "subset table",
            size: n,
            limit: MAX_SUBSET_N,
        });
    }
    let bytes = memory_estimate(n);
    log::info!("subset table for n = {n}: {bytes} bytes");
    if bytes > opts.memory_cap {
        return Err(Error::MemoryLimit {
            n,
            bytes,
            cap: opts.memory_cap,
        });
    }
    Ok(())
}

impl SubsetTable {
    /// Run the J recursion for `r`. `r(empty)` is taken as 1 and `r(full)` is
    /// never used as a divisor.
    pub fn build(r: &BooleanTable, opts: &TableOptions) -> Result<Self> {
        let n = r.n();
        check_size_for(n, opts)?;
        let full = full_mask(n);
        let mut bad_masks = Vec::new();
        let mut bad_values = Vec::new();
        for mask in 1..full {
            let v = r.get(mask);
            if !(v > 0.0 && v.is_finite()) {
                bad_masks.push(mask);
                bad_values.push(v);
            }
        }
        if !bad_masks.is_empty() {
            return Err(Error::Divergent {
                subsets: bad_masks,
                values: bad_values,
            });
        }
        let mut rv = r.values().to_vec();
        rv[0] = 1.0;
        let size = 1usize << n;
        let mut log_j = vec![0.0; size];
        let mut log_weight = vec![0.0; size];
        for mask in 1..size as u64 {
            // Every A \ e is numerically smaller than A, so it is already done.
            let mut m = f64::NEG_INFINITY;
            let mut bits = mask;
            while bits != 0 {
                let e = bits.trailing_zeros();
                bits &= bits - 1;
                m = m.max(log_weight[(mask & !(1 << e)) as usize]);
            }
            let mut s = 0.0;
            let mut bits = mask;
            while bits != 0 {
                let e = bits.trailing_zeros();
                bits &= bits - 1;
                s += (log_weight[(mask & !(1 << e)) as usize] - m).exp();
            }
            let lj = m + s.ln();
            log_j[mask as usize] = lj;
            log_weight[mask as usize] = if mask == full { f64::NAN } else { lj - rv[mask as usize].ln() };
        }
        Ok(Self {
            n,
            r: rv,
            log_j,
            log_weight,
            loops: vec![0; size],
            flags: vec![0; size],
        })
    }

    /// Attach per-subset loop numbers and flags.
    pub fn with_payload(mut self, loops: Vec<u32>, flags: Vec<u32>) -> Result<Self> {
        if loops.len() != self.r.len() || flags.len() != self.r.len() {
            return Err(Error::InvalidInput("payload length differs from table size".into()));
        }
        self.loops = loops;
        self.flags = flags;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    #[inline]
    pub fn r(&self, mask: u64) -> f64 {
        self.r[mask as usize]
    }

    #[inline]
    pub fn log_j(&self, mask: u64) -> f64 {
        self.log_j[mask as usize]
    }

    #[inline]
    pub fn loops(&self, mask: u64) -> u32 {
        self.loops[mask as usize]
    }

    #[inline]
    pub fn flags(&self, mask: u64) -> u32 {
        self.flags[mask as usize]
    }

    /// `log I^tr = log J([n])`.
    pub fn log_itr(&self) -> f64 {
        self.log_j[full_mask(self.n) as usize]
    }

    pub fn itr(&self) -> f64 {
        self.log_itr().exp()
    }

    pub fn file_bytes(&self) -> u128 {
        file_bytes(self.n)
    }

    /// Tropical volume of one chamber, `prod_{k<n} 1/r(A_k)`.
    pub fn chamber_volume(&self, sigma: &Permutation) -> f64 {
        let flag = sigma.flag();
        flag[..self.n - 1].iter().map(|&m| 1.0 / self.r(m)).product()
    }

    /// `(log Psi^tr, log Phi^tr)` at a sample, reading `z_Psi = loops` and
    /// `z_Phi = loops + mm flag` from the payload.
    #[inline]
    pub fn trop_psi_phi(&self, s: &TropicalSample) -> (f64, f64) {
        let mut psi = 0.0;
        let mut phi = 0.0;
        let mut prev = 0u64;
        let (mut lp, mut fp) = (0u32, 0u32);
        let sigma = if s.permutation.len() == self.n {
            std::borrow::Cow::Borrowed(&s.permutation)
        } else {
            std::borrow::Cow::Owned(s.chamber())
        };
        for &e in sigma.iter() {
            let cur = prev | 1 << e;
            let l = self.loops[cur as usize];
            let f = self.flags[cur as usize] & FLAG_MASS_MOMENTUM_SPANNING;
            let y = s.log_x[e];
            psi += y * f64::from(l - lp);
            phi += y * (f64::from(l + f) - f64::from(lp + fp));
            lp = l;
            fp = f;
            prev = cur;
        }
        (psi, phi)
    }

    pub fn write_to(&self, w: impl Write) -> Result<()> {
        let mut w = BufWriter::new(w);
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(self.n as u32).to_le_bytes())?;
        for i in 0..self.r.len() {
            w.write_all(&self.r[i].to_le_bytes())?;
            w.write_all(&self.log_j[i].to_le_bytes())?;
            w.write_all(&self.loops[i].to_le_bytes())?;
            w.write_all(&self.flags[i].to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from(r: impl Read, opts: &TableOptions) -> Result<Self> {
        let mut r = BufReader::new(r);
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)
            .map_err(|_| Error::TableFormat("truncated header".into()))?;
        if &magic != MAGIC {
            return Err(Error::TableFormat("bad magic, not a TROPFEYN file".into()));
        }
        let mut b4 = [0u8; 4];
        r.read_exact(&mut b4)
            .map_err(|_| Error::TableFormat("truncated header".into()))?;
        let version = u32::from_le_bytes(b4);
        if version != VERSION {
            return Err(Error::TableFormat(format!("unsupported version {version}")));
        }
        r.read_exact(&mut b4)
            .map_err(|_| Error::TableFormat("truncated header".into()))?;
        let n = u32::from_le_bytes(b4) as usize;
        check_size_for(n, opts)?;
        let size = 1usize << n;
        let mut t = Self {
            n,
            r: Vec::with_capacity(size),
            log_j: Vec::with_capacity(size),
            log_weight: Vec::with_capacity(size),
            loops: Vec::with_capacity(size),
            flags: Vec::with_capacity(size),
        };
        let mut rec = [0u8; 24];
        let full = full_mask(n) as usize;
        for i in 0..size {
            r.read_exact(&mut rec)
                .map_err(|_| Error::TableFormat(format!("truncated at record {i} of {size}")))?;
            let rv = f64::from_le_bytes(rec[0..8].try_into().expect("8 bytes"));
            let lj = f64::from_le_bytes(rec[8..16].try_into().expect("8 bytes"));
            t.r.push(rv);
            t.log_j.push(lj);
            t.log_weight.push(if i == full { f64::NAN } else { lj - rv.ln() });
            t.loops.push(u32::from_le_bytes(rec[16..20].try_into().expect("4 bytes")));
            t.flags.push(u32::from_le_bytes(rec[20..24].try_into().expect("4 bytes")));
        }
        if r.read(&mut [0u8; 1])? != 0 {
            return Err(Error::TableFormat("trailing bytes after the last record".into()));
        }
        Ok(t)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_to(std::fs::File::create(path)?)
    }

    pub fn load(path: impl AsRef<Path>, opts: &TableOptions) -> Result<Self> {
        Self::read_from(std::fs::File::open(path)?, opts)
    }
}

/// Build the J table for `r`; see [`SubsetTable::build`].
pub fn build_subset_table(r: &BooleanTable, opts: &TableOptions) -> Result<SubsetTable> {
    SubsetTable::build(r, opts)
}

impl Sampler for SubsetTable {
    fn dim(&self) -> usize {
        self.n
    }

    fn normalization(&self) -> f64 {
        self.itr()
    }

    /// Peel elements off `[n]` one at a time, removing `e` from `A` with
    /// probability `J(A\e) / (r(A\e) J(A))`; consecutive gaps in `log x` are
    /// exponential with rate `r` of the remaining set.
    fn draw(&self, rng: &mut RandomStream, out: &mut TropicalSample) {
        let n = self.n;
        out.log_x.resize(n, 0.0);
        out.permutation.resize(n, 0);
        out.sector = None;
        let mut a = full_mask(n);
        let mut log_k = 0.0;
        for size in (1..=n).rev() {
            let e = if size == 1 {
                a.trailing_zeros()
            } else {
                let lj = self.log_j[a as usize];
                let u = rng.uniform_open();
                let mut acc = 0.0;
                let mut bits = a;
                let mut pick = 63 - a.leading_zeros();
                while bits != 0 {
                    let e = bits.trailing_zeros();
                    bits &= bits - 1;
                    acc += (self.log_weight[(a & !(1 << e)) as usize] - lj).exp();
                    if u < acc {
                        pick = e;
                        break;
                    }
                }
                pick
            } as usize;
            a &= !(1 << e);
            out.permutation[size - 1] = e;
            out.log_x[e] = log_k;
            if a != 0 {
                log_k += rng.uniform_open().ln() / self.r[a as usize];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn card(f: impl Fn(u32) -> f64, n: usize) -> BooleanTable {
        BooleanTable::from_fn(n, |m| f(m.count_ones())).unwrap()
    }

    #[test]
    fn supermodular_examples() {
        let pi = card(|k| f64::from(k * (k + 1) / 2), 4);
        assert!(check_supermodular(&pi, 0, 0).passed());
        assert!(check_supermodular(&card(|k| f64::from(k * k), 3), 0, 0).passed());
        match check_supermodular(&card(|k| -f64::from(k * k), 2), 0, 0) {
            SupermodularReport::Violation { a, b, z_a, z_b, z_cap, z_cup } => {
                assert_eq!((a, b), (0b01, 0b10));
                assert_eq!((z_a, z_b, z_cap, z_cup), (-1.0, -1.0, 0.0, -4.0));
            }
            v => panic!("expected a violation, got {v:?}"),
        }
    }

    #[test]
    fn permutahedron_vertices() {
        let pi = card(|k| f64::from(k * (k + 1) / 2), 4);
        let sigma = Permutation::new(vec![2, 0, 3, 1]).unwrap();
        let w = pi.vertex(&sigma);
        assert_eq!(w, vec![2.0, 4.0, 1.0, 3.0]);
        assert_eq!(card(|_| 0.0, 3).vertex(&sigma_of(3)), vec![0.0; 3]);
    }

    fn sigma_of(n: usize) -> Permutation {
        Permutation::identity(n)
    }

    #[test]
    fn triangle_psi_vertex() {
        // loop number of edge subsets of the triangle: only the full set has a loop.
        let z = BooleanTable::from_fn(3, |m| f64::from(m == 0b111)).unwrap();
        assert_eq!(z.vertex(&sigma_of(3)), vec![0.0, 0.0, 1.0]);
        let s = TropicalSample {
            log_x: vec![-2.0, -1.0, 0.0],
            permutation: vec![0, 1, 2],
            sector: None,
        };
        assert_eq!(z.trop_value(&s), 0.0);
    }

    #[test]
    fn j_recursion_examples() {
        let opts = TableOptions::default();
        let t = build_subset_table(&card(|_| 1.0, 2), &opts).unwrap();
        assert!((t.itr() - 2.0).abs() < 1e-15);
        let tri = build_subset_table(&card(|k| f64::from(k), 3), &opts).unwrap();
        assert!((tri.itr() - 3.0).abs() < 1e-14);
        let bad = BooleanTable::new(2, vec![1.0, 0.0, 1.0, 0.0]).unwrap();
        match build_subset_table(&bad, &opts) {
            Err(Error::Divergent { subsets, .. }) => assert_eq!(subsets, vec![0b01]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn memory_cap_refuses() {
        let r = card(|_| 1.0, 10);
        let opts = TableOptions { memory_cap: 1000 };
        assert!(matches!(
            build_subset_table(&r, &opts),
            Err(Error::MemoryLimit { n: 10, bytes: 32768, cap: 1000 })
        ));
    }

    #[test]
    fn binary_round_trip() {
        let t = build_subset_table(&card(|k| 0.5 + f64::from(k), 4), &TableOptions::default())
            .unwrap()
            .with_payload((0..16).collect(), (0..16).map(|i| i % 2).collect())
            .unwrap();
        let mut buf = Vec::new();
        t.write_to(&mut buf).unwrap();
        assert_eq!(buf.len(), 16 + 16 * 24);
        let back = SubsetTable::read_from(buf.as_slice(), &TableOptions::default()).unwrap();
        assert_eq!(back.log_j, t.log_j);
        assert_eq!(back.r, t.r);
        assert_eq!(back.flags, t.flags);
        assert!(SubsetTable::read_from(&buf[..buf.len() - 1], &TableOptions::default()).is_err());
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(SubsetTable::read_from(bad.as_slice(), &TableOptions::default()).is_err());
    }

    #[test]
    fn samples_are_normalized() {
        let t = build_subset_table(&card(|k| f64::from(k), 3), &TableOptions::default()).unwrap();
        let mut rng = RandomStream::new(5, 0);
        let mut s = TropicalSample::with_dim(3);
        for _ in 0..1000 {
            t.draw(&mut rng, &mut s);
            let last = s.permutation[2];
            assert_eq!(s.log_x[last], 0.0);
            assert!(s.log_x.iter().all(|&y| y <= 0.0));
            let p = &s.permutation;
            assert!(s.log_x[p[0]] <= s.log_x[p[1]] && s.log_x[p[1]] <= s.log_x[p[2]]);
        }
    }

    #[test]
    fn two_element_chambers_are_equally_likely() {
        let t = build_subset_table(&card(|_| 1.0, 2), &TableOptions::default()).unwrap();
        let mut rng = RandomStream::new(11, 0);
        let mut s = TropicalSample::with_dim(2);
        let n = 100_000;
        let hits = (0..n)
            .filter(|_| {
                t.draw(&mut rng, &mut s);
                s.permutation == [0, 1]
            })
            .count() as f64;
        assert!((hits / n as f64 - 0.5).abs() < 4.0 * (0.25 / n as f64).sqrt());
    }
}
