//! Monte Carlo estimation with mergeable streaming moments.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::sample::{Integrand, Sampler, TropicalSample};

/// Default maximal fraction of rejected samples before a run aborts.
pub const DEFAULT_REJECT_THRESHOLD: f64 = 1e-6;

/// Running count, mean and central moment sums of a vector valued stream.
///
/// The third and fourth moments are kept only as a tail diagnostic for the
/// logarithmically weighted integrands.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorState {
    count: u64,
    mean: Vec<f64>,
    m2: Vec<f64>,
    m3: Vec<f64>,
    m4: Vec<f64>,
    rejected: u64,
    scale: f64,
}

impl EstimatorState {
    pub fn new(components: usize, scale: f64) -> Self {
        Self {
            count: 0,
            mean: vec![0.0; components],
            m2: vec![0.0; components],
            m3: vec![0.0; components],
            m4: vec![0.0; components],
            rejected: 0,
            scale,
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn rejected(&self) -> u64 {
        self.rejected
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn components(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn m2(&self) -> &[f64] {
        &self.m2
    }

    pub fn reject(&mut self) {
        self.rejected += 1;
    }

    #[inline]
    pub fn push(&mut self, x: &[f64]) {
        debug_assert_eq!(x.len(), self.mean.len());
        let n1 = self.count as f64;
        self.count += 1;
        let n = self.count as f64;
        for c in 0..x.len() {
            let delta = x[c] - self.mean[c];
            let dn = delta / n;
            let dn2 = dn * dn;
            let t1 = delta * dn * n1;
            self.mean[c] += dn;
            self.m4[c] += t1 * dn2 * (n * n - 3.0 * n + 3.0) + 6.0 * dn2 * self.m2[c] - 4.0 * dn * self.m3[c];
            self.m3[c] += t1 * dn * (n - 2.0) - 3.0 * dn * self.m2[c];
            self.m2[c] += t1;
        }
    }

    /// Pool two states as if their streams had been concatenated.
    pub fn merge(&self, other: &Self) -> Result<Self> {
        if self.mean.len() != other.mean.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} vs {} components",
                self.mean.len(),
                other.mean.len()
            )));
        }
        if self.scale != other.scale {
            return Err(Error::ShapeMismatch(format!("scale {} vs {}", self.scale, other.scale)));
        }
        let mut out = self.clone();
        out.rejected += other.rejected;
        if other.count == 0 {
            return Ok(out);
        }
        if self.count == 0 {
            let mut o = other.clone();
            o.rejected = out.rejected;
            return Ok(o);
        }
        let na = self.count as f64;
        let nb = other.count as f64;
        let n = na + nb;
        for c in 0..self.mean.len() {
            let d = other.mean[c] - self.mean[c];
            let d2 = d * d;
            let (m2a, m2b) = (self.m2[c], other.m2[c]);
            let (m3a, m3b) = (self.m3[c], other.m3[c]);
            out.mean[c] = self.mean[c] + d * nb / n;
            out.m2[c] = m2a + m2b + d2 * na * nb / n;
            out.m3[c] = m3a + m3b + d * d2 * na * nb * (na - nb) / (n * n) + 3.0 * d * (na * m2b - nb * m2a) / n;
            out.m4[c] = self.m4[c]
                + other.m4[c]
                + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
                + 6.0 * d2 * (na * na * m2b + nb * nb * m2a) / (n * n)
                + 4.0 * d * (na * m3b - nb * m3a) / n;
        }
        out.count += other.count;
        Ok(out)
    }

    /// `scale * mean`.
    pub fn estimate(&self) -> Vec<f64> {
        self.mean.iter().map(|m| self.scale * m).collect()
    }

    /// `scale * sqrt(M2 / (N (N - 1)))`; NaN when fewer than two samples.
    pub fn std_error(&self) -> Vec<f64> {
        let n = self.count as f64;
        self.m2
            .iter()
            .map(|m2| {
                if self.count < 2 {
                    f64::NAN
                } else {
                    self.scale * (m2 / (n * (n - 1.0))).sqrt()
                }
            })
            .collect()
    }

    /// Per-sample variance of the scaled values.
    pub fn variance(&self) -> Vec<f64> {
        let n = self.count as f64;
        self.m2
            .iter()
            .map(|m2| self.scale * self.scale * m2 / (n - 1.0))
            .collect()
    }

    /// Sample kurtosis `N M4 / M2^2`; 3 for a Gaussian, large for heavy tails.
    pub fn kurtosis(&self) -> Vec<f64> {
        let n = self.count as f64;
        self.m2
            .iter()
            .zip(&self.m4)
            .map(|(m2, m4)| if *m2 > 0.0 { n * m4 / (m2 * m2) } else { f64::NAN })
            .collect()
    }
}

fn nan_or_f64<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

fn nan_or_vec<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Vec<f64>, D::Error> {
    let v = Vec::<Option<f64>>::deserialize(d)?;
    Ok(v.into_iter().map(|x| x.unwrap_or(f64::NAN)).collect())
}

/// Result of a run. Undefined statistics are NaN and serialize as `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    #[serde(rename = "I_tr")]
    pub i_tr: f64,
    pub estimate: Vec<f64>,
    #[serde(deserialize_with = "nan_or_vec")]
    pub std_error: Vec<f64>,
    pub n_samples: u64,
    pub n_rejected: u64,
    #[serde(rename = "sigma_over_I", deserialize_with = "nan_or_f64")]
    pub sigma_over_i: f64,
    #[serde(deserialize_with = "nan_or_vec")]
    pub kurtosis: Vec<f64>,
    pub seconds_preprocess: f64,
    pub seconds_sampling: f64,
    pub samples_per_second: f64,
    pub seed: u64,
    pub workers: usize,
}

impl EstimateReport {
    pub fn from_state(state: &EstimatorState, seed: u64, workers: usize, seconds_sampling: f64) -> Self {
        let estimate = state.estimate();
        let std_error = state.std_error();
        let attempted = state.count() + state.rejected();
        let mut r = Self {
            i_tr: state.scale(),
            estimate,
            std_error,
            n_samples: state.count(),
            n_rejected: state.rejected(),
            sigma_over_i: f64::NAN,
            kurtosis: state.kurtosis(),
            seconds_preprocess: 0.0,
            seconds_sampling,
            samples_per_second: attempted as f64 / seconds_sampling.max(1e-9),
            seed,
            workers,
        };
        r.sigma_over_i = r.sigma_over_i_of(0).unwrap_or(f64::NAN);
        r
    }

    /// Per-sample relative deviation `std_error * sqrt(N) / |estimate|` of one
    /// component; `None` for a zero estimate or undefined error.
    pub fn sigma_over_i_of(&self, component: usize) -> Option<f64> {
        let est = *self.estimate.get(component)?;
        let se = *self.std_error.get(component)?;
        if est == 0.0 || !se.is_finite() {
            return None;
        }
        Some(se * (self.n_samples as f64).sqrt() / est.abs())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
    pub reject_threshold: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            samples: 1_000_000,
            seed: 0,
            workers: 1,
            reject_threshold: DEFAULT_REJECT_THRESHOLD,
        }
    }
}

impl RunOptions {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self {
            samples,
            seed,
            ..Self::default()
        }
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }
}

fn run_worker<S: Sampler + ?Sized, F: Integrand>(
    sampler: &S,
    f: &F,
    attempts: u64,
    seed: u64,
    stream: u64,
) -> EstimatorState {
    let mut rng = RandomStream::new(seed, stream);
    let mut state = EstimatorState::new(f.components(), sampler.normalization());
    let mut ws = f.workspace();
    let mut s = TropicalSample::with_dim(sampler.dim());
    let mut out = vec![0.0; f.components()];
    for _ in 0..attempts {
        sampler.draw(&mut rng, &mut s);
        if f.eval(&mut ws, &s, &mut out) && out.iter().all(|v| v.is_finite()) {
            state.push(&out);
        } else {
            state.reject();
        }
    }
    state
}

/// Estimate `I^tr * E[f]` under the sampler's measure.
///
/// Worker `w` draws from stream `w` of `seed`, so the result is a function of
/// `(seed, workers)` only.
pub fn estimate<S: Sampler + ?Sized, F: Integrand>(sampler: &S, f: &F, opts: RunOptions) -> Result<EstimateReport> {
    if opts.samples < 2 {
        return Err(Error::InvalidInput("need at least 2 samples".into()));
    }
    let workers = opts.workers.max(1);
    let start = Instant::now();
    let per = opts.samples / workers as u64;
    let extra = opts.samples % workers as u64;
    let quota = |w: usize| per + u64::from((w as u64) < extra);

    let states: Vec<EstimatorState> = if workers == 1 {
        vec![run_worker(sampler, f, opts.samples, opts.seed, 0)]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| scope.spawn(move || run_worker(sampler, f, quota(w), opts.seed, w as u64)))
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        })
    };
    let mut total = EstimatorState::new(f.components(), sampler.normalization());
    for s in &states {
        total = total.merge(s)?;
    }
    let secs = start.elapsed().as_secs_f64();

    let attempted = total.count() + total.rejected();
    if total.rejected() as f64 > opts.reject_threshold * attempted as f64 {
        return Err(Error::RejectionBudget {
            rejected: total.rejected(),
            attempted,
            threshold: opts.reject_threshold,
        });
    }
    Ok(EstimateReport::from_state(&total, opts.seed, workers, secs))
}
