//! Vose's alias method: O(n) construction, O(1) draws.

use crate::error::{Error, Result};
use crate::rng::RandomStream;

#[derive(Debug, Clone)]
pub struct AliasTable {
    prob: Vec<f64>,
    alias: Vec<usize>,
}

impl AliasTable {
    /// Build from non-negative weights with a positive finite sum.
    pub fn new(weights: &[f64]) -> Result<Self> {
        let n = weights.len();
        if n == 0 {
            return Err(Error::InvalidInput("alias table needs at least one weight".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidInput("alias weights must be finite and non-negative".into()));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::InvalidInput("alias weights must have a positive finite sum".into()));
        }

        let mut scaled: Vec<f64> = weights.iter().map(|w| w * n as f64 / total).collect();
        let mut prob = vec![0.0; n];
        let mut alias: Vec<usize> = (0..n).collect();
        let (mut small, mut large): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| scaled[i] < 1.0);

        while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
            small.pop();
            prob[s] = scaled[s];
            alias[s] = l;
            scaled[l] = (scaled[l] + scaled[s]) - 1.0;
            if scaled[l] < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        // Leftovers are 1 up to rounding.
        for i in large.into_iter().chain(small) {
            prob[i] = 1.0;
        }
        Ok(Self { prob, alias })
    }

    pub fn len(&self) -> usize {
        self.prob.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prob.is_empty()
    }

    #[inline]
    pub fn sample(&self, rng: &mut RandomStream) -> usize {
        let i = rng.index(self.prob.len());
        if rng.uniform_open() < self.prob[i] {
            i
        } else {
            self.alias[i]
        }
    }

    /// The probabilities encoded by the table.
    pub fn probabilities(&self) -> Vec<f64> {
        let n = self.prob.len() as f64;
        let mut p = vec![0.0; self.prob.len()];
        for (i, (&q, &a)) in self.prob.iter().zip(&self.alias).enumerate() {
            p[i] += q / n;
            p[a] += (1.0 - q) / n;
        }
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_weights() {
        let w = [1.0, 2.0, 3.0, 0.0, 4.0];
        let t = AliasTable::new(&w).unwrap();
        for (p, w) in t.probabilities().iter().zip(w) {
            assert!((p - w / 10.0).abs() < 1e-15);
        }
    }

    #[test]
    fn single_entry_always_drawn() {
        let t = AliasTable::new(&[0.3]).unwrap();
        let mut rng = RandomStream::new(1, 0);
        assert!((0..100).all(|_| t.sample(&mut rng) == 0));
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(AliasTable::new(&[]).is_err());
        assert!(AliasTable::new(&[0.0, 0.0]).is_err());
        assert!(AliasTable::new(&[1.0, f64::NAN]).is_err());
        assert!(AliasTable::new(&[1.0, -1.0]).is_err());
    }

    #[test]
    fn empirical_frequencies() {
        let t = AliasTable::new(&[1.0, 3.0]).unwrap();
        let mut rng = RandomStream::new(9, 0);
        let n = 100_000;
        let hits = (0..n).filter(|_| t.sample(&mut rng) == 1).count() as f64;
        let sd = (n as f64 * 0.75 * 0.25).sqrt();
        assert!((hits - 0.75 * n as f64).abs() < 4.0 * sd);
    }
}
