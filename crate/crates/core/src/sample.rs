//! Samples on the positive projective simplex and the sampler/integrand traits
//! the Monte Carlo engine drives.

use crate::rng::RandomStream;

/// A point of the positive projective simplex in logarithmic coordinates.
///
/// The representative is normalized so that `max_k log_x[k] == 0`.
/// `permutation`, when non-empty, lists the ground elements in ascending order
/// of `log_x` (the Weyl chamber that produced the point); `sector` is the
/// index of the simplicial cone when the point came from a sector table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TropicalSample {
    pub log_x: Vec<f64>,
    pub permutation: Vec<usize>,
    pub sector: Option<usize>,
}

impl TropicalSample {
    pub fn with_dim(n: usize) -> Self {
        Self {
            log_x: vec![0.0; n],
            permutation: Vec::with_capacity(n),
            sector: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.log_x.len()
    }

    /// Shift so the largest coordinate is zero.
    pub fn normalize(&mut self) {
        let m = self.log_x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for y in &mut self.log_x {
            *y -= m;
        }
    }

    /// Permutation ordering the coordinates ascending. Uses the stored one if present.
    pub fn chamber(&self) -> Vec<usize> {
        if self.permutation.len() == self.log_x.len() {
            return self.permutation.clone();
        }
        chamber_of(&self.log_x)
    }
}

/// Indices sorted so that `y[σ(0)] <= y[σ(1)] <= ...`; ties keep index order.
pub fn chamber_of(y: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..y.len()).collect();
    idx.sort_by(|&a, &b| y[a].total_cmp(&y[b]));
    idx
}

/// Something that draws points distributed as a normalized tropical measure.
pub trait Sampler: Sync {
    /// Number of projective coordinates.
    fn dim(&self) -> usize;
    /// The normalization I^tr of the tropical measure.
    fn normalization(&self) -> f64;
    /// Overwrite `out` with a fresh sample.
    fn draw(&self, rng: &mut RandomStream, out: &mut TropicalSample);
}

/// A (possibly vector valued) function evaluated at samples.
pub trait Integrand: Sync {
    /// Per-worker scratch space.
    type Workspace: Send;

    fn workspace(&self) -> Self::Workspace;

    /// Number of output components.
    fn components(&self) -> usize;

    /// Write the value at `s` into `out`; return `false` to reject the sample.
    fn eval(&self, ws: &mut Self::Workspace, s: &TropicalSample, out: &mut [f64]) -> bool;
}

/// Adapts a scalar closure; `None` rejects the sample.
pub struct ScalarFn<F>(pub F);

impl<F> Integrand for ScalarFn<F>
where
    F: Fn(&TropicalSample) -> Option<f64> + Sync,
{
    type Workspace = ();

    fn workspace(&self) {}

    fn components(&self) -> usize {
        1
    }

    fn eval(&self, _: &mut (), s: &TropicalSample, out: &mut [f64]) -> bool {
        match (self.0)(s) {
            Some(v) if v.is_finite() => {
                out[0] = v;
                true
            }
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chamber_sorts_ascending() {
        assert_eq!(chamber_of(&[-1.0, -3.0, 0.0]), vec![1, 0, 2]);
        let mut s = TropicalSample {
            log_x: vec![1.0, 3.0, 2.0],
            ..Default::default()
        };
        s.normalize();
        assert_eq!(s.log_x, vec![-2.0, 0.0, -1.0]);
        assert_eq!(s.chamber(), vec![0, 2, 1]);
    }
}
