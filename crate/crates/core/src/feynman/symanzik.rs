//! Fast evaluation of the Symanzik polynomials through the reduced Laplacian.
//!
//! `Psi = prod x_e * det L~` and `Phi = Psi * (Tr(P^T L~^{-1} P) + sum x_e m_e^2)`
//! where `L~` is the Laplacian with conductances `1/x_e` and the last vertex
//! removed. The factorization eliminates vertices one at a time and only ever
//! adds positive numbers (the pivots are conductances to the eliminated part of
//! the graph), so the determinant is computed to full relative precision.

use super::graph::FeynmanGraph;

/// Smallest `log x_e` accepted; below it `1/x_e` would overflow a double.
pub const MIN_LOG_X: f64 = -708.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymanzikValue {
    pub log_psi: f64,
    /// `-inf` when `Phi` vanishes identically.
    pub log_phi: f64,
}

/// Precomputed graph data for repeated evaluation.
#[derive(Debug, Clone)]
pub struct Symanzik {
    m: usize,
    kd: usize,
    edges: Vec<(usize, usize)>,
    ground: usize,
    momenta: Vec<f64>,
    masses: Vec<(usize, f64)>,
}

/// Per-worker scratch space.
#[derive(Debug, Clone)]
pub struct SymanzikWorkspace {
    c: Vec<f64>,
    g: Vec<f64>,
    y: Vec<f64>,
}

impl Symanzik {
    pub fn new(graph: &FeynmanGraph) -> Self {
        let v = graph.num_vertices();
        let m = v - 1;
        let kd = graph.kinematic_dim();
        let mut momenta = vec![0.0; m * kd];
        for i in 0..m {
            momenta[i * kd..(i + 1) * kd].copy_from_slice(&graph.momentum(i));
        }
        let masses = graph
            .masses_sq()
            .iter()
            .enumerate()
            .filter(|(_, m2)| **m2 > 0.0)
            .map(|(e, m2)| (e, m2.ln()))
            .collect();
        Self {
            m,
            kd,
            edges: graph.edges().to_vec(),
            ground: m,
            momenta,
            masses,
        }
    }

    pub fn workspace(&self) -> SymanzikWorkspace {
        SymanzikWorkspace {
            c: vec![0.0; self.m * self.m],
            g: vec![0.0; self.m],
            y: vec![0.0; self.m * self.kd],
        }
    }

    /// `None` if the point is outside the representable range or the
    /// factorization breaks down.
    pub fn eval(&self, ws: &mut SymanzikWorkspace, log_x: &[f64]) -> Option<SymanzikValue> {
        let m = self.m;
        let kd = self.kd;
        let mut min = f64::INFINITY;
        let mut sum_log = 0.0;
        for &y in log_x {
            if !y.is_finite() {
                return None;
            }
            min = min.min(y);
            sum_log += y;
        }
        if min < MIN_LOG_X {
            return None;
        }

        let c = &mut ws.c;
        let g = &mut ws.g;
        c.iter_mut().for_each(|v| *v = 0.0);
        g.iter_mut().for_each(|v| *v = 0.0);
        // Conductances scaled by x_min lie in (0, 1].
        for (&(a, b), &y) in self.edges.iter().zip(log_x) {
            let ce = (min - y).exp();
            if a == self.ground {
                g[b] += ce;
            } else if b == self.ground {
                g[a] += ce;
            } else {
                c[a * m + b] += ce;
                c[b * m + a] += ce;
            }
        }
        let y = &mut ws.y;
        y.copy_from_slice(&self.momenta);

        let mut log_det = 0.0;
        let mut trace = 0.0;
        for k in 0..m {
            let mut p = g[k];
            for j in k + 1..m {
                p += c[k * m + j];
            }
            if !(p > 0.0 && p.is_finite()) {
                return None;
            }
            log_det += p.ln();
            for mu in 0..kd {
                let yk = y[k * kd + mu];
                trace += yk * yk / p;
            }
            for i in k + 1..m {
                let cik = c[i * m + k];
                if cik == 0.0 {
                    continue;
                }
                let f = cik / p;
                g[i] += f * g[k];
                for j in k + 1..m {
                    if j != i {
                        c[i * m + j] += f * c[k * m + j];
                    }
                }
                for mu in 0..kd {
                    y[i * kd + mu] += f * y[k * kd + mu];
                }
            }
        }

        let log_psi = sum_log + log_det - m as f64 * min;
        let log_mom = if trace > 0.0 { min + trace.ln() } else { f64::NEG_INFINITY };
        let log_mass = log_sum_exp(self.masses.iter().map(|&(e, lm)| log_x[e] + lm));
        let log_phi = log_psi + log_add_exp(log_mom, log_mass);
        if !log_psi.is_finite() || log_phi.is_nan() || log_phi == f64::INFINITY {
            return None;
        }
        Some(SymanzikValue { log_psi, log_phi })
    }
}

pub(crate) fn log_add_exp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

pub(crate) fn log_sum_exp(it: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = it.clone().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + it.map(|v| (v - m).exp()).sum::<f64>().ln()
}

/// One-shot evaluation; see [`Symanzik::eval`].
pub fn psi_phi_eval(graph: &FeynmanGraph, log_x: &[f64]) -> Option<SymanzikValue> {
    let s = Symanzik::new(graph);
    let mut ws = s.workspace();
    s.eval(&mut ws, log_x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bubble() -> FeynmanGraph {
        FeynmanGraph::new(2, vec![(0, 1), (0, 1)], 4.0)
            .unwrap()
            .with_momenta(vec![vec![1.0], vec![-1.0]])
            .unwrap()
    }

    #[test]
    fn bubble_values() {
        let v = psi_phi_eval(&bubble(), &[0.0, 0.0]).unwrap();
        assert!((v.log_psi - 2f64.ln()).abs() < 1e-15);
        assert!(v.log_phi.abs() < 1e-15);
        // Phi = x1 x2 p^2 + (x1 + x2)(x1 m1 + x2 m2) at x = (2, 3), m = (0.5, 0)
        let g = bubble().with_masses_sq(vec![0.5, 0.0]).unwrap();
        let v = psi_phi_eval(&g, &[2f64.ln(), 3f64.ln()]).unwrap();
        assert!((v.log_phi - (6.0f64 + 5.0).ln()).abs() < 1e-14);
    }

    #[test]
    fn triangle_and_tree() {
        let tri = FeynmanGraph::new(3, vec![(0, 1), (1, 2), (2, 0)], 6.0).unwrap();
        let v = psi_phi_eval(&tri, &[0.0; 3]).unwrap();
        assert!((v.log_psi - 3f64.ln()).abs() < 1e-15);
        assert_eq!(v.log_phi, f64::NEG_INFINITY);
        let path = FeynmanGraph::new(3, vec![(0, 1), (1, 2)], 4.0).unwrap();
        let v = psi_phi_eval(&path, &[1.3, -4.0]).unwrap();
        assert!(v.log_psi.abs() < 1e-14);
    }

    #[test]
    fn rejects_underflow() {
        assert!(psi_phi_eval(&bubble(), &[0.0, -800.0]).is_none());
        assert!(psi_phi_eval(&bubble(), &[0.0, f64::NAN]).is_none());
        assert!(psi_phi_eval(&bubble(), &[0.0, -700.0]).is_some());
    }
}
