//! Symanzik polynomials by enumeration of spanning trees and 2-forests.
//! Exponential in the edge count; used as an oracle and for the general
//! sector path on small graphs.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::graph::{FeynmanGraph, UnionFind};
use super::symanzik::SymanzikValue;
use crate::error::{Error, Result};
use crate::poly::{SparsePolynomial, Term};

/// Largest edge count the enumeration accepts.
pub const MAX_REFERENCE_EDGES: usize = 14;

/// A multigraph that may carry self-loops, as produced by contraction.
#[derive(Debug, Clone)]
pub struct Multigraph {
    pub num_vertices: usize,
    pub edges: Vec<(usize, usize)>,
    pub masses_sq: Vec<f64>,
    pub momenta: Vec<Vec<f64>>,
}

impl Multigraph {
    pub fn of(g: &FeynmanGraph) -> Self {
        Self {
            num_vertices: g.num_vertices(),
            edges: g.edges().to_vec(),
            masses_sq: g.masses_sq().to_vec(),
            momenta: (0..g.num_vertices()).map(|v| g.momentum(v)).collect(),
        }
    }

    /// `G / gamma`: merge the endpoints of every edge in `mask` and drop those
    /// edges. Remaining edges may become self-loops.
    pub fn contract(&self, mask: u64) -> Self {
        let mut uf = UnionFind::new(self.num_vertices);
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            if mask >> i & 1 == 1 {
                uf.union(a, b);
            }
        }
        let mut label = vec![usize::MAX; self.num_vertices];
        let mut next = 0;
        for v in 0..self.num_vertices {
            let r = uf.find(v);
            if label[r] == usize::MAX {
                label[r] = next;
                next += 1;
            }
        }
        let kd = self.momenta.first().map_or(0, |p| p.len());
        let mut momenta = vec![vec![0.0; kd]; next];
        for v in 0..self.num_vertices {
            let t = label[uf.find(v)];
            for (a, b) in momenta[t].iter_mut().zip(&self.momenta[v]) {
                *a += b;
            }
        }
        let keep: Vec<usize> = (0..self.edges.len()).filter(|i| mask >> i & 1 == 0).collect();
        Self {
            num_vertices: next,
            edges: keep
                .iter()
                .map(|&i| {
                    let (a, b) = self.edges[i];
                    (label[uf.find(a)], label[uf.find(b)])
                })
                .collect(),
            masses_sq: keep.iter().map(|&i| self.masses_sq[i]).collect(),
            momenta,
        }
    }

    fn momentum_scale(&self) -> f64 {
        self.momenta
            .iter()
            .map(|p| p.iter().map(|x| x * x).sum::<f64>())
            .sum::<f64>()
    }

    /// Visit every spanning forest with exactly `k` components; the callback
    /// receives the edge mask and the union-find of the forest.
    fn forests(&self, k: usize, mut f: impl FnMut(u64, &mut UnionFind)) {
        let e = self.edges.len();
        if self.num_vertices < k {
            return;
        }
        let size = self.num_vertices - k;
        if size > e {
            return;
        }
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let mut uf = UnionFind::new(self.num_vertices);
            let acyclic = idx.iter().all(|&i| {
                let (a, b) = self.edges[i];
                uf.union(a, b)
            });
            if acyclic {
                let mask = idx.iter().fold(0u64, |m, &i| m | 1 << i);
                f(mask, &mut uf);
            }
            let Some(i) = (0..size).rev().find(|&i| idx[i] < e - size + i) else {
                return;
            };
            idx[i] += 1;
            for j in i + 1..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }

    fn cut_momentum_sq(&self, uf: &mut UnionFind) -> f64 {
        let root = uf.find(0);
        let kd = self.momenta.first().map_or(0, |p| p.len());
        let mut s = vec![0.0; kd];
        for v in 0..self.num_vertices {
            if uf.find(v) == root {
                for (a, b) in s.iter_mut().zip(&self.momenta[v]) {
                    *a += b;
                }
            }
        }
        s.iter().map(|x| x * x).sum()
    }

    /// True if the second Symanzik polynomial is the zero polynomial: no
    /// massive edge and no 2-forest with momentum flowing across it.
    pub fn phi_is_zero(&self) -> bool {
        if self.masses_sq.iter().any(|m| *m > 0.0) {
            return false;
        }
        let tol = 1e-12 * self.momentum_scale().max(1e-300);
        let mut zero = true;
        self.forests(2, |_, uf| {
            if zero && self.cut_momentum_sq(uf) > tol {
                zero = false;
            }
        });
        zero
    }
}

/// Expanded Symanzik polynomials in the edge variables.
#[derive(Debug, Clone)]
pub struct ExpandedSymanzik {
    pub psi: SparsePolynomial,
    /// `None` when `Phi` is the zero polynomial.
    pub phi: Option<SparsePolynomial>,
}

fn complement_exponent(mask: u64, e: usize) -> Vec<u32> {
    (0..e).map(|i| u32::from(mask >> i & 1 == 0)).collect()
}

fn poly_of(map: BTreeMap<Vec<u32>, f64>, e: usize) -> Result<Option<SparsePolynomial>> {
    let terms: Vec<Term> = map
        .into_iter()
        .filter(|(_, c)| *c != 0.0)
        .map(|(exponent, c)| Term {
            exponent,
            coeff: Complex64::new(c, 0.0),
        })
        .collect();
    if terms.is_empty() {
        return Ok(None);
    }
    SparsePolynomial::new(e, terms).map(Some)
}

/// `Psi = sum_T prod_{e not in T} x_e` and
/// `Phi = sum_F |p(F)|^2 prod_{e not in F} x_e + Psi sum_e x_e m_e^2`.
pub fn expand_symanzik(g: &FeynmanGraph) -> Result<ExpandedSymanzik> {
    let e = g.num_edges();
    if e > MAX_REFERENCE_EDGES {
        return Err(Error::TooLarge {
            what: "spanning tree enumeration",
            size: e,
            limit: MAX_REFERENCE_EDGES,
        });
    }
    let mg = Multigraph::of(g);
    let mut psi = BTreeMap::new();
    mg.forests(1, |mask, _| {
        *psi.entry(complement_exponent(mask, e)).or_insert(0.0) += 1.0;
    });
    let mut phi = BTreeMap::new();
    let tol = 1e-12 * mg.momentum_scale().max(1e-300);
    mg.forests(2, |mask, uf| {
        let p2 = mg.cut_momentum_sq(uf);
        if p2 > tol {
            *phi.entry(complement_exponent(mask, e)).or_insert(0.0) += p2;
        }
    });
    for (i, &m2) in g.masses_sq().iter().enumerate() {
        if m2 > 0.0 {
            for exp in psi.keys() {
                let mut x = exp.clone();
                x[i] += 1;
                *phi.entry(x).or_insert(0.0) += m2;
            }
        }
    }
    let psi = poly_of(psi, e)?.ok_or_else(|| Error::InvalidInput("graph has no spanning tree".into()))?;
    Ok(ExpandedSymanzik {
        psi,
        phi: poly_of(phi, e)?,
    })
}

/// Oracle values of `log Psi`, `log Phi` at a positive point.
pub fn psi_phi_reference(g: &FeynmanGraph, x: &[f64]) -> Result<SymanzikValue> {
    if x.len() != g.num_edges() || x.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidInput("x must be a positive vector with one entry per edge".into()));
    }
    let ex = expand_symanzik(g)?;
    let y: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let log_psi = ex.psi.eval_log(&y)?.log_abs;
    let log_phi = match &ex.phi {
        Some(p) => p.eval_log(&y)?.log_abs,
        None => f64::NEG_INFINITY,
    };
    Ok(SymanzikValue { log_psi, log_phi })
}

/// Mass-momentum-spanning through `Phi_{G/gamma} = 0`.
pub fn is_mm_by_contraction(g: &FeynmanGraph, mask: u64) -> bool {
    Multigraph::of(g).contract(mask).phi_is_zero()
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
    fn bubble_polynomials() {
        let g = bubble().with_masses_sq(vec![2.0, 3.0]).unwrap();
        let ex = expand_symanzik(&g).unwrap();
        let exps: Vec<Vec<u32>> = ex.psi.support().map(|e| e.to_vec()).collect();
        assert_eq!(exps, vec![vec![0, 1], vec![1, 0]]);
        // |p|^2 x1 x2 + (x1 + x2)(2 x1 + 3 x2) = 2 x1^2 + 6 x1 x2 + 3 x2^2
        let phi = ex.phi.unwrap();
        let mut t: Vec<(Vec<u32>, f64)> = phi.terms().iter().map(|t| (t.exponent.clone(), t.coeff.re)).collect();
        t.sort_by(|a, b| a.0.cmp(&b.0));
        assert_eq!(t, vec![(vec![0, 2], 3.0), (vec![1, 1], 6.0), (vec![2, 0], 2.0)]);
    }

    #[test]
    fn tree_and_triangle() {
        let path = FeynmanGraph::new(3, vec![(0, 1), (1, 2)], 4.0).unwrap();
        let v = psi_phi_reference(&path, &[3.0, 5.0]).unwrap();
        assert_eq!(v.log_psi, 0.0);
        let tri = FeynmanGraph::new(3, vec![(0, 1), (1, 2), (2, 0)], 6.0).unwrap();
        let v = psi_phi_reference(&tri, &[1.0, 2.0, 4.0]).unwrap();
        assert!((v.log_psi - 7f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn contraction_flags() {
        let g = bubble();
        assert!(is_mm_by_contraction(&g, 0b01));
        assert!(is_mm_by_contraction(&g, 0b11));
        assert!(!is_mm_by_contraction(&g, 0));
        let m = bubble().with_masses_sq(vec![1.0, 0.0]).unwrap();
        assert!(!is_mm_by_contraction(&m, 0b10));
        assert!(is_mm_by_contraction(&m, 0b01));
    }
}
