use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest edge count accepted (subsets are 64-bit masks).
pub const MAX_EDGES: usize = 63;

/// Graph file layout. Optional fields take their documented defaults.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct GraphFile {
    #[serde(default)]
    name: Option<String>,
    num_vertices: usize,
    edges: Vec<[usize; 2]>,
    #[serde(default)]
    nu: Option<Vec<f64>>,
    #[serde(rename = "D")]
    d: f64,
    #[serde(default)]
    masses_sq: Option<Vec<f64>>,
    #[serde(default)]
    momenta: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    kinematic_dim: Option<usize>,
}

/// A Feynman graph with Euclidean kinematics.
#[derive(Debug, Clone, PartialEq)]
pub struct FeynmanGraph {
    name: String,
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
    nu: Vec<f64>,
    dim: f64,
    masses_sq: Vec<f64>,
    momenta: Vec<Vec<f64>>,
}

/// Summary of a graph's kinematics.
#[derive(Debug, Clone, PartialEq)]
pub struct KinematicsWarning {
    /// Vertices whose momenta sum to zero although they are a strict subset
    /// of the external vertices.
    pub vertices: Vec<usize>,
}

fn verr(msg: String) -> Error {
    Error::InvalidInput(msg)
}

impl FeynmanGraph {
    /// Builder with unit weights, no masses and zero momenta.
    pub fn new(num_vertices: usize, edges: Vec<(usize, usize)>, dim: f64) -> Result<Self> {
        let e = edges.len();
        Self::with_data(
            "graph",
            num_vertices,
            edges,
            vec![1.0; e],
            dim,
            vec![0.0; e],
            vec![Vec::new(); num_vertices],
        )
    }

    pub fn with_data(
        name: &str,
        num_vertices: usize,
        edges: Vec<(usize, usize)>,
        nu: Vec<f64>,
        dim: f64,
        masses_sq: Vec<f64>,
        momenta: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let g = Self {
            name: name.to_string(),
            num_vertices,
            edges,
            nu,
            dim,
            masses_sq,
            momenta,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn with_nu(self, nu: Vec<f64>) -> Result<Self> {
        let g = Self { nu, ..self };
        g.validate()?;
        Ok(g)
    }

    pub fn with_dim(self, dim: f64) -> Result<Self> {
        let g = Self { dim, ..self };
        g.validate()?;
        Ok(g)
    }

    pub fn with_masses_sq(self, masses_sq: Vec<f64>) -> Result<Self> {
        let g = Self { masses_sq, ..self };
        g.validate()?;
        Ok(g)
    }

    /// Momenta per vertex; vertices may be given empty vectors for zero.
    pub fn with_momenta(self, momenta: Vec<Vec<f64>>) -> Result<Self> {
        let g = Self { momenta, ..self };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        let v = self.num_vertices;
        let e = self.edges.len();
        if v == 0 {
            return Err(verr("num_vertices: must be positive".into()));
        }
        if e == 0 {
            return Err(verr("edges: graph has no edges".into()));
        }
        if e > MAX_EDGES {
            return Err(verr(format!("edges: {e} edges exceed the limit of {MAX_EDGES}")));
        }
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            if a >= v || b >= v {
                return Err(verr(format!("edges[{i}]: vertex out of range 0..{v}")));
            }
            if a == b {
                return Err(verr(format!("edges[{i}]: self-loop at vertex {a}")));
            }
        }
        if self.nu.len() != e {
            return Err(verr(format!("nu: expected {e} entries, found {}", self.nu.len())));
        }
        if let Some(i) = self.nu.iter().position(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(verr(format!("nu[{i}]: must be finite and positive")));
        }
        if !(self.dim.is_finite() && self.dim > 0.0) {
            return Err(verr("D: must be finite and positive".into()));
        }
        if self.masses_sq.len() != e {
            return Err(verr(format!("masses_sq: expected {e} entries, found {}", self.masses_sq.len())));
        }
        if let Some(i) = self.masses_sq.iter().position(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(verr(format!("masses_sq[{i}]: must be finite and non-negative")));
        }
        if self.momenta.len() != v {
            return Err(verr(format!("momenta: expected {v} entries, found {}", self.momenta.len())));
        }
        let kd = self.kinematic_dim();
        for (i, p) in self.momenta.iter().enumerate() {
            if !p.is_empty() && p.len() != kd {
                return Err(verr(format!("momenta[{i}]: expected {kd} components, found {}", p.len())));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(verr(format!("momenta[{i}]: non-finite component")));
            }
        }
        let total = self.momentum_sum(&(0..v).collect::<Vec<_>>());
        let scale: f64 = self.momenta.iter().flatten().map(|x| x.abs()).fold(1.0, f64::max);
        if let Some(mu) = total.iter().position(|x| x.abs() > 1e-10 * scale) {
            return Err(verr(format!("momenta: component {mu} of the total momentum is {}, not 0", total[mu])));
        }
        if self.components(full(e)) != 1 {
            return Err(Error::Disconnected);
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: GraphFile = serde_json::from_str(text)?;
        let e = f.edges.len();
        let v = f.num_vertices;
        let kd = f.kinematic_dim;
        let mut momenta = f.momenta.unwrap_or_else(|| vec![Vec::new(); v]);
        if let Some(kd) = kd {
            if let Some(i) = momenta.iter().position(|p| !p.is_empty() && p.len() != kd) {
                return Err(verr(format!("momenta[{i}]: expected kinematic_dim = {kd} components")));
            }
            for p in &mut momenta {
                if p.is_empty() {
                    *p = vec![0.0; kd];
                }
            }
        }
        Self::with_data(
            f.name.as_deref().unwrap_or("graph"),
            v,
            f.edges.iter().map(|e| (e[0], e[1])).collect(),
            f.nu.unwrap_or_else(|| vec![1.0; e]),
            f.d,
            f.masses_sq.unwrap_or_else(|| vec![0.0; e]),
            momenta,
        )
    }

    pub fn to_json(&self) -> String {
        let kd = self.kinematic_dim();
        let f = GraphFile {
            name: Some(self.name.clone()),
            num_vertices: self.num_vertices,
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
            nu: Some(self.nu.clone()),
            d: self.dim,
            masses_sq: Some(self.masses_sq.clone()),
            momenta: Some(
                self.momenta
                    .iter()
                    .map(|p| if p.is_empty() { vec![0.0; kd] } else { p.clone() })
                    .collect(),
            ),
            kinematic_dim: Some(kd),
        };
        serde_json::to_string_pretty(&f).expect("graph serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn nu(&self) -> &[f64] {
        &self.nu
    }

    pub fn dim(&self) -> f64 {
        self.dim
    }

    pub fn masses_sq(&self) -> &[f64] {
        &self.masses_sq
    }

    pub fn kinematic_dim(&self) -> usize {
        self.momenta.iter().map(|p| p.len()).max().unwrap_or(0)
    }

    /// Momentum of vertex `v`, zero-padded to the kinematic dimension.
    pub fn momentum(&self, v: usize) -> Vec<f64> {
        let kd = self.kinematic_dim();
        let p = &self.momenta[v];
        if p.is_empty() {
            vec![0.0; kd]
        } else {
            p.clone()
        }
    }

    pub fn momentum_sum(&self, vertices: &[usize]) -> Vec<f64> {
        let mut s = vec![0.0; self.kinematic_dim()];
        for &v in vertices {
            for (a, b) in s.iter_mut().zip(&self.momenta[v]) {
                *a += b;
            }
        }
        s
    }

    /// Vertices with a nonzero momentum.
    pub fn external_vertices(&self) -> Vec<usize> {
        (0..self.num_vertices)
            .filter(|&v| self.momenta[v].iter().any(|x| *x != 0.0))
            .collect()
    }

    pub fn massive_mask(&self) -> u64 {
        self.masses_sq
            .iter()
            .enumerate()
            .filter(|(_, m)| **m > 0.0)
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }

    /// Both Symanzik polynomials vanish identically only through `Phi`: no
    /// masses and no momenta.
    pub fn phi_vanishes(&self) -> bool {
        self.massive_mask() == 0 && self.external_vertices().is_empty()
    }

    /// Number of connected components of the spanning subgraph `mask`,
    /// counting isolated vertices.
    pub fn components(&self, mask: u64) -> usize {
        let mut uf = UnionFind::new(self.num_vertices);
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            if mask >> i & 1 == 1 {
                uf.union(a, b);
            }
        }
        uf.count()
    }

    /// `|gamma| - V + c(gamma)`.
    pub fn loops_of(&self, mask: u64) -> u32 {
        (mask.count_ones() as usize + self.components(mask) - self.num_vertices) as u32
    }

    pub fn loops(&self) -> u32 {
        self.loops_of(full(self.num_edges()))
    }

    /// `sum nu - loops * D / 2`.
    pub fn omega(&self) -> f64 {
        self.nu.iter().sum::<f64>() - f64::from(self.loops()) * self.dim / 2.0
    }

    /// Contains all massive edges and has one component holding every vertex
    /// with nonzero momentum.
    pub fn is_mass_momentum_spanning(&self, mask: u64) -> bool {
        let massive = self.massive_mask();
        if mask & massive != massive {
            return false;
        }
        let mut uf = UnionFind::new(self.num_vertices);
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            if mask >> i & 1 == 1 {
                uf.union(a, b);
            }
        }
        let ext = self.external_vertices();
        ext.windows(2).all(|w| uf.find(w[0]) == uf.find(w[1]))
    }

    /// `sum_{e in gamma} nu_e - D/2 loops(gamma) - omega(G) delta_mm(gamma)`.
    pub fn r_of(&self, mask: u64) -> f64 {
        let nu: f64 = (0..self.num_edges())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| self.nu[i])
            .sum();
        let mm = if self.is_mass_momentum_spanning(mask) { 1.0 } else { 0.0 };
        nu - self.dim / 2.0 * f64::from(self.loops_of(mask)) - self.omega() * mm
    }

    /// Strict non-empty subsets of the external vertices whose momenta add up
    /// to zero within `1e-10`. Only searched for up to 16 external vertices.
    pub fn exceptional_witnesses(&self) -> Vec<KinematicsWarning> {
        let ext = self.external_vertices();
        if ext.len() < 3 || ext.len() > 16 {
            return Vec::new();
        }
        let scale: f64 = self.momenta.iter().flatten().map(|x| x.abs()).fold(1.0, f64::max);
        let full_ext = (1u32 << ext.len()) - 1;
        let mut out = Vec::new();
        // A subset and its complement are the same witness; keep the one containing ext[0].
        for sub in 1..full_ext {
            if sub & 1 == 0 {
                continue;
            }
            let vs: Vec<usize> = (0..ext.len()).filter(|i| sub >> i & 1 == 1).map(|i| ext[i]).collect();
            if self.momentum_sum(&vs).iter().all(|x| x.abs() <= 1e-10 * scale) {
                out.push(KinematicsWarning { vertices: vs });
            }
        }
        out
    }
}

pub(crate) fn full(e: usize) -> u64 {
    if e == 64 {
        u64::MAX
    } else {
        (1u64 << e) - 1
    }
}

#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    count: usize,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            count: n,
        }
    }

    pub(crate) fn reset(&mut self) {
        for (i, p) in self.parent.iter_mut().enumerate() {
            *p = i;
        }
        self.count = self.parent.len();
    }

    pub(crate) fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    /// Returns `false` if `a` and `b` were already connected.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        self.count -= 1;
        true
    }

    pub(crate) fn count(&self) -> usize {
        self.count
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bubble() -> FeynmanGraph {
        FeynmanGraph::new(2, vec![(0, 1), (0, 1)], 4.0)
            .unwrap()
            .with_momenta(vec![vec![1.0, 0.0], vec![-1.0, 0.0]])
            .unwrap()
    }

    #[test]
    fn bubble_data() {
        let g = bubble();
        assert_eq!(g.loops(), 1);
        assert_eq!(g.omega(), 0.0);
        assert_eq!(g.loops_of(0b01), 0);
        assert_eq!(g.r_of(0b01), 1.0);
        assert_eq!(g.r_of(0b11), 0.0);
        assert!(g.is_mass_momentum_spanning(0b01));
        assert!(!g.is_mass_momentum_spanning(0));
    }

    #[test]
    fn half_weights() {
        let g = bubble().with_nu(vec![0.5, 0.5]).unwrap();
        assert_eq!(g.omega(), -1.0);
        // Single edges connect both external vertices.
        assert_eq!(g.r_of(0b01), 1.5);
    }

    #[test]
    fn validation() {
        let json = r#"{"num_vertices": 3, "edges": [[0,1],[2,2]], "D": 4}"#;
        let e = FeynmanGraph::from_json(json).unwrap_err().to_string();
        assert!(e.contains("edges[1]"), "{e}");
        let json = r#"{"num_vertices": 4, "edges": [[0,1],[2,3]], "D": 4}"#;
        assert!(matches!(FeynmanGraph::from_json(json), Err(Error::Disconnected)));
        let json = r#"{"num_vertices": 2, "edges": [[0,1]], "D": 4, "nu": [0]}"#;
        assert!(FeynmanGraph::from_json(json).unwrap_err().to_string().contains("nu[0]"));
        let json = r#"{"num_vertices": 2, "edges": [[0,1]], "D": 4, "momenta": [[1],[0]]}"#;
        assert!(FeynmanGraph::from_json(json).unwrap_err().to_string().contains("momenta"));
    }

    #[test]
    fn json_round_trip() {
        let g = bubble().with_masses_sq(vec![0.5, 0.0]).unwrap();
        assert_eq!(FeynmanGraph::from_json(&g.to_json()).unwrap(), g);
    }

    #[test]
    fn exceptional_momenta_are_reported() {
        let g = FeynmanGraph::new(4, vec![(0, 1), (1, 2), (2, 3), (3, 0)], 4.0)
            .unwrap()
            .with_momenta(vec![vec![1.0], vec![-1.0], vec![2.0], vec![-2.0]])
            .unwrap();
        let w = g.exceptional_witnesses();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].vertices, vec![0, 1]);
    }
}
