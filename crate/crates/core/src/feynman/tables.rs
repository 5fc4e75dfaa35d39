use super::graph::{full, FeynmanGraph, UnionFind};
use crate::error::{Error, Result};
use crate::permutahedron::{
    check_size_for, BooleanTable, SubsetTable, TableOptions, FLAG_MASS_MOMENTUM_SPANNING,
};

/// Per-subgraph data: `r_G`, loop numbers and mass-momentum flags.
#[derive(Debug, Clone)]
pub struct SubgraphData {
    pub r: BooleanTable,
    pub loops: Vec<u32>,
    pub flags: Vec<u32>,
}

impl SubgraphData {
    /// Smallest `r` over non-empty proper subgraphs with its mask.
    pub fn min_r(&self) -> (u64, f64) {
        let full = self.r.full();
        (1..full)
            .map(|m| (m, self.r.get(m)))
            .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a })
    }

    /// Non-empty proper subgraphs with `r <= 0`.
    pub fn divergent(&self) -> Vec<(u64, f64)> {
        (1..self.r.full())
            .map(|m| (m, self.r.get(m)))
            .filter(|(_, v)| !(*v > 0.0))
            .collect()
    }

    pub fn mm_count(&self) -> usize {
        self.flags.iter().filter(|f| **f & FLAG_MASS_MOMENTUM_SPANNING != 0).count()
    }
}

/// Loop numbers, flags and `r_G` for all `2^E` subgraphs, one union-find per
/// subgraph.
pub fn subgraph_data(g: &FeynmanGraph, opts: &TableOptions) -> Result<SubgraphData> {
    let e = g.num_edges();
    check_size_for(e, opts)?;
    let v = g.num_vertices();
    let ext = g.external_vertices();
    let massive = g.massive_mask();
    let omega = g.omega();
    let half_d = g.dim() / 2.0;
    let nu = g.nu();
    let size = 1usize << e;
    let mut r = vec![0.0; size];
    let mut loops = vec![0u32; size];
    let mut flags = vec![0u32; size];
    let mut nu_sum = vec![0.0; size];
    for mask in 1..size {
        let low = mask.trailing_zeros() as usize;
        nu_sum[mask] = nu_sum[mask & (mask - 1)] + nu[low];
    }
    let mut uf = UnionFind::new(v);
    for mask in 0..size as u64 {
        uf.reset();
        let mut bits = mask;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let (a, b) = g.edges()[i];
            uf.union(a, b);
        }
        let l = (mask.count_ones() as usize + uf.count() - v) as u32;
        let mm = mask & massive == massive && {
            let root = ext.first().map(|&x| uf.find(x));
            ext.iter().all(|&x| Some(uf.find(x)) == root)
        };
        loops[mask as usize] = l;
        flags[mask as usize] = if mm { FLAG_MASS_MOMENTUM_SPANNING } else { 0 };
        r[mask as usize] = nu_sum[mask as usize] - half_d * f64::from(l) - if mm { omega } else { 0.0 };
    }
    r[0] = 1.0;
    Ok(SubgraphData {
        r: BooleanTable::new(e, r)?,
        loops,
        flags,
    })
}

/// Subset table with `r_G`, loop numbers and m.m. flags.
pub fn build_feynman_tables(g: &FeynmanGraph, opts: &TableOptions) -> Result<SubsetTable> {
    if g.phi_vanishes() && g.omega() != 0.0 {
        return Err(Error::ExceptionalKinematics { omega: g.omega() });
    }
    let data = subgraph_data(g, opts)?;
    debug_assert_eq!(data.loops[full(g.num_edges()) as usize], g.loops());
    SubsetTable::build(&data.r, opts)?.with_payload(data.loops, data.flags)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bubble_and_triangle() {
        let opts = TableOptions::default();
        let bubble = FeynmanGraph::new(2, vec![(0, 1), (0, 1)], 4.0)
            .unwrap()
            .with_momenta(vec![vec![1.0], vec![-1.0]])
            .unwrap();
        let t = build_feynman_tables(&bubble, &opts).unwrap();
        assert!((t.itr() - 2.0).abs() < 1e-15);
        assert_eq!(t.r(0b11), 0.0);
        assert_eq!(t.loops(0b11), 1);

        let tri = FeynmanGraph::new(3, vec![(0, 1), (1, 2), (2, 0)], 6.0).unwrap();
        let t = build_feynman_tables(&tri, &opts).unwrap();
        assert!((t.itr() - 3.0).abs() < 1e-14);
        assert_eq!(t.r(0b001), 1.0);
        assert_eq!(t.r(0b011), 2.0);
    }

    #[test]
    fn matches_direct_definitions() {
        let g = FeynmanGraph::new(4, vec![(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)], 4.0)
            .unwrap()
            .with_momenta(vec![vec![1.0, 0.5], vec![0.0, 0.0], vec![-0.3, 1.0], vec![-0.7, -1.5]])
            .unwrap()
            .with_masses_sq(vec![0.0, 1.0, 0.0, 0.0, 0.0])
            .unwrap()
            .with_nu(vec![1.0, 1.5, 1.0, 0.5, 2.0])
            .unwrap();
        let d = subgraph_data(&g, &TableOptions::default()).unwrap();
        for m in 1..32u64 {
            assert_eq!(d.loops[m as usize], g.loops_of(m));
            assert_eq!(d.flags[m as usize] == 1, g.is_mass_momentum_spanning(m));
            assert!((d.r.get(m) - g.r_of(m)).abs() < 1e-14);
        }
    }

    #[test]
    fn vacuum_graph_with_nonzero_omega_is_exceptional() {
        let tri = FeynmanGraph::new(3, vec![(0, 1), (1, 2), (2, 0)], 4.0).unwrap();
        assert!(matches!(
            build_feynman_tables(&tri, &TableOptions::default()),
            Err(Error::ExceptionalKinematics { .. })
        ));
    }
}
