//! Exact construction of the simplicial refinement of the common normal fan of
//! two point configurations. Desk scale only.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::table::{SectorTable, SimplicialSector};
use crate::error::{Error, Result};
use crate::exact::{self, fmt_q, Q};

/// Largest dimension accepted by [`build_refined_fan`].
pub const MAX_FAN_DIM: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64).max(1)])
    }
    fn set(&mut self, i: usize) {
        if i / 64 >= self.0.len() {
            self.0.resize(i / 64 + 1, 0);
        }
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(o.0.iter().chain(std::iter::repeat(&0))).map(|(a, b)| a & b).collect())
    }
    fn subset_of(&self, o: &Bits) -> bool {
        self.0
            .iter()
            .enumerate()
            .all(|(i, a)| a & !o.0.get(i).copied().unwrap_or(0) == 0)
    }
}

/// A polyhedral cone `{y : <a_i, y> >= 0}` in generator form.
#[derive(Debug, Clone, Default)]
pub struct Cone {
    pub lineality: Vec<Vec<BigInt>>,
    pub rays: Vec<Vec<BigInt>>,
}

impl Cone {
    pub fn dim(&self) -> usize {
        let rows: Vec<&[BigInt]> = self.lineality.iter().chain(&self.rays).map(|v| v.as_slice()).collect();
        if rows.is_empty() {
            0
        } else {
            exact::rank_int(&rows)
        }
    }

    pub fn is_pointed(&self) -> bool {
        self.lineality.is_empty()
    }
}

fn combine(a: &BigInt, x: &[BigInt], b: &BigInt, y: &[BigInt]) -> Vec<BigInt> {
    exact::primitive_int(x.iter().zip(y).map(|(p, q)| a * p - b * q).collect())
}

/// Extreme rays and lineality space of `{y in R^d : <a_i, y> >= 0}` by the
/// double description method with the combinatorial adjacency test.
pub fn double_description(constraints: &[Vec<BigInt>], d: usize) -> Cone {
    let m = constraints.len();
    let mut lin: Vec<Vec<BigInt>> = (0..d)
        .map(|i| (0..d).map(|j| BigInt::from(i32::from(i == j))).collect())
        .collect();
    let mut rays: Vec<(Vec<BigInt>, Bits)> = Vec::new();

    for (idx, a) in constraints.iter().enumerate() {
        if let Some(li) = lin.iter().position(|l| !exact::dot_int(a, l).is_zero()) {
            let mut l = lin.swap_remove(li);
            let mut al = exact::dot_int(a, &l);
            if al.is_negative() {
                l.iter_mut().for_each(|x| *x = -x.clone());
                al = -al;
            }
            for other in &mut lin {
                let c = exact::dot_int(a, other);
                if !c.is_zero() {
                    *other = combine(&al, other, &c, &l);
                }
            }
            for (r, z) in &mut rays {
                let c = exact::dot_int(a, r);
                if !c.is_zero() {
                    *r = combine(&al, r, &c, &l);
                }
                z.set(idx);
            }
            let mut z = Bits::new(m);
            (0..idx).for_each(|j| z.set(j));
            rays.push((l, z));
            continue;
        }

        let vals: Vec<BigInt> = rays.iter().map(|(r, _)| exact::dot_int(a, r)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        let mut next: Vec<(Vec<BigInt>, Bits)> = Vec::new();
        for &p in &pos {
            for &q in &neg {
                let common = rays[p].1.and(&rays[q].1);
                let adjacent = (0..rays.len())
                    .all(|r| r == p || r == q || !common.subset_of(&rays[r].1));
                if adjacent {
                    let v = combine(&vals[p], &rays[q].0, &vals[q], &rays[p].0);
                    let mut z = common;
                    z.set(idx);
                    next.push((v, z));
                }
            }
        }
        for (i, (r, mut z)) in rays.into_iter().enumerate() {
            if vals[i].is_zero() {
                z.set(idx);
                next.push((r, z));
            } else if vals[i].is_positive() {
                next.push((r, z));
            }
        }
        rays = next;
    }
    Cone {
        lineality: lin,
        rays: rays.into_iter().map(|(r, _)| r).collect(),
    }
}

fn rank_of(rays: &[Vec<BigInt>], subset: &[usize]) -> usize {
    if subset.is_empty() {
        return 0;
    }
    let rows: Vec<&[BigInt]> = subset.iter().map(|&i| rays[i].as_slice()).collect();
    exact::rank_int(&rows)
}

/// Pulling triangulation of a pointed cone: fan from the lexicographically
/// smallest ray over the facets not containing it. No new rays are created.
/// Returns simplices as lists of ray indices.
pub fn triangulate(cone_rays: &[Vec<BigInt>], constraints: &[Vec<BigInt>]) -> Vec<Vec<usize>> {
    let incidence: Vec<Vec<bool>> = constraints
        .iter()
        .map(|a| cone_rays.iter().map(|r| exact::dot_int(a, r).is_zero()).collect())
        .collect();
    let all: Vec<usize> = (0..cone_rays.len()).collect();
    let k = rank_of(cone_rays, &all);
    let mut out = Vec::new();
    pull(cone_rays, &incidence, &all, k, &mut out);
    out
}

fn pull(rays: &[Vec<BigInt>], incidence: &[Vec<bool>], face: &[usize], k: usize, out: &mut Vec<Vec<usize>>) {
    if face.len() == k {
        out.push(face.to_vec());
        return;
    }
    let r0 = *face.iter().min_by(|&&a, &&b| rays[a].cmp(&rays[b])).expect("face has rays");
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    for inc in incidence {
        let g: Vec<usize> = face.iter().copied().filter(|&r| inc[r]).collect();
        if g.len() == face.len() || g.len() < k - 1 || g.contains(&r0) || !seen.insert(g.clone()) {
            continue;
        }
        if rank_of(rays, &g) != k - 1 {
            continue;
        }
        let start = out.len();
        pull(rays, incidence, &g, k - 1, out);
        for s in &mut out[start..] {
            s.push(r0);
        }
    }
}

fn quotient_constraint(p: &[Q], q: &[Q]) -> Vec<BigInt> {
    let n = p.len();
    exact::primitive(&exact::sub(&p[..n - 1], &q[..n - 1]))
}

fn normal_cone(p: &[Q], others: &[&Vec<Q>]) -> (Cone, Vec<Vec<BigInt>>) {
    let cons: Vec<Vec<BigInt>> = others.iter().map(|q| quotient_constraint(p, q)).collect();
    let d = p.len() - 1;
    (double_description(&cons, d), cons)
}

/// Vertices of the convex hull of points lying on a common hyperplane
/// `<1, v> = const`, in input order after removing duplicates.
pub fn hull_vertices(points: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let mut uniq: Vec<Vec<Q>> = Vec::new();
    for p in points {
        if !uniq.contains(p) {
            uniq.push(p.clone());
        }
    }
    if uniq.len() <= 1 {
        return uniq;
    }
    let d = uniq[0].len() - 1;
    (0..uniq.len())
        .filter(|&i| {
            let others: Vec<&Vec<Q>> = uniq.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, q)| q).collect();
            normal_cone(&uniq[i], &others).0.dim() == d
        })
        .map(|i| uniq[i].clone())
        .collect()
}

/// Vertices of `sum_k c_k * conv(P_k)`.
pub fn minkowski_vertices(terms: &[(Q, Vec<Vec<Q>>)]) -> Vec<Vec<Q>> {
    let mut acc: Vec<Vec<Q>> = Vec::new();
    for (c, pts) in terms {
        if c.is_zero() {
            continue;
        }
        let scaled: Vec<Vec<Q>> = hull_vertices(pts)
            .into_iter()
            .map(|p| p.into_iter().map(|x| x * c).collect())
            .collect();
        acc = if acc.is_empty() {
            scaled
        } else {
            let sums: Vec<Vec<Q>> = acc
                .iter()
                .flat_map(|a| scaled.iter().map(move |b| a.iter().zip(b).map(|(x, y)| x + y).collect()))
                .collect();
            hull_vertices(&sums)
        };
    }
    acc
}

fn level(points: &[Vec<Q>], what: &str) -> Result<Q> {
    let mut it = points.iter().map(|p| p.iter().sum::<Q>());
    let c = it
        .next()
        .ok_or_else(|| Error::InvalidInput(format!("{what} has no points")))?;
    if it.any(|s| s != c) {
        return Err(Error::Inhomogeneous(format!("{what} does not lie on a hyperplane <1, v> = const")));
    }
    Ok(c)
}

/// Simplicial refinement of the common refinement of the normal fans of
/// `conv(A)` and `conv(B)`, with `w = w_B - w_A` on each cone. The resulting
/// table samples the measure proportional to `exp(h_A(y) - h_B(y))` where
/// `h` are the support functions.
pub fn build_refined_fan(a: &[Vec<Q>], b: &[Vec<Q>]) -> Result<SectorTable> {
    let n = b.first().map_or(0, |v| v.len());
    if n < 2 {
        return Err(Error::InvalidInput("need at least two coordinates".into()));
    }
    if n > MAX_FAN_DIM {
        return Err(Error::TooLarge {
            what: "exact fan construction",
            size: n,
            limit: MAX_FAN_DIM,
        });
    }
    if a.iter().chain(b).any(|v| v.len() != n) {
        return Err(Error::InvalidInput("points have inconsistent lengths".into()));
    }
    let la = level(a, "numerator polytope")?;
    let lb = level(b, "denominator polytope")?;
    if la != lb {
        return Err(Error::Inhomogeneous(format!(
            "numerator degree {} differs from denominator degree {}",
            fmt_q(&la),
            fmt_q(&lb)
        )));
    }
    let av = hull_vertices(a);
    let bv = hull_vertices(b);
    let diffs: Vec<Vec<Q>> = bv.iter().map(|v| exact::sub(v, &bv[0])).collect();
    let dim = exact::rank(&diffs);
    if dim != n - 1 {
        return Err(Error::R1Violated { dim, expected: n - 1 });
    }

    let d = n - 1;
    let mut sectors = Vec::new();
    for va in &av {
        for vb in &bv {
            let mut cons: Vec<Vec<BigInt>> = Vec::new();
            for o in av.iter().filter(|o| *o != va) {
                cons.push(quotient_constraint(va, o));
            }
            for o in bv.iter().filter(|o| *o != vb) {
                cons.push(quotient_constraint(vb, o));
            }
            let cone = double_description(&cons, d);
            if !cone.is_pointed() {
                return Err(Error::R1Violated { dim, expected: n - 1 });
            }
            if cone.dim() < d {
                continue;
            }
            let w = exact::sub(vb, va);
            let lift = |r: &Vec<BigInt>| -> Vec<Q> {
                let mut u = exact::to_q(r);
                u.push(Q::zero());
                u
            };
            for r in &cone.rays {
                let u = lift(r);
                if !exact::dot(&u, &w).is_positive() {
                    // Shift the representative to sum zero for a readable witness.
                    let mean = u.iter().sum::<Q>() / Q::from_integer(BigInt::from(n));
                    return Err(Error::R2Violated {
                        witness: u.iter().map(|x| fmt_q(&(x - &mean))).collect(),
                    });
                }
            }
            for simplex in triangulate(&cone.rays, &cons) {
                let gens: Vec<Vec<Q>> = simplex.iter().map(|&i| lift(&cone.rays[i])).collect();
                let index = sectors.len();
                sectors.push(SimplicialSector::new(gens, w.clone()).map_err(|msg| Error::Sector { index, msg })?);
            }
        }
    }
    SectorTable::new(n, sectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    fn qv(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| q(x)).collect()
    }

    fn iv(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn orthant_and_square_cone() {
        let c = double_description(&[iv(&[1, 0]), iv(&[0, 1])], 2);
        assert!(c.is_pointed());
        let mut rays = c.rays.clone();
        rays.sort();
        assert_eq!(rays, vec![iv(&[0, 1]), iv(&[1, 0])]);

        // Cone over a square: 4 rays.
        let cons = [iv(&[1, 0, 1]), iv(&[-1, 0, 1]), iv(&[0, 1, 1]), iv(&[0, -1, 1])];
        let c = double_description(&cons, 3);
        assert_eq!(c.rays.len(), 4);
        assert_eq!(c.dim(), 3);
        let tri = triangulate(&c.rays, &cons);
        assert_eq!(tri.len(), 2);
    }

    #[test]
    fn half_space_keeps_lineality() {
        let c = double_description(&[iv(&[1, 0, 0])], 3);
        assert_eq!(c.lineality.len(), 2);
        assert_eq!(c.rays.len(), 1);
        assert_eq!(c.dim(), 3);
    }

    #[test]
    fn vertices_of_a_square_with_center() {
        let pts = vec![qv(&[0, 0, 2]), qv(&[2, 0, 0]), qv(&[0, 2, 0]), qv(&[1, 1, 0]), qv(&[1, 0, 1])];
        let v = hull_vertices(&pts);
        assert_eq!(v.len(), 3);
    }

    #[test]
    fn bubble_fan() {
        let t = build_refined_fan(&[qv(&[1, 1])], &[qv(&[2, 0]), qv(&[0, 2])]).unwrap();
        assert_eq!(t.len(), 2);
        assert!(t.sectors().iter().all(|s| s.sector_factor() == 1.0));
        assert_eq!(t.total(), 2.0);
    }

    #[test]
    fn triangle_fan() {
        let t = build_refined_fan(&[qv(&[1, 1, 1])], &[qv(&[3, 0, 0]), qv(&[0, 3, 0]), qv(&[0, 0, 3])]).unwrap();
        assert!((t.total() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn equal_polytopes_diverge() {
        let p = vec![qv(&[2, 0]), qv(&[0, 2])];
        assert!(matches!(build_refined_fan(&p, &p), Err(Error::R2Violated { .. })));
        let e = build_refined_fan(&p, &p).unwrap_err().to_string();
        assert!(e.starts_with("R2 violated: divergent direction"), "{e}");
    }

    #[test]
    fn flat_denominator_is_r1() {
        let r = build_refined_fan(&[qv(&[1, 1, 0])], &[qv(&[2, 0, 0]), qv(&[0, 2, 0])]);
        assert!(matches!(r, Err(Error::R1Violated { dim: 1, expected: 2 })));
    }

    #[test]
    fn mismatched_degrees() {
        let r = build_refined_fan(&[qv(&[1, 0])], &[qv(&[2, 0]), qv(&[0, 2])]);
        assert!(matches!(r, Err(Error::Inhomogeneous(_))));
    }

    #[test]
    fn minkowski_sum_of_triangle_edges_is_a_hexagon() {
        let s1 = vec![qv(&[1, 0, 0]), qv(&[0, 1, 0])];
        let s2 = vec![qv(&[0, 1, 0]), qv(&[0, 0, 1])];
        let s3 = vec![qv(&[1, 0, 0]), qv(&[0, 0, 1])];
        let v = minkowski_vertices(&[(q(1), s1), (q(1), s2), (q(1), s3)]);
        assert_eq!(v.len(), 6);
    }
}
