//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use troquad::feynman::{expand_symanzik, FeynmanGraph};
use troquad::sector::next_permutation;
use troquad::RandomStream;

/// Loopless connected multigraphs up to isomorphism as `(V, sorted edges)`,
/// for every edge count `1..=max_edges`.
pub fn connected_multigraphs(max_edges: usize) -> Vec<(usize, Vec<(usize, usize)>)> {
    let mut layer: BTreeSet<(usize, Vec<(usize, usize)>)> = BTreeSet::new();
    layer.insert((2, vec![(0, 1)]));
    let mut all: Vec<_> = layer.iter().cloned().collect();
    for _ in 1..max_edges {
        let mut next = BTreeSet::new();
        for (v, edges) in &layer {
            for a in 0..*v {
                for b in a + 1..=*v {
                    let nv = if b == *v { v + 1 } else { *v };
                    let mut e = edges.clone();
                    e.push((a, b));
                    next.insert(canonical(nv, &e));
                }
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    all
}

fn canonical(v: usize, edges: &[(usize, usize)]) -> (usize, Vec<(usize, usize)>) {
    let mut perm: Vec<usize> = (0..v).collect();
    let mut best: Option<Vec<(usize, usize)>> = None;
    loop {
        let mut e: Vec<(usize, usize)> = edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (perm[a], perm[b]);
                (x.min(y), x.max(y))
            })
            .collect();
        e.sort_unstable();
        if best.as_ref().is_none_or(|b| e < *b) {
            best = Some(e);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    (v, best.expect("at least one permutation"))
}

/// Random Euclidean kinematics in three dimensions: roughly half of the
/// vertices carry a Gaussian momentum (conserved), each edge is massive with
/// probability 1/3.
pub fn random_kinematics(v: usize, edges: &[(usize, usize)], dim: f64, rng: &mut RandomStream) -> FeynmanGraph {
    let kd = 3;
    let ext: Vec<usize> = (0..v).filter(|_| rng.uniform_open() < 0.5).collect();
    let mut momenta = vec![vec![0.0; kd]; v];
    if ext.len() >= 2 {
        let mut total = vec![0.0; kd];
        for &x in &ext[..ext.len() - 1] {
            for mu in 0..kd {
                let p = rng.normal();
                momenta[x][mu] = p;
                total[mu] += p;
            }
        }
        let last = *ext.last().unwrap();
        for mu in 0..kd {
            momenta[last][mu] = -total[mu];
        }
    }
    let masses: Vec<f64> = edges
        .iter()
        .map(|_| if rng.uniform_open() < 1.0 / 3.0 { 0.5 + 1.5 * rng.uniform_open() } else { 0.0 })
        .collect();
    FeynmanGraph::new(v, edges.to_vec(), dim)
        .unwrap()
        .with_momenta(momenta)
        .unwrap()
        .with_masses_sq(masses)
        .unwrap()
}

/// Kolmogorov-Smirnov statistic of `u` against the uniform distribution on
/// (0, 1), with the asymptotic p-value.
pub fn ks_uniform(mut u: Vec<f64>) -> (f64, f64) {
    u.sort_by(f64::total_cmp);
    let n = u.len() as f64;
    let d = u
        .iter()
        .enumerate()
        .map(|(i, &x)| ((i + 1) as f64 / n - x).max(x - i as f64 / n))
        .fold(0.0, f64::max);
    let lambda = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d;
    let mut p = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        p += 2.0 * (-1f64).powf(k - 1.0) * (-2.0 * k * k * lambda * lambda).exp();
    }
    (d, p.clamp(0.0, 1.0))
}

/// Gauss-Legendre nodes and weights on (0, 1).
pub fn gauss_legendre(order: usize) -> Vec<(f64, f64)> {
    let n = order;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push(((1.0 - x) / 2.0, w / 2.0));
    }
    out
}

/// Edge permutations induced by vertex automorphisms of a simple graph.
fn edge_automorphisms(g: &FeynmanGraph) -> Vec<Vec<usize>> {
    let v = g.num_vertices();
    let key = |a: usize, b: usize| (a.min(b), a.max(b));
    let edges: Vec<(usize, usize)> = g.edges().iter().map(|&(a, b)| key(a, b)).collect();
    let mut perm: Vec<usize> = (0..v).collect();
    let mut out = Vec::new();
    loop {
        let image: Option<Vec<usize>> = edges
            .iter()
            .map(|&(a, b)| edges.iter().position(|&e| e == key(perm[a], perm[b])))
            .collect();
        if let Some(img) = image {
            let mut s = img.clone();
            s.sort_unstable();
            s.dedup();
            if s.len() == edges.len() {
                out.push(img);
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    out
}

/// Deterministic value of `int prod x_e^nu_e / Psi^{D/2} Omega` for a simple
/// graph with `omega = 0`, by tensor Gauss-Legendre quadrature in every
/// ordering chamber. In the chamber `x_s(1) < ... < x_s(n) = 1` the
/// coordinates are `x_s(k) = t_k t_{k+1} ... t_{n-1}` with `t in (0,1)^{n-1}`,
/// and chambers related by a graph automorphism are integrated once.
pub fn chamber_quadrature(g: &FeynmanGraph, order: usize) -> f64 {
    let n = g.num_edges();
    let psi = expand_symanzik(g).unwrap().psi;
    let half_d = g.dim() / 2.0;
    let nu = g.nu().to_vec();
    let autos = edge_automorphisms(g);
    let rule = gauss_legendre(order);

    // Orbit representatives with multiplicities.
    let mut reps: Vec<(Vec<usize>, usize)> = Vec::new();
    let mut seen = BTreeSet::new();
    let mut sigma: Vec<usize> = (0..n).collect();
    loop {
        if !seen.contains(&sigma) {
            let orbit: BTreeSet<Vec<usize>> = autos
                .iter()
                .map(|a| sigma.iter().map(|&e| a[e]).collect())
                .collect();
            reps.push((sigma.clone(), orbit.len()));
            seen.extend(orbit);
        }
        if !next_permutation(&mut sigma) {
            break;
        }
    }

    let d = n - 1;
    let mut total = 0.0;
    let mut idx = vec![0usize; d];
    let mut log_x = vec![0.0; n];
    for (sigma, mult) in &reps {
        let mut sum = 0.0;
        idx.iter_mut().for_each(|i| *i = 0);
        loop {
            let mut w = 1.0;
            let mut acc = 0.0;
            let mut log_t_sum = 0.0;
            log_x[sigma[n - 1]] = 0.0;
            for k in (0..d).rev() {
                let (t, wt) = rule[idx[k]];
                w *= wt;
                acc += t.ln();
                log_t_sum += t.ln();
                log_x[sigma[k]] = acc;
            }
            let lp = psi.eval_log(&log_x).unwrap().log_abs;
            let num: f64 = nu.iter().zip(&log_x).map(|(a, b)| a * b).sum();
            sum += w * (num - half_d * lp - log_t_sum).exp();
            // Next multi-index.
            let mut k = 0;
            while k < d {
                idx[k] += 1;
                if idx[k] < order {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == d {
                break;
            }
        }
        total += *mult as f64 * sum;
    }
    total
}

/// `int_R f` for an analytic, exponentially decaying `f`, by the
/// trapezoid rule on `[-a, a]`.
pub fn trapezoid(f: impl Fn(f64) -> f64, a: f64, h: f64) -> f64 {
    let n = (a / h).ceil() as i64;
    (-n..=n).map(|i| f(i as f64 * h)).sum::<f64>() * h
}
