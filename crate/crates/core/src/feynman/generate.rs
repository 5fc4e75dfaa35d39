//! Standard graphs used in tests, examples and benchmarks.

use rand::seq::SliceRandom;

use super::graph::FeynmanGraph;
use super::tables::subgraph_data;
use crate::error::{Error, Result};
use crate::permutahedron::TableOptions;
use crate::rng::RandomStream;

/// One-loop bubble in `D = 4` with external momenta `(p, -p)`, `|p|^2 = p2`.
/// The period is 1 for any `p2 > 0`.
pub fn bubble(p2: f64) -> FeynmanGraph {
    let p = p2.sqrt();
    FeynmanGraph::new(2, vec![(0, 1), (0, 1)], 4.0)
        .and_then(|g| g.with_momenta(vec![vec![p], vec![-p]]))
        .expect("valid bubble")
        .with_name("bubble")
}

/// Vacuum triangle in `D = 6`; its period is 1/2.
pub fn triangle_d6() -> FeynmanGraph {
    FeynmanGraph::new(3, vec![(0, 1), (1, 2), (2, 0)], 6.0)
        .expect("valid triangle")
        .with_name("triangle")
}

/// Complete graph on four vertices in `D = 4` (the wheel with three spokes).
/// Its period is `6 zeta(3)`.
pub fn wheel3() -> FeynmanGraph {
    complete(4, 4.0).with_name("W3")
}

/// Complete graph on `v` vertices.
pub fn complete(v: usize, dim: f64) -> FeynmanGraph {
    let mut edges = Vec::new();
    for a in 0..v {
        for b in a + 1..v {
            edges.push((a, b));
        }
    }
    FeynmanGraph::new(v, edges, dim).expect("valid complete graph")
}

/// Wheel with `k` spokes: hub 0 joined to a rim cycle `1..=k`.
pub fn wheel(k: usize) -> FeynmanGraph {
    assert!(k >= 3, "a wheel needs at least three spokes");
    let mut edges: Vec<(usize, usize)> = (1..=k).map(|i| (0, i)).collect();
    edges.extend((1..=k).map(|i| (i, i % k + 1)));
    FeynmanGraph::new(k + 1, edges, 4.0)
        .expect("valid wheel")
        .with_name(&format!("W{k}"))
}

/// Eight-loop period graph with sixteen edges on nine vertices, `D = 4`.
/// Its period is `422.9610 +- 0.0009`.
pub fn eight_loop() -> FeynmanGraph {
    let edges = vec![
        (5, 3),
        (2, 8),
        (2, 6),
        (3, 7),
        (0, 6),
        (0, 7),
        (1, 5),
        (4, 8),
        (1, 2),
        (2, 3),
        (3, 4),
        (8, 7),
        (7, 6),
        (6, 5),
        (0, 1),
        (0, 4),
    ];
    FeynmanGraph::new(9, edges, 4.0)
        .expect("valid graph")
        .with_name("P8")
}

/// Random 4-regular simple graph on `v` vertices by the configuration model,
/// rejecting self-loops and multi-edges.
pub fn random_four_regular(v: usize, rng: &mut RandomStream) -> Vec<(usize, usize)> {
    assert!(v >= 5, "a simple 4-regular graph needs at least five vertices");
    let mut stubs: Vec<usize> = (0..v).flat_map(|i| [i; 4]).collect();
    loop {
        stubs.shuffle(rng.inner());
        let mut edges: Vec<(usize, usize)> = stubs
            .chunks(2)
            .map(|p| (p[0].min(p[1]), p[0].max(p[1])))
            .collect();
        if edges.iter().any(|(a, b)| a == b) {
            continue;
        }
        edges.sort_unstable();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        return edges;
    }
}

/// A convergent massless `D = 4` graph with `e` edges obtained from a random
/// 4-regular graph on `e/2 + 2` vertices by deleting one vertex. The four cut
/// edges play the role of external legs carrying zero momentum, so the result
/// is a period graph with `omega = 0`. Draws are repeated until all proper
/// subgraphs are convergent.
pub fn random_phi4(e: usize, rng: &mut RandomStream, max_tries: usize) -> Result<FeynmanGraph> {
    if e < 6 || e % 2 != 0 {
        return Err(Error::InvalidInput(format!(
            "phi^4 period graphs have an even number of edges >= 6, got {e}"
        )));
    }
    let v = e / 2 + 2;
    let opts = TableOptions::default();
    for _ in 0..max_tries {
        let full = random_four_regular(v, rng);
        let drop = v - 1;
        let edges: Vec<(usize, usize)> = full.into_iter().filter(|&(a, b)| a != drop && b != drop).collect();
        let Ok(g) = FeynmanGraph::new(v - 1, edges, 4.0) else {
            continue;
        };
        if subgraph_data(&g, &opts)?.divergent().is_empty() {
            return Ok(g.with_name(&format!("phi4_E{e}")));
        }
    }
    Err(Error::InvalidInput(format!(
        "no convergent phi^4 graph with {e} edges found in {max_tries} draws"
    )))
}
