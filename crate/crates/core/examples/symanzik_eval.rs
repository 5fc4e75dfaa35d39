//! Evaluating the Symanzik polynomials of a massive graph with external
//! momenta: the Laplacian route used while sampling against the expanded
//! polynomials, plus the convergence data that decides whether the integral
//! is finite.
//!
//!     cargo run --release --example symanzik_eval

use troquad::feynman::{expand_symanzik, psi_phi_eval, subgraph_data};
use troquad::{FeynmanGraph, TableOptions};

fn main() -> troquad::Result<()> {
    let json = r#"{
        "name": "massive kite",
        "num_vertices": 4,
        "edges": [[0,1],[0,2],[1,2],[1,3],[2,3]],
        "D": 4,
        "masses_sq": [1, 0, 0, 0, 1],
        "momenta": [[1, 0], [0, 0], [0, 0], [-1, 0]]
    }"#;
    let g = FeynmanGraph::from_json(json)?;
    println!("{}: {} loops, omega = {}", g.name(), g.loops(), g.omega());

    let data = subgraph_data(&g, &TableOptions::default())?;
    let (mask, r) = data.min_r();
    println!("smallest r = {r} on edges {mask:#b}; divergent subgraphs: {}", data.divergent().len());

    let ex = expand_symanzik(&g)?;
    println!("Psi has {} terms", ex.psi.terms().len());
    if let Some(phi) = &ex.phi {
        println!("Phi has {} terms", phi.terms().len());
    }
    let log_x = [0.3, -1.2, 2.0, 0.0, -0.5];
    let fast = psi_phi_eval(&g, &log_x).expect("in range");
    let psi = ex.psi.eval_log(&log_x)?.log_abs;
    let phi = ex.phi.as_ref().map(|p| p.eval_log(&log_x).map(|v| v.log_abs)).transpose()?;
    println!("log Psi: Laplacian {:.15} expanded {psi:.15}", fast.log_psi);
    println!("log Phi: Laplacian {:.15} expanded {:.15}", fast.log_phi, phi.unwrap_or(f64::NEG_INFINITY));
    if !g.exceptional_witnesses().is_empty() {
        println!("warning: exceptional kinematics");
    }
    Ok(())
}
