//! Feynman graphs, Symanzik polynomials and the subgraph tables that drive
//! tropical sampling of parametric Feynman integrals.

pub mod generate;
mod graph;
mod integrand;
pub mod reference;
mod symanzik;
mod tables;

pub use graph::{FeynmanGraph, KinematicsWarning, MAX_EDGES};
pub use integrand::FeynmanIntegrand;
pub use reference::{expand_symanzik, is_mm_by_contraction, psi_phi_reference, ExpandedSymanzik};
pub use symanzik::{psi_phi_eval, Symanzik, SymanzikValue, SymanzikWorkspace, MIN_LOG_X};
pub use tables::{build_feynman_tables, subgraph_data, SubgraphData};
