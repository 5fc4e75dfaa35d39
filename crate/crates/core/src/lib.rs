//! Tropical Monte Carlo quadrature.
//!
//! Projective integrals of products of powers of polynomials are estimated by
//! importance sampling from the tropical approximation of the integrand. For
//! Feynman integrals in parametric form the tropical measure factorizes over a
//! table indexed by subsets of edges, which removes the need for any
//! triangulation.

pub mod bench;
pub mod cli;
pub mod error;
pub mod euler_mellin;
pub mod exact;
pub mod feynman;
pub mod mc;
pub mod permutahedron;
pub mod poly;
pub mod rng;
pub mod sample;
pub mod sector;

pub use error::{Error, Result};
pub use poly::{LogPoint, LogValue, SparsePolynomial, Term};
pub use rng::RandomStream;
pub use sample::{Integrand, Sampler, ScalarFn, TropicalSample};
pub use mc::{estimate, EstimateReport, EstimatorState, RunOptions};
pub use sector::{build_refined_fan, SectorTable, SimplicialSector};
pub use permutahedron::{build_subset_table, BooleanTable, Permutation, SubsetTable, TableOptions};
pub use feynman::{build_feynman_tables, FeynmanGraph, FeynmanIntegrand};
pub use euler_mellin::{EulerMellin, EulerMellinIntegrand, Factor, Power};
