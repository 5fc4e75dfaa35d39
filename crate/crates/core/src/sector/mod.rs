//! Simplicial sectors, sector tables and the exact fan builder.

pub mod alias;
pub mod fan;
pub mod table;

pub use alias::AliasTable;
pub use fan::{build_refined_fan, double_description, hull_vertices, minkowski_vertices, Cone};
pub use table::{estimate_per_sector, next_permutation, SectorEstimate, SectorTable, SimplicialSector, StratifiedReport};
