//! Binary forms: heights, Thue inequalities on sublattices and conic
//! parameterisations.

pub mod conic;
pub mod height;
pub mod lattice2;

pub use conic::{parameterize_conic, ConicParam};
pub use height::{best_pair, factor_binary, m_bound_probe, BestPair, BinaryFactorization, ProbeReport};
pub use lattice2::{count_thue_lattice, sublattice_cover, Sublattice2};
