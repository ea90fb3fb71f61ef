//! Sector Hamiltonians, their low-lying spectrum, and time evolution.

mod eigen;
mod evolve;
mod operator;
mod tridiag;

pub use eigen::{ground_space, lowest_eigenpairs, sector_gap, EigResult, EigenConfig};
pub use evolve::{apply_exponential, convergence_refine, evolve, Evolver, PropagatorConfig, NORM_DRIFT_LIMIT};
pub use operator::{build_sector_operator, OperatorFamily, SparseOperator};
pub use tridiag::sorted_eigen;
