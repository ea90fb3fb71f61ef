//! Adiabatic transport of a qubit along frustrated spin chains.
//!
//! The crate builds symmetry-reduced Hamiltonians for J1-J2 Heisenberg,
//! XXZ and XYZ chains, evolves states through linear annealing schedules,
//! and measures ground-state and single-qubit transport fidelities.
//!
//! Energies use Pauli matrices (eigenvalues ±1) with ħ = 1, so a singlet
//! has `σ·σ = -3`. Site `i` is bit `i - 1` of a basis state.

pub mod anneal;
pub mod basis;
pub mod cli;
pub mod error;
pub mod model;
pub mod solver;
pub mod state;

pub use error::{Error, Result};
