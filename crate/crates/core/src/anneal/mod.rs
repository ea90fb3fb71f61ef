//! Adiabatic joining: initial-state preparation, ground-state fidelity,
//! anneal-time search, gap scans and qubit transport.

mod fidelity;
mod gap;
mod prepare;
mod search;
mod transport;

use serde::{Deserialize, Serialize};

use crate::solver::{EigenConfig, PropagatorConfig};

pub use fidelity::{fidelity, AnnealProblem};
pub use gap::{gap_cell, gap_scan, ground_manifold_sectors, ground_manifold_tracking, GapGrid};
pub use prepare::{default_sector, mg_dimer_state, prepare_initial_state};
pub use search::{find_anneal_time, AnnealTimeResult, SearchConfig, SearchStatus};
pub use transport::{transport_qubit, Readout, TransportConfig, TransportResult, TransportSetup, TransportSpace};

/// Numerical settings shared by every anneal calculation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnnealConfig {
    pub eigen: EigenConfig,
    pub propagator: PropagatorConfig,
    /// Levels closer than this to the lowest one count as degenerate.
    pub degeneracy_threshold: f64,
    /// Check each evolution against one with twice the steps.
    pub refine: bool,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        AnnealConfig {
            eigen: EigenConfig::default(),
            propagator: PropagatorConfig::default(),
            degeneracy_threshold: 1e-10,
            refine: false,
        }
    }
}
