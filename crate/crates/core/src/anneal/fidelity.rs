use std::sync::Arc;

use super::prepare::prepare_initial_state;
use super::AnnealConfig;
use crate::basis::{SectorBasis, SectorSpec};
use crate::error::{Error, Result};
use crate::model::ProtocolSpec;
use crate::solver::{build_sector_operator, ground_space, EigResult, Evolver};
use crate::state::StateVector;

/// One protocol in one sector with its initial state and target ground
/// space precomputed, so `F(tau)` can be evaluated repeatedly.
#[derive(Debug, Clone)]
pub struct AnnealProblem {
    protocol: ProtocolSpec,
    basis: Arc<SectorBasis>,
    evolver: Evolver,
    initial: StateVector,
    target: EigResult,
    cfg: AnnealConfig,
}

impl AnnealProblem {
    pub fn new(p: &ProtocolSpec, sector: SectorSpec, cfg: &AnnealConfig) -> Result<Self> {
        let initial = prepare_initial_state(p, sector, cfg)?;
        Self::with_initial(p, initial, cfg)
    }

    /// Use an explicit start state; its basis fixes the sector.
    pub fn with_initial(p: &ProtocolSpec, initial: StateVector, cfg: &AnnealConfig) -> Result<Self> {
        let basis = initial.basis().clone();
        let final_op = build_sector_operator(&p.evaluate(1.0), &basis)?;
        let target = ground_space(&final_op, cfg.degeneracy_threshold, &cfg.eigen)?;
        Ok(AnnealProblem { protocol: p.clone(), evolver: Evolver::new(p, &basis)?, basis, initial, target, cfg: *cfg })
    }

    pub fn protocol(&self) -> &ProtocolSpec {
        &self.protocol
    }

    pub fn sector(&self) -> SectorSpec {
        self.basis.spec()
    }

    pub fn initial(&self) -> &StateVector {
        &self.initial
    }

    /// Ground space of `H(1)` in the sector (several vectors when degenerate).
    pub fn target(&self) -> &EigResult {
        &self.target
    }

    pub fn config(&self) -> &AnnealConfig {
        &self.cfg
    }

    pub fn evolve(&self, tau: f64) -> Result<StateVector> {
        if self.cfg.refine {
            self.evolver.refine(tau, &self.initial, &self.cfg.propagator)
        } else {
            self.evolver.evolve(tau, &self.initial, &self.cfg.propagator)
        }
    }

    /// Norm of the projection of `state` onto the target ground space.
    pub fn overlap(&self, state: &StateVector) -> Result<f64> {
        if state.basis().spec() != self.basis.spec() {
            return Err(Error::InvalidArgument(format!("state in {}, problem in {}", state.basis().spec(), self.basis.spec())));
        }
        let mut sum = 0.0;
        for k in 0..self.target.len() {
            let v = self.target.vector(k);
            let c: num_complex::Complex64 = v.iter().zip(state.amplitudes()).map(|(x, a)| a * *x).sum();
            sum += c.norm_sqr();
        }
        Ok(sum.sqrt())
    }

    pub fn fidelity(&self, tau: f64) -> Result<f64> {
        self.overlap(&self.evolve(tau)?)
    }
}

/// `F(tau) = || P_final psi(tau) ||` with `psi(0)` the sector ground state
/// of `H(0)`.
pub fn fidelity(p: &ProtocolSpec, tau: f64, sector: SectorSpec, cfg: &AnnealConfig) -> Result<f64> {
    AnnealProblem::new(p, sector, cfg)?.fidelity(tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::join_protocol;

    #[test]
    fn sudden_quench_three_sites() {
        let p = join_protocol(3, 1.0, 0.0).unwrap();
        let f = fidelity(&p, 0.0, SectorSpec::magnetization(3, 1), &AnnealConfig::default()).unwrap();
        assert!((f - 3f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn slow_join_is_adiabatic() {
        let p = join_protocol(3, 1.0, 0.0).unwrap();
        let f = fidelity(&p, 200.0, SectorSpec::magnetization(3, 1), &AnnealConfig::default()).unwrap();
        assert!((0.999..=1.0 + 1e-9).contains(&f), "{f}");
    }
}
