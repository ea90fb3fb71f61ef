//! At J2 = J1/2 the even chain's ground state is a product of singlets.
use std::sync::Arc;

use adiabus::anneal::mg_dimer_state;
use adiabus::basis::{enumerate_sector, SectorSpec};
use adiabus::model::j1j2_chain;
use adiabus::solver::{build_sector_operator, lowest_eigenpairs, EigenConfig};

fn main() -> adiabus::Result<()> {
    for n in [4, 6, 8, 10] {
        let model = j1j2_chain(n, 1.0, 0.5)?;
        let dimers = mg_dimer_state(n)?;
        let full = dimers.basis().clone();
        let energy = build_sector_operator(&model, &full)?.expectation(dimers.amplitudes())?;

        let basis = Arc::new(enumerate_sector(SectorSpec::magnetization(n, n / 2))?);
        let ground = lowest_eigenpairs(&build_sector_operator(&model, &basis)?, 1, &EigenConfig::default())?;
        let overlap = ground.state(0).to_full().inner(&dimers)?.norm();
        println!("N={n:2}  <H>={energy:+.10}  E0={:+.10}  |<g|dimers>|={overlap:.12}", ground.eigenvalues[0]);
    }
    Ok(())
}
