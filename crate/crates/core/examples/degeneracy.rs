//! Odd chains have a twofold ground manifold split across two sectors:
//! magnetization k and k+1 for Heisenberg couplings, spin-flip parity for XYZ.
use std::sync::Arc;

use adiabus::anneal::ground_manifold_sectors;
use adiabus::basis::enumerate_sector;
use adiabus::model::{j1j2_chain, xyz_chain, ChainModel, ProtocolSpec};
use adiabus::solver::{build_sector_operator, lowest_eigenpairs, EigenConfig};

fn levels(model: &ChainModel) -> adiabus::Result<Vec<f64>> {
    let (a, b) = ground_manifold_sectors(&ProtocolSpec::stationary(model))?;
    let mut all = Vec::new();
    for spec in [a, b] {
        let basis = Arc::new(enumerate_sector(spec)?);
        all.extend(lowest_eigenpairs(&build_sector_operator(model, &basis)?, 3, &EigenConfig::default())?.eigenvalues);
    }
    all.sort_by(f64::total_cmp);
    Ok(all)
}

fn main() -> adiabus::Result<()> {
    for (name, model) in [("J1-J2 N=9 J2=0.3", j1j2_chain(9, 1.0, 0.3)?), ("XYZ N=7 delta=0.3", xyz_chain(7, 0.3)?)] {
        let e = levels(&model)?;
        let splits: Vec<String> = e.chunks(2).map(|p| format!("{:.1e}", (p[1] - p[0]).abs())).collect();
        println!("{name}: lowest {:.6?}\n  pair splits {}", e, splits.join(" "));
    }
    Ok(())
}
