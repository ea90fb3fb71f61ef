//! Enumerate symmetry sectors and embed a product state.
use std::sync::Arc;

use adiabus::basis::{embed_on_sites, enumerate_sector, spin_down, Parity, SectorSpec};
use num_complex::Complex64;

fn main() -> adiabus::Result<()> {
    for spec in [SectorSpec::magnetization(4, 2), SectorSpec::parity(3, Parity::Odd), SectorSpec::full(2)] {
        let basis = enumerate_sector(spec)?;
        let states: Vec<String> = basis.states().iter().map(|s| format!("{:0w$b}", s.bits(), w = spec.n_spins)).collect();
        println!("{spec}: dim {} -> {}", basis.dim(), states.join(" "));
    }

    // singlet on sites 1,2 times a down spin on site 3
    let pair = enumerate_sector(SectorSpec::full(2))?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let singlet = [0.0, h, -h, 0.0].map(|x| Complex64::new(x, 0.0));
    let target = Arc::new(enumerate_sector(SectorSpec::magnetization(3, 1))?);
    let psi = embed_on_sites(&pair, &singlet, &[1, 2], &[(3, spin_down())], &target)?;
    for (s, a) in target.states().iter().zip(psi.amplitudes()) {
        println!("|{:03b}>  {:+.6}", s.bits(), a.re);
    }
    Ok(())
}
