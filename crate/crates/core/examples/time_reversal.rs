//! Unjoining a spin is exactly as hard as joining it: for real Hamiltonians
//! the reversed schedule between swapped endpoint states has the same
//! fidelity.
use adiabus::anneal::{default_sector, fidelity, AnnealConfig};
use adiabus::model::{join_protocol, reverse_protocol};

fn main() -> adiabus::Result<()> {
    let cfg = AnnealConfig::default();
    for j2 in [0.2, 0.5] {
        let forward = join_protocol(7, 1.0, j2)?;
        let backward = reverse_protocol(&forward);
        let sector = default_sector(&forward);
        for tau in [1.0, 10.0, 100.0] {
            let f = fidelity(&forward, tau, sector, &cfg)?;
            let b = fidelity(&backward, tau, sector, &cfg)?;
            println!("J2={j2}  tau={tau:5}  forward {f:.10}  reversed {b:.10}  diff {:.1e}", (f - b).abs());
        }
    }
    Ok(())
}
