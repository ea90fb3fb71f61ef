//! Annealing times for XXZ chains against the Z/X ratio and for the
//! normalized XYZ chain against delta.
use adiabus::anneal::{default_sector, find_anneal_time, AnnealConfig, AnnealProblem, SearchConfig};
use adiabus::model::{simultaneous_protocol_with, Coupling};

fn tau_star(nn: Coupling) -> adiabus::Result<Option<f64>> {
    let p = simultaneous_protocol_with(7, nn, Coupling::ZERO)?;
    let problem = AnnealProblem::new(&p, default_sector(&p), &AnnealConfig::default())?;
    Ok(find_anneal_time(&problem, &SearchConfig::default())?.tau_star)
}

fn main() -> adiabus::Result<()> {
    let base = tau_star(Coupling::isotropic(1.0))?.unwrap_or(f64::NAN);
    println!("XXZ, N=7 (Heisenberg tau* = {base:.3})");
    for ratio in [0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 6.0] {
        println!("  Z/X={ratio:3.1}  tau*={:?}", tau_star(Coupling::xxz(1.0, ratio))?);
    }
    println!("XYZ, N=7, fractional difference from Heisenberg");
    for delta in [-0.3, -0.1, 0.1, 0.3] {
        let t = tau_star(Coupling::xyz(delta))?.unwrap_or(f64::NAN);
        println!("  delta={delta:+.1}  tau*={t:.3}  ({:+.3})", (t - base) / base);
    }
    Ok(())
}
