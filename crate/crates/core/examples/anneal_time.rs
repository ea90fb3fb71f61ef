//! Annealing time needed to reach 90% ground-state fidelity when a spin is
//! joined onto the end of a J1-J2 chain.
use adiabus::anneal::{default_sector, find_anneal_time, AnnealConfig, AnnealProblem, SearchConfig};
use adiabus::model::join_protocol;

fn main() -> adiabus::Result<()> {
    let cfg = AnnealConfig::default();
    let search = SearchConfig::default();
    println!("  N    J2      tau*  F(tau*)  evaluations");
    for n in [5, 7, 9] {
        for j2 in [0.0, 0.2, 0.4, 0.6] {
            let p = join_protocol(n, 1.0, j2)?;
            let problem = AnnealProblem::new(&p, default_sector(&p), &cfg)?;
            let r = find_anneal_time(&problem, &search)?;
            match (r.tau_star, r.fidelity_at_tau_star) {
                (Some(t), Some(f)) => println!("{n:3}  {j2:4.1}  {t:8.3}  {f:.4}  {}", r.trace.len()),
                _ => println!("{n:3}  {j2:4.1}  not reached ({:?})", r.status),
            }
        }
    }

    let p = join_protocol(7, 1.0, 0.3)?;
    let problem = AnnealProblem::new(&p, default_sector(&p), &cfg)?;
    println!("\nF(tau) for N=7, J2=0.3");
    for tau in [0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0] {
        println!("{tau:6.1}  {:.6}", problem.fidelity(tau)?);
    }
    Ok(())
}
