//! End-to-end transport of an arbitrary qubit state: the input spin starts
//! free next to the chain, the protocol runs, and the state is read back
//! either from the spin left free at the end or from the final twofold
//! ground manifold.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fidelity::AnnealProblem;
use super::gap::ground_manifold_sectors;
use super::prepare::free_site_split;
use super::AnnealConfig;
use crate::basis::{embed_on_sites, enumerate_sector, Parity, SectorBasis, SectorSpec, SiteState};
use crate::error::{Error, Result};
use crate::model::{BlochVector, ProtocolSpec};
use crate::solver::{build_sector_operator, ground_space, Evolver};
use crate::state::StateVector;

/// Where the dynamics run: the whole `2^N` space, or each magnetization
/// sector separately (magnetization-conserving protocols only).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransportSpace {
    #[default]
    Full,
    Sectors,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct TransportConfig {
    pub anneal: AnnealConfig,
    pub space: TransportSpace,
    /// Also compute the per-sector ground-state fidelities.
    pub sector_fidelities: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Readout {
    /// The spin at this site is decoupled at `s = 1`.
    Site(usize),
    /// Logical qubit in the final ground manifold.
    GroundManifold,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportResult {
    pub bloch_in: BlochVector,
    pub bloch_out: BlochVector,
    /// `<psi_in| rho_out |psi_in>`.
    pub qubit_fidelity: f64,
    /// Ground-state fidelity in each ground-manifold sector, when defined.
    pub sector_fidelities: Vec<(SectorSpec, Option<f64>)>,
    pub readout: Readout,
    /// The chain's starting ground state was degenerate; the first
    /// eigenvector was used.
    pub initial_degenerate: bool,
}

#[derive(Debug, Clone)]
struct LogicalBasis {
    down: Vec<Complex64>,
    up: Vec<Complex64>,
}

#[derive(Debug, Clone)]
enum Dynamics {
    Full(Box<Evolver>),
    Sectors(BTreeMap<usize, Evolver>),
}

/// Everything about a transport run that does not depend on the input state.
#[derive(Debug, Clone)]
pub struct TransportSetup {
    protocol: ProtocolSpec,
    cfg: TransportConfig,
    input_site: usize,
    chain_sites: Vec<usize>,
    chain_ground: StateVector,
    initial_degenerate: bool,
    full: Arc<SectorBasis>,
    dynamics: Dynamics,
    readout: Readout,
    logical: Option<LogicalBasis>,
}

fn flip_all(v: &[Complex64], n: usize) -> Vec<Complex64> {
    let mask = (1u32 << n) - 1;
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    for (b, a) in v.iter().enumerate() {
        out[(b as u32 ^ mask) as usize] = *a;
    }
    out
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// The single magnetization or parity sector holding `state`'s support.
fn support_sector(state: &StateVector, conserving: bool) -> Result<SectorSpec> {
    let n = state.basis().n_spins();
    let mut seen: Option<u32> = None;
    for (s, a) in state.basis().states().iter().zip(state.amplitudes()) {
        if a.norm() < 1e-12 {
            continue;
        }
        let label = if conserving { s.up_count() } else { s.up_count() % 2 };
        match seen {
            None => seen = Some(label),
            Some(l) if l != label => {
                return Err(Error::AmbiguousInitial(0.0));
            }
            _ => {}
        }
    }
    let label = seen.ok_or_else(|| Error::InvalidArgument("zero state".into()))?;
    Ok(if conserving {
        SectorSpec::magnetization(n, label as usize)
    } else {
        SectorSpec::parity(n, Parity::of(label))
    })
}

impl TransportSetup {
    pub fn new(p: &ProtocolSpec, cfg: &TransportConfig) -> Result<Self> {
        p.validate()?;
        let n = p.n_spins;
        let m0 = p.evaluate(0.0);
        let (input_site, chain_sites) = free_site_split(&m0)?.ok_or(Error::InputSiteCoupled(n))?;
        let sub = m0.restrict(&chain_sites)?;
        let sub_full = Arc::new(enumerate_sector(SectorSpec::full(chain_sites.len()))?);
        let levels = ground_space(&build_sector_operator(&sub, &sub_full)?, cfg.anneal.degeneracy_threshold, &cfg.anneal.eigen)?;
        let initial_degenerate = levels.len() > 1;
        let chain_ground = levels.state(0);

        let full = Arc::new(enumerate_sector(SectorSpec::full(n))?);
        let dynamics = match cfg.space {
            TransportSpace::Full => Dynamics::Full(Box::new(Evolver::new(p, &full)?)),
            TransportSpace::Sectors => {
                if !p.conserves_magnetization() {
                    let b = p.evaluate(0.5).bonds().iter().find(|b| !b.coupling.conserves_magnetization()).copied();
                    let (i, j) = b.map_or((0, 0), |b| (b.i, b.j));
                    return Err(Error::NonConservingSector { i, j });
                }
                let mut evolvers = BTreeMap::new();
                for (s, a) in chain_ground.basis().states().iter().zip(chain_ground.amplitudes()) {
                    if a.norm() == 0.0 {
                        continue;
                    }
                    for k in [s.up_count() as usize, s.up_count() as usize + 1] {
                        if let std::collections::btree_map::Entry::Vacant(e) = evolvers.entry(k) {
                            let basis = Arc::new(enumerate_sector(SectorSpec::magnetization(n, k))?);
                            e.insert(Evolver::new(p, &basis)?);
                        }
                    }
                }
                Dynamics::Sectors(evolvers)
            }
        };

        let m1 = p.evaluate(1.0);
        let (readout, logical) = match free_site_split(&m1)? {
            Some((site, _)) => (Readout::Site(site), None),
            None => {
                let conserving = p.conserves_magnetization();
                let sub_sector = support_sector(&chain_ground, conserving)?;
                let down_sector = match sub_sector.kind {
                    crate::basis::SectorKind::Magnetization(k) => SectorSpec::magnetization(n, k),
                    crate::basis::SectorKind::Parity(par) => SectorSpec::parity(n, par),
                    crate::basis::SectorKind::Full => unreachable!("support sector is never full"),
                };
                let basis = Arc::new(enumerate_sector(down_sector)?);
                let gs = ground_space(&build_sector_operator(&m1, &basis)?, cfg.anneal.degeneracy_threshold, &cfg.anneal.eigen)?;
                let down = gs.state(0).to_full().into_amplitudes();
                let up = flip_all(&down, n);
                // The chain ground state's spin-flip eigenvalue fixes the logical phase.
                let g = chain_ground.amplitudes();
                let eps = inner(g, &flip_all(g, chain_sites.len()));
                if (eps.norm() - 1.0).abs() > 1e-8 {
                    return Err(Error::AmbiguousInitial(eps.norm()));
                }
                let up = up.into_iter().map(|a| a * eps).collect();
                (Readout::GroundManifold, Some(LogicalBasis { down, up }))
            }
        };

        Ok(TransportSetup {
            protocol: p.clone(),
            cfg: *cfg,
            input_site,
            chain_sites,
            chain_ground,
            initial_degenerate,
            full,
            dynamics,
            readout,
            logical,
        })
    }

    pub fn input_site(&self) -> usize {
        self.input_site
    }

    pub fn readout(&self) -> Readout {
        self.readout
    }

    /// Chain ground state times the input qubit, in the full basis.
    pub fn initial_state(&self, bloch_in: &BlochVector) -> Result<StateVector> {
        let site: SiteState = bloch_in.site_state()?;
        embed_on_sites(
            self.chain_ground.basis(),
            self.chain_ground.amplitudes(),
            &self.chain_sites,
            &[(self.input_site, site)],
            &self.full,
        )
    }

    /// Evolve a full-basis state to `tau`.
    pub fn evolve(&self, psi0: &StateVector, tau: f64) -> Result<StateVector> {
        let prop = &self.cfg.anneal.propagator;
        match &self.dynamics {
            Dynamics::Full(ev) => ev.evolve(tau, psi0, prop),
            Dynamics::Sectors(evolvers) => {
                let mut out = vec![Complex64::new(0.0, 0.0); self.full.dim()];
                for ev in evolvers.values() {
                    let basis = ev.family().basis().clone();
                    let part: Vec<Complex64> = basis.states().iter().map(|s| psi0.amplitudes()[s.0 as usize]).collect();
                    let weight: f64 = part.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
                    if weight == 0.0 {
                        continue;
                    }
                    let mut piece = StateVector::new(basis.clone(), part.iter().map(|a| a / weight).collect())?;
                    piece = ev.evolve(tau, &piece, prop)?;
                    for (s, a) in basis.states().iter().zip(piece.amplitudes()) {
                        out[s.0 as usize] = a * weight;
                    }
                }
                let covered: f64 = out.iter().map(|a| a.norm_sqr()).sum();
                if (covered - psi0.norm().powi(2)).abs() > 1e-6 {
                    return Err(Error::SectorMismatch(0));
                }
                StateVector::new(self.full.clone(), out)
            }
        }
    }

    /// Output qubit density matrix, ordered `[up, down]`; unnormalized for
    /// the ground-manifold readout (leakage lowers its trace).
    pub fn output_density(&self, psi: &StateVector) -> [[Complex64; 2]; 2] {
        match (&self.readout, &self.logical) {
            (Readout::Site(site), _) => psi.reduced_density(*site),
            (Readout::GroundManifold, Some(l)) => {
                let cu = inner(&l.up, psi.amplitudes());
                let cd = inner(&l.down, psi.amplitudes());
                [
                    [Complex64::new(cu.norm_sqr(), 0.0), cu * cd.conj()],
                    [cd * cu.conj(), Complex64::new(cd.norm_sqr(), 0.0)],
                ]
            }
            (Readout::GroundManifold, None) => unreachable!("logical basis built with readout"),
        }
    }

    /// Run a prepared full-basis state and compare the output to `bloch_in`.
    pub fn run_state(&self, psi0: &StateVector, bloch_in: &BlochVector, tau: f64) -> Result<TransportResult> {
        let psi = self.evolve(psi0, tau)?;
        let rho = self.output_density(&psi);
        let s = bloch_in.site_state()?;
        let u = [s[1], s[0]];
        let mut f = Complex64::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                f += u[i].conj() * rho[i][j] * u[j];
            }
        }
        let sector_fidelities = if self.cfg.sector_fidelities { self.sector_fidelities(tau) } else { Vec::new() };
        Ok(TransportResult {
            bloch_in: *bloch_in,
            bloch_out: BlochVector::from_density(&rho),
            qubit_fidelity: f.re,
            sector_fidelities,
            readout: self.readout,
            initial_degenerate: self.initial_degenerate,
        })
    }

    pub fn run(&self, bloch_in: &BlochVector, tau: f64) -> Result<TransportResult> {
        let psi0 = self.initial_state(bloch_in)?;
        self.run_state(&psi0, bloch_in, tau)
    }

    fn sector_fidelities(&self, tau: f64) -> Vec<(SectorSpec, Option<f64>)> {
        let Ok((a, b)) = ground_manifold_sectors(&self.protocol) else {
            return Vec::new();
        };
        [a, b]
            .into_iter()
            .map(|spec| {
                let f = AnnealProblem::new(&self.protocol, spec, &self.cfg.anneal).and_then(|prob| prob.fidelity(tau));
                (spec, f.ok())
            })
            .collect()
    }
}

/// Move the qubit described by `bloch_in` through protocol `p` in time `tau`.
pub fn transport_qubit(p: &ProtocolSpec, bloch_in: &BlochVector, tau: f64, cfg: &TransportConfig) -> Result<TransportResult> {
    TransportSetup::new(p, cfg)?.run(bloch_in, tau)
}
