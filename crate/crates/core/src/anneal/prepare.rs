use std::sync::Arc;

use num_complex::Complex64;

use super::AnnealConfig;
use crate::basis::{embed_on_sites, enumerate_sector, spin_down, spin_up, SectorBasis, SectorKind, SectorSpec, SiteState};
use crate::error::{Error, Result};
use crate::model::{ChainModel, ProtocolSpec};
use crate::solver::{build_sector_operator, lowest_eigenpairs, EigResult};
use crate::state::StateVector;

/// The sector transport is measured in: `k = floor(N/2)` up spins when the
/// protocol conserves magnetization, even parity otherwise.
pub fn default_sector(p: &ProtocolSpec) -> SectorSpec {
    if p.conserves_magnetization() {
        SectorSpec::magnetization(p.n_spins, p.n_spins / 2)
    } else {
        SectorSpec::parity(p.n_spins, crate::basis::Parity::Even)
    }
}

/// The sector on the remaining sites once a spin with `up` on one site is
/// removed from `spec`.
pub(crate) fn residual_sector(spec: SectorSpec, up: bool) -> Option<SectorSpec> {
    let n = spec.n_spins - 1;
    match spec.kind {
        SectorKind::Full => Some(SectorSpec::full(n)),
        SectorKind::Magnetization(k) => {
            let k = if up { k.checked_sub(1)? } else { k };
            (k <= n).then(|| SectorSpec::magnetization(n, k))
        }
        SectorKind::Parity(p) => Some(SectorSpec::parity(n, if up { p.flip() } else { p })),
    }
}

/// Lowest two levels (or one, for one-dimensional sectors) of `model` in `spec`.
pub(crate) fn low_levels(model: &ChainModel, spec: SectorSpec, cfg: &AnnealConfig) -> Result<EigResult> {
    let basis = Arc::new(enumerate_sector(spec)?);
    let op = build_sector_operator(model, &basis)?;
    lowest_eigenpairs(&op, basis.dim().min(2), &cfg.eigen)
}

fn split_gap(levels: &EigResult) -> f64 {
    levels.gap().unwrap_or(f64::INFINITY)
}

/// How the s = 0 Hamiltonian splits: `None` if it is connected, otherwise
/// the free site and the sites of the remaining connected chain.
pub(crate) fn free_site_split(model: &ChainModel) -> Result<Option<(usize, Vec<usize>)>> {
    let comps = model.components();
    match comps.len() {
        1 => Ok(None),
        2 => {
            let (single, rest): (Vec<_>, Vec<_>) = comps.into_iter().partition(|c| c.len() == 1);
            match (single.as_slice(), rest.as_slice()) {
                ([free], [chain]) => Ok(Some((free[0], chain.clone()))),
                ([a], []) if model.n_spins() == 2 => Ok(Some((a[0], vec![]))),
                _ => Err(Error::Disconnected(format!("components {single:?} {rest:?}"))),
            }
        }
        _ => Err(Error::Disconnected(format!("{} components: {comps:?}", comps.len()))),
    }
}

/// Ground state of the `s = 0` Hamiltonian within `sector`, built as the
/// ground state of the connected sub-chain times the free spin.
pub fn prepare_initial_state(p: &ProtocolSpec, sector: SectorSpec, cfg: &AnnealConfig) -> Result<StateVector> {
    if sector.n_spins != p.n_spins {
        return Err(Error::DimensionMismatch { expected: p.n_spins, got: sector.n_spins });
    }
    let target = Arc::new(enumerate_sector(sector)?);
    let m0 = p.evaluate(0.0);
    let Some((free, chain)) = free_site_split(&m0)? else {
        let levels = low_levels(&m0, sector, cfg)?;
        if split_gap(&levels) < cfg.degeneracy_threshold {
            return Err(Error::AmbiguousInitial(split_gap(&levels)));
        }
        return Ok(levels.state(0));
    };
    let sub = m0.restrict(&chain)?;

    let mut candidates: Vec<(f64, f64, SiteState, EigResult)> = Vec::new();
    for up in [false, true] {
        let Some(sub_spec) = residual_sector(sector, up) else { continue };
        if sub_spec.validate().is_err() {
            continue;
        }
        let levels = low_levels(&sub, sub_spec, cfg)?;
        let site = if up { spin_up() } else { spin_down() };
        candidates.push((levels.eigenvalues[0], split_gap(&levels), site, levels));
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
    let Some((e0, gap, site, levels)) = candidates.first() else {
        return Err(Error::InvalidSector(format!("{sector} cannot hold a free spin")));
    };
    if let Some((e1, ..)) = candidates.get(1) {
        if e1 - e0 < cfg.degeneracy_threshold {
            return Err(Error::AmbiguousInitial(e1 - e0));
        }
    }
    if *gap < cfg.degeneracy_threshold {
        return Err(Error::AmbiguousInitial(*gap));
    }
    let amps: Vec<Complex64> = levels.vector(0).iter().map(|&x| Complex64::new(x, 0.0)).collect();
    embed_on_sites(levels.basis(), &amps, &chain, &[(free, *site)], &target)
}

/// Product of nearest-neighbour singlets on `(1,2), (3,4), ...` in the
/// full basis.
pub fn mg_dimer_state(n_spins: usize) -> Result<StateVector> {
    if n_spins % 2 == 1 || n_spins == 0 {
        return Err(Error::OddLength(n_spins));
    }
    let basis: Arc<SectorBasis> = Arc::new(enumerate_sector(SectorSpec::full(n_spins))?);
    let pairs = n_spins / 2;
    let amp = 0.5f64.powf(pairs as f64 / 2.0);
    let mut amps = vec![Complex64::new(0.0, 0.0); basis.dim()];
    for choice in 0u32..1 << pairs {
        let mut bits = 0u32;
        let mut sign = 1.0;
        for pair in 0..pairs {
            if choice >> pair & 1 == 0 {
                // first site of the pair up
                bits |= 1 << (2 * pair);
            } else {
                bits |= 1 << (2 * pair + 1);
                sign = -sign;
            }
        }
        amps[bits as usize] = Complex64::new(sign * amp, 0.0);
    }
    StateVector::new(basis, amps)
}
