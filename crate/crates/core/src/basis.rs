//! Computational-basis bookkeeping for symmetry sectors.
//!
//! Site `i` (1-based) is stored in bit `i - 1` of a [`BasisState`]; a set bit
//! means the spin is up (σz = +1). Sector bases list their states in
//! ascending bitmask order.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::StateVector;

/// Largest chain length any basis will enumerate.
pub const MAX_SPINS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisState(pub u32);

impl BasisState {
    pub fn bits(self) -> u32 {
        self.0
    }

    /// Is the spin at 1-based `site` up?
    pub fn is_up(self, site: usize) -> bool {
        self.0 >> (site - 1) & 1 == 1
    }

    pub fn up_count(self) -> u32 {
        self.0.count_ones()
    }
}

impl fmt::Binary for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Binary::fmt(&self.0, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(up_count: u32) -> Parity {
        if up_count.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SectorKind {
    Full,
    /// Fixed number of up spins.
    Magnetization(usize),
    /// Fixed number of up spins mod 2.
    Parity(Parity),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SectorSpec {
    pub kind: SectorKind,
    pub n_spins: usize,
}

impl SectorSpec {
    pub fn full(n_spins: usize) -> Self {
        SectorSpec { kind: SectorKind::Full, n_spins }
    }

    pub fn magnetization(n_spins: usize, up: usize) -> Self {
        SectorSpec { kind: SectorKind::Magnetization(up), n_spins }
    }

    pub fn parity(n_spins: usize, parity: Parity) -> Self {
        SectorSpec { kind: SectorKind::Parity(parity), n_spins }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_spins == 0 || self.n_spins > MAX_SPINS {
            return Err(Error::InvalidSector(format!(
                "chain length {} outside 1..={MAX_SPINS}",
                self.n_spins
            )));
        }
        if let SectorKind::Magnetization(k) = self.kind {
            if k > self.n_spins {
                return Err(Error::InvalidSector(format!(
                    "{k} up spins on {} sites",
                    self.n_spins
                )));
            }
        }
        Ok(())
    }

    pub fn contains(&self, state: BasisState) -> bool {
        if self.n_spins < 32 && state.0 >> self.n_spins != 0 {
            return false;
        }
        match self.kind {
            SectorKind::Full => true,
            SectorKind::Magnetization(k) => state.up_count() as usize == k,
            SectorKind::Parity(p) => Parity::of(state.up_count()) == p,
        }
    }

    /// Closed-form sector dimension.
    pub fn dimension(&self) -> usize {
        match self.kind {
            SectorKind::Full => 1 << self.n_spins,
            SectorKind::Magnetization(k) => binomial(self.n_spins, k),
            SectorKind::Parity(_) => 1 << (self.n_spins - 1),
        }
    }
}

impl fmt::Display for SectorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SectorKind::Full => write!(f, "full(N={})", self.n_spins),
            SectorKind::Magnetization(k) => write!(f, "k={k}(N={})", self.n_spins),
            SectorKind::Parity(Parity::Even) => write!(f, "even(N={})", self.n_spins),
            SectorKind::Parity(Parity::Odd) => write!(f, "odd(N={})", self.n_spins),
        }
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Ordered list of the computational basis states in one sector.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorBasis {
    spec: SectorSpec,
    states: Vec<BasisState>,
}

impl SectorBasis {
    pub fn spec(&self) -> SectorSpec {
        self.spec
    }

    pub fn n_spins(&self) -> usize {
        self.spec.n_spins
    }

    pub fn states(&self) -> &[BasisState] {
        &self.states
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, ordinal: usize) -> BasisState {
        self.states[ordinal]
    }

    /// Ordinal of `state`, or `None` if it lies outside the sector.
    pub fn lookup(&self, state: BasisState) -> Option<usize> {
        match self.spec.kind {
            SectorKind::Full => {
                let idx = state.0 as usize;
                (idx < self.states.len()).then_some(idx)
            }
            _ => self.states.binary_search(&state).ok(),
        }
    }

    pub fn index_of(&self, state: BasisState) -> Result<usize> {
        self.lookup(state).ok_or(Error::NotInSector(state.0))
    }
}

pub fn enumerate_sector(spec: SectorSpec) -> Result<SectorBasis> {
    spec.validate()?;
    let n = spec.n_spins;
    let states = match spec.kind {
        SectorKind::Full => (0..1u32 << n).map(BasisState).collect(),
        SectorKind::Magnetization(k) => fixed_weight(n, k),
        SectorKind::Parity(p) => (0..1u32 << n)
            .filter(|b| Parity::of(b.count_ones()) == p)
            .map(BasisState)
            .collect(),
    };
    Ok(SectorBasis { spec, states })
}

/// All `n`-bit masks with `k` set bits in ascending order (Gosper's hack).
fn fixed_weight(n: usize, k: usize) -> Vec<BasisState> {
    let mut out = Vec::with_capacity(binomial(n, k));
    if k == 0 {
        out.push(BasisState(0));
        return out;
    }
    let limit = 1u64 << n;
    let mut x: u64 = (1 << k) - 1;
    while x < limit {
        out.push(BasisState(x as u32));
        let c = x & x.wrapping_neg();
        let r = x + c;
        x = (((r ^ x) >> 2) / c) | r;
    }
    out
}

/// Single-site amplitudes indexed by bit value: `[down, up]`.
pub type SiteState = [Complex64; 2];

pub fn spin_up() -> SiteState {
    [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]
}

pub fn spin_down() -> SiteState {
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
}

/// Tensor product of a state on sites `1..=M` with single-site states on
/// sites `M+1..=N`, expressed in `target` coordinates.
pub fn embed(
    small: &SectorBasis,
    amplitudes: &[Complex64],
    free_sites: &[SiteState],
    target: &Arc<SectorBasis>,
) -> Result<StateVector> {
    let m = small.n_spins();
    let sites: Vec<usize> = (1..=m).collect();
    let free: Vec<(usize, SiteState)> = free_sites
        .iter()
        .enumerate()
        .map(|(offset, s)| (m + 1 + offset, *s))
        .collect();
    embed_on_sites(small, amplitudes, &sites, &free, target)
}

/// Like [`embed`], but bit `b` of the small basis lands on `small_sites[b]`
/// and each free state sits on its own named site.
pub fn embed_on_sites(
    small: &SectorBasis,
    amplitudes: &[Complex64],
    small_sites: &[usize],
    free: &[(usize, SiteState)],
    target: &Arc<SectorBasis>,
) -> Result<StateVector> {
    if amplitudes.len() != small.dim() {
        return Err(Error::DimensionMismatch { expected: small.dim(), got: amplitudes.len() });
    }
    if small_sites.len() != small.n_spins() {
        return Err(Error::DimensionMismatch {
            expected: small.n_spins(),
            got: small_sites.len(),
        });
    }
    let n = target.n_spins();
    let mut used = vec![false; n + 1];
    for &site in small_sites.iter().chain(free.iter().map(|(s, _)| s)) {
        if site == 0 || site > n || used[site] {
            return Err(Error::InvalidArgument(format!("site {site} repeated or outside 1..={n}")));
        }
        used[site] = true;
    }
    if used[1..].iter().any(|u| !u) {
        return Err(Error::InvalidArgument("product does not cover every site".into()));
    }

    let mut amps = vec![Complex64::new(0.0, 0.0); target.dim()];
    for (ordinal, &a) in amplitudes.iter().enumerate() {
        if a == Complex64::new(0.0, 0.0) {
            continue;
        }
        let src = small.state(ordinal).0;
        let mut base = 0u32;
        for (bit, &site) in small_sites.iter().enumerate() {
            if src >> bit & 1 == 1 {
                base |= 1 << (site - 1);
            }
        }
        for combo in 0..1u32 << free.len() {
            let mut bits = base;
            let mut amp = a;
            for (f, (site, s)) in free.iter().enumerate() {
                let up = (combo >> f & 1) as usize;
                amp *= s[up];
                if up == 1 {
                    bits |= 1 << (site - 1);
                }
            }
            if amp == Complex64::new(0.0, 0.0) {
                continue;
            }
            let idx = target.lookup(BasisState(bits)).ok_or(Error::SectorMismatch(bits))?;
            amps[idx] += amp;
        }
    }
    let mut out = StateVector::new(target.clone(), amps)?;
    out.normalize();
    Ok(out)
}
