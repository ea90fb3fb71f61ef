//! Static spin-chain Hamiltonians and annealing protocols over normalized
//! time `s = t / tau`.

use std::collections::BTreeMap;

use log::warn;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::SiteState;
use crate::error::{Error, Result};

/// Per-axis exchange strengths of one bond, in Pauli units (ħ = 1).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Coupling {
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
}

impl Coupling {
    pub const ZERO: Coupling = Coupling { jx: 0.0, jy: 0.0, jz: 0.0 };

    pub fn new(jx: f64, jy: f64, jz: f64) -> Self {
        Coupling { jx, jy, jz }
    }

    pub fn isotropic(j: f64) -> Self {
        Coupling { jx: j, jy: j, jz: j }
    }

    /// `jx = jy = j`, `jz = ratio * j`.
    pub fn xxz(j: f64, ratio: f64) -> Self {
        Coupling { jx: j, jy: j, jz: ratio * j }
    }

    pub fn ising(j: f64) -> Self {
        Coupling { jx: 0.0, jy: 0.0, jz: j }
    }

    /// Normalized XYZ coupling `C (1, 1 + d, 1 + 2d)` with
    /// `C^2 (1 + (1+d)^2 + (1+2d)^2) = 3`.
    pub fn xyz(delta: f64) -> Self {
        let (a, b) = (1.0 + delta, 1.0 + 2.0 * delta);
        let c = 3f64.sqrt() / (1.0 + a * a + b * b).sqrt();
        Coupling { jx: c, jy: c * a, jz: c * b }
    }

    pub fn scaled(self, f: f64) -> Self {
        Coupling { jx: self.jx * f, jy: self.jy * f, jz: self.jz * f }
    }

    pub fn plus(self, o: Coupling) -> Self {
        Coupling { jx: self.jx + o.jx, jy: self.jy + o.jy, jz: self.jz + o.jz }
    }

    pub fn is_zero(&self) -> bool {
        self.jx == 0.0 && self.jy == 0.0 && self.jz == 0.0
    }

    pub fn is_isotropic(&self) -> bool {
        self.jx == self.jy && self.jy == self.jz
    }

    pub fn conserves_magnetization(&self) -> bool {
        self.jx == self.jy
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bond {
    pub i: usize,
    pub j: usize,
    #[serde(flatten)]
    pub coupling: Coupling,
}

impl Bond {
    pub fn new(i: usize, j: usize, coupling: Coupling) -> Self {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        Bond { i, j, coupling }
    }

    pub fn is_next_nearest(&self) -> bool {
        self.j == self.i + 2
    }

    fn check(&self, n_spins: usize) -> Result<()> {
        if self.i == self.j || self.i == 0 || self.j > n_spins || self.i > self.j {
            return Err(Error::InvalidBond(format!(
                "({},{}) on {} sites",
                self.i, self.j, n_spins
            )));
        }
        Ok(())
    }
}

/// A static Hamiltonian: a list of two-site bonds, kept sorted by `(i, j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainModel {
    n_spins: usize,
    bonds: Vec<Bond>,
}

impl ChainModel {
    pub fn new(n_spins: usize, mut bonds: Vec<Bond>) -> Result<Self> {
        if n_spins < 2 {
            return Err(Error::InvalidSize(format!("{n_spins} sites, need at least 2")));
        }
        for b in &bonds {
            b.check(n_spins)?;
        }
        bonds.sort_by_key(|b| (b.i, b.j));
        if let Some(w) = bonds.windows(2).find(|w| (w[0].i, w[0].j) == (w[1].i, w[1].j)) {
            return Err(Error::InvalidBond(format!("duplicate bond ({},{})", w[0].i, w[0].j)));
        }
        Ok(ChainModel { n_spins, bonds })
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn bond(&self, i: usize, j: usize) -> Option<&Bond> {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.bonds.iter().find(|b| b.i == i && b.j == j)
    }

    pub fn conserves_magnetization(&self) -> bool {
        self.bonds.iter().all(|b| b.coupling.conserves_magnetization())
    }

    pub fn is_isotropic(&self) -> bool {
        self.bonds.iter().all(|b| b.coupling.is_isotropic())
    }

    /// Sites that no bond touches.
    pub fn free_sites(&self) -> Vec<usize> {
        let mut touched = vec![false; self.n_spins + 1];
        for b in &self.bonds {
            touched[b.i] = true;
            touched[b.j] = true;
        }
        (1..=self.n_spins).filter(|&s| !touched[s]).collect()
    }

    /// Connected components of the coupling graph, each sorted, ordered by
    /// smallest site.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..=self.n_spins).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        for b in &self.bonds {
            let (a, c) = (find(&mut parent, b.i), find(&mut parent, b.j));
            if a != c {
                parent[a.max(c)] = a.min(c);
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for s in 1..=self.n_spins {
            let r = find(&mut parent, s);
            groups.entry(r).or_default().push(s);
        }
        groups.into_values().collect()
    }

    /// The model restricted to `sites`, relabelled `1..=sites.len()` in order.
    pub fn restrict(&self, sites: &[usize]) -> Result<ChainModel> {
        let mut label = vec![0usize; self.n_spins + 1];
        for (k, &s) in sites.iter().enumerate() {
            label[s] = k + 1;
        }
        let bonds = self
            .bonds
            .iter()
            .filter(|b| label[b.i] != 0 && label[b.j] != 0)
            .map(|b| Bond::new(label[b.i], label[b.j], b.coupling))
            .collect();
        ChainModel::new(sites.len(), bonds)
    }
}

fn warn_on_ferromagnetic(j1: f64) {
    if j1 <= 0.0 {
        warn!("nearest-neighbour coupling J1 = {j1} is not antiferromagnetic; transport is not expected to work");
    }
}

fn push_nonzero(bonds: &mut Vec<Bond>, i: usize, j: usize, c: Coupling) {
    if !c.is_zero() {
        bonds.push(Bond::new(i, j, c));
    }
}

/// Open chain on sites `first..=last` with the given nearest and
/// next-nearest couplings.
fn chain_bonds(first: usize, last: usize, nn: Coupling, nnn: Coupling) -> Vec<Bond> {
    let mut bonds = Vec::new();
    for n in first..last {
        push_nonzero(&mut bonds, n, n + 1, nn);
    }
    for n in first..last.saturating_sub(1) {
        push_nonzero(&mut bonds, n, n + 2, nnn);
    }
    bonds
}

pub fn chain_with(n_spins: usize, nn: Coupling, nnn: Coupling) -> Result<ChainModel> {
    if n_spins < 2 {
        return Err(Error::InvalidSize(format!("{n_spins} sites, need at least 2")));
    }
    ChainModel::new(n_spins, chain_bonds(1, n_spins, nn, nnn))
}

/// Isotropic J1-J2 Heisenberg chain with open boundaries.
pub fn j1j2_chain(n_spins: usize, j1: f64, j2: f64) -> Result<ChainModel> {
    warn_on_ferromagnetic(j1);
    chain_with(n_spins, Coupling::isotropic(j1), Coupling::isotropic(j2))
}

/// Nearest-neighbour XXZ chain with `jz / jx = ratio`.
pub fn xxz_chain(n_spins: usize, ratio: f64) -> Result<ChainModel> {
    if ratio < 0.0 {
        return Err(Error::InvalidArgument(format!("Z/X ratio {ratio} is negative")));
    }
    chain_with(n_spins, Coupling::xxz(1.0, ratio), Coupling::ZERO)
}

/// Nearest-neighbour normalized XYZ chain.
pub fn xyz_chain(n_spins: usize, delta: f64) -> Result<ChainModel> {
    chain_with(n_spins, Coupling::xyz(delta), Coupling::ZERO)
}

/// A piecewise-linear schedule in normalized time, clamped outside `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Ramp {
    Constant { value: f64 },
    Linear { from: f64, to: f64 },
}

impl Ramp {
    pub fn eval(&self, s: f64) -> f64 {
        match *self {
            Ramp::Constant { value } => value,
            Ramp::Linear { from, to } => {
                if s <= 0.0 {
                    from
                } else if s >= 1.0 {
                    to
                } else {
                    from * (1.0 - s) + to * s
                }
            }
        }
    }

    pub fn max_slope(&self) -> f64 {
        match *self {
            Ramp::Constant { .. } => 0.0,
            Ramp::Linear { from, to } => (to - from).abs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RampedGroup {
    pub ramp: Ramp,
    pub bonds: Vec<Bond>,
}

/// A time-dependent Hamiltonian `H(s) = static + sum_g ramp_g(s) * group_g`,
/// where next-nearest (`j = i + 2`) bonds are additionally multiplied by
/// `j2_ramp(s)` when one is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSpec {
    pub n_spins: usize,
    #[serde(default)]
    pub static_bonds: Vec<Bond>,
    #[serde(default)]
    pub ramped_groups: Vec<RampedGroup>,
    #[serde(default)]
    pub j2_ramp: Option<Ramp>,
    /// Evaluate every ramp at `1 - s`.
    #[serde(default)]
    pub time_reversed: bool,
    #[serde(default)]
    pub label: String,
}

/// Bonds sharing one time-dependent prefactor.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolTerm {
    pub group: Option<usize>,
    pub j2_scaled: bool,
    pub bonds: Vec<Bond>,
}

impl ProtocolSpec {
    /// A protocol whose Hamiltonian never changes.
    pub fn stationary(model: &ChainModel) -> Self {
        ProtocolSpec {
            n_spins: model.n_spins(),
            static_bonds: model.bonds().to_vec(),
            ramped_groups: Vec::new(),
            j2_ramp: None,
            time_reversed: false,
            label: "stationary".into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_spins < 2 {
            return Err(Error::InvalidSize(format!("{} sites, need at least 2", self.n_spins)));
        }
        let mut seen = std::collections::BTreeSet::new();
        let all = self.static_bonds.iter().chain(self.ramped_groups.iter().flat_map(|g| &g.bonds));
        for b in all {
            b.check(self.n_spins)?;
            if !seen.insert((b.i, b.j)) {
                return Err(Error::InvalidBond(format!(
                    "bond ({},{}) appears in more than one group",
                    b.i, b.j
                )));
            }
        }
        Ok(())
    }

    fn j2_applies(&self, b: &Bond) -> bool {
        self.j2_ramp.is_some() && b.is_next_nearest()
    }

    /// Partition of all bonds by shared prefactor, in a fixed order.
    pub fn terms(&self) -> Vec<ProtocolTerm> {
        let groups = std::iter::once((None, &self.static_bonds))
            .chain(self.ramped_groups.iter().enumerate().map(|(g, rg)| (Some(g), &rg.bonds)));
        let mut out = Vec::new();
        for (group, bonds) in groups {
            for j2_scaled in [false, true] {
                let picked: Vec<Bond> =
                    bonds.iter().filter(|b| self.j2_applies(b) == j2_scaled).copied().collect();
                if !picked.is_empty() {
                    out.push(ProtocolTerm { group, j2_scaled, bonds: picked });
                }
            }
        }
        out
    }

    fn local_time(&self, s: f64) -> f64 {
        let s = s.clamp(0.0, 1.0);
        if self.time_reversed {
            1.0 - s
        } else {
            s
        }
    }

    /// Prefactor multiplying the bonds of `term` at normalized time `s`.
    pub fn coefficient(&self, term: &ProtocolTerm, s: f64) -> f64 {
        let u = self.local_time(s);
        let mut c = match term.group {
            Some(g) => self.ramped_groups[g].ramp.eval(u),
            None => 1.0,
        };
        if term.j2_scaled {
            c *= self.j2_ramp.as_ref().map_or(1.0, |r| r.eval(u));
        }
        c
    }

    /// The static Hamiltonian at normalized time `s`; bonds whose strengths
    /// cancel on every axis are dropped.
    pub fn evaluate(&self, s: f64) -> ChainModel {
        let mut merged: BTreeMap<(usize, usize), Coupling> = BTreeMap::new();
        for term in self.terms() {
            let c = self.coefficient(&term, s);
            for b in &term.bonds {
                let e = merged.entry((b.i, b.j)).or_default();
                *e = e.plus(b.coupling.scaled(c));
            }
        }
        let bonds = merged
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|((i, j), c)| Bond::new(i, j, c))
            .collect();
        ChainModel::new(self.n_spins, bonds).expect("validated protocol")
    }

    fn all_bonds(&self) -> impl Iterator<Item = &Bond> {
        self.static_bonds.iter().chain(self.ramped_groups.iter().flat_map(|g| &g.bonds))
    }

    pub fn conserves_magnetization(&self) -> bool {
        self.all_bonds().all(|b| b.coupling.conserves_magnetization())
    }

    pub fn is_isotropic(&self) -> bool {
        self.all_bonds().all(|b| b.coupling.is_isotropic())
    }

    /// Largest rate of change of any single term prefactor per unit `s`.
    pub fn max_slope(&self) -> f64 {
        let j2 = self.j2_ramp.map_or(0.0, |r| r.max_slope());
        let j2_max = self.j2_ramp.map_or(1.0, |r| match r {
            Ramp::Constant { value } => value.abs(),
            Ramp::Linear { from, to } => from.abs().max(to.abs()),
        });
        self.ramped_groups
            .iter()
            .map(|g| {
                let (slope, max) = match g.ramp {
                    Ramp::Constant { value } => (0.0, value.abs()),
                    Ramp::Linear { from, to } => ((to - from).abs(), from.abs().max(to.abs())),
                };
                slope * j2_max + max * j2
            })
            .fold(j2, f64::max)
    }
}

fn require_sites(n_spins: usize, min: usize) -> Result<()> {
    if n_spins < min {
        return Err(Error::InvalidSize(format!("{n_spins} sites, protocol needs at least {min}")));
    }
    Ok(())
}

/// Join site `N` to the chain on sites `1..N-1` by ramping its two bonds
/// from zero.
pub fn join_protocol(n_spins: usize, j1: f64, j2: f64) -> Result<ProtocolSpec> {
    warn_on_ferromagnetic(j1);
    join_protocol_with(n_spins, Coupling::isotropic(j1), Coupling::isotropic(j2))
}

pub fn join_protocol_with(n_spins: usize, nn: Coupling, nnn: Coupling) -> Result<ProtocolSpec> {
    require_sites(n_spins, 3)?;
    let n = n_spins;
    let mut joining = Vec::new();
    push_nonzero(&mut joining, n - 1, n, nn);
    push_nonzero(&mut joining, n - 2, n, nnn);
    Ok(ProtocolSpec {
        n_spins,
        static_bonds: chain_bonds(1, n - 1, nn, nnn),
        ramped_groups: vec![RampedGroup { ramp: Ramp::Linear { from: 0.0, to: 1.0 }, bonds: joining }],
        j2_ramp: None,
        time_reversed: false,
        label: "join".into(),
    })
}

/// Join site `N` while every next-nearest coupling moves linearly from the
/// Majumdar-Ghosh value 0.5 to `j2_final`.
pub fn dynamic_j2_protocol(n_spins: usize, j1: f64, j2_final: f64) -> Result<ProtocolSpec> {
    warn_on_ferromagnetic(j1);
    let mut p = join_protocol_with(n_spins, Coupling::isotropic(j1), Coupling::isotropic(1.0))?;
    p.j2_ramp = Some(Ramp::Linear { from: 0.5, to: j2_final });
    p.label = "dynamic-j2".into();
    Ok(p)
}

/// Couple site `N` in while decoupling site `1`, both linearly.
pub fn simultaneous_protocol(n_spins: usize, j1: f64, j2: f64) -> Result<ProtocolSpec> {
    warn_on_ferromagnetic(j1);
    simultaneous_protocol_with(n_spins, Coupling::isotropic(j1), Coupling::isotropic(j2))
}

pub fn simultaneous_protocol_with(n_spins: usize, nn: Coupling, nnn: Coupling) -> Result<ProtocolSpec> {
    require_sites(n_spins, 4)?;
    let n = n_spins;
    let mut coupling_in = Vec::new();
    push_nonzero(&mut coupling_in, n - 1, n, nn);
    push_nonzero(&mut coupling_in, n - 2, n, nnn);
    let mut coupling_out = Vec::new();
    push_nonzero(&mut coupling_out, 1, 2, nn);
    push_nonzero(&mut coupling_out, 1, 3, nnn);
    Ok(ProtocolSpec {
        n_spins,
        static_bonds: chain_bonds(2, n - 1, nn, nnn),
        ramped_groups: vec![
            RampedGroup { ramp: Ramp::Linear { from: 0.0, to: 1.0 }, bonds: coupling_in },
            RampedGroup { ramp: Ramp::Linear { from: 1.0, to: 0.0 }, bonds: coupling_out },
        ],
        j2_ramp: None,
        time_reversed: false,
        label: "simultaneous".into(),
    })
}

/// The same path traversed backwards: `evaluate(reverse(p), s) == evaluate(p, 1 - s)`.
pub fn reverse_protocol(p: &ProtocolSpec) -> ProtocolSpec {
    ProtocolSpec { time_reversed: !p.time_reversed, ..p.clone() }
}

/// Single-qubit state as `(<σx>, <σy>, <σz>)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let b = BlochVector { x, y, z };
        if !(b.norm() <= 1.0 + 1e-12) {
            return Err(Error::InvalidBloch(format!("({x}, {y}, {z}) has norm {}", b.norm())));
        }
        Ok(b)
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn dot(&self, o: &BlochVector) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    /// ±x, ±y, ±z.
    pub fn cardinal() -> [BlochVector; 6] {
        let b = |x, y, z| BlochVector { x, y, z };
        [
            b(1.0, 0.0, 0.0),
            b(-1.0, 0.0, 0.0),
            b(0.0, 1.0, 0.0),
            b(0.0, -1.0, 0.0),
            b(0.0, 0.0, 1.0),
            b(0.0, 0.0, -1.0),
        ]
    }

    /// Pure-state amplitudes `[down, up]`: `cos(θ/2)|↑> + e^{iφ} sin(θ/2)|↓>`.
    pub fn site_state(&self) -> Result<SiteState> {
        let r = self.norm();
        if (r - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidBloch(format!("norm {r} is not a pure state")));
        }
        let theta = (self.z / r).clamp(-1.0, 1.0).acos();
        let phi = self.y.atan2(self.x);
        Ok([
            Complex64::from_polar((theta / 2.0).sin(), phi),
            Complex64::new((theta / 2.0).cos(), 0.0),
        ])
    }

    /// From a single-site density matrix ordered `[up, down]`.
    pub fn from_density(rho: &[[Complex64; 2]; 2]) -> Self {
        BlochVector {
            x: 2.0 * rho[0][1].re,
            y: -2.0 * rho[0][1].im,
            z: (rho[0][0] - rho[1][1]).re,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strength(m: &ChainModel, i: usize, j: usize) -> f64 {
        m.bond(i, j).map_or(0.0, |b| b.coupling.jz)
    }

    #[test]
    fn j1j2_bond_counts() {
        let m = j1j2_chain(4, 1.0, 0.5).unwrap();
        assert_eq!(m.bonds().iter().filter(|b| b.coupling.jz == 1.0).count(), 3);
        assert_eq!(m.bonds().iter().filter(|b| b.coupling.jz == 0.5).count(), 2);
        assert_eq!(j1j2_chain(2, 1.0, 0.0).unwrap().bonds().len(), 1);
        assert_eq!(j1j2_chain(5, 1.0, 0.5).unwrap().bonds().len(), 7);
        assert!(matches!(j1j2_chain(1, 1.0, 0.0), Err(Error::InvalidSize(_))));
        assert!(m.is_isotropic());
    }

    #[test]
    fn xxz_and_xyz_constructors() {
        assert_eq!(xxz_chain(6, 1.0).unwrap(), j1j2_chain(6, 1.0, 0.0).unwrap());
        assert!(xxz_chain(4, 0.0).unwrap().bonds().iter().all(|b| b.coupling.jz == 0.0));
        assert!(xxz_chain(4, 2.0).unwrap().bonds().iter().all(|b| b.coupling.jz == 2.0));
        assert_eq!(xyz_chain(5, 0.0).unwrap(), j1j2_chain(5, 1.0, 0.0).unwrap());

        let c = Coupling::xyz(1.0);
        assert!((c.jx - (3.0f64 / 14.0).sqrt()).abs() < 1e-12);
        assert!((c.jx - 0.46291).abs() < 1e-5 && (c.jy - 0.92582).abs() < 1e-5);
        assert!((c.jz - 1.38873).abs() < 1e-5);
        let c = Coupling::xyz(-0.5);
        assert!((c.jx - 1.549193).abs() < 1e-6 && (c.jy - 0.77460).abs() < 1e-5);
        assert_eq!(c.jz, 0.0);
    }

    #[test]
    fn join_endpoints_and_midpoint() {
        let p = join_protocol(5, 1.0, 0.0).unwrap();
        let m0 = p.evaluate(0.0);
        assert_eq!(m0, j1j2_chain(4, 1.0, 0.0).map(|c| ChainModel::new(5, c.bonds().to_vec()).unwrap()).unwrap());
        assert_eq!(m0.free_sites(), vec![5]);

        let p = join_protocol(5, 1.0, 0.3).unwrap();
        assert_eq!(p.evaluate(1.0), j1j2_chain(5, 1.0, 0.3).unwrap());
        let mid = p.evaluate(0.5);
        assert_eq!(strength(&mid, 4, 5), 0.5);
        assert!((strength(&mid, 3, 5) - 0.15).abs() < 1e-15);

        let p3 = join_protocol(3, 1.0, 0.0).unwrap();
        assert_eq!(strength(&p3.evaluate(0.25), 2, 3), 0.25);
        assert_eq!(p3.evaluate(-3.0), p3.evaluate(0.0));
        assert_eq!(p3.evaluate(7.0), p3.evaluate(1.0));
        assert!(join_protocol(2, 1.0, 0.0).is_err());
    }

    #[test]
    fn dynamic_j2_values() {
        let p = dynamic_j2_protocol(5, 1.0, 0.2).unwrap();
        let m0 = p.evaluate(0.0);
        assert_eq!(strength(&m0, 1, 3), 0.5);
        assert_eq!(strength(&m0, 2, 4), 0.5);
        assert!(m0.bond(4, 5).is_none() && m0.bond(3, 5).is_none());
        let mid = p.evaluate(0.5);
        assert!((strength(&mid, 1, 3) - 0.35).abs() < 1e-15);
        assert!((strength(&mid, 3, 5) - 0.175).abs() < 1e-15);

        let fixed = dynamic_j2_protocol(7, 1.0, 0.5).unwrap();
        let join = join_protocol(7, 1.0, 0.5).unwrap();
        for k in 0..=20 {
            let s = k as f64 / 20.0;
            assert_eq!(fixed.evaluate(s), join.evaluate(s));
        }
    }

    #[test]
    fn simultaneous_endpoints() {
        let p = simultaneous_protocol(6, 1.0, 0.3).unwrap();
        let m0 = p.evaluate(0.0);
        assert_eq!(m0.free_sites(), vec![6]);
        assert_eq!(m0.restrict(&[1, 2, 3, 4, 5]).unwrap(), j1j2_chain(5, 1.0, 0.3).unwrap());
        let m1 = p.evaluate(1.0);
        assert_eq!(m1.free_sites(), vec![1]);
        assert_eq!(m1.restrict(&[2, 3, 4, 5, 6]).unwrap(), j1j2_chain(5, 1.0, 0.3).unwrap());
        let mid = p.evaluate(0.5);
        assert_eq!(strength(&mid, 1, 2), 0.5);
        assert_eq!(strength(&mid, 5, 6), 0.5);
        assert!(simultaneous_protocol(3, 1.0, 0.0).is_err());
    }

    #[test]
    fn reversal() {
        let p = dynamic_j2_protocol(7, 1.0, 0.2).unwrap();
        let r = reverse_protocol(&p);
        for k in -2..=12 {
            let s = k as f64 / 10.0;
            assert_eq!(r.evaluate(s), p.evaluate(1.0 - s));
        }
        assert_eq!(reverse_protocol(&r), p);
        let j = join_protocol(5, 1.0, 0.3).unwrap();
        assert_eq!(reverse_protocol(&j).evaluate(0.0), j.evaluate(1.0));
    }

    #[test]
    fn protocol_json_round_trip() {
        let p = simultaneous_protocol_with(5, Coupling::xyz(0.3), Coupling::ZERO).unwrap();
        let text = serde_json::to_string(&p).unwrap();
        let back: ProtocolSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
        back.validate().unwrap();
    }

    #[test]
    fn duplicate_bonds_rejected() {
        let mut p = join_protocol(5, 1.0, 0.3).unwrap();
        p.ramped_groups[0].bonds.push(Bond::new(1, 2, Coupling::isotropic(1.0)));
        assert!(p.validate().is_err());
        assert!(ChainModel::new(3, vec![Bond::new(1, 2, Coupling::ZERO), Bond::new(2, 1, Coupling::ZERO)]).is_err());
    }

    #[test]
    fn bloch_states() {
        let plus = BlochVector::new(1.0, 0.0, 0.0).unwrap().site_state().unwrap();
        assert!((plus[0].re - plus[1].re).abs() < 1e-15);
        assert!(BlochVector::new(1.0, 1.0, 0.0).is_err());
        for b in BlochVector::cardinal() {
            let s = b.site_state().unwrap();
            let rho = [[s[1] * s[1].conj(), s[1] * s[0].conj()], [s[0] * s[1].conj(), s[0] * s[0].conj()]];
            let back = BlochVector::from_density(&rho);
            assert!((back.dot(&b) - 1.0).abs() < 1e-12, "{b:?} -> {back:?}");
        }
    }
}
