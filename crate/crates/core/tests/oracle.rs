//! Sparse sector operators, eigensolvers and propagation against dense
//! Kronecker-product references.
mod common;

use std::sync::Arc;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use adiabus::anneal::{default_sector, fidelity, AnnealConfig};
use adiabus::basis::{enumerate_sector, Parity, SectorSpec};
use adiabus::model::{chain_with, join_protocol, simultaneous_protocol, Bond, ChainModel, Coupling};
use adiabus::solver::{build_sector_operator, lowest_eigenpairs, EigenConfig, Evolver, PropagatorConfig};
use adiabus::state::StateVector;
use common::*;

fn random_model(rng: &mut ChaCha8Rng, n: usize, anisotropic: bool) -> ChainModel {
    let mut bonds = Vec::new();
    for i in 1..n {
        for j in [i + 1, i + 2] {
            if j > n {
                continue;
            }
            let cpl = if anisotropic {
                Coupling::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            } else {
                Coupling::isotropic(rng.random_range(-1.0..1.5))
            };
            bonds.push(Bond::new(i, j, cpl));
        }
    }
    ChainModel::new(n, bonds).unwrap()
}

fn sectors(n: usize, conserving: bool) -> Vec<(SectorSpec, Vec<u32>)> {
    let mut out = vec![(SectorSpec::full(n), popcount_states(n, |_| true))];
    for p in [Parity::Even, Parity::Odd] {
        let want = if p == Parity::Even { 0 } else { 1 };
        out.push((SectorSpec::parity(n, p), popcount_states(n, |b| b.count_ones() % 2 == want)));
    }
    if conserving {
        for k in 0..=n {
            out.push((SectorSpec::magnetization(n, k), popcount_states(n, |b| b.count_ones() as usize == k)));
        }
    }
    out
}

#[test]
fn sector_operators_match_dense_blocks() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 2..=6 {
        for anisotropic in [false, true] {
            let model = random_model(&mut rng, n, anisotropic);
            let h = dense_hamiltonian(&model);
            for (spec, states) in sectors(n, !anisotropic) {
                let basis = Arc::new(enumerate_sector(spec).unwrap());
                let got: Vec<u32> = basis.states().iter().map(|s| s.bits()).collect();
                assert_eq!(got, states, "{spec} ordering");
                let op = build_sector_operator(&model, &basis).unwrap();
                let diff = (op.to_dense() - block(&h, &states)).abs().max();
                assert!(diff < 1e-12, "{spec}: {diff}");
            }
        }
    }
}

#[test]
fn lanczos_matches_dense_spectrum_anisotropic() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cfg = EigenConfig { dense_below: 0, ..EigenConfig::default() };
    for n in [5, 7] {
        let model = random_model(&mut rng, n, true);
        let h = dense_hamiltonian(&model);
        for (spec, states) in sectors(n, false) {
            let basis = Arc::new(enumerate_sector(spec).unwrap());
            let r = lowest_eigenpairs(&build_sector_operator(&model, &basis).unwrap(), 4, &cfg).unwrap();
            let (dense, _) = eigen_sorted(&block(&h, &states));
            for (k, d) in dense.iter().take(4).enumerate() {
                assert!((r.eigenvalues[k] - d).abs() < 1e-9, "{spec} level {k}");
                assert!(r.residuals[k] <= 1e-9);
            }
        }
    }
}

#[test]
fn propagation_matches_dense_midpoint_reference() {
    let p = simultaneous_protocol(5, 1.0, 0.3).unwrap();
    let spec = SectorSpec::full(5);
    let basis = Arc::new(enumerate_sector(spec).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let raw: Vec<C> = (0..basis.dim()).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let mut psi = StateVector::new(basis.clone(), raw).unwrap();
    psi.normalize();

    let steps = 400;
    let cfg = PropagatorConfig { steps: Some(steps), ..PropagatorConfig::default() };
    let tau = 7.5;
    let got = Evolver::new(&p, &basis).unwrap().evolve(tau, &psi, &cfg).unwrap();
    let expect = dense_propagate(|s| dense_hamiltonian(&p.evaluate(s)), tau, &DVector::from_column_slice(psi.amplitudes()), steps);
    let err = got.amplitudes().iter().zip(expect.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(err < 1e-9, "{err}");
}

#[test]
fn join_fidelity_matches_fine_dense_integration() {
    let p = join_protocol(3, 1.0, 0.0).unwrap();
    let sector = default_sector(&p);
    let states = popcount_states(3, |b| b.count_ones() == 1);
    let h0 = block(&dense_hamiltonian(&p.evaluate(0.0)), &states);
    let h1 = block(&dense_hamiltonian(&p.evaluate(1.0)), &states);
    let (_, v0) = eigen_sorted(&h0);
    let (_, v1) = eigen_sorted(&h1);
    for tau in [0.0, 2.0, 200.0] {
        let psi0 = v0.column(0).map(|x| c(x, 0.0));
        let out = dense_propagate(|s| block(&dense_hamiltonian(&p.evaluate(s)), &states), tau, &psi0, 8000);
        let f_ref = v1.column(0).map(|x| c(x, 0.0)).dotc(&out).norm();
        let f = fidelity(&p, tau, sector, &AnnealConfig::default()).unwrap();
        assert!((f - f_ref).abs() < 1e-6, "tau {tau}: {f} vs {f_ref}");
    }
}

#[test]
fn anisotropic_chain_constructor_matches_reference() {
    let model = chain_with(4, Coupling::xyz(0.4), Coupling::xxz(0.3, 2.0)).unwrap();
    let h = dense_hamiltonian(&model);
    let basis = Arc::new(enumerate_sector(SectorSpec::full(4)).unwrap());
    let diff = (build_sector_operator(&model, &basis).unwrap().to_dense() - h).abs().max();
    assert!(diff < 1e-12);
}

#[test]
fn reduced_density_matches_partial_trace() {
    let n = 4;
    let basis = Arc::new(enumerate_sector(SectorSpec::full(n)).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let raw: Vec<C> = (0..basis.dim()).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let mut psi = StateVector::new(basis, raw).unwrap();
    psi.normalize();
    let dense = DVector::from_column_slice(psi.amplitudes());
    for site in 1..=n {
        let a = psi.reduced_density(site);
        let b = reduced_density(n, &dense, site);
        for r in 0..2 {
            for k in 0..2 {
                assert!((a[r][k] - b[r][k]).norm() < 1e-14);
            }
        }
    }
}
