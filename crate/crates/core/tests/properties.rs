use std::collections::HashSet;
use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;

use adiabus::anneal::{default_sector, fidelity, AnnealConfig, TransportConfig, TransportSetup};
use adiabus::basis::{binomial, enumerate_sector, BasisState, Parity, SectorSpec};
use adiabus::model::{
    dynamic_j2_protocol, join_protocol, reverse_protocol, simultaneous_protocol, BlochVector, Coupling, ProtocolSpec,
};
use adiabus::solver::{build_sector_operator, Evolver, PropagatorConfig};
use adiabus::state::StateVector;

fn protocol(kind: u8, n: usize, j2: f64) -> ProtocolSpec {
    match kind % 3 {
        0 => join_protocol(n, 1.0, j2).unwrap(),
        1 => dynamic_j2_protocol(n, 1.0, j2).unwrap(),
        _ => simultaneous_protocol(n, 1.0, j2).unwrap(),
    }
}

fn same_model(a: &adiabus::model::ChainModel, b: &adiabus::model::ChainModel) -> bool {
    a.bonds().len() == b.bonds().len()
        && a.bonds().iter().zip(b.bonds()).all(|(x, y)| {
            let c = (x.coupling.jx - y.coupling.jx).abs() + (x.coupling.jy - y.coupling.jy).abs() + (x.coupling.jz - y.coupling.jz).abs();
            (x.i, x.j) == (y.i, y.j) && c < 1e-12
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn magnetization_sectors_partition_the_full_space(n in 1usize..=12) {
        let mut seen = HashSet::new();
        let mut total = 0;
        for k in 0..=n {
            let b = enumerate_sector(SectorSpec::magnetization(n, k)).unwrap();
            prop_assert_eq!(b.dim(), binomial(n, k));
            total += b.dim();
            for s in b.states() {
                prop_assert!(seen.insert(s.bits()));
            }
        }
        prop_assert_eq!(total, 1usize << n);
        let even = enumerate_sector(SectorSpec::parity(n, Parity::Even)).unwrap().dim();
        let odd = enumerate_sector(SectorSpec::parity(n, Parity::Odd)).unwrap().dim();
        prop_assert_eq!(even + odd, 1usize << n);
    }

    #[test]
    fn lookup_inverts_enumeration(n in 1usize..=14, k_frac in 0.0f64..=1.0, probe in any::<u32>()) {
        let k = (k_frac * n as f64).round() as usize;
        let b = enumerate_sector(SectorSpec::magnetization(n, k)).unwrap();
        for (i, s) in b.states().iter().enumerate() {
            prop_assert_eq!(b.lookup(*s), Some(i));
        }
        prop_assert!(b.states().windows(2).all(|w| w[0].bits() < w[1].bits()));
        let probe = BasisState(probe & ((1u32 << n) - 1));
        prop_assert_eq!(b.lookup(probe).is_some(), probe.up_count() as usize == k);
    }

    #[test]
    fn schedules_hit_endpoints_and_reverse_exactly(kind in 0u8..3, n in 5usize..=9, j2 in 0.0f64..1.0, s in 0.0f64..=1.0) {
        let p = protocol(kind, n, j2);
        let r = reverse_protocol(&p);
        prop_assert!(same_model(&r.evaluate(s), &p.evaluate(1.0 - s)));
        prop_assert!(same_model(&reverse_protocol(&r).evaluate(s), &p.evaluate(s)));
        // affine in s except for the dynamic joining bond, which carries the
        // product of two ramps
        prop_assume!(kind % 3 != 1);
        let (a, b) = (p.evaluate(0.0), p.evaluate(1.0));
        let mid = p.evaluate(0.5);
        for bond in mid.bonds() {
            let ends = |m: &adiabus::model::ChainModel| m.bond(bond.i, bond.j).map_or(0.0, |x| x.coupling.jz);
            prop_assert!(((ends(&a) + ends(&b)) / 2.0 - bond.coupling.jz).abs() < 1e-12);
        }
    }

    #[test]
    fn xyz_couplings_are_normalized(delta in -3.0f64..3.0) {
        let c = Coupling::xyz(delta);
        prop_assert!((c.jx * c.jx + c.jy * c.jy + c.jz * c.jz - 3.0).abs() < 1e-12);
        prop_assert!((c.jy / c.jx - (1.0 + delta)).abs() < 1e-9);
    }

    #[test]
    fn sector_operators_are_symmetric(kind in 0u8..3, n in 5usize..=8, j2 in -0.5f64..1.0, s in 0.0f64..=1.0) {
        let p = protocol(kind, n, j2);
        let basis = Arc::new(enumerate_sector(default_sector(&p)).unwrap());
        let h = build_sector_operator(&p.evaluate(s), &basis).unwrap().to_dense();
        prop_assert!((&h - h.transpose()).abs().max() < 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn evolution_keeps_norm_and_fidelity_is_bounded(kind in 0u8..3, j2 in 0.0f64..0.8, tau in 0.0f64..30.0) {
        let p = protocol(kind, 5, j2);
        let sector = default_sector(&p);
        let f = fidelity(&p, tau, sector, &AnnealConfig::default()).unwrap();
        prop_assert!((0.0..=1.0 + 1e-9).contains(&f));

        let basis = Arc::new(enumerate_sector(SectorSpec::full(5)).unwrap());
        let amps: Vec<Complex64> = (0..basis.dim()).map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.7).cos())).collect();
        let mut psi = StateVector::new(basis.clone(), amps).unwrap();
        psi.normalize();
        let out = Evolver::new(&p, &basis).unwrap().evolve(tau, &psi, &PropagatorConfig::default()).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn transport_ignores_global_phase(phase in 0.0f64..std::f64::consts::TAU, x in -1.0f64..1.0, z_sign in any::<bool>()) {
        let p = simultaneous_protocol(5, 1.0, 0.2).unwrap();
        let setup = TransportSetup::new(&p, &TransportConfig::default()).unwrap();
        let z = (1.0 - x * x).sqrt() * if z_sign { 1.0 } else { -1.0 };
        let b = BlochVector::new(x, 0.0, z).unwrap();
        let psi = setup.initial_state(&b).unwrap();
        let mut rotated = psi.clone();
        rotated.scale(Complex64::from_polar(1.0, phase));
        let a = setup.run_state(&psi, &b, 15.0).unwrap();
        let r = setup.run_state(&rotated, &b, 15.0).unwrap();
        prop_assert!((a.qubit_fidelity - r.qubit_fidelity).abs() < 1e-12);
        prop_assert!(a.qubit_fidelity <= 1.0 + 1e-9 && a.qubit_fidelity >= 0.0);
    }
}
