use std::sync::Arc;

use num_complex::Complex64;

use crate::basis::{enumerate_sector, BasisState, SectorBasis, SectorSpec};
use crate::error::{Error, Result};

/// Complex amplitudes over a sector basis.
#[derive(Debug, Clone)]
pub struct StateVector {
    basis: Arc<SectorBasis>,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(basis: Arc<SectorBasis>, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != basis.dim() {
            return Err(Error::DimensionMismatch { expected: basis.dim(), got: amps.len() });
        }
        Ok(StateVector { basis, amps })
    }

    pub fn from_real(basis: Arc<SectorBasis>, values: &[f64]) -> Result<Self> {
        Self::new(basis, values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            self.amps.iter_mut().for_each(|a| *a /= n);
        }
    }

    pub fn scale(&mut self, factor: Complex64) {
        self.amps.iter_mut().for_each(|a| *a *= factor);
    }

    /// `<self|other>`; both vectors must share a basis.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.basis.spec() != other.basis.spec() {
            return Err(Error::InvalidArgument(format!(
                "inner product across bases {} and {}",
                self.basis.spec(),
                other.basis.spec()
            )));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Re-express the state in the full 2^N basis.
    pub fn to_full(&self) -> StateVector {
        let n = self.basis.n_spins();
        let full = Arc::new(enumerate_sector(SectorSpec::full(n)).expect("valid chain length"));
        let mut amps = vec![Complex64::new(0.0, 0.0); full.dim()];
        for (s, a) in self.basis.states().iter().zip(&self.amps) {
            amps[s.0 as usize] = *a;
        }
        StateVector { basis: full, amps }
    }

    /// Reduced density matrix of one site, rows/columns ordered `[up, down]`.
    pub fn reduced_density(&self, site: usize) -> [[Complex64; 2]; 2] {
        let mask = 1u32 << (site - 1);
        let zero = Complex64::new(0.0, 0.0);
        let (mut uu, mut dd, mut ud) = (0.0, 0.0, zero);
        for (s, a) in self.basis.states().iter().zip(&self.amps) {
            if s.0 & mask != 0 {
                uu += a.norm_sqr();
            } else {
                dd += a.norm_sqr();
                if let Some(j) = self.basis.lookup(BasisState(s.0 | mask)) {
                    ud += self.amps[j] * a.conj();
                }
            }
        }
        [[Complex64::new(uu, 0.0), ud], [ud.conj(), Complex64::new(dd, 0.0)]]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::Parity;

    #[test]
    fn reduced_density_of_plus_state() {
        let basis = Arc::new(enumerate_sector(SectorSpec::full(2)).unwrap());
        let h = 0.5;
        // |+>|+> over bitmasks 0..4
        let v = StateVector::from_real(basis, &[h, h, h, h]).unwrap();
        let rho = v.reduced_density(1);
        assert!((rho[0][1].re - 0.5).abs() < 1e-15);
        assert!((rho[0][0].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sector_states_have_no_site_coherence() {
        let basis = Arc::new(enumerate_sector(SectorSpec::parity(3, Parity::Odd)).unwrap());
        let v = StateVector::from_real(basis, &[0.5; 4]).unwrap();
        let rho = v.reduced_density(2);
        assert_eq!(rho[0][1], Complex64::new(0.0, 0.0));
        let full = v.to_full();
        assert_eq!(full.amplitudes().len(), 8);
        assert!((full.norm() - 1.0).abs() < 1e-15);
    }
}
