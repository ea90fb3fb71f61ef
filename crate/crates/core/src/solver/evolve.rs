//! Time evolution under a protocol with midpoint (second-order Magnus)
//! steps, each exponential applied through a Krylov subspace.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::operator::{OperatorFamily, SparseOperator};
use super::tridiag::{sorted_eigen, tridiagonal};
use crate::error::{Error, Result};
use crate::model::ProtocolSpec;
use crate::state::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PropagatorConfig {
    /// Target step size (1/J1 units).
    pub dt: f64,
    /// Lower bound on the number of midpoint steps.
    pub min_steps: usize,
    /// Fixed step count; overrides `dt` and `min_steps`.
    pub steps: Option<usize>,
    /// Largest Krylov subspace per exponential before sub-stepping.
    pub krylov_dim: usize,
    /// Per-exponential error bound.
    pub step_tol: f64,
    /// Successive-result infidelity at which refinement stops.
    pub refine_tol: f64,
    /// Number of step doublings refinement may try.
    pub max_doublings: usize,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        PropagatorConfig {
            dt: 0.05,
            min_steps: 200,
            steps: None,
            krylov_dim: 30,
            step_tol: 1e-12,
            refine_tol: 1e-8,
            max_doublings: 8,
        }
    }
}

impl PropagatorConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.dt > 0.0
            && self.min_steps > 0
            && self.steps.is_none_or(|s| s > 0)
            && self.krylov_dim > 0
            && self.step_tol > 0.0
            && self.refine_tol > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("propagator settings must be positive: {self:?}")))
        }
    }

    pub fn step_count(&self, tau: f64) -> usize {
        self.steps.unwrap_or_else(|| ((tau / self.dt).ceil() as usize).max(self.min_steps))
    }
}

/// Unitarity loss above which evolution is reported as failed.
pub const NORM_DRIFT_LIMIT: f64 = 1e-6;

const MAX_SPLIT_DEPTH: u32 = 24;

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// `exp(-i H dt) v` when the Krylov estimate converges within the
/// configured subspace size; `None` otherwise.
fn krylov_exp(op: &SparseOperator, v: &[Complex64], dt: f64, kmax: usize, tol: f64) -> Result<Option<Vec<Complex64>>> {
    let n = v.len();
    let beta0 = norm(v);
    if beta0 == 0.0 || dt == 0.0 {
        return Ok(Some(v.to_vec()));
    }
    let kmax = kmax.min(n);
    let mut basis: Vec<Vec<Complex64>> = vec![v.iter().map(|x| x / beta0).collect()];
    let mut alpha: Vec<f64> = Vec::with_capacity(kmax);
    let mut beta: Vec<f64> = Vec::with_capacity(kmax);
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    let mut scale = 0.0f64;
    let mut factorial_bound = 1.0f64;
    for j in 0..kmax {
        op.matvec_complex(&basis[j], &mut w)?;
        let a = inner(&basis[j], &w).re;
        for (wi, vi) in w.iter_mut().zip(&basis[j]) {
            *wi -= vi * a;
        }
        if j > 0 {
            let bp = beta[j - 1];
            for (wi, vi) in w.iter_mut().zip(&basis[j - 1]) {
                *wi -= vi * bp;
            }
        }
        for u in &basis {
            let c = inner(u, &w);
            for (wi, ui) in w.iter_mut().zip(u) {
                *wi -= ui * c;
            }
        }
        let b = norm(&w);
        alpha.push(a);
        scale = scale.max(a.abs() + b + beta.last().copied().unwrap_or(0.0));
        let m = j + 1;
        let invariant = b <= 1e-13 * scale.max(1.0);
        // Taylor-type bound (|H| dt)^m / m! decides when the a posteriori check is worth doing.
        factorial_bound *= scale * dt.abs() / m as f64;
        if invariant || factorial_bound < 1e3 * tol || m == kmax {
            let (vals, vecs) = sorted_eigen(tridiagonal(&alpha, &beta));
            // y = Q exp(-i Λ dt) Q^T e1
            let phases: Vec<Complex64> = vals.iter().map(|&e| Complex64::from_polar(1.0, -e * dt)).collect();
            let y: Vec<Complex64> = (0..m)
                .map(|r| (0..m).map(|k| phases[k] * (vecs[(r, k)] * vecs[(0, k)])).sum())
                .collect();
            let err = if invariant { 0.0 } else { b * y[m - 1].norm() };
            if err <= tol {
                let mut out = vec![Complex64::new(0.0, 0.0); n];
                for (c, u) in y.iter().zip(&basis) {
                    let c = c * beta0;
                    for (o, ui) in out.iter_mut().zip(u) {
                        *o += ui * c;
                    }
                }
                return Ok(Some(out));
            }
            if m == kmax {
                return Ok(None);
            }
        }
        beta.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }
    Ok(None)
}

/// `exp(-i H dt) v`, halving the interval until each piece converges.
pub fn apply_exponential(op: &SparseOperator, v: &[Complex64], dt: f64, cfg: &PropagatorConfig) -> Result<Vec<Complex64>> {
    fn go(op: &SparseOperator, v: &[Complex64], dt: f64, cfg: &PropagatorConfig, depth: u32) -> Result<Vec<Complex64>> {
        if let Some(out) = krylov_exp(op, v, dt, cfg.krylov_dim, cfg.step_tol)? {
            return Ok(out);
        }
        if depth >= MAX_SPLIT_DEPTH {
            return Err(Error::NoConvergence(cfg.krylov_dim));
        }
        let half = go(op, v, dt / 2.0, cfg, depth + 1)?;
        go(op, &half, dt / 2.0, cfg, depth + 1)
    }
    go(op, v, dt, cfg, 0)
}

/// Reusable propagator for one protocol in one sector.
#[derive(Debug, Clone)]
pub struct Evolver {
    family: OperatorFamily,
}

impl Evolver {
    pub fn new(protocol: &ProtocolSpec, basis: &std::sync::Arc<crate::basis::SectorBasis>) -> Result<Self> {
        Ok(Evolver { family: OperatorFamily::new(protocol, basis)? })
    }

    pub fn family(&self) -> &OperatorFamily {
        &self.family
    }

    pub fn evolve(&self, tau: f64, psi0: &StateVector, cfg: &PropagatorConfig) -> Result<StateVector> {
        self.evolve_steps(tau, psi0, cfg.step_count(tau), cfg)
    }

    /// `n_steps` midpoint steps over `[0, tau]`.
    pub fn evolve_steps(&self, tau: f64, psi0: &StateVector, n_steps: usize, cfg: &PropagatorConfig) -> Result<StateVector> {
        cfg.validate()?;
        if !(tau >= 0.0) {
            return Err(Error::InvalidArgument(format!("annealing time {tau} must be nonnegative")));
        }
        if psi0.basis().spec() != self.family.basis().spec() {
            return Err(Error::InvalidArgument(format!(
                "state lives in {}, propagator in {}",
                psi0.basis().spec(),
                self.family.basis().spec()
            )));
        }
        if tau == 0.0 || n_steps == 0 {
            return Ok(psi0.clone());
        }
        let norm0 = psi0.norm();
        let dt = tau / n_steps as f64;
        let mut op = self.family.operator(0.0);
        let mut amps = psi0.amplitudes().to_vec();
        for k in 0..n_steps {
            let s = (k as f64 + 0.5) / n_steps as f64;
            self.family.assemble_into(s, &mut op);
            amps = apply_exponential(&op, &amps, dt, cfg)?;
        }
        let mut out = StateVector::new(psi0.basis().clone(), amps)?;
        let drift = (out.norm() - norm0).abs();
        if drift > NORM_DRIFT_LIMIT {
            return Err(Error::NormDrift(drift));
        }
        out.normalize();
        Ok(out)
    }

    /// Evolve with `n` and `2n` steps, doubling until successive results
    /// agree to `1 - refine_tol` in fidelity; returns the finer result.
    pub fn refine(&self, tau: f64, psi0: &StateVector, cfg: &PropagatorConfig) -> Result<StateVector> {
        let mut n = cfg.step_count(tau);
        let mut coarse = self.evolve_steps(tau, psi0, n, cfg)?;
        for _ in 0..cfg.max_doublings {
            n *= 2;
            let fine = self.evolve_steps(tau, psi0, n, cfg)?;
            let f = coarse.inner(&fine)?.norm();
            if f >= 1.0 - cfg.refine_tol {
                return Ok(fine);
            }
            coarse = fine;
        }
        Err(Error::NoConvergence(cfg.max_doublings))
    }
}

/// `psi(tau)` for `psi0` under `protocol`, in the sector of `psi0`.
pub fn evolve(protocol: &ProtocolSpec, tau: f64, psi0: &StateVector, cfg: &PropagatorConfig) -> Result<StateVector> {
    Evolver::new(protocol, psi0.basis())?.evolve(tau, psi0, cfg)
}

pub fn convergence_refine(protocol: &ProtocolSpec, tau: f64, psi0: &StateVector, cfg: &PropagatorConfig) -> Result<StateVector> {
    Evolver::new(protocol, psi0.basis())?.refine(tau, psi0, cfg)
}
