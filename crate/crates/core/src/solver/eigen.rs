//! Lowest eigenpairs of sector Hamiltonians.
//!
//! Small sectors are diagonalized densely. Larger ones use Lanczos with full
//! reorthogonalization and explicit restarts, locking one converged pair at
//! a time and deflating it from later runs so that degenerate levels are
//! all found.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::operator::{build_sector_operator, SparseOperator};
use super::tridiag::{sorted_eigen, tridiagonal};
use crate::basis::{enumerate_sector, SectorBasis, SectorSpec};
use crate::error::{Error, Result};
use crate::model::ChainModel;
use crate::state::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EigenConfig {
    /// Residual bound `||H v - E v||` for every returned pair.
    pub tol: f64,
    /// Sectors at or below this dimension are diagonalized densely.
    pub dense_below: usize,
    /// Lanczos basis size before an explicit restart.
    pub krylov_dim: usize,
    /// Cap on matrix-vector products per call.
    pub max_iterations: usize,
    /// Seed of the start vectors.
    pub seed: u64,
}

impl Default for EigenConfig {
    fn default() -> Self {
        EigenConfig { tol: 1e-10, dense_below: 512, krylov_dim: 120, max_iterations: 50_000, seed: 0x5eed }
    }
}

#[derive(Debug, Clone)]
pub struct EigResult {
    basis: Arc<SectorBasis>,
    pub eigenvalues: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
}

impl EigResult {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn vector(&self, k: usize) -> &[f64] {
        &self.vectors[k]
    }

    pub fn state(&self, k: usize) -> StateVector {
        StateVector::from_real(self.basis.clone(), &self.vectors[k]).expect("matching basis")
    }

    /// `E1 - E0`, if at least two levels were computed.
    pub fn gap(&self) -> Option<f64> {
        (self.len() >= 2).then(|| self.eigenvalues[1] - self.eigenvalues[0])
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(y, x)| *y += alpha * x);
}

fn project_out(w: &mut [f64], against: &[Vec<f64>]) {
    for u in against {
        let c = dot(u, w);
        axpy(-c, u, w);
    }
}

/// Flip the sign so the largest-magnitude component is positive.
fn fix_sign(v: &mut [f64]) {
    let mut best = 0.0f64;
    for &x in v.iter() {
        if x.abs() > best.abs() + 1e-12 {
            best = x;
        }
    }
    if best < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn residual(op: &SparseOperator, e: f64, v: &[f64]) -> f64 {
    let hv = op.apply(v).expect("dimension checked");
    hv.iter().zip(v).map(|(h, x)| (h - e * x).powi(2)).sum::<f64>().sqrt()
}

fn dense_lowest(op: &SparseOperator, m: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let (values, vecs) = sorted_eigen(op.to_dense());
    let vectors = (0..m).map(|k| vecs.column(k).iter().copied().collect()).collect();
    (values[..m].to_vec(), vectors)
}

struct LanczosRun<'a> {
    op: &'a SparseOperator,
    cfg: &'a EigenConfig,
    rng: ChaCha8Rng,
    matvecs: usize,
}

impl LanczosRun<'_> {
    fn start_vector(&mut self, locked: &[Vec<f64>]) -> Vec<f64> {
        loop {
            let mut v: Vec<f64> = (0..self.op.dim()).map(|_| self.rng.random::<f64>() - 0.5).collect();
            project_out(&mut v, locked);
            project_out(&mut v, locked);
            let n = norm(&v);
            if n > 1e-8 {
                v.iter_mut().for_each(|x| *x /= n);
                return v;
            }
        }
    }

    /// Lowest eigenpair of the operator on the orthogonal complement of `locked`.
    fn lowest(&mut self, locked: &[Vec<f64>]) -> Result<(f64, Vec<f64>, f64)> {
        let n = self.op.dim();
        let kmax = self.cfg.krylov_dim.min(n - locked.len()).max(1);
        let mut start = self.start_vector(locked);
        let mut w = vec![0.0; n];
        loop {
            let mut basis: Vec<Vec<f64>> = vec![start];
            let mut alpha: Vec<f64> = Vec::with_capacity(kmax);
            let mut beta: Vec<f64> = Vec::with_capacity(kmax);
            let mut scale = 0.0f64;
            let ritz;
            let mut j = 0;
            loop {
                self.op.matvec(&basis[j], &mut w)?;
                self.matvecs += 1;
                let a = dot(&basis[j], &w);
                axpy(-a, &basis[j], &mut w);
                if j > 0 {
                    axpy(-beta[j - 1], &basis[j - 1], &mut w);
                }
                for _ in 0..2 {
                    project_out(&mut w, locked);
                    project_out(&mut w, &basis);
                }
                let b = norm(&w);
                alpha.push(a);
                scale = scale.max(a.abs() + b);
                let exhausted = j + 1 == kmax || b <= 1e-12 * scale.max(1.0);
                if exhausted || (j + 1) % 4 == 0 {
                    let (vals, vecs) = sorted_eigen(tridiagonal(&alpha, &beta));
                    let estimate = b * vecs[(j, 0)].abs();
                    if exhausted || estimate <= 0.1 * self.cfg.tol {
                        ritz = (vals[0], vecs.column(0).iter().copied().collect::<Vec<f64>>());
                        break;
                    }
                }
                beta.push(b);
                basis.push(w.iter().map(|x| x / b).collect());
                j += 1;
            }

            let mut x = vec![0.0; n];
            for (c, v) in ritz.1.iter().zip(&basis) {
                axpy(*c, v, &mut x);
            }
            project_out(&mut x, locked);
            let nx = norm(&x);
            x.iter_mut().for_each(|v| *v /= nx);
            let hx = self.op.apply(&x)?;
            self.matvecs += 1;
            let theta = dot(&x, &hx);
            let res = hx.iter().zip(&x).map(|(h, v)| (h - theta * v).powi(2)).sum::<f64>().sqrt();
            if res <= self.cfg.tol {
                return Ok((theta, x, res));
            }
            if self.matvecs >= self.cfg.max_iterations {
                return Err(Error::NoConvergence(self.matvecs));
            }
            start = x;
        }
    }
}

/// The `m` algebraically smallest eigenpairs, ascending.
pub fn lowest_eigenpairs(op: &SparseOperator, m: usize, cfg: &EigenConfig) -> Result<EigResult> {
    let dim = op.dim();
    if m == 0 || m > dim {
        return Err(Error::InvalidArgument(format!("requested {m} eigenpairs of a {dim}-dimensional sector")));
    }
    if !(cfg.tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {} must be positive", cfg.tol)));
    }
    let (values, mut vectors) = if dim <= cfg.dense_below {
        dense_lowest(op, m)
    } else {
        let mut run = LanczosRun { op, cfg, rng: ChaCha8Rng::seed_from_u64(cfg.seed), matvecs: 0 };
        let mut pairs: Vec<(f64, Vec<f64>)> = Vec::with_capacity(m);
        let mut locked: Vec<Vec<f64>> = Vec::with_capacity(m);
        for _ in 0..m {
            let (e, v, _) = run.lowest(&locked)?;
            locked.push(v.clone());
            pairs.push((e, v));
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs.into_iter().unzip()
    };
    vectors.iter_mut().for_each(|v| fix_sign(v));
    let residuals = values.iter().zip(&vectors).map(|(&e, v)| residual(op, e, v)).collect();
    Ok(EigResult { basis: op.basis().clone(), eigenvalues: values, vectors, residuals })
}

/// All eigenpairs within `threshold` of the lowest eigenvalue.
pub fn ground_space(op: &SparseOperator, threshold: f64, cfg: &EigenConfig) -> Result<EigResult> {
    let dim = op.dim();
    let mut m = dim.min(2);
    loop {
        let mut res = lowest_eigenpairs(op, m, cfg)?;
        let e0 = res.eigenvalues[0];
        let keep = res.eigenvalues.iter().take_while(|&&e| e - e0 <= threshold).count();
        if keep < m || m == dim {
            res.eigenvalues.truncate(keep);
            res.vectors.truncate(keep);
            res.residuals.truncate(keep);
            return Ok(res);
        }
        m = (2 * m).min(dim);
    }
}

/// `E1 - E0` of `model` inside one sector.
pub fn sector_gap(model: &ChainModel, sector: SectorSpec, cfg: &EigenConfig) -> Result<f64> {
    let basis = Arc::new(enumerate_sector(sector)?);
    if basis.dim() < 2 {
        return Err(Error::InvalidArgument(format!("sector {sector} has dimension {}", basis.dim())));
    }
    let op = build_sector_operator(model, &basis)?;
    let res = lowest_eigenpairs(&op, 2, cfg)?;
    Ok(res.eigenvalues[1] - res.eigenvalues[0])
}
