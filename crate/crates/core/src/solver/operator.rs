use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::basis::{BasisState, SectorBasis, SectorKind};
use crate::error::{Error, Result};
use crate::model::{ChainModel, ProtocolSpec};

/// Real symmetric Hamiltonian restricted to one sector. The diagonal is
/// stored densely, off-diagonal elements in CSR form with ascending columns.
#[derive(Debug, Clone)]
pub struct SparseOperator {
    basis: Arc<SectorBasis>,
    diag: Vec<f64>,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl SparseOperator {
    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn nnz(&self) -> usize {
        self.diag.len() + self.vals.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn element(&self, row: usize, col: usize) -> f64 {
        if row == col {
            return self.diag[row];
        }
        let range = self.row_ptr[row]..self.row_ptr[row + 1];
        match self.cols[range.clone()].binary_search(&(col as u32)) {
            Ok(k) => self.vals[range.start + k],
            Err(_) => 0.0,
        }
    }

    /// Off-diagonal `(col, value)` pairs of one row.
    pub fn row(&self, row: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[row]..self.row_ptr[row + 1];
        self.cols[range.clone()].iter().map(|&c| c as usize).zip(self.vals[range].iter().copied())
    }

    /// `y = H x`, accumulated row by row in column order.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        self.check_dims(x.len(), y.len())?;
        for r in 0..self.dim() {
            let mut acc = self.diag[r] * x[r];
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k] as usize];
            }
            y[r] = acc;
        }
        Ok(())
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.dim()];
        self.matvec(x, &mut y)?;
        Ok(y)
    }

    pub fn matvec_complex(&self, x: &[Complex64], y: &mut [Complex64]) -> Result<()> {
        self.check_dims(x.len(), y.len())?;
        for r in 0..self.dim() {
            let mut acc = x[r] * self.diag[r];
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += x[self.cols[k] as usize] * self.vals[k];
            }
            y[r] = acc;
        }
        Ok(())
    }

    fn check_dims(&self, x: usize, y: usize) -> Result<()> {
        let n = self.dim();
        if x != n {
            return Err(Error::DimensionMismatch { expected: n, got: x });
        }
        if y != n {
            return Err(Error::DimensionMismatch { expected: n, got: y });
        }
        Ok(())
    }

    /// `<x|H|x>` for a complex state.
    pub fn expectation(&self, x: &[Complex64]) -> Result<f64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.dim()];
        self.matvec_complex(x, &mut y)?;
        Ok(x.iter().zip(&y).map(|(a, b)| (a.conj() * b).re).sum())
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for r in 0..n {
            m[(r, r)] = self.diag[r];
            for (c, v) in self.row(r) {
                m[(r, c)] = v;
            }
        }
        m
    }
}

/// Off-diagonal entries `(col, value)` of one row plus its diagonal.
fn row_entries(model: &ChainModel, basis: &SectorBasis, state: BasisState) -> (f64, Vec<(u32, f64)>) {
    let mut diag = 0.0;
    let mut off: Vec<(u32, f64)> = Vec::new();
    for b in model.bonds() {
        let (bi, bj) = (b.i - 1, b.j - 1);
        let zi = state.0 >> bi & 1;
        let zj = state.0 >> bj & 1;
        let c = &b.coupling;
        let amp = if zi == zj {
            diag += c.jz;
            c.jx - c.jy
        } else {
            diag -= c.jz;
            c.jx + c.jy
        };
        if amp != 0.0 {
            let target = BasisState(state.0 ^ (1 << bi) ^ (1 << bj));
            if let Some(col) = basis.lookup(target) {
                off.push((col as u32, amp));
            }
        }
    }
    off.sort_by_key(|e| e.0);
    off.dedup_by(|later, kept| {
        if later.0 == kept.0 {
            kept.1 += later.1;
            true
        } else {
            false
        }
    });
    off.retain(|e| e.1 != 0.0);
    (diag, off)
}

/// Matrix of `sum_bonds jx σxσx + jy σyσy + jz σzσz` in the sector.
pub fn build_sector_operator(model: &ChainModel, basis: &Arc<SectorBasis>) -> Result<SparseOperator> {
    if model.n_spins() != basis.n_spins() {
        return Err(Error::DimensionMismatch { expected: basis.n_spins(), got: model.n_spins() });
    }
    if let SectorKind::Magnetization(_) = basis.spec().kind {
        if let Some(b) = model.bonds().iter().find(|b| !b.coupling.conserves_magnetization()) {
            return Err(Error::NonConservingSector { i: b.i, j: b.j });
        }
    }
    let n = basis.dim();
    let mut diag = Vec::with_capacity(n);
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    row_ptr.push(0);
    for &s in basis.states() {
        let (d, off) = row_entries(model, basis, s);
        diag.push(d);
        for (c, v) in off {
            cols.push(c);
            vals.push(v);
        }
        row_ptr.push(cols.len());
    }
    Ok(SparseOperator { basis: basis.clone(), diag, row_ptr, cols, vals })
}

/// `H(s) = sum_t c_t(s) H_t` over the terms of a protocol, sharing one
/// sparsity pattern so that `H(s)` is assembled by rescaling.
#[derive(Debug, Clone)]
pub struct OperatorFamily {
    protocol: ProtocolSpec,
    terms: Vec<crate::model::ProtocolTerm>,
    diag_terms: Vec<Vec<f64>>,
    val_terms: Vec<Vec<f64>>,
    pattern: SparseOperator,
}

impl OperatorFamily {
    pub fn new(protocol: &ProtocolSpec, basis: &Arc<SectorBasis>) -> Result<Self> {
        protocol.validate()?;
        let terms = protocol.terms();
        let ops = terms
            .iter()
            .map(|t| build_sector_operator(&ChainModel::new(protocol.n_spins, t.bonds.clone())?, basis))
            .collect::<Result<Vec<_>>>()?;
        if protocol.n_spins != basis.n_spins() {
            return Err(Error::DimensionMismatch { expected: basis.n_spins(), got: protocol.n_spins });
        }

        let n = basis.dim();
        let mut row_ptr = vec![0usize];
        let mut cols: Vec<u32> = Vec::new();
        for r in 0..n {
            let mut row: Vec<u32> = ops.iter().flat_map(|op| op.row(r).map(|(c, _)| c as u32)).collect();
            row.sort_unstable();
            row.dedup();
            cols.extend(row);
            row_ptr.push(cols.len());
        }
        let val_terms = ops
            .iter()
            .map(|op| {
                let mut vals = vec![0.0; cols.len()];
                for r in 0..n {
                    let range = row_ptr[r]..row_ptr[r + 1];
                    for (c, v) in op.row(r) {
                        let k = cols[range.clone()].binary_search(&(c as u32)).expect("union pattern");
                        vals[range.start + k] = v;
                    }
                }
                vals
            })
            .collect();
        let diag_terms = ops.iter().map(|op| op.diag.clone()).collect();
        let nnz = cols.len();
        let pattern = SparseOperator { basis: basis.clone(), diag: vec![0.0; n], row_ptr, cols, vals: vec![0.0; nnz] };
        Ok(OperatorFamily { protocol: protocol.clone(), terms, diag_terms, val_terms, pattern })
    }

    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.pattern.basis
    }

    pub fn protocol(&self) -> &ProtocolSpec {
        &self.protocol
    }

    /// Allocate an operator with this family's pattern.
    pub fn operator(&self, s: f64) -> SparseOperator {
        let mut op = self.pattern.clone();
        self.assemble_into(s, &mut op);
        op
    }

    /// Overwrite `op` (which must come from [`Self::operator`]) with `H(s)`.
    pub fn assemble_into(&self, s: f64, op: &mut SparseOperator) {
        op.diag.iter_mut().for_each(|d| *d = 0.0);
        op.vals.iter_mut().for_each(|v| *v = 0.0);
        for (t, term) in self.terms.iter().enumerate() {
            let c = self.protocol.coefficient(term, s);
            if c == 0.0 {
                continue;
            }
            for (d, x) in op.diag.iter_mut().zip(&self.diag_terms[t]) {
                *d += c * x;
            }
            for (v, x) in op.vals.iter_mut().zip(&self.val_terms[t]) {
                *v += c * x;
            }
        }
    }
}
