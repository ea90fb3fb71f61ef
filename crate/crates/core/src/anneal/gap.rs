use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::prepare::default_sector;
use crate::basis::{enumerate_sector, Parity, SectorSpec};
use crate::error::{Error, Result};
use crate::model::ProtocolSpec;
use crate::solver::{build_sector_operator, lowest_eigenpairs, sector_gap, EigenConfig};

/// Sector gaps on an `(s, parameter)` grid; `gaps[row][col]` belongs to
/// `s_values[row]` and `parameter_values[col]`. Cells whose eigensolve did
/// not converge are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapGrid {
    pub s_values: Vec<f64>,
    pub parameter_values: Vec<f64>,
    pub gaps: Vec<Vec<Option<f64>>>,
    pub sector: Option<SectorSpec>,
}

/// Gap of `H(s)` in `sector` (the protocol's default sector when `None`).
pub fn gap_cell(p: &ProtocolSpec, s: f64, sector: Option<SectorSpec>, cfg: &EigenConfig) -> Result<f64> {
    let spec = sector.unwrap_or_else(|| default_sector(p));
    sector_gap(&p.evaluate(s), spec, cfg)
}

/// Rebuild the protocol for each parameter and record the gap at each `s`.
pub fn gap_scan<F>(build: F, s_grid: &[f64], params: &[f64], sector: Option<SectorSpec>, cfg: &EigenConfig) -> Result<GapGrid>
where
    F: Fn(f64) -> Result<ProtocolSpec>,
{
    if s_grid.is_empty() || params.is_empty() {
        return Err(Error::InvalidArgument("gap scan needs nonempty grids".into()));
    }
    let protocols = params.iter().map(|&x| build(x)).collect::<Result<Vec<_>>>()?;
    let mut gaps = Vec::with_capacity(s_grid.len());
    for &s in s_grid {
        let mut row = Vec::with_capacity(params.len());
        for p in &protocols {
            match gap_cell(p, s, sector, cfg) {
                Ok(g) => row.push(Some(g)),
                Err(Error::NoConvergence(_)) => row.push(None),
                Err(e) => return Err(e),
            }
        }
        gaps.push(row);
    }
    Ok(GapGrid { s_values: s_grid.to_vec(), parameter_values: params.to_vec(), gaps, sector })
}

/// The two sectors holding the twofold ground manifold of an odd chain.
pub fn ground_manifold_sectors(p: &ProtocolSpec) -> Result<(SectorSpec, SectorSpec)> {
    let n = p.n_spins;
    if n.is_multiple_of(2) {
        return Err(Error::OddLengthRequired(n));
    }
    if p.conserves_magnetization() {
        Ok((SectorSpec::magnetization(n, n / 2), SectorSpec::magnetization(n, n / 2 + 1)))
    } else {
        Ok((SectorSpec::parity(n, Parity::Even), SectorSpec::parity(n, Parity::Odd)))
    }
}

/// Largest `|E0(a) - E0(b)|` over `s_grid` between the two ground-manifold
/// sectors; zero means no relative phase builds up between them.
pub fn ground_manifold_tracking(p: &ProtocolSpec, s_grid: &[f64], cfg: &EigenConfig) -> Result<f64> {
    let (a, b) = ground_manifold_sectors(p)?;
    let basis_a = Arc::new(enumerate_sector(a)?);
    let basis_b = Arc::new(enumerate_sector(b)?);
    let mut split = 0.0f64;
    for &s in s_grid {
        let model = p.evaluate(s);
        let ea = lowest_eigenpairs(&build_sector_operator(&model, &basis_a)?, 1, cfg)?.eigenvalues[0];
        let eb = lowest_eigenpairs(&build_sector_operator(&model, &basis_b)?, 1, cfg)?.eigenvalues[0];
        split = split.max((ea - eb).abs());
    }
    Ok(split)
}
