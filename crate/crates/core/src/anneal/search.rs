use serde::{Deserialize, Serialize};

use super::fidelity::AnnealProblem;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub target: f64,
    /// First grid point.
    pub tau0: f64,
    /// Ratio between successive grid points.
    pub growth: f64,
    pub tau_cap: f64,
    /// Bisection stops once `(hi - lo) / hi` is below this.
    pub rel_width: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { target: 0.9, tau0: 1.0, growth: std::f64::consts::SQRT_2, tau_cap: 1e5, rel_width: 0.05 }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.target > 0.0
            && self.target < 1.0
            && self.tau0 > 0.0
            && self.growth > 1.0
            && self.tau_cap > 0.0
            && self.rel_width > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid search settings {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "status")]
pub enum SearchStatus {
    Reached,
    NotReached { cap: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnealTimeResult {
    pub tau_star: Option<f64>,
    pub fidelity_at_tau_star: Option<f64>,
    pub status: SearchStatus,
    /// Every `(tau, F)` evaluated, in evaluation order.
    pub trace: Vec<(f64, f64)>,
}

impl AnnealTimeResult {
    pub fn reached(&self) -> bool {
        self.status == SearchStatus::Reached
    }
}

/// First crossing of `F >= target` on the grid `tau0 * growth^m`, refined by
/// bisection against the previous grid point. `F` need not be monotonic, so
/// the result is the refined first crossing rather than a global minimum.
pub fn find_anneal_time(problem: &AnnealProblem, search: &SearchConfig) -> Result<AnnealTimeResult> {
    search.validate()?;
    let mut trace = Vec::new();
    let mut eval = |tau: f64| -> Result<f64> {
        let f = problem.fidelity(tau)?;
        trace.push((tau, f));
        Ok(f)
    };

    let f0 = eval(0.0)?;
    if f0 >= search.target {
        return Ok(AnnealTimeResult {
            tau_star: Some(0.0),
            fidelity_at_tau_star: Some(f0),
            status: SearchStatus::Reached,
            trace,
        });
    }

    let mut lo = 0.0;
    let mut tau = search.tau0;
    let bracket = loop {
        if tau > search.tau_cap {
            break None;
        }
        let f = eval(tau)?;
        if f >= search.target {
            break Some((tau, f));
        }
        lo = tau;
        tau *= search.growth;
    };
    let Some((mut hi, mut f_hi)) = bracket else {
        return Ok(AnnealTimeResult {
            tau_star: None,
            fidelity_at_tau_star: None,
            status: SearchStatus::NotReached { cap: search.tau_cap },
            trace,
        });
    };

    while (hi - lo) / hi > search.rel_width {
        let mid = 0.5 * (lo + hi);
        let f = eval(mid)?;
        if f >= search.target {
            hi = mid;
            f_hi = f;
        } else {
            lo = mid;
        }
    }
    Ok(AnnealTimeResult { tau_star: Some(hi), fidelity_at_tau_star: Some(f_hi), status: SearchStatus::Reached, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anneal::AnnealConfig;
    use crate::basis::SectorSpec;
    use crate::model::{j1j2_chain, join_protocol, ProtocolSpec};

    #[test]
    fn three_site_join_reaches_target() {
        let p = join_protocol(3, 1.0, 0.0).unwrap();
        let prob = AnnealProblem::new(&p, SectorSpec::magnetization(3, 1), &AnnealConfig::default()).unwrap();
        let r = find_anneal_time(&prob, &SearchConfig::default()).unwrap();
        assert!(r.reached());
        let tau = r.tau_star.unwrap();
        assert!(tau > 0.0 && tau.is_finite());
        assert!(r.fidelity_at_tau_star.unwrap() >= 0.9);
        assert!((prob.fidelity(tau).unwrap() - r.fidelity_at_tau_star.unwrap()).abs() < 1e-12);
    }

    #[test]
    fn stationary_protocol_needs_no_time() {
        let p = ProtocolSpec::stationary(&j1j2_chain(4, 1.0, 0.2).unwrap());
        // connected start: the sector ground state is already the target
        let prob = AnnealProblem::new(&p, SectorSpec::magnetization(4, 2), &AnnealConfig::default()).unwrap();
        let r = find_anneal_time(&prob, &SearchConfig::default()).unwrap();
        assert_eq!(r.tau_star, Some(0.0));
    }

    #[test]
    fn cap_gives_not_reached() {
        let p = join_protocol(9, 1.0, 0.7).unwrap();
        let prob = AnnealProblem::new(&p, SectorSpec::magnetization(9, 4), &AnnealConfig::default()).unwrap();
        let search = SearchConfig { tau_cap: 3.0, ..SearchConfig::default() };
        let r = find_anneal_time(&prob, &search).unwrap();
        assert_eq!(r.status, SearchStatus::NotReached { cap: 3.0 });
        assert!(r.tau_star.is_none());
        assert!(r.trace.iter().all(|&(t, f)| t <= 3.0 && f < 0.9));
    }
}
