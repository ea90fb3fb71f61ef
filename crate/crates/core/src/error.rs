use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid sector: {0}")]
    InvalidSector(String),
    #[error("basis state {0:#b} is not in the sector")]
    NotInSector(u32),
    #[error("product state has a component {0:#b} outside the target sector")]
    SectorMismatch(u32),
    #[error("invalid chain size: {0}")]
    InvalidSize(String),
    #[error("invalid bond: {0}")]
    InvalidBond(String),
    #[error("bond ({i},{j}) has jx != jy and does not conserve magnetization")]
    NonConservingSector { i: usize, j: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),
    #[error("norm drift {0:e} exceeds the unitarity bound")]
    NormDrift(f64),
    #[error("initial ground state is degenerate within the sector (gap {0:e})")]
    AmbiguousInitial(f64),
    #[error("initial Hamiltonian does not split into one connected chain plus one free site: {0}")]
    Disconnected(String),
    #[error("an odd number of spins is required, got {0}")]
    OddLengthRequired(usize),
    #[error("an even number of spins is required, got {0}")]
    OddLength(usize),
    #[error("input site {0} is coupled at s = 0")]
    InputSiteCoupled(usize),
    #[error("invalid Bloch vector: {0}")]
    InvalidBloch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Short kebab-case name of the variant, used as a status label.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidSector(_) => "invalid-sector",
            Error::NotInSector(_) => "not-in-sector",
            Error::SectorMismatch(_) => "sector-mismatch",
            Error::InvalidSize(_) => "invalid-size",
            Error::InvalidBond(_) => "invalid-bond",
            Error::NonConservingSector { .. } => "non-conserving-sector",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::NoConvergence(_) => "no-convergence",
            Error::NormDrift(_) => "norm-drift",
            Error::AmbiguousInitial(_) => "ambiguous-initial",
            Error::Disconnected(_) => "disconnected",
            Error::OddLengthRequired(_) => "odd-length-required",
            Error::OddLength(_) => "odd-length",
            Error::InputSiteCoupled(_) => "input-site-coupled",
            Error::InvalidBloch(_) => "invalid-bloch",
            Error::InvalidArgument(_) => "invalid-argument",
        }
    }
}
