use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid: {0}")]
    Grid(String),
    #[error("space tag mismatch: expected {expected}, got {got}")]
    SpaceTag { expected: &'static str, got: &'static str },
    #[error("parameter out of range: {0}")]
    Params(String),
    #[error("non-finite samples encountered in {0}")]
    NonFinite(&'static str),
    #[error("zero field not admissible for {0}")]
    ZeroField(&'static str),
    #[error("no nontrivial solution for p >= 2(s+1)/(1-s) with alpha > 0 (s={s}, p={p})")]
    NoSolutionRange { s: f64, p: f64 },
    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),
    #[error("solver failed to converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("failed to bracket the Pohozaev projection in [{lo:.1e}, {hi:.1e}] (resolution loss under extreme scaling)")]
    BracketFailure { lo: f64, hi: f64 },
    #[error("scaling pushed significant energy outside the resolved band (relative mass change {mass_change:.3e})")]
    ResolutionLoss { mass_change: f64 },
    #[error("quadrature failed to converge: {0}")]
    Quadrature(String),
    #[error("quadratic form indefinite: lattice minimum {min:.6e} <= 0 for omega={omega}")]
    QuadraticFormIndefinite { min: f64, omega: f64 },
    #[error("numerical blow-up (NaN/overflow) detected at t={t}")]
    NumericalBlowup { t: f64 },
    #[error("cutoff: {0}")]
    Cutoff(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, Error>;
