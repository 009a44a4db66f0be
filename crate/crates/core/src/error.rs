use thiserror::Error;

/// Errors produced by the evaluation, diagonal, mean-square and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter {name} must be > 0 (got {value})")]
    NonPositiveParameter { name: &'static str, value: String },

    #[error("invalid irrational scale: {0}")]
    InvalidScale(String),

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("sigma = {sigma} is outside the region required by {operation} ({requirement})")]
    RegionError {
        operation: &'static str,
        sigma: f64,
        requirement: &'static str,
    },

    #[error("budget exceeded in {operation}: needed {needed}, cap {cap}")]
    BudgetExceeded {
        operation: &'static str,
        needed: f64,
        cap: f64,
    },

    #[error("s = {sigma}{t:+}i lies within {radius} of a pole")]
    PoleProximity { sigma: f64, t: f64, radius: f64 },

    #[error("|t| = {t} exceeds the admissible height {limit}")]
    HeightViolation { t: f64, limit: f64 },

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("quadrature failed on [{a}, {b}]: estimated error {estimate:e} above target {target:e}")]
    QuadratureFailure {
        a: f64,
        b: f64,
        estimate: f64,
        target: f64,
    },

    #[error("empty summation range ({a}, {b}]")]
    EmptyRange { a: u64, b: u64 },

    #[error("cutoff {cutoff} is below alpha = {alpha}")]
    CutoffTooSmall { cutoff: f64, alpha: f64 },

    #[error("insufficient signal: {usable} usable points, need at least {required}")]
    InsufficientSignal { usable: usize, required: usize },

    #[error("exact lattice arithmetic overflowed: {0}")]
    RationalOverflow(String),

    #[error("lattice values collide for declared irrational ratio near lambda = {lambda}")]
    IrrationalCollision { lambda: f64 },

    #[error("table was built for sigma = {table} but evaluated at sigma = {requested}")]
    SigmaMismatch { table: f64, requested: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonPositiveParameter { .. } => "NonPositiveParameter",
            Error::InvalidScale(_) => "InvalidScale",
            Error::NonFinite(_) => "NonFinite",
            Error::RegionError { .. } => "RegionError",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::PoleProximity { .. } => "PoleProximity",
            Error::HeightViolation { .. } => "HeightViolation",
            Error::DomainError(_) => "DomainError",
            Error::QuadratureFailure { .. } => "QuadratureFailure",
            Error::EmptyRange { .. } => "EmptyRange",
            Error::CutoffTooSmall { .. } => "CutoffTooSmall",
            Error::InsufficientSignal { .. } => "InsufficientSignal",
            Error::RationalOverflow(_) => "RationalOverflow",
            Error::IrrationalCollision { .. } => "IrrationalCollision",
            Error::SigmaMismatch { .. } => "SigmaMismatch",
            Error::InvalidConfig(_) => "InvalidConfig",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
