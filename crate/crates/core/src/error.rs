use thiserror::Error;

/// Errors shared across the numerics modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A constructor or operation received an argument outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Riemann data lies outside the rarefaction-solvable set.
    #[error("data is outside the rarefaction region (classification OUTSIDE)")]
    OutsideRarefactionRegion,

    /// The velocity jump is too large for an intermediate state to exist.
    #[error("no intermediate state: velocity jump exceeds the vacuum threshold")]
    VacuumFormation,

    /// Initial data construction produced a nonpositive specific volume.
    #[error("initial data has nonpositive specific volume at x = {x}")]
    NonpositiveVolume { x: f64 },

    /// A root finder or quadrature failed to reach its tolerance.
    #[error("numerical routine failed: {0}")]
    Numerics(String),
}

pub type Result<T> = std::result::Result<T, Error>;
