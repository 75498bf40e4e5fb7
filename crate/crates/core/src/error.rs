use thiserror::Error;

/// Errors raised by the model and its numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Parameters violate an invariant of the model setup.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The de Finetti measure is a point mass and has no Beta representation.
    #[error("degenerate de Finetti measure: {0}")]
    DegenerateMeasure(String),

    /// Observed counts are inconsistent with the exposure they were drawn from.
    #[error("inconsistent observation: {0}")]
    InconsistentObservation(String),

    /// A group total already equals one, so the chain below it is undefined.
    #[error("chain inversion undefined: total PD of group {group} is 1")]
    CertainDefault { group: usize },

    /// Reliability order broken: totals decrease along the chain.
    #[error("ordering violation: total PD of group {group} ({value}) is below the previous group ({previous})")]
    OrderingViolation { group: usize, value: f64, previous: f64 },

    /// Exact enumeration would exceed the configured table-size cap.
    #[error("table of {cells} cells exceeds the cap of {cap}; use the Monte Carlo mode instead")]
    ResourceCap { cells: u128, cap: u128 },
}

pub type Result<T> = std::result::Result<T, Error>;
