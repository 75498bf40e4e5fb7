//! Urn-chain model of dependent defaults across ordered reliability groups.
//!
//! Each group's idiosyncratic default probability is the limit of a
//! two-colour Pólya urn and is updated by reinforcement as defaults are
//! observed. Groups are chained best to worst so that every group inherits
//! the risk of the ones above it, which makes the vector of total default
//! probabilities neutral to the right.

pub mod calibration;
pub mod cli;
pub mod config;
pub mod error;
pub mod oracle;
pub mod pmf;
pub mod polya_urn;
pub mod simulation;
pub mod special;
pub mod urn_chain;

pub use error::{Error, Result};
pub use pmf::PmfTable;
pub use polya_urn::{BetaParams, UrnState};
