//! Brute-force verifiers for the closed-form routines.
//!
//! Nothing in here calls into `special`, `polya_urn` or `urn_chain`
//! numerics: the samplers, the Gauss-Legendre rule and the binomial
//! weights are all local, so agreement between an oracle and the exact
//! code is independent evidence.

mod ks;
mod mc;
mod quadrature;
mod sampling;

pub use ks::ks_distance;
pub use mc::{mc_joint_pmf, McTable, MC_CHUNK};
pub use quadrature::{
    gauss_legendre, quadrature_joint_pmf, quadrature_joint_pmf_checked, BetaRule,
    DEFAULT_NODES,
};
pub use sampling::{sample_beta, sample_gamma_ln, sample_standard_normal};

use std::io::{self, Write};

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleReport {
    pub estimate: f64,
    pub standard_error: f64,
    pub replicates: u64,
    pub seed: u64,
}

impl OracleReport {
    /// Estimate of a probability from `hits` successes, with the sample
    /// standard deviation of the indicator divided by sqrt(replicates).
    pub fn from_hits(hits: u64, replicates: u64, seed: u64) -> Self {
        let n = replicates as f64;
        let p = hits as f64 / n;
        let var = if replicates > 1 {
            p * (1.0 - p) * n / (n - 1.0)
        } else {
            0.0
        };
        Self {
            estimate: p,
            standard_error: (var / n).sqrt(),
            replicates,
            seed,
        }
    }
}

/// Writes `f_1,...,f_k,estimate,standard_error,replicates,seed` rows.
pub fn write_reports_csv<W: Write>(table: &McTable, mut out: W) -> io::Result<()> {
    let k = table.table.dims().len();
    let header: Vec<String> = (1..=k).map(|i| format!("f_{i}")).collect();
    writeln!(out, "{},estimate,standard_error,replicates,seed", header.join(","))?;
    for (i, r) in table.reports.iter().enumerate() {
        for f in table.table.tuple_of(i) {
            write!(out, "{f},")?;
        }
        writeln!(
            out,
            "{:.16e},{:.16e},{},{}",
            r.estimate, r.standard_error, r.replicates, r.seed
        )?;
    }
    Ok(())
}
