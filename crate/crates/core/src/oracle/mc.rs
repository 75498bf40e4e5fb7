use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::sampling::sample_beta;
use super::OracleReport;
use crate::error::{Error, Result};
use crate::pmf::{cell_count, PmfTable, DEFAULT_CELL_CAP};
use crate::polya_urn::BetaParams;

/// Replicates per work unit. Chunk `c` draws from the ChaCha8 stream `c` of
/// the seeded generator, so the result does not depend on how chunks are
/// spread over threads.
pub const MC_CHUNK: u64 = 100_000;

/// Empirical joint pmf with per-cell reports.
#[derive(Debug, Clone, PartialEq)]
pub struct McTable {
    pub table: PmfTable,
    pub reports: Vec<OracleReport>,
}

/// Simulates the default counts directly: draw every `D_i` from its Beta
/// law, chain them into totals, then draw binomial counts per group.
pub fn mc_joint_pmf(
    sizes: &[u64],
    priors: &[BetaParams],
    replicates: u64,
    seed: u64,
) -> Result<McTable> {
    if sizes.is_empty() || sizes.len() != priors.len() {
        return Err(Error::InvalidParameter(format!(
            "{} sizes and {} priors",
            sizes.len(),
            priors.len()
        )));
    }
    if replicates == 0 {
        return Err(Error::InvalidParameter("replicates must be positive".into()));
    }
    let cells = cell_count(sizes, DEFAULT_CELL_CAP)?;
    let chunks = replicates.div_ceil(MC_CHUNK);

    let hits = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = MC_CHUNK.min(replicates - c * MC_CHUNK);
            run_chunk(sizes, priors, seed, c, len, cells)
        })
        .reduce(
            || vec![0u64; cells],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );

    let reports: Vec<OracleReport> = hits
        .iter()
        .map(|&h| OracleReport::from_hits(h, replicates, seed))
        .collect();
    let table = PmfTable::from_cells(sizes.to_vec(), reports.iter().map(|r| r.estimate).collect())?;
    Ok(McTable { table, reports })
}

fn run_chunk(
    sizes: &[u64],
    priors: &[BetaParams],
    seed: u64,
    chunk: u64,
    len: u64,
    cells: usize,
) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    let mut hits = vec![0u64; cells];
    for _ in 0..len {
        let mut survival = 1.0;
        let mut index = 0usize;
        for (prior, &n) in priors.iter().zip(sizes) {
            survival *= 1.0 - sample_beta(prior, &mut rng);
            let p = 1.0 - survival;
            let mut f = 0usize;
            for _ in 0..n {
                if rng.random::<f64>() < p {
                    f += 1;
                }
            }
            index = index * (n as usize + 1) + f;
        }
        hits[index] += 1;
    }
    hits
}
