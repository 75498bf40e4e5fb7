//! The urn chain: ordered groups whose total default probabilities are
//! built recursively from independent idiosyncratic ones,
//! `D*_i = D*_{i-1} + (1 - D*_{i-1}) D_i`.
//!
//! The resulting vector of totals is neutral to the right, and with Beta
//! idiosyncratic laws its increments follow beta-Stacy conditionals. This
//! module also computes the exact law of the default counts of all groups.

use rand::Rng;
use rand_distr::{Beta, Distribution};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pmf::{cell_count, PmfTable, DEFAULT_CELL_CAP};
use crate::polya_urn::{beta_binomial_pmf, BetaParams};
use crate::special::{ln_beta, ln_beta_unchecked, ln_choose};

/// Idiosyncratic default probabilities, best group first.
#[derive(Debug, Clone, PartialEq)]
pub struct IdioVector(Vec<f64>);

/// Total (idiosyncratic plus inherited) default probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct TotalVector(Vec<f64>);

/// Increments `E_i = D*_i - D*_{i-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementVector(Vec<f64>);

fn check_unit_interval(values: &[f64], what: &str) -> Result<()> {
    for (i, &v) in values.iter().enumerate() {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidParameter(format!(
                "{what}[{i}] = {v} is outside [0, 1]"
            )));
        }
    }
    Ok(())
}

impl IdioVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_unit_interval(&values, "idiosyncratic PD")?;
        Ok(Self(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TotalVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_unit_interval(&values, "total PD")?;
        for i in 1..values.len() {
            if values[i] < values[i - 1] {
                return Err(Error::OrderingViolation {
                    group: i,
                    value: values[i],
                    previous: values[i - 1],
                });
            }
        }
        Ok(Self(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl IncrementVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

pub fn compose_total(idio: &IdioVector) -> TotalVector {
    let mut totals = Vec::with_capacity(idio.len());
    let mut prev = 0.0;
    for &d in idio.as_slice() {
        // prev + (1 - prev) d stays in [prev, 1] for d in [0, 1]
        let cur = prev + (1.0 - prev) * d;
        totals.push(cur);
        prev = cur;
    }
    TotalVector(totals)
}

pub fn invert_chain(totals: &TotalVector) -> Result<IdioVector> {
    let t = totals.as_slice();
    let mut idio = Vec::with_capacity(t.len());
    for i in 0..t.len() {
        if i == 0 {
            idio.push(t[0]);
            continue;
        }
        let prev = t[i - 1];
        if prev >= 1.0 {
            return Err(Error::CertainDefault { group: i - 1 });
        }
        idio.push(((t[i] - prev) / (1.0 - prev)).clamp(0.0, 1.0));
    }
    Ok(IdioVector(idio))
}

pub fn increments(totals: &TotalVector) -> IncrementVector {
    let t = totals.as_slice();
    let mut out = Vec::with_capacity(t.len());
    let mut prev = 0.0;
    for &x in t {
        out.push(x - prev);
        prev = x;
    }
    IncrementVector(out)
}

/// One joint draw of the chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSample {
    pub idio: IdioVector,
    pub totals: TotalVector,
    pub increments: IncrementVector,
}

/// Draws independent `D_i ~ Beta(alpha_i, beta_i)` and derives totals and
/// increments.
pub fn sample_chain<R: Rng + ?Sized>(priors: &[BetaParams], rng: &mut R) -> Result<ChainSample> {
    if priors.is_empty() {
        return Err(Error::InvalidParameter("chain needs at least one group".into()));
    }
    let mut draws = Vec::with_capacity(priors.len());
    for p in priors {
        let dist = Beta::new(p.alpha(), p.beta())
            .map_err(|e| Error::InvalidParameter(format!("Beta({}, {}): {e}", p.alpha(), p.beta())))?;
        draws.push(dist.sample(rng));
    }
    let idio = IdioVector(draws);
    let totals = compose_total(&idio);
    let increments = increments(&totals);
    Ok(ChainSample {
        idio,
        totals,
        increments,
    })
}

/// Beta-Stacy density on (0, c):
/// `x^(a-1) (c-x)^(b-1) / (B(a,b) c^(a+b-1))`.
pub fn beta_stacy_pdf(x: f64, a: f64, b: f64, c: f64) -> Result<f64> {
    if c <= 0.0 || !c.is_finite() {
        return Err(Error::InvalidParameter(format!("beta-Stacy scale must be positive, got {c}")));
    }
    let ln_norm = ln_beta(a, b)?;
    if !(x > 0.0 && x < c) {
        return Ok(0.0);
    }
    let log_pdf = (a - 1.0) * x.ln() + (b - 1.0) * (c - x).ln() - (a + b - 1.0) * c.ln() - ln_norm;
    Ok(log_pdf.exp())
}

/// Whether `beta_i = sum_{j>i} alpha_j` holds within `tol` for every group
/// but the last, in which case the chain law is a Generalized Dirichlet.
pub fn is_generalized_dirichlet(priors: &[BetaParams], tol: f64) -> bool {
    (0..priors.len().saturating_sub(1)).all(|i| {
        let tail: f64 = priors[i + 1..].iter().map(|p| p.alpha()).sum();
        (priors[i].beta() - tail).abs() <= tol
    })
}

fn check_shapes(sizes: &[u64], priors: &[BetaParams]) -> Result<()> {
    if sizes.is_empty() {
        return Err(Error::InvalidParameter("at least one group is required".into()));
    }
    if sizes.len() != priors.len() {
        return Err(Error::InvalidParameter(format!(
            "{} group sizes but {} priors",
            sizes.len(),
            priors.len()
        )));
    }
    Ok(())
}

/// Exact joint law of the default counts of two chained groups.
///
/// Expanding `(D*_2)^f2 = sum_i C(f2,i) D_1^(f2-i) ((1-D_1) D_2)^i` and
/// `1 - D*_2 = (1-D_1)(1-D_2)` turns every cell into a finite sum of
/// products of Beta moments, with no cancellation.
pub fn joint_pmf_two(n1: u64, n2: u64, prior1: &BetaParams, prior2: &BetaParams) -> Result<PmfTable> {
    joint_pmf_two_capped(n1, n2, prior1, prior2, DEFAULT_CELL_CAP)
}

pub fn joint_pmf_two_capped(
    n1: u64,
    n2: u64,
    prior1: &BetaParams,
    prior2: &BetaParams,
    cap: u128,
) -> Result<PmfTable> {
    let cells = cell_count(&[n1, n2], cap)?;
    let (a1, b1) = (prior1.alpha(), prior1.beta());
    let (a2, b2) = (prior2.alpha(), prior2.beta());
    let norm1 = ln_beta_unchecked(a1, b1);
    let norm2 = ln_beta_unchecked(a2, b2);
    let mut probs = Vec::with_capacity(cells);
    for f1 in 0..=n1 {
        for f2 in 0..=n2 {
            let mut sum = 0.0;
            for i in (0..=f2).rev() {
                let second = 1.0
                    * (ln_choose(n2, f2) + ln_choose(f2, i)
                        + ln_beta_unchecked(a2 + i as f64, b2 + (n2 - f2) as f64)
                        - norm2)
                        .exp();
                let carried = f1 + f2 - i;
                let first = (ln_choose(n1, f1)
                    + ln_beta_unchecked(a1 + carried as f64, b1 + (n1 + n2 - carried) as f64)
                    - norm1)
                    .exp();
                sum += second * first;
            }
            probs.push(sum);
        }
    }
    PmfTable::from_cells(vec![n1, n2], probs)
}

/// Exact joint law of the default counts of `k` chained groups.
///
/// With `S_j = prod_{l<=j} (1 - D_l)` the integrand is
/// `prod_j C(n_j,f_j) (1 - S_j)^f_j S_j^(n_j - f_j)`. Walking from the last
/// group upwards, the pending power of `(1 - S_j)` is expanded through
/// `1 - S_j = (1 - S_{j-1}) + S_{j-1} D_j`, which leaves one Beta moment of
/// `D_j` per term. The exponents of `(1 - S_j)` and `S_j` always add up to
/// the sizes of groups `j..k`, so a single exponent is carried between
/// groups, and the carried weights only depend on the counts of the groups
/// already processed. For two groups the arithmetic is the same, term for
/// term, as in [`joint_pmf_two`].
pub fn joint_pmf_k(sizes: &[u64], priors: &[BetaParams]) -> Result<PmfTable> {
    joint_pmf_k_capped(sizes, priors, DEFAULT_CELL_CAP)
}

pub fn joint_pmf_k_capped(sizes: &[u64], priors: &[BetaParams], cap: u128) -> Result<PmfTable> {
    check_shapes(sizes, priors)?;
    let cells = cell_count(sizes, cap)?;
    let k = sizes.len();
    let norms: Vec<f64> = priors
        .iter()
        .map(|p| ln_beta_unchecked(p.alpha(), p.beta()))
        .collect();
    let mut suffix_total = vec![0u64; k + 1];
    for j in (0..k).rev() {
        suffix_total[j] = suffix_total[j + 1] + sizes[j];
    }

    // carried[s][m]: weight of the pending exponent m of (1 - S_{j-1}) for
    // the suffix of counts s = (f_j, ..., f_k), in lexicographic order.
    let mut carried: Vec<Vec<f64>> = vec![vec![1.0]];
    for j in (1..k).rev() {
        let below = carried;
        let (alpha, beta) = (priors[j].alpha(), priors[j].beta());
        let n = sizes[j];
        carried = (0..(n as usize + 1) * below.len())
            .into_par_iter()
            .map(|idx| {
                let f = (idx / below.len()) as u64;
                let incoming = &below[idx % below.len()];
                let ln_c = ln_choose(n, f);
                let mut out = vec![0.0; incoming.len() + f as usize];
                for (m, &w) in incoming.iter().enumerate() {
                    if w == 0.0 {
                        continue;
                    }
                    let a = f + m as u64;
                    let b = suffix_total[j] - a;
                    for i in 0..=a {
                        let factor = (ln_c + ln_choose(a, i)
                            + ln_beta_unchecked(alpha + i as f64, beta + b as f64)
                            - norms[j])
                            .exp();
                        out[(a - i) as usize] += w * factor;
                    }
                }
                out
            })
            .collect();
    }

    // S_0 = 1, so only the term that exhausts (1 - S_0) survives.
    let (alpha, beta) = (priors[0].alpha(), priors[0].beta());
    let probs: Vec<f64> = (0..cells)
        .into_par_iter()
        .map(|idx| {
            let f = (idx / carried.len()) as u64;
            let incoming = &carried[idx % carried.len()];
            let ln_c = ln_choose(sizes[0], f);
            let mut sum = 0.0;
            for (m, &w) in incoming.iter().enumerate() {
                let a = f + m as u64;
                let b = suffix_total[0] - a;
                sum += w * (ln_c + ln_beta_unchecked(alpha + a as f64, beta + b as f64) - norms[0]).exp();
            }
            sum
        })
        .collect();
    PmfTable::from_cells(sizes.to_vec(), probs)
}

/// Beta-binomial law of a single group as a table.
pub fn marginal_pmf(n: u64, prior: &BetaParams) -> Result<PmfTable> {
    let probs = (0..=n).map(|f| beta_binomial_pmf(n, f, prior)).collect();
    PmfTable::from_cells(vec![n], probs)
}

/// Diagnostic evaluation of the two-group closed form exactly as it appears
/// in print:
///
/// `C(n1,f1) C(n2,f2) sum_i C(f2,i) B(w1*+i, b1*+n2-i)/B(w1(0),b1(0))
///  * B(w2*-i, b2*)/B(w2(0),b2(0))`
///
/// where `posterior` holds `(w*, b*)` and `initial` holds the unscaled urn
/// masses `(w(0), b(0))`. Cells where a Beta argument is nonpositive are
/// `None`. The result is not a probability law; it exists to document how
/// it departs from [`joint_pmf_two`].
#[derive(Debug, Clone)]
pub struct PrintedFormulaReport {
    pub cells: Vec<Option<f64>>,
    pub undefined_cells: usize,
    pub defined_total: f64,
}

pub fn printed_joint_pmf_two(
    n1: u64,
    n2: u64,
    posterior: [&BetaParams; 2],
    initial: [&BetaParams; 2],
) -> PrintedFormulaReport {
    let (w1, b1) = (posterior[0].alpha(), posterior[0].beta());
    let (w2, b2) = (posterior[1].alpha(), posterior[1].beta());
    let norm1 = ln_beta_unchecked(initial[0].alpha(), initial[0].beta());
    let norm2 = ln_beta_unchecked(initial[1].alpha(), initial[1].beta());
    let mut cells = Vec::new();
    for f1 in 0..=n1 {
        for f2 in 0..=n2 {
            let mut sum = 0.0;
            let mut defined = true;
            for i in 0..=f2 {
                let i_f = i as f64;
                let (x1, y1) = (w1 + i_f, b1 + n2 as f64 - i_f);
                let x2 = w2 - i_f;
                if x1 <= 0.0 || y1 <= 0.0 || x2 <= 0.0 {
                    defined = false;
                    break;
                }
                sum += (ln_choose(f2, i) + ln_beta_unchecked(x1, y1) - norm1
                    + ln_beta_unchecked(x2, b2)
                    - norm2)
                    .exp();
            }
            cells.push(defined.then(|| (ln_choose(n1, f1) + ln_choose(n2, f2)).exp() * sum));
        }
    }
    let undefined_cells = cells.iter().filter(|c| c.is_none()).count();
    let defined_total = cells.iter().flatten().sum();
    PrintedFormulaReport {
        cells,
        undefined_cells,
        defined_total,
    }
}
