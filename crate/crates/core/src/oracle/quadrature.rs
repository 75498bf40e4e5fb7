use crate::error::{Error, Result};
use crate::pmf::{cell_count, PmfTable, DEFAULT_CELL_CAP};
use crate::polya_urn::BetaParams;

pub const DEFAULT_NODES: usize = 200;

/// Largest number of groups the tensor-product rule accepts.
pub const MAX_GROUPS: usize = 3;

/// Gauss-Legendre nodes and weights on [-1, 1] (Newton iteration on P_n).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            // p1 = P_n(x), p0 = P_{n-1}(x)
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        weights[i] = w;
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Discrete rule `sum_j w_j g(x_j) ~ E[g(X)]` for X ~ Beta(alpha, beta).
///
/// Each half of (0, 1) uses Gauss-Legendre after the substitution
/// `x = u^p / 2` (resp. `1 - x = u^q / 2`), with the power chosen so that
/// the transformed density behaves like `u^r` with `r >= 3` at the end
/// point. The normalising constant is the quadrature sum itself.
#[derive(Debug, Clone)]
pub struct BetaRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn endpoint_power(shape: f64) -> f64 {
    if shape >= 4.0 {
        1.0
    } else {
        (4.0 / shape).ceil().min(64.0)
    }
}

impl BetaRule {
    pub fn new(prior: &BetaParams, nodes: usize) -> Self {
        let half = nodes.div_ceil(2).max(1);
        let (gx, gw) = gauss_legendre(half);
        let (a, b) = (prior.alpha(), prior.beta());
        let log_kernel = |ln_x: f64, ln_1mx: f64| (a - 1.0) * ln_x + (b - 1.0) * ln_1mx;

        let mut xs = Vec::with_capacity(2 * half);
        let mut logw = Vec::with_capacity(2 * half);
        let p = endpoint_power(a);
        for (&t, &w) in gx.iter().zip(&gw) {
            let u = 0.5 * (t + 1.0);
            let x = 0.5 * u.powf(p);
            let ln_x = -std::f64::consts::LN_2 + p * u.ln();
            let ln_jac = (0.5 * p).ln() + (p - 1.0) * u.ln();
            xs.push(x);
            logw.push((0.5 * w).ln() + ln_jac + log_kernel(ln_x, (-x).ln_1p()));
        }
        let q = endpoint_power(b);
        for (&t, &w) in gx.iter().zip(&gw) {
            let u = 0.5 * (t + 1.0);
            let y = 0.5 * u.powf(q);
            let ln_y = -std::f64::consts::LN_2 + q * u.ln();
            let ln_jac = (0.5 * q).ln() + (q - 1.0) * u.ln();
            xs.push(1.0 - y);
            logw.push((0.5 * w).ln() + ln_jac + log_kernel((-y).ln_1p(), ln_y));
        }
        let top = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let raw: Vec<f64> = logw.iter().map(|l| (l - top).exp()).collect();
        let norm: f64 = raw.iter().sum();
        Self {
            nodes: xs,
            weights: raw.into_iter().map(|w| w / norm).collect(),
        }
    }

    pub fn expect<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * g(x)).sum()
    }
}

/// C(n, f) p^f (1-p)^(n-f) for every f.
fn binomial_row(n: u64, p: f64) -> Vec<f64> {
    let mut coeff = 1.0;
    (0..=n)
        .map(|f| {
            if f > 0 {
                coeff = coeff * (n - f + 1) as f64 / f as f64;
            }
            coeff * p.powi(f as i32) * (1.0 - p).powi((n - f) as i32)
        })
        .collect()
}

/// Joint pmf of the default counts by tensor-product quadrature of
/// `E[prod_i C(n_i,f_i) D*_i^f_i (1 - D*_i)^(n_i - f_i)]`.
pub fn quadrature_joint_pmf(sizes: &[u64], priors: &[BetaParams], nodes: usize) -> Result<PmfTable> {
    let k = sizes.len();
    if k == 0 || k > MAX_GROUPS {
        return Err(Error::InvalidParameter(format!(
            "quadrature handles 1..={MAX_GROUPS} groups, got {k}"
        )));
    }
    if priors.len() != k {
        return Err(Error::InvalidParameter(format!("{k} sizes but {} priors", priors.len())));
    }
    let cells = cell_count(sizes, DEFAULT_CELL_CAP)?;
    let rules: Vec<BetaRule> = priors.iter().map(|p| BetaRule::new(p, nodes)).collect();
    let mut acc = vec![0.0; cells];
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(k);
    accumulate(sizes, &rules, 0, 1.0, 1.0, &mut rows, &mut acc);
    PmfTable::from_cells(sizes.to_vec(), acc)
}

fn accumulate(
    sizes: &[u64],
    rules: &[BetaRule],
    level: usize,
    weight: f64,
    survival: f64,
    rows: &mut Vec<Vec<f64>>,
    acc: &mut [f64],
) {
    if level == sizes.len() {
        // outer product of the per-group binomial rows
        let mut cell = vec![0usize; sizes.len()];
        for slot in acc.iter_mut() {
            let mut v = weight;
            for (g, &f) in cell.iter().enumerate() {
                v *= rows[g][f];
            }
            *slot += v;
            for g in (0..sizes.len()).rev() {
                cell[g] += 1;
                if cell[g] <= sizes[g] as usize {
                    break;
                }
                cell[g] = 0;
            }
        }
        return;
    }
    let rule = &rules[level];
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let s = survival * (1.0 - x);
        rows.push(binomial_row(sizes[level], 1.0 - s));
        accumulate(sizes, rules, level + 1, weight * w, s, rows, acc);
        rows.pop();
    }
}

/// Quadrature table at `nodes` together with the largest cell change when
/// the node count is doubled.
pub fn quadrature_joint_pmf_checked(
    sizes: &[u64],
    priors: &[BetaParams],
    nodes: usize,
) -> Result<(PmfTable, f64)> {
    let coarse = quadrature_joint_pmf(sizes, priors, nodes)?;
    let fine = quadrature_joint_pmf(sizes, priors, 2 * nodes)?;
    let diff = coarse.max_abs_diff(&fine);
    Ok((coarse, diff))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let (x, w) = gauss_legendre(10);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
        // ∫ x^18 dx over [-1,1] = 2/19, exact for degree <= 19
        let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((m - 2.0 / 19.0).abs() < 1e-14);
    }

    #[test]
    fn beta_rule_moments() {
        for &(a, b) in &[(2.0, 5.0), (0.514, 19.486), (0.3, 0.7), (7.5, 1.2)] {
            let rule = BetaRule::new(&BetaParams::new(a, b).unwrap(), 200);
            let mean = rule.expect(|x| x);
            let second = rule.expect(|x| x * x);
            let want_second = a * (a + 1.0) / ((a + b) * (a + b + 1.0));
            assert!((mean - a / (a + b)).abs() < 1e-12, "({a},{b}) mean {mean}");
            assert!((second - want_second).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_single_trial() {
        let t = quadrature_joint_pmf(&[1], &[BetaParams::new(1.0, 1.0).unwrap()], 200).unwrap();
        assert!((t.get(&[1]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_too_many_groups() {
        let p = BetaParams::new(1.0, 1.0).unwrap();
        assert!(quadrature_joint_pmf(&[1, 1, 1, 1], &[p; 4], 20).is_err());
    }

    #[test]
    fn node_doubling_converges() {
        let priors = [BetaParams::new(2.0, 5.0).unwrap(), BetaParams::new(1.0, 3.0).unwrap()];
        let (t, diff) = quadrature_joint_pmf_checked(&[3, 4], &priors, DEFAULT_NODES).unwrap();
        assert!(diff < 1e-9, "{diff}");
        assert!((t.total() - 1.0).abs() < 1e-12);
    }
}
