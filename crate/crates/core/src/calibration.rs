//! Chain initialization from credit spreads under a linear term structure.

use crate::error::{Error, Result};
use crate::urn_chain::{invert_chain, IdioVector, TotalVector};

/// Last month of the one-year horizon.
pub const HORIZON_MONTHS: u32 = 12;

pub const DEFAULT_MONTHLY_SLOPE: f64 = 0.0005;

/// Spread curve of one group: the one-year quote plus a linear decay of
/// `monthly_slope` per month towards it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpreadCurve {
    one_year_spread: f64,
    monthly_slope: f64,
}

impl SpreadCurve {
    pub fn new(one_year_spread: f64, monthly_slope: f64) -> Result<Self> {
        if !(one_year_spread >= 0.0 && monthly_slope >= 0.0)
            || !one_year_spread.is_finite()
            || !monthly_slope.is_finite()
        {
            return Err(Error::InvalidParameter(format!(
                "spread ({one_year_spread}) and slope ({monthly_slope}) must be nonnegative"
            )));
        }
        Ok(Self {
            one_year_spread,
            monthly_slope,
        })
    }

    pub fn one_year_spread(&self) -> f64 {
        self.one_year_spread
    }

    pub fn monthly_slope(&self) -> f64 {
        self.monthly_slope
    }

    /// Spread quoted `month` months into the year.
    pub fn spread_at_month(&self, month: u32) -> Result<f64> {
        if month > HORIZON_MONTHS {
            return Err(Error::InvalidParameter(format!(
                "month {month} is outside 0..={HORIZON_MONTHS}"
            )));
        }
        Ok(self.one_year_spread + self.monthly_slope * f64::from(HORIZON_MONTHS - month))
    }
}

/// Expected total default probability over `horizon_years` implied by a
/// spread: `1 - exp(-horizon * gamma)`.
pub fn spread_to_total_pd(gamma: f64, horizon_years: f64) -> f64 {
    -(-horizon_years * gamma).exp_m1()
}

/// Totals `1 - exp(-gamma_i(month))` for every curve, checked for the
/// reliability order.
pub fn totals_from_spreads(curves: &[SpreadCurve], month: u32) -> Result<TotalVector> {
    let totals = curves
        .iter()
        .map(|c| c.spread_at_month(month).map(|g| spread_to_total_pd(g, 1.0)))
        .collect::<Result<Vec<_>>>()?;
    TotalVector::new(totals)
}

/// Idiosyncratic PDs reproducing the spread-implied totals through the chain.
pub fn init_chain_from_spreads(curves: &[SpreadCurve], month: u32) -> Result<IdioVector> {
    if curves.is_empty() {
        return Err(Error::InvalidParameter("no spread curves given".into()));
    }
    invert_chain(&totals_from_spreads(curves, month)?)
}
