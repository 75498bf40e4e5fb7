//! Monthly urn-chain updating driven by observed default counts.
//!
//! Month 0 is calibrated from spreads. In every later month each group's
//! idiosyncratic mean is reinforced by that month's defaults,
//! `m <- (m + s d) / (1 + s n)` with `n` the survivors at the start of the
//! month, and the totals are recombined through the chain.

use std::io::{self, Write};

use crate::calibration::{init_chain_from_spreads, SpreadCurve, HORIZON_MONTHS};
use crate::error::{Error, Result};
use crate::urn_chain::{compose_total, IdioVector};

#[derive(Debug, Clone, PartialEq)]
pub struct GroupConfig {
    pub name: String,
    pub size: u64,
    pub curve: SpreadCurve,
    pub reinforcement: f64,
}

/// Groups ordered best to worst, plus the number of months to simulate.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub groups: Vec<GroupConfig>,
    pub months: u32,
}

impl Scenario {
    pub fn new(groups: Vec<GroupConfig>, months: u32) -> Result<Self> {
        if groups.is_empty() {
            return Err(Error::InvalidParameter("scenario has no groups".into()));
        }
        if months == 0 || months > HORIZON_MONTHS {
            return Err(Error::InvalidParameter(format!(
                "months must lie in 1..={HORIZON_MONTHS}, got {months}"
            )));
        }
        for g in &groups {
            if g.size == 0 {
                return Err(Error::InvalidParameter(format!("group {} has size 0", g.name)));
            }
            if g.reinforcement <= 0.0 || !g.reinforcement.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "group {} has nonpositive reinforcement {}",
                    g.name, g.reinforcement
                )));
            }
        }
        for (i, g) in groups.iter().enumerate() {
            if groups[..i].iter().any(|h| h.name == g.name) {
                return Err(Error::InvalidParameter(format!("duplicate group name {}", g.name)));
            }
        }
        Ok(Self { groups, months })
    }

    /// Copy with every group's reinforcement replaced by `s`.
    pub fn with_reinforcement(&self, s: f64) -> Result<Self> {
        let groups = self
            .groups
            .iter()
            .map(|g| GroupConfig {
                reinforcement: s,
                ..g.clone()
            })
            .collect();
        Self::new(groups, self.months)
    }

    pub fn curves(&self) -> Vec<SpreadCurve> {
        self.groups.iter().map(|g| g.curve).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupState {
    pub name: String,
    pub initial_size: u64,
    pub survivors: u64,
    pub idio_mean: f64,
    pub reinforcement: f64,
}

impl GroupState {
    /// One month of reinforcement. Defaults count towards this month's
    /// exposure; survivors are decremented afterwards.
    pub fn step(&self, defaults: u64) -> Result<GroupState> {
        if defaults > self.survivors {
            return Err(Error::InconsistentObservation(format!(
                "group {}: {defaults} defaults but only {} survivors",
                self.name, self.survivors
            )));
        }
        let s = self.reinforcement;
        let idio_mean = (self.idio_mean + s * defaults as f64) / (1.0 + s * self.survivors as f64);
        Ok(GroupState {
            survivors: self.survivors - defaults,
            idio_mean,
            ..self.clone()
        })
    }
}

/// Observed default counts, `counts[t][g]` for month `t + 1` and group `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct DefaultSchedule {
    groups: Vec<String>,
    counts: Vec<Vec<u64>>,
}

impl DefaultSchedule {
    pub fn new(groups: Vec<String>, counts: Vec<Vec<u64>>) -> Result<Self> {
        if let Some((t, row)) = counts.iter().enumerate().find(|(_, r)| r.len() != groups.len()) {
            return Err(Error::InvalidParameter(format!(
                "month {} has {} counts for {} groups",
                t + 1,
                row.len(),
                groups.len()
            )));
        }
        Ok(Self { groups, counts })
    }

    pub fn months(&self) -> u32 {
        self.counts.len() as u32
    }

    pub fn groups(&self) -> &[String] {
        &self.groups
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    /// Counts for one group across months.
    pub fn column(&self, name: &str) -> Option<Vec<u64>> {
        let g = self.groups.iter().position(|n| n == name)?;
        Some(self.counts.iter().map(|row| row[g]).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub month: u32,
    pub group: String,
    pub spread: f64,
    pub defaults: u64,
    pub idio_mean: f64,
    pub total_pd: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    groups: usize,
    rows: Vec<ResultRow>,
}

impl SimulationResult {
    pub fn rows(&self) -> &[ResultRow] {
        &self.rows
    }

    pub fn months(&self) -> u32 {
        (self.rows.len() / self.groups) as u32 - 1
    }

    pub fn row(&self, month: u32, group: usize) -> &ResultRow {
        &self.rows[month as usize * self.groups + group]
    }

    pub fn total_pd(&self, month: u32, group: usize) -> f64 {
        self.row(month, group).total_pd
    }

    /// Writes `month,group,spread,defaults,idio_mean,total_pd` with six
    /// decimals and LF line endings.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "month,group,spread,defaults,idio_mean,total_pd")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{:.6},{},{:.6},{:.6}",
                r.month, r.group, r.spread, r.defaults, r.idio_mean, r.total_pd
            )?;
        }
        Ok(())
    }
}

pub fn run_scenario(scenario: &Scenario, schedule: &DefaultSchedule) -> Result<SimulationResult> {
    if schedule.months() > scenario.months {
        return Err(Error::InvalidParameter(format!(
            "schedule covers {} months but the scenario only {}",
            schedule.months(),
            scenario.months
        )));
    }
    let columns = scenario
        .groups
        .iter()
        .map(|g| {
            schedule.column(&g.name).ok_or_else(|| {
                Error::InvalidParameter(format!("schedule has no column for group {}", g.name))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if schedule.groups().len() != scenario.groups.len() {
        return Err(Error::InvalidParameter(format!(
            "schedule has {} group columns, scenario has {} groups",
            schedule.groups().len(),
            scenario.groups.len()
        )));
    }

    let curves = scenario.curves();
    let idio = init_chain_from_spreads(&curves, 0)?;
    let mut states: Vec<GroupState> = scenario
        .groups
        .iter()
        .zip(idio.as_slice())
        .map(|(g, &m)| GroupState {
            name: g.name.clone(),
            initial_size: g.size,
            survivors: g.size,
            idio_mean: m,
            reinforcement: g.reinforcement,
        })
        .collect();

    let k = states.len();
    let mut rows = Vec::with_capacity(k * (schedule.months() as usize + 1));
    let mut record = |month: u32, states: &[GroupState], defaults: &[u64]| -> Result<()> {
        let means = IdioVector::new(states.iter().map(|s| s.idio_mean).collect())?;
        let totals = compose_total(&means);
        for (g, state) in states.iter().enumerate() {
            rows.push(ResultRow {
                month,
                group: state.name.clone(),
                spread: curves[g].spread_at_month(month)?,
                defaults: defaults[g],
                idio_mean: state.idio_mean,
                total_pd: totals.as_slice()[g],
            });
        }
        Ok(())
    };

    record(0, &states, &vec![0; k])?;
    for month in 1..=schedule.months() {
        let defaults: Vec<u64> = columns.iter().map(|c| c[month as usize - 1]).collect();
        states = states
            .iter()
            .zip(&defaults)
            .map(|(s, &d)| s.step(d))
            .collect::<Result<_>>()?;
        record(month, &states, &defaults)?;
    }
    Ok(SimulationResult { groups: k, rows })
}
