//! Scenario configuration and default-schedule file formats.
//!
//! Scenario files are line oriented:
//!
//! ```text
//! # global keys
//! monthly_slope = 0.0005
//! months = 12
//!
//! [group.A]
//! size = 20
//! one_year_spread = 0.02
//! reinforcement = 0.05
//! ```
//!
//! Groups are listed best to worst, in file order. `monthly_slope`
//! defaults to 0.0005 and `months` to 12. Lines starting with `#` are
//! comments.
//!
//! Schedules are CSV with header `month,<group names...>` and one row per
//! month, numbered from 1 without gaps.

use std::fmt;
use std::io::Read;
use std::path::Path;

use thiserror::Error;

use crate::calibration::{SpreadCurve, DEFAULT_MONTHLY_SLOPE, HORIZON_MONTHS};
use crate::error::Result as ModelResult;
use crate::simulation::{DefaultSchedule, GroupConfig, Scenario};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("{source_name}:{line}: {message}")]
    Syntax {
        source_name: String,
        line: usize,
        message: String,
    },
    #[error("{source_name}: {message}")]
    Invalid { source_name: String, message: String },
    #[error("cannot read {source_name}: {error}")]
    Io {
        source_name: String,
        error: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupEntry {
    pub name: String,
    pub size: u64,
    pub one_year_spread: f64,
    pub reinforcement: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub groups: Vec<GroupEntry>,
    pub monthly_slope: f64,
    pub months: u32,
}

#[derive(Default)]
struct PartialGroup {
    name: String,
    header_line: usize,
    size: Option<u64>,
    one_year_spread: Option<f64>,
    reinforcement: Option<f64>,
}

fn parse_value<T: std::str::FromStr>(
    source_name: &str,
    line: usize,
    key: &str,
    raw: &str,
) -> Result<T, ParseError>
where
    T::Err: fmt::Display,
{
    raw.parse::<T>().map_err(|e| ParseError::Syntax {
        source_name: source_name.to_string(),
        line,
        message: format!("bad value for `{key}`: {raw:?} ({e})"),
    })
}

impl ScenarioConfig {
    pub fn from_path(path: &Path) -> Result<Self, ParseError> {
        let name = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|error| ParseError::Io {
            source_name: name.clone(),
            error,
        })?;
        Self::parse(&text, &name)
    }

    pub fn parse(text: &str, source_name: &str) -> Result<Self, ParseError> {
        let syntax = |line: usize, message: String| ParseError::Syntax {
            source_name: source_name.to_string(),
            line,
            message,
        };
        let mut monthly_slope = DEFAULT_MONTHLY_SLOPE;
        let mut months = HORIZON_MONTHS;
        let mut groups: Vec<PartialGroup> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(header) = content.strip_prefix('[') {
                let inner = header
                    .strip_suffix(']')
                    .ok_or_else(|| syntax(line, format!("unterminated section header {content:?}")))?
                    .trim();
                let name = inner
                    .strip_prefix("group.")
                    .filter(|n| !n.is_empty())
                    .ok_or_else(|| syntax(line, format!("expected [group.<name>], found [{inner}]")))?;
                if name.contains(',') || name.contains(char::is_whitespace) {
                    return Err(syntax(line, format!("group name {name:?} may not contain commas or spaces")));
                }
                if groups.iter().any(|g| g.name == name) {
                    return Err(syntax(line, format!("duplicate group {name:?}")));
                }
                groups.push(PartialGroup {
                    name: name.to_string(),
                    header_line: line,
                    ..Default::default()
                });
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| syntax(line, format!("expected `key = value`, found {content:?}")))?;
            match groups.last_mut() {
                None => match key {
                    "monthly_slope" => monthly_slope = parse_value(source_name, line, key, value)?,
                    "months" => months = parse_value(source_name, line, key, value)?,
                    _ => return Err(syntax(line, format!("unknown global key `{key}`"))),
                },
                Some(g) => match key {
                    "size" => g.size = Some(parse_value(source_name, line, key, value)?),
                    "one_year_spread" => {
                        g.one_year_spread = Some(parse_value(source_name, line, key, value)?)
                    }
                    "reinforcement" => {
                        g.reinforcement = Some(parse_value(source_name, line, key, value)?)
                    }
                    _ => return Err(syntax(line, format!("unknown group key `{key}`"))),
                },
            }
        }

        if groups.is_empty() {
            return Err(ParseError::Invalid {
                source_name: source_name.to_string(),
                message: "no [group.<name>] sections".into(),
            });
        }
        let groups = groups
            .into_iter()
            .map(|g| {
                let missing = |key: &str| syntax(g.header_line, format!("group {} is missing `{key}`", g.name));
                Ok(GroupEntry {
                    size: g.size.ok_or_else(|| missing("size"))?,
                    one_year_spread: g.one_year_spread.ok_or_else(|| missing("one_year_spread"))?,
                    reinforcement: g.reinforcement.ok_or_else(|| missing("reinforcement"))?,
                    name: g.name,
                })
            })
            .collect::<Result<Vec<_>, ParseError>>()?;
        Ok(Self {
            groups,
            monthly_slope,
            months,
        })
    }

    /// Validated model scenario.
    pub fn to_scenario(&self) -> ModelResult<Scenario> {
        let groups = self
            .groups
            .iter()
            .map(|g| {
                Ok(GroupConfig {
                    name: g.name.clone(),
                    size: g.size,
                    curve: SpreadCurve::new(g.one_year_spread, self.monthly_slope)?,
                    reinforcement: g.reinforcement,
                })
            })
            .collect::<ModelResult<Vec<_>>>()?;
        Scenario::new(groups, self.months)
    }
}

/// Reads a default schedule CSV.
pub fn read_schedule<R: Read>(reader: R, source_name: &str) -> Result<DefaultSchedule, ParseError> {
    let syntax = |line: usize, message: String| ParseError::Syntax {
        source_name: source_name.to_string(),
        line,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| syntax(1, format!("cannot read header: {e}")))?
        .clone();
    if headers.get(0) != Some("month") {
        return Err(syntax(1, "header must start with `month`".into()));
    }
    let groups: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    if groups.is_empty() {
        return Err(syntax(1, "header lists no groups".into()));
    }

    let mut counts = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            syntax(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let month: u32 = parse_value(source_name, line, "month", &record[0])?;
        let expected = counts.len() as u32 + 1;
        if month != expected {
            return Err(syntax(line, format!("expected month {expected}, found {month}")));
        }
        let row = groups
            .iter()
            .enumerate()
            .map(|(g, name)| parse_value::<u64>(source_name, line, name, &record[g + 1]))
            .collect::<Result<Vec<_>, _>>()?;
        counts.push(row);
    }
    DefaultSchedule::new(groups, counts).map_err(|e| ParseError::Invalid {
        source_name: source_name.to_string(),
        message: e.to_string(),
    })
}

pub fn read_schedule_path(path: &Path) -> Result<DefaultSchedule, ParseError> {
    let name = path.display().to_string();
    let file = std::fs::File::open(path).map_err(|error| ParseError::Io {
        source_name: name.clone(),
        error,
    })?;
    read_schedule(file, &name)
}

/// The bundled example scenario: three groups A, B, C of 20, 90 and 180
/// firms with one-year spreads 2%, 6% and 9%.
pub const EXAMPLE_SCENARIO: &str = include_str!("../data/example_scenario.conf");

/// Monthly defaults for the bundled scenario.
pub const EXAMPLE_SCHEDULE: &str = include_str!("../data/example_schedule.csv");
