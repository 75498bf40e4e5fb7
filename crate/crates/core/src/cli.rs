//! Command-line front end.
//!
//! Exit codes: 0 success, 2 input parse failure, 3 model or invariant
//! violation, 4 resource cap exceeded. Every output file is written with LF
//! line endings and fixed formatting, so identical arguments give
//! byte-identical files.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::calibration::totals_from_spreads;
use crate::config::{read_schedule_path, ParseError, ScenarioConfig};
use crate::error::Error;
use crate::oracle::{self, DEFAULT_NODES};
use crate::pmf::{PmfTable, DEFAULT_CELL_CAP};
use crate::polya_urn::BetaParams;
use crate::simulation::{run_scenario, Scenario};
use crate::urn_chain::{invert_chain, joint_pmf_k_capped, sample_chain};

#[derive(Debug, Parser)]
#[command(name = "urnchain", version, about = "Pólya urn chains for dependent group defaults")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PmfMode {
    Exact,
    Quadrature,
    Mc,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the monthly updating scenario and write per-month total PDs.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
        /// Output CSV path, `-` for standard output.
        #[arg(long, default_value = "-")]
        out: PathBuf,
        /// Use this reinforcement for every group.
        #[arg(long)]
        reinforcement: Option<f64>,
    },
    /// Print spread, total PD and idiosyncratic PD per group for a month.
    Calibrate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        month: u32,
    },
    /// Joint law of the default counts.
    Pmf {
        /// Group sizes, e.g. `3,4`. Defaults to the config's group sizes.
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<u64>>,
        /// Beta priors as `alpha:beta` pairs, e.g. `2:5,1:3`.
        #[arg(long, value_delimiter = ',', conflicts_with = "config")]
        priors: Option<Vec<String>>,
        /// Take priors from a scenario: Beta(m/s, (1-m)/s) with m the
        /// calibrated idiosyncratic PD at `--month`.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        month: u32,
        #[arg(long)]
        reinforcement: Option<f64>,
        #[arg(long, value_enum, default_value_t = PmfMode::Exact)]
        mode: PmfMode,
        #[arg(long, default_value_t = 1_000_000)]
        replicates: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_NODES)]
        nodes: usize,
        /// Worker threads for Monte Carlo; results do not depend on it.
        #[arg(long)]
        threads: Option<usize>,
        /// Largest table (in cells) enumerated exactly.
        #[arg(long, default_value_t = DEFAULT_CELL_CAP)]
        cap: u128,
        #[arg(long, default_value = "-")]
        out: PathBuf,
        /// Per-cell Monte Carlo report (mc mode only).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Draw idiosyncratic PDs, totals and increments from the chain.
    Sample {
        #[arg(long, value_delimiter = ',', required = true)]
        priors: Vec<String>,
        #[arg(long, default_value_t = 1000)]
        draws: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "-")]
        out: PathBuf,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Model(Error),
    #[error("{0}")]
    Io(#[from] io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Model(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Usage(_) => 2,
            CliError::Model(Error::ResourceCap { .. }) => 4,
            CliError::Model(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn open_output(path: &Path) -> io::Result<Box<dyn Write>> {
    if path.as_os_str() == "-" {
        Ok(Box::new(BufWriter::new(io::stdout().lock())))
    } else {
        Ok(Box::new(BufWriter::new(File::create(path)?)))
    }
}

fn load_scenario(config: &Path, reinforcement: Option<f64>) -> CliResult<Scenario> {
    let cfg = ScenarioConfig::from_path(config)?;
    let scenario = cfg.to_scenario()?;
    Ok(match reinforcement {
        Some(s) => scenario.with_reinforcement(s)?,
        None => scenario,
    })
}

pub fn parse_priors(raw: &[String]) -> CliResult<Vec<BetaParams>> {
    raw.iter()
        .map(|p| {
            let (a, b) = p
                .split_once(':')
                .ok_or_else(|| CliError::Usage(format!("prior {p:?} is not `alpha:beta`")))?;
            let parse = |x: &str| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|e| CliError::Usage(format!("prior {p:?}: {e}")))
            };
            BetaParams::new(parse(a)?, parse(b)?).map_err(|e| CliError::Usage(e.to_string()))
        })
        .collect()
}

pub fn cmd_simulate(
    config: &Path,
    schedule: &Path,
    out: &Path,
    reinforcement: Option<f64>,
) -> CliResult<()> {
    let scenario = load_scenario(config, reinforcement)?;
    let schedule = read_schedule_path(schedule)?;
    for g in &scenario.groups {
        eprintln!(
            "group {}: size {}, one-year spread {}, slope {}, reinforcement {}",
            g.name,
            g.size,
            g.curve.one_year_spread(),
            g.curve.monthly_slope(),
            g.reinforcement
        );
    }
    let result = run_scenario(&scenario, &schedule)?;
    let mut w = open_output(out)?;
    result.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

pub fn cmd_calibrate<W: Write>(config: &Path, month: u32, mut out: W) -> CliResult<()> {
    let scenario = load_scenario(config, None)?;
    let curves = scenario.curves();
    let totals = totals_from_spreads(&curves, month)?;
    let idio = invert_chain(&totals)?;
    writeln!(out, "group,spread,total_pd,idio_pd")?;
    for (i, g) in scenario.groups.iter().enumerate() {
        writeln!(
            out,
            "{},{:.6},{:.6},{:.6}",
            g.name,
            curves[i].spread_at_month(month)?,
            totals.as_slice()[i],
            idio.as_slice()[i]
        )?;
    }
    out.flush()?;
    Ok(())
}

/// Priors implied by a scenario at a given month: de Finetti shapes of an
/// urn holding the calibrated idiosyncratic PD as white mass.
pub fn scenario_priors(scenario: &Scenario, month: u32) -> CliResult<Vec<BetaParams>> {
    let totals = totals_from_spreads(&scenario.curves(), month)?;
    let idio = invert_chain(&totals)?;
    scenario
        .groups
        .iter()
        .zip(idio.as_slice())
        .map(|(g, &m)| {
            let urn = crate::polya_urn::UrnState::new(m, 1.0 - m, g.reinforcement)?;
            Ok(urn.de_finetti_params()?)
        })
        .collect()
}

pub struct PmfRequest {
    pub sizes: Vec<u64>,
    pub priors: Vec<BetaParams>,
    pub mode: PmfMode,
    pub replicates: u64,
    pub seed: u64,
    pub nodes: usize,
    pub threads: Option<usize>,
    pub cap: u128,
}

/// Computes the table and, in Monte Carlo mode, the per-cell reports.
pub fn compute_pmf(req: &PmfRequest) -> CliResult<(PmfTable, Option<oracle::McTable>)> {
    if req.sizes.len() != req.priors.len() {
        return Err(CliError::Usage(format!(
            "{} sizes but {} priors",
            req.sizes.len(),
            req.priors.len()
        )));
    }
    match req.mode {
        PmfMode::Exact => Ok((joint_pmf_k_capped(&req.sizes, &req.priors, req.cap)?, None)),
        PmfMode::Quadrature => {
            if req.sizes.len() > 3 {
                return Err(CliError::Model(Error::ResourceCap {
                    cells: req.sizes.iter().map(|&n| n as u128 + 1).product(),
                    cap: req.cap,
                }));
            }
            Ok((oracle::quadrature_joint_pmf(&req.sizes, &req.priors, req.nodes)?, None))
        }
        PmfMode::Mc => {
            let run = || oracle::mc_joint_pmf(&req.sizes, &req.priors, req.replicates, req.seed);
            let mc = match req.threads {
                Some(t) => rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build()
                    .map_err(|e| CliError::Usage(e.to_string()))?
                    .install(run)?,
                None => run()?,
            };
            Ok((mc.table.clone(), Some(mc)))
        }
    }
}

pub fn cmd_sample(priors: &[BetaParams], draws: usize, seed: u64, out: &Path) -> CliResult<()> {
    let k = priors.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = open_output(out)?;
    let cols: Vec<String> = ["d", "total", "inc"]
        .iter()
        .flat_map(|p| (1..=k).map(move |i| format!("{p}_{i}")))
        .collect();
    writeln!(w, "draw,{}", cols.join(","))?;
    for draw in 0..draws {
        let s = sample_chain(priors, &mut rng)?;
        write!(w, "{draw}")?;
        for v in s
            .idio
            .as_slice()
            .iter()
            .chain(s.totals.as_slice())
            .chain(s.increments.as_slice())
        {
            write!(w, ",{v:.16e}")?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

pub fn execute(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Simulate {
            config,
            schedule,
            out,
            reinforcement,
        } => cmd_simulate(&config, &schedule, &out, reinforcement),
        Command::Calibrate { config, month } => cmd_calibrate(&config, month, io::stdout().lock()),
        Command::Pmf {
            sizes,
            priors,
            config,
            month,
            reinforcement,
            mode,
            replicates,
            seed,
            nodes,
            threads,
            cap,
            out,
            report,
        } => {
            let (sizes, priors) = match (priors, config) {
                (Some(raw), None) => {
                    let sizes = sizes.ok_or_else(|| CliError::Usage("--sizes is required with --priors".into()))?;
                    (sizes, parse_priors(&raw)?)
                }
                (None, Some(path)) => {
                    let scenario = load_scenario(&path, reinforcement)?;
                    let sizes = sizes.unwrap_or_else(|| scenario.groups.iter().map(|g| g.size).collect());
                    (sizes, scenario_priors(&scenario, month)?)
                }
                _ => return Err(CliError::Usage("give either --priors or --config".into())),
            };
            let req = PmfRequest {
                sizes,
                priors,
                mode,
                replicates,
                seed,
                nodes,
                threads,
                cap,
            };
            let (table, mc) = compute_pmf(&req)?;
            let mut w = open_output(&out)?;
            table.write_csv(&mut w)?;
            w.flush()?;
            if let Some(mc) = mc {
                let path = match report {
                    Some(p) => p,
                    None if out.as_os_str() != "-" => {
                        let mut p = out.clone().into_os_string();
                        p.push(".report.csv");
                        PathBuf::from(p)
                    }
                    None => return Ok(()),
                };
                let mut w = open_output(&path)?;
                oracle::write_reports_csv(&mc, &mut w)?;
                w.flush()?;
            }
            Ok(())
        }
        Command::Sample {
            priors,
            draws,
            seed,
            out,
        } => cmd_sample(&parse_priors(&priors)?, draws, seed, &out),
    }
}
