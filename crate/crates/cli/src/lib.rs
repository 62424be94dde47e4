//! `ffc` command-line front end: single evaluations, protection curves,
//! trade-off scans, Monte Carlo checks and figure data, all as CSV.

pub mod commands;
pub mod config;
pub mod error;
pub mod figures;
pub mod format;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{parse_angle, parse_count, parse_real, Params};
pub use crate::error::{CliError, CliResult};
use crate::figures::FigureId;
pub use crate::format::Table;

#[derive(Debug, Parser)]
#[command(
    name = "ffc",
    version,
    about = "Feed-forward discrimination of damped qubit states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub params: ParamArgs,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Conventional scheme: Helstrom measurement after the channel.
    Helstrom,
    /// Protocol metrics at one strength triple.
    Protocol,
    /// State-protection strategy, as a curve over p or at a single --p.
    Protect,
    /// Optimal discrimination line over a strength lattice.
    Pareto {
        /// Also emit every lattice point.
        #[arg(long)]
        cloud: bool,
    },
    /// Optimal strength triple and its figures of merit.
    Optimal,
    /// Monte Carlo estimate alongside the exact values.
    Mc,
    /// Data series for one of the figures fig2..fig9.
    Figure {
        #[arg(value_parser = clap::value_parser!(FigureIdArg))]
        id: FigureIdArg,
    },
}

#[derive(Clone, Copy, Debug)]
pub struct FigureIdArg(pub FigureId);

impl std::str::FromStr for FigureIdArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.parse().map(FigureIdArg)
    }
}

#[derive(Debug, Default, Args)]
pub struct ParamArgs {
    /// Signal angle in radians or as kpi/n, e.g. 6pi/16.
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_angle)]
    pub theta: Option<f64>,
    /// Prior probability of the plus state; accepts a ratio such as 1/3.
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_real)]
    pub q_plus: Option<f64>,
    /// Damping magnitude.
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_real)]
    pub r: Option<f64>,
    /// Pre-measurement strength.
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_real)]
    pub p: Option<f64>,
    /// Post-measurement strength for branch 1.
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_real)]
    pub p1: Option<f64>,
    /// Post-measurement strength for branch 2.
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_real)]
    pub p2: Option<f64>,
    /// Points per axis (curves default 101, lattices 21).
    #[arg(long, global = true, value_parser = parse_count)]
    pub grid: Option<u64>,
    /// Monte Carlo shots.
    #[arg(long, global = true, value_parser = parse_count)]
    pub shots: Option<u64>,
    /// Monte Carlo seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write CSV here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// key=value file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

impl ParamArgs {
    fn resolve(&self) -> CliResult<Params> {
        let flags = Params {
            theta: self.theta,
            q_plus: self.q_plus,
            r: self.r,
            p: self.p,
            p1: self.p1,
            p2: self.p2,
            grid: self.grid,
            shots: self.shots,
            seed: self.seed,
            out: self.out.clone(),
        };
        Ok(match &self.config {
            Some(path) => flags.over(Params::from_file(path)?),
            None => flags,
        })
    }
}

/// Runs a parsed command and returns its table and resolved parameters.
pub fn execute(cli: &Cli) -> CliResult<(Table, Params)> {
    let params = cli.params.resolve()?;
    let table = match &cli.command {
        Command::Helstrom => commands::helstrom(&params)?,
        Command::Protocol => commands::protocol(&params)?,
        Command::Protect => commands::protect(&params)?,
        Command::Pareto { cloud } => commands::pareto(&params, *cloud)?,
        Command::Optimal => commands::optimal(&params)?,
        Command::Mc => commands::monte_carlo(&params)?,
        Command::Figure { id } => figures::figure_data(id.0, &params)?,
    };
    Ok((table, params))
}

pub fn run(cli: &Cli) -> CliResult<()> {
    let (table, params) = execute(cli)?;
    let csv = table.to_csv();
    match &params.out {
        Some(path) => std::fs::write(path, csv).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(csv.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

/// Parses `argv`, runs, and returns the process exit code. Diagnostics go to
/// standard error as a single line.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let text = e.to_string();
            let line = text
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("usage error");
            eprintln!("ffc: {}", line.trim_start_matches("error: "));
            return 2;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("ffc: {e}");
            e.exit_code()
        }
    }
}
