//! `srm`: batch front end for the structural recovery model.
//!
//! ```text
//! srm [--config FILE] [--seed N] [--threads N] [--out-dir DIR] <command> [flags]
//! ```
//!
//! Commands: `curves`, `simulate`, `gen-data`, `cohort`, `correlate`, `fit`.
//! Each run writes `<command>.resolved.conf` into the output directory; the
//! file is a valid `--config` input reproducing the run.
//!
//! Exit codes: 0 success, 1 usage/config/I-O error, 2 invalid input data,
//! 3 degenerate computation.

mod commands;
mod config;
mod error;
mod fit_input;
mod values;

use std::path::PathBuf;
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};

use structural_recovery::cohort::Seniority;

use config::{ConfigFile, Resolver};
use error::{CliError, Result};
use values::{FloatList, PathArg, PathList, RatingList, TargetList};

#[derive(Parser, Debug)]
#[command(name = "srm", version, about = "Structural recovery model toolkit")]
struct Cli {
    /// Flat `key = value` config file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed for random streams.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for simulation; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory (created if missing).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Recovery and loss curves for a list of B values.
    Curves(CurvesArgs),
    /// Monte Carlo realizations of the correlated asset model.
    Simulate(SimulateArgs),
    /// Synthetic issuer, rating and event tables with a ground-truth manifest.
    GenData(GenDataArgs),
    /// Rolling monthly cohorts with withdrawal-adjusted default rates.
    Cohort(CohortArgs),
    /// Pearson correlation of cohort PD and mean recovery.
    Correlate(CorrelateArgs),
    /// Least-squares fit of B to binned loss.
    Fit(FitArgs),
}

#[derive(Args, Debug)]
pub struct CurvesArgs {
    /// Comma-separated B values, e.g. 0.2,0.6,1.0,1.4.
    #[arg(long, allow_hyphen_values = true)]
    b: Option<FloatList>,
    /// Number of PD points i/(n+1), i = 1..n [default: 99].
    #[arg(long)]
    grid_points: Option<usize>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    /// Maturity T in years.
    #[arg(long)]
    maturity: Option<f64>,
    #[arg(long)]
    v0: Option<f64>,
    /// Face value F [default: median of V(T)].
    #[arg(long)]
    face_value: Option<f64>,
    /// Firms per portfolio (K).
    #[arg(long)]
    firms: Option<usize>,
    /// Market realizations (M).
    #[arg(long)]
    realizations: Option<u64>,
}

#[derive(Args, Debug)]
pub struct GenDataArgs {
    /// Target compound parameter B; sets sigma.
    #[arg(long)]
    b: Option<f64>,
    /// Asset volatility, instead of --b.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<f64>,
    /// Model-maturity in whole years.
    #[arg(long)]
    maturity: Option<u32>,
    #[arg(long)]
    v0: Option<f64>,
    /// Rating buckets with target PDs, e.g. B1=0.05,Caa1=0.18.
    #[arg(long)]
    ratings: Option<TargetList>,
    #[arg(long)]
    withdrawal_prob: Option<f64>,
    #[arg(long)]
    issuers_per_rating: Option<usize>,
    /// First monthly start date.
    #[arg(long)]
    first: Option<NaiveDate>,
    /// Last monthly start date.
    #[arg(long)]
    last: Option<NaiveDate>,
    #[arg(long)]
    seniority: Option<Seniority>,
}

#[derive(Args, Debug)]
pub struct CohortArgs {
    /// Directory holding issuers.csv, ratings.csv and events.csv [default: out-dir].
    #[arg(long)]
    data_dir: Option<PathArg>,
    #[arg(long)]
    issuers: Option<PathArg>,
    /// Rating-history table.
    #[arg(long)]
    ratings_file: Option<PathArg>,
    #[arg(long)]
    events: Option<PathArg>,
    #[arg(long)]
    first: Option<NaiveDate>,
    #[arg(long)]
    last: Option<NaiveDate>,
    #[arg(long)]
    maturity: Option<u32>,
    /// Ratings selected at the start date, e.g. Caa1,Caa2,Caa3.
    #[arg(long)]
    ratings: Option<RatingList>,
    #[arg(long)]
    seniority: Option<Seniority>,
    /// One series per rating instead of one pooled series.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    split_ratings: Option<bool>,
}

#[derive(Args, Debug)]
pub struct CorrelateArgs {
    /// Cohort series from `srm cohort` [default: out-dir/cohorts.csv].
    #[arg(long)]
    series: Option<PathArg>,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    /// Comma-separated inputs: cohort series, simulate output, or pd,rr / pd,loss tables.
    #[arg(long)]
    input: Option<PathList>,
    /// Maturity in years per input, for the B-versus-T comparison.
    #[arg(long)]
    maturities: Option<FloatList>,
    #[arg(long)]
    bins: Option<usize>,
    #[arg(long)]
    min_count: Option<usize>,
    /// observed | unit
    #[arg(long)]
    domain: Option<String>,
    /// unweighted | by-count
    #[arg(long)]
    weighting: Option<String>,
    #[arg(long)]
    b_lower: Option<f64>,
    #[arg(long)]
    b_upper: Option<f64>,
}

#[derive(Debug)]
pub struct Globals {
    pub seed: u64,
    pub threads: Option<usize>,
    pub out_dir: PathBuf,
}

fn run(cli: Cli) -> Result<()> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let mut r = Resolver::new(&file);
    let globals = {
        let mut g = Resolver::new(&file);
        Globals {
            seed: g.value("seed", cli.seed, 1)?,
            threads: g.optional("threads", cli.threads)?,
            out_dir: g
                .value(
                    "out-dir",
                    cli.out_dir.map(|p| PathArg(p.display().to_string())),
                    PathArg(".".into()),
                )
                .map(|p| PathBuf::from(p.0))?,
        }
    };
    if globals.threads == Some(0) {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    std::fs::create_dir_all(&globals.out_dir).map_err(|e| CliError::io(&globals.out_dir, e))?;
    log::debug!("{globals:?}");
    match cli.command {
        Command::Curves(a) => commands::curves(a, &globals, &mut r),
        Command::Simulate(a) => commands::simulate_cmd(a, &globals, &mut r),
        Command::GenData(a) => commands::gen_data(a, &globals, &mut r),
        Command::Cohort(a) => commands::cohort(a, &globals, &mut r),
        Command::Correlate(a) => commands::correlate(a, &globals, &mut r),
        Command::Fit(a) => commands::fit(a, &globals, &mut r),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("srm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
