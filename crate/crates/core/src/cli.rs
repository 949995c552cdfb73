//! Command-line surface.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{stats_block, Analysis, Dataset, StatsBlock};
use crate::config::AnalysisConfig;
use crate::error::{Error, Result};
use crate::io::{read_prices, read_returns, write_prices, write_returns, Precision};
use crate::returns::{ReturnKind, ReturnMatrix};
use crate::solver::{solve_return_matrix, ProportionSolution};
use crate::statistics::WeightSystem;

const PRICE_DECIMALS: usize = 3;
const RETURN_DECIMALS: usize = 3;
const PROPORTION_DECIMALS: usize = 2;
const EXACT_RESIDUAL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(
    name = "notional",
    version,
    about = "Static-portfolio analytics over adjusted closing prices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Alpha-normalize every column and append the portfolio.
    Normalize(NormalizeArgs),
    /// Periodic returns in percent, portfolio last.
    Returns(ReturnsArgs),
    /// Solve for the portfolio's proportions from its returns.
    Solve(SolveArgs),
    /// Annualized mean, deviation, ratio and correlations.
    Stats(StatsArgs),
    /// One normalized price file per ticker, for charting.
    Plotdata(PlotdataArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Compound,
    Continuous,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputType {
    Prices,
    Returns,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Analysis config (TOML).
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Normalization label from the config; defaults to the first one.
    #[arg(long, value_name = "LABEL")]
    pub normalization: Option<String>,
}

#[derive(Debug, Args)]
pub struct NormalizeArgs {
    /// Adjusted price CSV.
    pub input: PathBuf,
    #[command(flatten)]
    pub common: Common,
    /// Output CSV; stdout when omitted.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Print shortest round-trip values instead of 3 decimals.
    #[arg(long)]
    pub full_precision: bool,
}

#[derive(Debug, Args)]
pub struct ReturnsArgs {
    /// Adjusted price CSV.
    pub input: PathBuf,
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value = "linear")]
    pub kind: KindArg,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub full_precision: bool,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Returns CSV in percent (portfolio last), or prices with `--input-type prices`.
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "returns")]
    pub input_type: InputType,
    #[command(flatten)]
    pub common: Common,
    /// Return kind when the input is prices.
    #[arg(long, value_enum, default_value = "linear")]
    pub kind: KindArg,
    /// Also write the solution as JSON.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Adjusted price CSV, or returns in percent with `--input-type returns`.
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "prices")]
    pub input_type: InputType,
    #[command(flatten)]
    pub common: Common,
    /// Also write the report as JSON.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlotdataArgs {
    /// Adjusted price CSV.
    pub input: PathBuf,
    #[command(flatten)]
    pub common: Common,
    /// Output directory, created if missing.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    /// Only the portfolio and securities it holds.
    #[arg(long)]
    pub holdings_only: bool,
    /// Ticker to leave out; may be repeated.
    #[arg(long, value_name = "TICKER")]
    pub exclude: Vec<String>,
    #[arg(long)]
    pub full_precision: bool,
}

fn load_config(path: Option<&Path>) -> Result<AnalysisConfig> {
    match path {
        Some(p) => AnalysisConfig::load(p),
        None => AnalysisConfig::from_toml(""),
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn load_analysis(input: &Path, common: &Common) -> Result<(Analysis, AnalysisConfig)> {
    let config = load_config(common.config.as_deref())?;
    let columns = read_prices(open(input)?)?;
    let dataset = Dataset::from_columns(columns, &config)?;
    Ok((Analysis::new(dataset, &config)?, config))
}

fn return_kind(analysis: &Analysis, kind: KindArg, label: Option<&str>) -> Result<ReturnKind> {
    Ok(match kind {
        KindArg::Compound => ReturnKind::Compound,
        KindArg::Continuous => ReturnKind::Continuous,
        KindArg::Linear => ReturnKind::Linear(analysis.normalization(label)?.normalization.clone()),
    })
}

fn precision(full: bool, decimals: usize) -> Precision {
    if full {
        Precision::RoundTrip
    } else {
        Precision::Decimals(decimals)
    }
}

/// Runs `f` against the `--out` file or stdout.
fn with_output<F>(out: Option<&Path>, stdout: &mut dyn Write, f: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            f(&mut w)?;
            w.flush()?;
            Ok(())
        }
        None => f(stdout),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| Error::Io(io::Error::other(e)))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Normalize(a) => normalize(a, stdout),
        Command::Returns(a) => returns(a, stdout),
        Command::Solve(a) => solve(a, stdout),
        Command::Stats(a) => stats(a, stdout),
        Command::Plotdata(a) => plotdata(a),
    }
}

fn normalize(a: NormalizeArgs, stdout: &mut dyn Write) -> Result<()> {
    let (analysis, _) = load_analysis(&a.input, &a.common)?;
    let n = analysis.normalization(a.common.normalization.as_deref())?;
    let series = analysis.normalized(&n.normalization)?;
    let p = precision(a.full_precision, PRICE_DECIMALS);
    with_output(a.out.as_deref(), stdout, |w| write_prices(w, &series, p))
}

fn returns(a: ReturnsArgs, stdout: &mut dyn Write) -> Result<()> {
    let (analysis, _) = load_analysis(&a.input, &a.common)?;
    let kind = return_kind(&analysis, a.kind, a.common.normalization.as_deref())?;
    let r = analysis.returns(&kind)?;
    let p = precision(a.full_precision, RETURN_DECIMALS);
    with_output(a.out.as_deref(), stdout, |w| write_returns(w, &r, p))
}

fn solve(a: SolveArgs, stdout: &mut dyn Write) -> Result<()> {
    let r = match a.input_type {
        InputType::Returns => read_returns(open(&a.input)?)?,
        InputType::Prices => {
            let (analysis, _) = load_analysis(&a.input, &a.common)?;
            let kind = return_kind(&analysis, a.kind, a.common.normalization.as_deref())?;
            analysis.returns(&kind)?
        }
    };
    let solution = solve_return_matrix(&r)?;
    stdout.write_all(format_solution(&solution).as_bytes())?;
    if let Some(path) = &a.out {
        write_json(path, &solution)?;
    }
    Ok(())
}

fn format_percent_row(values: impl IntoIterator<Item = f64>, decimals: usize) -> String {
    values
        .into_iter()
        .map(|v| Precision::Decimals(decimals).format(v * 100.0))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Tickers, then proportions in percent with the relative error, then both
/// residuals.
pub fn format_solution(s: &ProportionSolution) -> String {
    let error = if s.residual_abs < EXACT_RESIDUAL {
        "error < 1e-12".to_string()
    } else {
        format!("error {:.1}%", s.residual_rel * 100.0)
    };
    format!(
        "{}\n{}, {error}\nresidual: relative {:.4}%, absolute {:.3e}\n",
        s.tickers.join(" "),
        format_percent_row(s.proportions.iter().copied(), PROPORTION_DECIMALS),
        s.residual_rel * 100.0,
        s.residual_abs,
    )
}

#[derive(Debug, Serialize)]
struct StatsOutput {
    periods: usize,
    periods_per_year: f64,
    blocks: Vec<StatsBlock>,
}

fn stats(a: StatsArgs, stdout: &mut dyn Write) -> Result<()> {
    let output = match a.input_type {
        InputType::Prices => {
            let (analysis, _) = load_analysis(&a.input, &a.common)?;
            StatsOutput {
                periods: analysis.sampler.periods(),
                periods_per_year: analysis.periods_per_year,
                blocks: analysis.stats_blocks()?,
            }
        }
        InputType::Returns => {
            let config = load_config(a.common.config.as_deref())?;
            let r: ReturnMatrix = read_returns(open(&a.input)?)?;
            let weights: WeightSystem = config.statistics.weights_for(r.periods())?;
            let ppy = config.statistics.periods_per_year;
            StatsOutput {
                periods: r.periods(),
                periods_per_year: ppy,
                blocks: vec![stats_block(
                    a.input.display().to_string(),
                    &r,
                    None,
                    &weights,
                    ppy,
                )?],
            }
        }
    };
    stdout.write_all(format_stats(&output).as_bytes())?;
    if let Some(path) = &a.out {
        write_json(path, &output)?;
    }
    Ok(())
}

fn format_stats(output: &StatsOutput) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} periods, annualized by {}",
        output.periods, output.periods_per_year
    );
    for block in &output.blocks {
        let cols = &block.annualized.columns;
        let _ = writeln!(s, "\n{}", block.title);
        let _ = write!(s, "{:<8}", "");
        for c in cols {
            let _ = write!(s, "{:>9}", c.ticker);
        }
        s.push('\n');
        if let Some(p) = &block.proportions {
            let _ = write!(s, "{:<8}", "p");
            for v in &p.proportions {
                let _ = write!(s, "{:>8}%", Precision::Decimals(2).format(v * 100.0));
            }
            let _ = writeln!(s, "{:>8}%", "100.00");
        }
        let _ = write!(s, "{:<8}", "e");
        for c in cols {
            let _ = write!(s, "{:>8}%", Precision::Decimals(2).format(c.mean * 100.0));
        }
        s.push('\n');
        let _ = write!(s, "{:<8}", "sigma");
        for c in cols {
            let _ = write!(
                s,
                "{:>8}%",
                Precision::Decimals(2).format(c.std_dev * 100.0)
            );
        }
        s.push('\n');
        let _ = write!(s, "{:<8}", "e/sigma");
        for c in cols {
            let ratio = c
                .ratio
                .map_or("n/a".to_string(), |r| Precision::Decimals(3).format(r));
            let _ = write!(s, "{ratio:>9}");
        }
        s.push('\n');
        let _ = write!(s, "correlation\n{:<8}", "");
        for t in &block.correlation_tickers {
            let _ = write!(s, "{t:>9}");
        }
        s.push('\n');
        for (t, row) in block.correlation_tickers.iter().zip(&block.correlation) {
            let _ = write!(s, "{t:<8}");
            for c in row {
                let v = c.map_or("n/a".to_string(), |c| Precision::Decimals(3).format(c));
                let _ = write!(s, "{v:>9}");
            }
            s.push('\n');
        }
    }
    s
}

fn plotdata(a: PlotdataArgs) -> Result<()> {
    let (analysis, config) = load_analysis(&a.input, &a.common)?;
    let n = analysis.normalization(a.common.normalization.as_deref())?;
    let holdings = analysis.dataset.holdings();
    let p = precision(a.full_precision, PRICE_DECIMALS);
    fs::create_dir_all(&a.out)?;
    for series in analysis.normalized(&n.normalization)? {
        let label = series.label();
        let is_portfolio = label == config.portfolio.name;
        if a.exclude.iter().any(|e| e == label)
            || (a.holdings_only && !is_portfolio && !holdings.iter().any(|h| h == label))
        {
            continue;
        }
        let mut w = BufWriter::new(File::create(a.out.join(format!("{label}.csv")))?);
        write_prices(&mut w, std::slice::from_ref(&series), p)?;
        w.flush()?;
    }
    Ok(())
}
