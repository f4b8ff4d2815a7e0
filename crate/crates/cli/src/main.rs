use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

mod commands;
mod table;

use table::Table;

#[derive(Parser, Debug)]
#[command(name = "hexpoly", version, about = "Exact computations for the hexagonal polygon model on the torus")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the table to FILE and a run manifest to FILE.manifest.json.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker thread cap.
    #[arg(long, global = true, env = "HEXPOLY_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
enum Command {
    /// Classify parameter points; each axis takes a value or a lo:hi:steps range.
    Phase(PhaseArgs),
    /// Two-point order parameter on the n x n torus.
    Corr(CorrArgs),
    /// Partition function on the n x n torus.
    Zn(ZnArgs),
    /// Characteristic polynomial data, 1-2 model and Ising conversions.
    Spectral(SpectralArgs),
    /// Infinite-volume decay table of the squared order parameter.
    Limit(LimitArgs),
    /// Run the self-check suite.
    Verify(VerifyArgs),
    /// Edge listing of a lattice or dimer graph.
    Graph(GraphArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct PhaseArgs {
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub beta: Option<String>,
    #[arg(long)]
    pub gamma: Option<String>,
    /// Range used for every axis not given explicitly.
    #[arg(long)]
    pub sweep: Option<String>,
    /// Relative band around the critical surfaces.
    #[arg(long, default_value_t = hexpoly::spectral::DEFAULT_CRITICAL_TOL)]
    pub tol: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct PointArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct CorrArgs {
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub point: PointArgs,
    /// Separation in path periods: `k` or `lo:hi`.
    #[arg(long, default_value = "1")]
    pub sep: String,
}

#[derive(Args, Debug, Serialize)]
pub struct ZnArgs {
    /// Torus sizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[command(flatten)]
    pub point: PointArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct SpectralArgs {
    #[arg(long, allow_negative_numbers = true, required_unless_present = "one_two")]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true, required_unless_present = "one_two")]
    pub beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true, required_unless_present = "one_two")]
    pub gamma: Option<f64>,
    /// 1-2 model parameters `a,b,c` instead of a polygon point.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["alpha", "beta", "gamma"])]
    pub one_two: Option<Vec<f64>>,
    /// Add the Ising couplings of the high-temperature expansion.
    #[arg(long)]
    pub ising: bool,
    /// Torus scan resolution.
    #[arg(long, default_value_t = 256)]
    pub grid: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct LimitArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long, default_value_t = hexpoly::limits::DEFAULT_GRID)]
    pub grid: usize,
    #[arg(long, default_value_t = hexpoly::limits::DEFAULT_MAX_SEP)]
    pub max_sep: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LevelArg {
    Fast,
    Full,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = LevelArg::Fast)]
    pub level: LevelArg,
    /// Flip one augmented-graph edge before the orientation audit.
    #[arg(long, hide = true)]
    pub corrupt_orientation: bool,
    #[arg(long, default_value_t = 20_240_601)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphKind {
    Hex,
    Fisher,
    Aug,
}

#[derive(Args, Debug, Serialize)]
pub struct GraphArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = GraphKind::Aug)]
    pub kind: GraphKind,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a Command,
    format: Format,
    tool_version: &'static str,
    wall_time_seconds: f64,
}

/// A command's table plus whether the run counts as successful.
pub struct Output {
    pub table: Table,
    pub ok: bool,
}

fn run(cli: &Cli) -> Result<bool> {
    if let Some(t) = cli.threads {
        if t == 0 {
            bail!("thread cap must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().context("configuring thread pool")?;
    }
    let start = Instant::now();
    let out = match &cli.command {
        Command::Phase(a) => commands::phase(a)?,
        Command::Corr(a) => commands::corr(a)?,
        Command::Zn(a) => commands::zn(a)?,
        Command::Spectral(a) => commands::spectral(a)?,
        Command::Limit(a) => commands::limit(a)?,
        Command::Verify(a) => commands::verify(a)?,
        Command::Graph(a) => commands::graph(a)?,
    };
    let text = match cli.format {
        Format::Csv => out.table.to_csv(),
        Format::Json => out.table.to_json(),
    };
    match &cli.out {
        None => print!("{text}"),
        Some(path) => {
            std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
            let manifest = Manifest {
                command: &cli.command,
                format: cli.format,
                tool_version: env!("CARGO_PKG_VERSION"),
                wall_time_seconds: start.elapsed().as_secs_f64(),
            };
            let mut mpath = path.clone().into_os_string();
            mpath.push(".manifest.json");
            std::fs::write(&mpath, serde_json::to_string_pretty(&manifest)? + "\n")
                .with_context(|| format!("writing {}", PathBuf::from(&mpath).display()))?;
        }
    }
    Ok(out.ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
