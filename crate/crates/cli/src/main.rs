use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use lasso_tradeoff::lasso_sim::{CoefficientLayout, LambdaGrid, DEFAULT_MAX_CELLS};
use lasso_tradeoff::Prior;

mod commands;

pub const TOOL: &str = "lasso-tradeoff";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = TOOL, version, about = "Lasso TPP-FDP trade-off curves and simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Boundary curve q*(u) for a problem shape.
    Boundary(BoundaryArgs),
    /// State-evolution prediction of (TPP, FDP) along an α grid.
    SeCurve(SeCurveArgs),
    /// Monte Carlo Lasso paths with trace and event files.
    Simulate(SimulateArgs),
    /// Exhaustive ℓ0-penalised best subset on small problems.
    L0(L0Args),
    /// Recompute path events from a trace file.
    Events(EventsArgs),
}

#[derive(Debug, clap::Args)]
pub struct BoundaryArgs {
    #[arg(long)]
    pub delta: f64,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 200)]
    pub n_points: usize,
    #[arg(long)]
    pub out: PathBuf,
}

/// α grid: `lo:hi:count` (evenly spaced) or a comma-separated list.
/// `auto` spans from just above the smallest admissible α to 20.
#[derive(Debug, Clone, PartialEq)]
pub enum AlphaSpec {
    Auto,
    Linspace { lo: f64, hi: f64, count: usize },
    List(Vec<f64>),
}

impl std::str::FromStr for AlphaSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if s == "auto" {
            return Ok(AlphaSpec::Auto);
        }
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("bad number `{t}`: {e}"));
        if let [lo, hi, count] = s.split(':').collect::<Vec<_>>()[..] {
            let count = count.trim().parse().map_err(|e| format!("bad count `{count}`: {e}"))?;
            return Ok(AlphaSpec::Linspace {
                lo: num(lo)?,
                hi: num(hi)?,
                count,
            });
        }
        if s.contains(':') {
            return Err(format!("expected `lo:hi:count` or a comma list, got `{s}`"));
        }
        s.split(',')
            .map(num)
            .collect::<std::result::Result<_, _>>()
            .map(AlphaSpec::List)
    }
}

impl std::fmt::Display for AlphaSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AlphaSpec::Auto => write!(f, "auto"),
            AlphaSpec::Linspace { lo, hi, count } => write!(f, "{lo}:{hi}:{count}"),
            AlphaSpec::List(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "{}", parts.join(","))
            }
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct SeCurveArgs {
    /// Prior as `value:mass,...`; leftover mass sits at zero.
    #[arg(long)]
    pub prior: Prior,
    #[arg(long)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub sigma: f64,
    #[arg(long, default_value = "auto")]
    pub alpha: AlphaSpec,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum StopArg {
    GridEnd,
    FullPower,
    EventsResolved,
}

#[derive(Debug, clap::Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub prior: Prior,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// `log:hi:lo:count` (bounds may be `auto` or `auto/d`) or a comma list.
    #[arg(long, default_value = "log:auto:auto/100:100")]
    pub grid: LambdaGrid,
    #[arg(long)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; output does not depend on it.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Place `round(mass·p)` copies of each atom instead of drawing iid.
    #[arg(long)]
    pub exact_counts: bool,
    /// Bisect grid intervals whose support size jumps by more than this; 0 disables.
    #[arg(long, default_value_t = 5)]
    pub refine_jump: usize,
    #[arg(long, value_enum, default_value_t = StopArg::GridEnd)]
    pub stop: StopArg,
    #[arg(long, env = "LASSO_TRADEOFF_MAX_CELLS", default_value_t = DEFAULT_MAX_CELLS)]
    pub max_cells: usize,
    /// Trace file.
    #[arg(long)]
    pub out: PathBuf,
    /// Events file; defaults to the trace path with `.events.csv`.
    #[arg(long)]
    pub events_out: Option<PathBuf>,
}

/// `auto` or a positive value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaMode {
    Auto,
    Value(f64),
}

impl std::str::FromStr for LambdaMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "auto" => Ok(LambdaMode::Auto),
            t => t
                .parse()
                .map(LambdaMode::Value)
                .map_err(|e| format!("bad lambda `{t}`: {e}")),
        }
    }
}

impl std::fmt::Display for LambdaMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LambdaMode::Auto => write!(f, "auto"),
            LambdaMode::Value(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct L0Args {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub prior: Prior,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value = "auto")]
    pub lambda: LambdaMode,
    /// Constant `c` in the automatic λ.
    #[arg(long, default_value_t = 0.5)]
    pub c: f64,
    #[arg(long)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long)]
    pub exact_counts: bool,
    #[arg(long, default_value_t = 20)]
    pub max_p: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, clap::Args)]
pub struct EventsArgs {
    #[arg(long)]
    pub trace: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn layout(exact: bool) -> CoefficientLayout {
    if exact {
        CoefficientLayout::Exact
    } else {
        CoefficientLayout::Iid
    }
}

pub fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn check_reps(reps: usize) -> Result<()> {
    if reps == 0 {
        bail!("--reps must be at least 1");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Boundary(a) => commands::boundary(&a),
        Command::SeCurve(a) => commands::se_curve(&a),
        Command::Simulate(a) => commands::simulate(&a),
        Command::L0(a) => commands::l0(&a),
        Command::Events(a) => commands::events(&a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_specs() {
        assert_eq!("auto".parse::<AlphaSpec>().unwrap(), AlphaSpec::Auto);
        assert_eq!(
            "0.5:3:10".parse::<AlphaSpec>().unwrap(),
            AlphaSpec::Linspace {
                lo: 0.5,
                hi: 3.0,
                count: 10
            }
        );
        assert_eq!("1,2.5".parse::<AlphaSpec>().unwrap(), AlphaSpec::List(vec![1.0, 2.5]));
        for bad in ["1:2", "a,b", "1:2:x"] {
            assert!(bad.parse::<AlphaSpec>().is_err(), "{bad}");
        }
        assert_eq!("auto".parse::<LambdaMode>().unwrap(), LambdaMode::Auto);
        assert_eq!("0.3".parse::<LambdaMode>().unwrap(), LambdaMode::Value(0.3));
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
