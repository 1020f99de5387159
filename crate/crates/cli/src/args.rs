//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const DEFAULT_SEED: u64 = 2005;
pub const OUT_DIR_ENV: &str = "QDARWIN_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "qdarwin",
    version,
    about = "Partial information plots and redundancy of environmental records"
)]
pub struct Cli {
    /// Worker threads for Monte Carlo averaging (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the CSV series behind one of the figures.
    Figure(FigureArgs),
    /// Compute one averaged partial information curve.
    Pip(PipArgs),
    /// Report the redundancy of a decoherence profile.
    Redundancy(RedundancyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureId {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
}

impl FigureId {
    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
        }
    }
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    pub id: FigureId,

    /// Output directory.
    #[arg(long, env = OUT_DIR_ENV, default_value = ".")]
    pub out: PathBuf,

    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Haar states per curve for the sampled series of fig2.
    #[arg(long, default_value_t = 500, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,

    /// Purity of the decohered system state.
    #[arg(long, default_value_t = 0.5, value_parser = parse_p0)]
    pub p0: f64,

    /// Number of environments for fig3 and fig4.
    #[arg(long, default_value_t = 32, value_parser = clap::value_parser!(u64).range(1..=127))]
    pub n_env: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PipKind {
    Haar,
    Unimodal,
    Bimodal,
    Poisson,
    Empirical,
}

impl PipKind {
    pub fn name(self) -> &'static str {
        match self {
            PipKind::Haar => "haar",
            PipKind::Unimodal => "unimodal",
            PipKind::Bimodal => "bimodal",
            PipKind::Poisson => "poisson",
            PipKind::Empirical => "empirical",
        }
    }
}

#[derive(Debug, Args)]
pub struct PipArgs {
    pub kind: PipKind,

    /// Number of environments (haar, unimodal, bimodal, poisson).
    #[arg(long, short = 'n', value_parser = clap::value_parser!(u64).range(1..=127))]
    pub n_env: Option<u64>,

    /// Single-environment d-factor (unimodal, bimodal); accepts `inf`.
    #[arg(long, value_parser = parse_d)]
    pub d0: Option<f64>,

    /// Environments carrying `d0` (bimodal).
    #[arg(long)]
    pub n_useful: Option<u64>,

    /// Comma-separated d-factors (empirical); accepts `inf`.
    #[arg(long, value_parser = parse_d_list)]
    pub d_list: Option<DList>,

    /// Sample instead of computing exactly (haar: states; empirical: subsets per m).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: Option<u64>,

    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    #[arg(long, default_value_t = 0.5, value_parser = parse_p0)]
    pub p0: f64,

    /// Output CSV path; a manifest is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistKind {
    Unimodal,
    Bimodal,
    Exponential,
}

#[derive(Debug, Args)]
pub struct RedundancyArgs {
    /// Comma-separated d-factors; accepts `inf`.
    #[arg(long, value_parser = parse_d_list, conflicts_with = "dist", required_unless_present = "dist")]
    pub d_list: Option<DList>,

    /// Build the profile from a distribution instead of a list.
    #[arg(long, requires = "n_env")]
    pub dist: Option<DistKind>,

    #[arg(long, short = 'n', value_parser = clap::value_parser!(u64).range(1..=127))]
    pub n_env: Option<u64>,

    #[arg(long, value_parser = parse_d)]
    pub d0: Option<f64>,

    #[arg(long)]
    pub n_useful: Option<u64>,

    /// Information deficit allowed per part, in (0, 1).
    #[arg(long, default_value_t = 0.1, value_parser = parse_delta)]
    pub delta: f64,

    #[arg(long, default_value_t = 0.5, value_parser = parse_p0)]
    pub p0: f64,

    /// Seed for the exponential distribution.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Output JSON path; the report is printed to stdout as well.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DList(pub Vec<f64>);

pub fn parse_d(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("`{s}` is not a number or `inf`"))?;
    if v.is_nan() || v < 0.0 {
        return Err(format!("d-factors must lie in [0, inf], got `{s}`"));
    }
    Ok(v)
}

fn parse_d_list(s: &str) -> Result<DList, String> {
    let d = s.split(',').map(parse_d).collect::<Result<Vec<_>, _>>()?;
    if d.len() > 127 {
        return Err(format!("at most 127 environments, got {}", d.len()));
    }
    Ok(DList(d))
}

fn parse_p0(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if !(0.5..=1.0).contains(&v) {
        return Err(format!("p0 must lie in [0.5, 1], got {v}"));
    }
    Ok(v)
}

fn parse_delta(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if !(v > 0.0 && v < 1.0) {
        return Err(format!("delta must lie in (0, 1), got {v}"));
    }
    Ok(v)
}
