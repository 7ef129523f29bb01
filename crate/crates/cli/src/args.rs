use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use snowflake_core::lattice::parse_rational;
use snowflake_core::Rational;

#[derive(Debug, Parser)]
#[command(name = "snowflake", version, about = "Exact billiards in Koch snowflake prefractals")]
pub struct Cli {
    /// Largest level any subcommand may build.
    #[arg(long, global = true, default_value_t = 8)]
    pub max_level: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sides, addresses, vertex census and area of KS_n.
    Boundary(BoundaryArgs),
    /// Ternary expansion and orbit class of a basepoint.
    Classify(ClassifyArgs),
    /// Orbit from a basepoint on the base of KS_0.
    Orbit(OrbitArgs),
    /// Compatible sequence of orbits over KS_0..=KS_{n-max}.
    Sequence(SequenceArgs),
    /// Footprint of an orbit.
    Footprint(OrbitArgs),
    /// Straighten an address word.
    Straighten(StraightenArgs),
    /// Side addresses of KS_n.
    Address(AddressArgs),
    /// Closure of orbits in a lattice direction from random interior points.
    Probe(ProbeArgs),
    /// Period and length formulas against simulation.
    Study(StudyArgs),
    /// Genus of the translation surface of KS_n.
    Genus(GenusArgs),
    /// SVG picture of KS_n with an optional orbit.
    Render(RenderArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Svg,
    Text,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct BoundaryArgs {
    #[arg(long, default_value_t = 0)]
    pub level: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long, value_parser = rational_arg)]
    pub x0: Rational,
    /// Report ω_n and formula periods for n up to this level.
    #[arg(long, default_value_t = 8)]
    pub level: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct OrbitArgs {
    #[arg(long, default_value_t = 0)]
    pub level: usize,
    #[arg(long, value_parser = rational_arg, default_value = "1/2")]
    pub x0: Rational,
    /// Lattice direction `a,b`; defaults to π/3.
    #[arg(long, value_parser = direction_arg, allow_hyphen_values = true)]
    pub dir: Option<(i64, i64)>,
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SequenceArgs {
    #[arg(long, value_parser = rational_arg, default_value = "1/2")]
    pub x0: Rational,
    #[arg(long, default_value_t = 4)]
    pub n_max: usize,
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct StraightenArgs {
    pub word: String,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct AddressArgs {
    #[arg(long, default_value_t = 1)]
    pub level: usize,
    /// 1-based side index; all sides when absent.
    #[arg(long)]
    pub side: Option<usize>,
    /// Look up the side index of this word instead.
    #[arg(long, conflicts_with = "side")]
    pub word: Option<String>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[arg(long, value_parser = direction_arg, allow_hyphen_values = true)]
    pub dir: (i64, i64),
    #[arg(long, default_value_t = 1)]
    pub level: usize,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct StudyArgs {
    /// Comma-separated items: `p/q`, `M(n)` or `random:COUNT:MAXDEN`.
    #[arg(long, default_value = "M(2)")]
    pub sample: String,
    #[arg(long, default_value_t = 4)]
    pub n_max: usize,
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct GenusArgs {
    #[arg(long, default_value_t = 0)]
    pub level: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long, default_value_t = 0)]
    pub level: usize,
    /// Draw the orbit from this basepoint.
    #[arg(long, value_parser = rational_arg)]
    pub x0: Option<Rational>,
    #[arg(long, value_parser = direction_arg, allow_hyphen_values = true, requires = "x0")]
    pub dir: Option<(i64, i64)>,
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: u64,
    /// Picture width in pixels.
    #[arg(long, default_value_t = 800.0)]
    pub width: f64,
    #[arg(long)]
    pub no_cells: bool,
    #[arg(long)]
    pub no_ghosts: bool,
    #[command(flatten)]
    pub output: Output,
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn direction_arg(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `a,b`, got `{s}`"))?;
    let a = a.trim().parse().map_err(|_| format!("bad component `{a}`"))?;
    let b = b.trim().parse().map_err(|_| format!("bad component `{b}`"))?;
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn clap_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn directions() {
        assert_eq!(direction_arg("-1,2"), Ok((-1, 2)));
        assert_eq!(direction_arg(" 3 , 0"), Ok((3, 0)));
        assert!(direction_arg("1").is_err());
        assert!(direction_arg("a,1").is_err());
    }
}
