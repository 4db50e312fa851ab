//! The `subtag` command line: parameter generation, simulation, attacks and
//! code analysis. Every command writes one JSON document.

mod analyze;
mod attack;
pub mod reports;
mod setup;
mod simulate;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use subtag::adversary::AttackMode;
use subtag::network::Topology;
use subtag::params::{Loaded, ParamsFile};
use subtag::rng::Streams;

pub use reports::SchemaKind;

#[derive(Debug, Parser)]
#[command(name = "subtag", version, about = "Authentication of subspace codes over network coding")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Choose field moduli and a code and write a parameters file.
    Setup(SetupArgs),
    /// Tag a random subspace, send it through a network and verify everywhere.
    Simulate(SimulateArgs),
    /// Run substitution attacks by coalitions of verifiers.
    Attack(AttackArgs),
    /// Distances, minimal codewords and access structures of the code.
    Analyze(AnalyzeArgs),
    /// Build an elliptic-curve code and classify its coalitions.
    EcCode(EcCodeArgs),
    /// Print the JSON schema of a report.
    Schema {
        #[arg(value_enum)]
        kind: SchemaKind,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CodeKind {
    /// Reed-Solomon code at the points 0, 1, .. (or --points).
    Rs,
    /// Residue code of an elliptic curve.
    Ec,
    /// Uniformly random generator matrix (needs --seed).
    Random,
    /// Explicit generator given with --generator.
    Generator,
}

#[derive(Debug, Args)]
pub struct SetupArgs {
    #[arg(long)]
    pub q: u32,
    #[arg(long)]
    pub l: u32,
    /// Dimension of the source subspace.
    #[arg(long)]
    pub n: usize,
    /// Number of q-powers in a label; defaults to n.
    #[arg(long = "M")]
    pub m: Option<usize>,
    #[arg(long, value_enum)]
    pub code: CodeKind,
    /// Number of verifiers (code length).
    #[arg(long)]
    pub v: Option<usize>,
    #[arg(long)]
    pub kdim: Option<usize>,
    /// Reed-Solomon points as packed values, or curve points as x:y pairs.
    #[arg(long, value_delimiter = ',')]
    pub points: Option<Vec<String>>,
    #[arg(long)]
    pub a: Option<u32>,
    #[arg(long)]
    pub b: Option<u32>,
    /// Degree of the divisor for elliptic-curve codes.
    #[arg(long)]
    pub deg: Option<usize>,
    /// Rows separated by ';', entries by ','.
    #[arg(long)]
    pub generator: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub params: PathBuf,
    /// `butterfly`, `random-dag` or a topology file.
    #[arg(long, default_value = "butterfly")]
    pub topology: String,
    #[arg(long)]
    pub seed: u64,
    /// Replace the output of this node by a random packet.
    #[arg(long)]
    pub inject: Option<String>,
    /// Also write the tagged source packets here.
    #[arg(long)]
    pub packets: Option<PathBuf>,
    #[arg(long, requires = "packets")]
    pub binary: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Deterministic,
    Guess,
    Histogram,
}

impl From<ModeArg> for AttackMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Deterministic => AttackMode::Deterministic,
            ModeArg::Guess => AttackMode::Guess,
            ModeArg::Histogram => AttackMode::Histogram,
        }
    }
}

#[derive(Debug, Args)]
pub struct AttackArgs {
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub seed: u64,
    /// Verifier indices (1-based); repeat for a campaign.
    #[arg(long, required = true, value_parser = parse_indices)]
    pub coalition: Vec<Vec<usize>>,
    #[arg(long)]
    pub target: usize,
    #[arg(long, value_enum)]
    pub mode: ModeArg,
    /// Independent instances; defaults to 1, or 1000 for guessing.
    #[arg(long)]
    pub trials: Option<u64>,
    /// Restrict the coalition to the packets its members receive here.
    #[arg(long)]
    pub topology: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub params: PathBuf,
    /// Verifier index (1-based); all targets when omitted.
    #[arg(long)]
    pub target: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EcCodeArgs {
    #[arg(long)]
    pub q: u32,
    #[arg(long)]
    pub l: u32,
    #[arg(long)]
    pub a: u32,
    #[arg(long)]
    pub b: u32,
    #[arg(long)]
    pub deg: usize,
    /// Number of evaluation points; all affine points when omitted.
    #[arg(long)]
    pub v: Option<usize>,
    /// Evaluation points as x:y pairs.
    #[arg(long, value_delimiter = ',')]
    pub points: Option<Vec<String>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_indices(s: &str) -> Result<Vec<usize>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}")))
        .collect()
}

pub(crate) fn parse_points(list: &[String]) -> Result<Vec<[u32; 2]>> {
    list.iter()
        .map(|p| {
            let (x, y) = p.split_once(':').with_context(|| format!("point {p:?} is not x:y"))?;
            Ok([x.trim().parse()?, y.trim().parse()?])
        })
        .collect()
}

pub(crate) fn load_params(path: &Path) -> Result<Loaded> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file = ParamsFile::from_json(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(file.load()?)
}

/// A named topology or a topology file.
pub(crate) fn load_topology(spec: &str, streams: &Streams) -> Result<Topology> {
    Ok(match spec {
        "butterfly" => Topology::butterfly(),
        "random-dag" => Topology::random_dag(&mut streams.stream("topology")),
        path => {
            let text = fs::read_to_string(path).with_context(|| format!("reading topology {path}"))?;
            Topology::parse(&text)?
        }
    })
}

pub(crate) fn check_verifier(index: usize, v: usize) -> Result<()> {
    if index == 0 || index > v {
        bail!("verifier {index} out of range 1..={v}");
    }
    Ok(())
}

fn render<T: serde::Serialize>(report: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)? + "\n")
}

/// Runs a command and returns its JSON output with the requested path.
pub fn run(cli: Cli) -> Result<(String, Option<PathBuf>)> {
    Ok(match cli.command {
        Command::Setup(args) => (setup::run(&args)?.to_json(), args.out),
        Command::Simulate(args) => (render(&simulate::run(&args)?)?, args.out),
        Command::Attack(args) => (render(&attack::run(&args)?)?, args.out),
        Command::Analyze(args) => (render(&analyze::run(&args)?)?, args.out),
        Command::EcCode(args) => (render(&analyze::ec_code(&args)?)?, args.out),
        Command::Schema { kind } => (render(&reports::schema(kind))?, None),
    })
}
