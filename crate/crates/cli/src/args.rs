//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use geograms_core::engine::{RunMode, DEFAULT_MAX_STEPS};
use geograms_core::geodesics::MetricKind;
use geograms_core::triple_store::Subsumption;

#[derive(Debug, Parser)]
#[command(name = "geograms", version, about = "Grammar-constrained geodesics over semantic networks")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Text, global = true)]
    pub output: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a grammar and print the recorded paths.
    Paths(PathsArgs),
    /// Compute one geodesic metric.
    Metric(MetricArgs),
    /// Run a grammar and write its paths as triples.
    Encode(EncodeArgs),
    /// Compare the unconstrained grammar with plain BFS on every pair.
    OracleCheck(OracleArgs),
    /// Report structural problems of a grammar.
    ValidateGrammar(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GrammarFormat {
    Dsl,
    Triples,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    ShortestOnly,
    AllPaths,
}

impl From<ModeArg> for RunMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::ShortestOnly => RunMode::ShortestOnly,
            ModeArg::AllPaths => RunMode::AllPaths,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SubsumptionArg {
    Closure,
    SingleHop,
}

impl From<SubsumptionArg> for Subsumption {
    fn from(s: SubsumptionArg) -> Self {
        match s {
            SubsumptionArg::Closure => Subsumption::Closure,
            SubsumptionArg::SingleHop => Subsumption::SingleHop,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    ShortestPath,
    Eccentricity,
    Radius,
    Diameter,
    Closeness,
    Betweenness,
}

impl From<MetricArg> for MetricKind {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::ShortestPath => MetricKind::ShortestPath,
            MetricArg::Eccentricity => MetricKind::Eccentricity,
            MetricArg::Radius => MetricKind::Radius,
            MetricArg::Diameter => MetricKind::Diameter,
            MetricArg::Closeness => MetricKind::Closeness,
            MetricArg::Betweenness => MetricKind::Betweenness,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct GraphArgs {
    /// N-Triples file; repeat to merge several.
    #[arg(long = "graph", required = true)]
    pub graphs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = SubsumptionArg::Closure)]
    pub subsumption: SubsumptionArg,
    /// Drop triples touching the rdf and rdfs namespaces before running.
    #[arg(long)]
    pub project: bool,
}

#[derive(Debug, Clone, Args)]
pub struct GrammarArgs {
    #[arg(long)]
    pub grammar: PathBuf,
    /// Defaults to `triples` for `.nt` files and `dsl` otherwise.
    #[arg(long, value_enum)]
    pub grammar_format: Option<GrammarFormat>,
}

#[derive(Debug, Clone, Args)]
pub struct EngineArgs {
    #[arg(long, env = "GEOGRAMS_MAX_STEPS", default_value_t = DEFAULT_MAX_STEPS, value_parser = positive)]
    pub max_steps: usize,
    #[arg(long, default_value_t = 1, value_parser = positive)]
    pub threads: usize,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Clone, Args)]
pub struct UniverseArgs {
    /// Vertices the metric ranges over, comma separated or repeated.
    /// Defaults to the instances sharing a type with the entry resource.
    #[arg(long, value_delimiter = ',')]
    pub vertices: Vec<String>,
}

#[derive(Debug, Args)]
pub struct PathsArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub grammar: GrammarArgs,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[arg(long, value_enum, default_value_t = ModeArg::AllPaths)]
    pub mode: ModeArg,
    /// Rebind the entry resource.
    #[arg(long)]
    pub from: Option<String>,
    /// Rebind the exit resource.
    #[arg(long)]
    pub to: Option<String>,
}

#[derive(Debug, Args)]
pub struct MetricArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub grammar: GrammarArgs,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[command(flatten)]
    pub universe: UniverseArgs,
    #[arg(long, value_enum)]
    pub metric: MetricArg,
    /// Subject of eccentricity, closeness and betweenness; defaults to the
    /// entry resource.
    #[arg(long)]
    pub vertex: Option<String>,
    /// Shortest-path source; defaults to the entry resource.
    #[arg(long)]
    pub from: Option<String>,
    /// Shortest-path target; defaults to the exit resource.
    #[arg(long)]
    pub to: Option<String>,
    /// Answer from an encoded path store instead of running walkers.
    #[arg(long)]
    pub encoded: Option<PathBuf>,
    /// Grammar resource the encoded walkers point at.
    #[arg(long)]
    pub grammar_id: Option<String>,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub grammar: GrammarArgs,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[command(flatten)]
    pub universe: UniverseArgs,
    /// Encode an AllPaths run for every ordered pair of the universe.
    #[arg(long)]
    pub all_pairs: bool,
    #[arg(long, value_enum, default_value_t = ModeArg::AllPaths)]
    pub mode: ModeArg,
    #[arg(long)]
    pub grammar_id: Option<String>,
    /// Namespace for walker, path and segment nodes.
    #[arg(long)]
    pub namespace: Option<String>,
    /// Destination file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub engine: EngineArgs,
    /// Defaults to every vertex of the projection.
    #[arg(long, value_delimiter = ',')]
    pub vertices: Vec<String>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub grammar: GrammarArgs,
}
