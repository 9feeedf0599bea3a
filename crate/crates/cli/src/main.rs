use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fsm_core::genbench::{oracle_mine_with, OracleConfig};
use fsm_core::{
    generate, mine, parse_tlf, write_tlf, CompressionFlags, GeneratorConfig, GraphCollection, MiningConfig, Mode,
    Support, VerificationPosition,
};

/// Frequent subgraph mining over TLF graph collections.
#[derive(Parser, Debug)]
#[command(name = "fsm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Mine frequent patterns and write the result file.
    Mine(MineArgs),
    /// Write a synthetic benchmark collection as TLF.
    Generate(GenerateArgs),
    /// Mine with the brute-force reference miner.
    Oracle(OracleArgs),
    /// Mine with both miners and compare; exit 0 iff the outputs are identical.
    Check(CheckArgs),
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct SupportArgs {
    /// Minimum support as a fraction of the input graphs, in (0, 1].
    #[arg(long)]
    min_support: Option<f64>,
    /// Minimum number of graphs a pattern must occur in.
    #[arg(long)]
    min_frequency: Option<usize>,
}

impl SupportArgs {
    fn support(&self) -> Support {
        match (self.min_support, self.min_frequency) {
            (Some(s), _) => Support::Relative(s),
            (None, Some(f)) => Support::Absolute(f),
            (None, None) => unreachable!("clap requires one support flag"),
        }
    }
}

#[derive(Args, Debug)]
struct ModeArgs {
    /// Treat edges as directed (default).
    #[arg(long, conflicts_with = "undirected")]
    directed: bool,
    /// Treat edges as undirected.
    #[arg(long)]
    undirected: bool,
}

impl ModeArgs {
    fn mode(&self) -> Mode {
        if self.undirected {
            Mode::Undirected
        } else {
            Mode::Directed
        }
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Verify {
    PreReport,
    PostCombine,
    PostFilter,
}

impl From<Verify> for VerificationPosition {
    fn from(v: Verify) -> Self {
        match v {
            Verify::PreReport => VerificationPosition::PreReport,
            Verify::PostCombine => VerificationPosition::PostCombine,
            Verify::PostFilter => VerificationPosition::PostFilter,
        }
    }
}

fn parse_compression(list: &str) -> Result<CompressionFlags, String> {
    let mut flags = CompressionFlags::none();
    for item in list.split(',').map(str::trim) {
        match item {
            "none" => {}
            "all" => flags = CompressionFlags::all(),
            "patterns" => flags.patterns = true,
            "embeddings" => flags.embeddings = true,
            "graphs" => flags.graphs = true,
            other => {
                return Err(format!(
                    "unknown compression target `{other}` (expected none, patterns, embeddings, graphs or all)"
                ))
            }
        }
    }
    Ok(flags)
}

#[derive(Args, Debug)]
struct EngineArgs {
    /// Number of worker partitions [default: available parallelism].
    #[arg(long)]
    workers: Option<usize>,
    /// Where minimality verification runs.
    #[arg(long, value_enum, default_value = "post-combine")]
    verify: Verify,
    /// Comma-separated compression targets: none, patterns, embeddings, graphs, all.
    #[arg(long, default_value = "all", value_parser = parse_compression)]
    compress: CompressionFlags,
    /// Grow every pattern from every edge, ignoring the branch constraint.
    #[arg(long)]
    no_branch_check: bool,
    /// Stop after patterns with this many edges.
    #[arg(long)]
    max_edges: Option<usize>,
}

impl EngineArgs {
    fn config(&self, support: Support, mode: Mode) -> MiningConfig {
        let mut cfg = MiningConfig::new(support)
            .with_mode(mode)
            .with_verification(self.verify.into())
            .with_compression(self.compress)
            .with_branch_check(!self.no_branch_check)
            .with_max_edge_count(self.max_edges);
        if let Some(w) = self.workers {
            cfg = cfg.with_workers(w);
        }
        cfg
    }
}

#[derive(Args, Debug)]
struct OracleLimits {
    /// Refuse graphs whose enumeration would exceed this many edges.
    #[arg(long, default_value_t = 10)]
    edge_guard: usize,
    /// Drop labels too rare to be frequent before enumerating.
    #[arg(long)]
    prefilter: bool,
}

#[derive(Args, Debug)]
struct MineArgs {
    #[arg(long)]
    input: PathBuf,
    /// Result file [default: stdout].
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    support: SupportArgs,
    #[command(flatten)]
    mode: ModeArgs,
    #[command(flatten)]
    engine: EngineArgs,
    /// Write the metrics report here.
    #[arg(long)]
    metrics: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    /// Number of graphs.
    #[arg(long)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// TLF file [default: stdout].
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long)]
    input: PathBuf,
    /// Result file [default: stdout].
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    support: SupportArgs,
    #[command(flatten)]
    mode: ModeArgs,
    /// Largest pattern size to enumerate.
    #[arg(long)]
    max_edges: Option<usize>,
    #[command(flatten)]
    limits: OracleLimits,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    support: SupportArgs,
    #[command(flatten)]
    mode: ModeArgs,
    #[command(flatten)]
    engine: EngineArgs,
    #[command(flatten)]
    limits: OracleLimits,
    /// Write the engine's metrics report here.
    #[arg(long)]
    metrics: Option<PathBuf>,
}

fn read_collection(path: &Path) -> Result<GraphCollection> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_tlf(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, content).with_context(|| format!("writing {}", p.display())),
        None => std::io::stdout()
            .write_all(content.as_bytes())
            .context("writing to stdout"),
    }
}

fn oracle_text(c: &GraphCollection, support: Support, mode: Mode, max_edges: Option<usize>, limits: &OracleLimits) -> Result<String> {
    let mut cfg = OracleConfig::new(support.min_frequency(c.len())?, mode);
    cfg.max_pattern_edges = max_edges;
    cfg.edge_guard = limits.edge_guard;
    cfg.label_prefilter = limits.prefilter;
    Ok(oracle_mine_with(c, &cfg)?.to_result_file()?)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Mine(a) => {
            let c = read_collection(&a.input)?;
            let result = mine(&c, &a.engine.config(a.support.support(), a.mode.mode()))?;
            emit(a.output.as_deref(), &result.to_result_file()?)?;
            if let Some(path) = &a.metrics {
                emit(Some(path), &result.metrics.report())?;
            }
            Ok(true)
        }
        Command::Generate(a) => {
            let c = generate(&GeneratorConfig::new(a.count, a.seed))?;
            emit(a.output.as_deref(), &write_tlf(&c))?;
            Ok(true)
        }
        Command::Oracle(a) => {
            let c = read_collection(&a.input)?;
            let text = oracle_text(&c, a.support.support(), a.mode.mode(), a.max_edges, &a.limits)?;
            emit(a.output.as_deref(), &text)?;
            Ok(true)
        }
        Command::Check(a) => {
            let c = read_collection(&a.input)?;
            let support = a.support.support();
            let mode = a.mode.mode();
            let result = mine(&c, &a.engine.config(support, mode))?;
            if let Some(path) = &a.metrics {
                emit(Some(path), &result.metrics.report())?;
            }
            let mined = result.to_result_file()?;
            let expected = oracle_text(&c, support, mode, a.engine.max_edges, &a.limits)?;
            if mined == expected {
                println!("identical: {} patterns", mined.lines().count());
                return Ok(true);
            }
            let (mut m, mut o) = (mined.lines(), expected.lines());
            for line in 1.. {
                match (m.next(), o.next()) {
                    (None, None) => break,
                    (x, y) if x == y => continue,
                    (x, y) => {
                        println!("first difference at line {line}");
                        println!("  mine:   {}", x.unwrap_or("<end>"));
                        println!("  oracle: {}", y.unwrap_or("<end>"));
                        break;
                    }
                }
            }
            println!(
                "mismatch: mine {} patterns, oracle {} patterns",
                mined.lines().count(),
                expected.lines().count()
            );
            Ok(false)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
