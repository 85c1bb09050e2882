//! Exact graph coloring from the command line.
//!
//! `zddcolor solve <instance.col>` colors one DIMACS instance;
//! `zddcolor batch <dir>` runs every `.col` file in a directory and
//! emits one CSV row per instance.

mod report;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use report::{csv_error_row, csv_row, RunReport, CSV_HEADER};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;
use zddcolor::bnp::{self, ContourRule, SolveConfig, Strategy};
use zddcolor::graph::Graph;

#[derive(Parser)]
#[command(name = "zddcolor", version, about = "Exact graph coloring by branch-and-price with ZDD pricing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a single DIMACS .col instance.
    Solve {
        /// Path to the instance file.
        instance: PathBuf,
        #[command(flatten)]
        options: Options,
    },
    /// Solve every .col instance in a directory; emits CSV.
    Batch {
        /// Directory containing .col files.
        dir: PathBuf,
        #[command(flatten)]
        options: Options,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StrategyArg {
    Dfs,
    Bfs,
    Cbfs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ContourArg {
    Depth,
    #[value(name = "positive-assignment")]
    PositiveAssignment,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Args)]
struct Options {
    /// Wall-clock limit for one instance, in seconds.
    #[arg(long, default_value_t = 600.0, env = "ZDDCOLOR_TIME_LIMIT")]
    time_limit: f64,
    /// Maximum ZDD node count during construction.
    #[arg(long, default_value_t = 100_000_000, env = "ZDDCOLOR_ZDD_BUDGET")]
    zdd_budget: usize,
    /// Subproblem selection strategy.
    #[arg(long, value_enum, default_value_t = StrategyArg::Cbfs, env = "ZDDCOLOR_STRATEGY")]
    strategy: StrategyArg,
    /// Contour rule for cbfs.
    #[arg(long, value_enum, default_value_t = ContourArg::PositiveAssignment, env = "ZDDCOLOR_CONTOUR")]
    contour: ContourArg,
    /// Dual-price threshold for keeping extra seeded columns.
    #[arg(long, default_value_t = 0.8, env = "ZDDCOLOR_POOL_FILTER")]
    pool_filter: f64,
    /// Admit every seeded column, skipping the dual-price filter.
    #[arg(long, env = "ZDDCOLOR_NO_POOL_FILTER")]
    no_pool_filter: bool,
    /// Seed for the randomized pool restarts.
    #[arg(long, default_value_t = 0, env = "ZDDCOLOR_SEED")]
    seed: u64,
    /// Report format for solve (batch always writes CSV).
    #[arg(long, value_enum, default_value_t = FormatArg::Text, env = "ZDDCOLOR_FORMAT")]
    format: FormatArg,
    /// Write the report here instead of stdout.
    #[arg(long, env = "ZDDCOLOR_OUTPUT")]
    output: Option<PathBuf>,
}

impl Options {
    fn solve_config(&self) -> SolveConfig {
        SolveConfig {
            time_limit: Duration::from_secs_f64(self.time_limit.max(0.0)),
            zdd_budget: self.zdd_budget,
            strategy: match self.strategy {
                StrategyArg::Dfs => Strategy::Dfs,
                StrategyArg::Bfs => Strategy::Bfs,
                StrategyArg::Cbfs => Strategy::Cbfs,
            },
            contour: match self.contour {
                ContourArg::Depth => ContourRule::Depth,
                ContourArg::PositiveAssignment => ContourRule::PositiveAssignment,
            },
            pool_filter: if self.no_pool_filter {
                None
            } else {
                Some(self.pool_filter)
            },
            seed: self.seed,
            ..SolveConfig::default()
        }
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.output {
            Some(path) => std::fs::write(path, text)
                .with_context(|| format!("writing {}", path.display()))?,
            None => print!("{text}"),
        }
        Ok(())
    }
}

fn instance_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn run_instance(path: &Path, options: &Options) -> Result<RunReport> {
    let bytes =
        std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let (graph, summary) = Graph::parse_dimacs(&bytes)
        .with_context(|| format!("parsing {}", path.display()))?;
    if summary.duplicate_edges > 0 || summary.self_loops > 0 {
        eprintln!(
            "warning: {}: dropped {} duplicate edge(s) and {} self-loop(s)",
            path.display(),
            summary.duplicate_edges,
            summary.self_loops
        );
    }
    let outcome = bnp::solve(&graph, &options.solve_config())?;
    Ok(RunReport::new(
        instance_name(path),
        graph.n(),
        graph.m(),
        options.seed,
        &outcome,
    ))
}

fn solve_command(path: &Path, options: &Options) -> Result<ExitCode> {
    let report = run_instance(path, options)?;
    let text = match options.format {
        FormatArg::Text => report.to_text(),
        FormatArg::Json => format!("{}\n", report.to_json()),
    };
    options.emit(&text)?;
    Ok(if report.optimal {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn batch_command(dir: &Path, options: &Options) -> Result<ExitCode> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading directory {}", dir.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "col"))
        .collect();
    paths.sort();
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(CSV_HEADER)?;
    for path in &paths {
        match run_instance(path, options) {
            Ok(report) => writer.write_record(csv_row(&report))?,
            Err(err) => {
                eprintln!("error: {}: {err:#}", path.display());
                writer.write_record(csv_error_row(&instance_name(path), &format!("{err:#}")))?
            }
        }
    }
    let csv_text = String::from_utf8(writer.into_inner()?)?;
    options.emit(&csv_text)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve { instance, options } => solve_command(instance, options),
        Command::Batch { dir, options } => batch_command(dir, options),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
