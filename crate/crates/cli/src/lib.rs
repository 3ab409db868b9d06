//! The `netgame` command line.
//!
//! Every subcommand reads its inputs from files, writes one result to
//! standard output (or `--out`), and reports diagnostics on standard error.
//! Exit status is 0 on success, 1 for usage and input errors and 2 when a
//! computation fails.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::net::{Ipv4Addr, SocketAddr};
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use netgame::anarchy::{anarchy_report, summary, whatif};
use netgame::io::{
    export_dot, parse_cost_csv, parse_game, statistics_csv, summary_csv, write_report,
    GameDocument, SimulationReport, SummaryReport,
};
use netgame::simulator::{batch_statistics, simulate_batch_with, BatchStatistics};
use netgame::solvers::{
    best_graph_degree_with, best_graph_link_bias, construct_cost_matrix_with,
    stable_graph_link_bias, worst_stable_degree_with, SolverOptions, DEFAULT_NODE_BUDGET,
};
use netgame::{DegreeSequence, Game, Graph};
use netgame_service::{resolve_port, ServiceConfig};

#[derive(Debug, Parser)]
#[command(
    name = "netgame",
    version,
    about = "Price of anarchy in network formation games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve for the worst stable graph or the best coordinated graph.
    Solve {
        #[command(flatten)]
        game: GameArg,
        #[arg(long, value_enum)]
        target: Target,
        #[command(flatten)]
        budget: Budget,
        #[command(flatten)]
        out: Out,
    },
    /// Worst stable value, best value and price of anarchy.
    Anarchy {
        #[command(flatten)]
        game: GameArg,
        #[command(flatten)]
        budget: Budget,
        #[command(flatten)]
        out: Out,
    },
    /// Effect of removing one player, or of each player in turn.
    Whatif {
        #[command(flatten)]
        game: GameArg,
        /// Player to remove (1-based).
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..), conflicts_with = "all", required_unless_present = "all")]
        remove: Option<u64>,
        /// Remove every player in turn and report the Pareto set.
        #[arg(long)]
        all: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        budget: Budget,
        #[command(flatten)]
        out: Out,
    },
    /// Repeat the random link-formation process on a degree game.
    Simulate {
        #[command(flatten)]
        game: GameArg,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        runs: u64,
        #[arg(long)]
        seed: u64,
        /// Include every run's degree sequence in JSON output.
        #[arg(long)]
        include_runs: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        budget: Budget,
        #[command(flatten)]
        out: Out,
    },
    /// Build a link-bias game whose stable graph is closest to a degree sequence.
    ConstructCosts {
        /// Degree game document or a JSON array of targets.
        #[arg(long, value_name = "FILE")]
        degrees: PathBuf,
        #[command(flatten)]
        budget: Budget,
        #[command(flatten)]
        out: Out,
    },
    /// Write a graph as Graphviz DOT.
    Export {
        /// Graph JSON, or any report with a "graph" field.
        #[arg(long, value_name = "FILE")]
        graph: PathBuf,
        /// Output path; "-" for standard output.
        #[arg(long, value_name = "FILE")]
        dot: PathBuf,
        /// Comma-separated 1-based vertices to fill.
        #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u64).range(1..))]
        highlight: Vec<u64>,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long)]
        port: Option<u16>,
        /// Load sessions from and save them to this file.
        #[arg(long, value_name = "FILE")]
        snapshot: Option<PathBuf>,
        /// Estimated seconds above which requests become background jobs.
        #[arg(long, default_value_t = 2.0)]
        job_threshold: f64,
        #[arg(long)]
        cors_origin: Option<String>,
        #[command(flatten)]
        budget: Budget,
    },
}

#[derive(Debug, Args)]
struct GameArg {
    /// Game document (JSON) or cost matrix (.csv).
    #[arg(long, value_name = "FILE")]
    game: PathBuf,
}

#[derive(Debug, Args)]
struct Budget {
    /// Branch-and-bound node limit per search.
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    node_budget: u64,
}

impl Budget {
    fn options(&self) -> SolverOptions {
        SolverOptions {
            node_budget: self.node_budget,
        }
    }
}

#[derive(Debug, Args)]
struct Out {
    /// Write the result here instead of standard output.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    WorstStable,
    Best,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Compute(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Compute(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Compute(m) => m,
        }
    }
}

impl From<netgame::Error> for Failure {
    fn from(e: netgame::Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

/// Runs one invocation and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    1
                }
            };
        }
    };
    match execute(cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message());
            f.code()
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_game(arg: &GameArg) -> CliResult<Game> {
    let text = read(&arg.game)?;
    let is_csv = arg
        .game
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let parsed = if is_csv {
        parse_cost_csv(&text).map(Game::LinkBias)
    } else {
        parse_game(&text)
    };
    parsed.map_err(|e| Failure::Usage(format!("{}: {e}", arg.game.display())))
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> CliResult<()> {
    match out {
        Some(path) if path != Path::new("-") => {
            fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
        }
        _ => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Usage(format!("standard output: {e}"))),
    }
}

fn json<T: Serialize>(value: &T) -> CliResult<String> {
    Ok(write_report(value)?)
}

fn warn_uncertified(optimal: bool, stderr: &mut dyn Write) {
    if !optimal {
        let _ = writeln!(
            stderr,
            "warning: node budget exhausted; result is not certified optimal"
        );
    }
}

/// Simulation output without the per-run degree sequences.
#[derive(Serialize)]
struct SimulationSummary {
    master_seed: u64,
    runs: usize,
    best_objective: u64,
    best_optimal: bool,
    poa: Vec<i64>,
    statistics: BatchStatistics,
}

fn execute(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Solve {
            game,
            target,
            budget,
            out,
        } => {
            let game = load_game(&game)?;
            let opts = budget.options();
            let result = match (&game, target) {
                (Game::Degree(g), Target::WorstStable) => {
                    worst_stable_degree_with(g.targets(), &opts)
                }
                (Game::Degree(g), Target::Best) => best_graph_degree_with(g.targets(), &opts),
                (Game::LinkBias(g), Target::WorstStable) => stable_graph_link_bias(g),
                (Game::LinkBias(g), Target::Best) => best_graph_link_bias(g),
            };
            warn_uncertified(result.optimal, stderr);
            emit(&json(&result)?, out.out.as_deref(), stdout)
        }
        Command::Anarchy { game, budget, out } => {
            let game = load_game(&game)?;
            let report = anarchy_report(&game, &budget.options());
            warn_uncertified(report.optimal, stderr);
            emit(&json(&report)?, out.out.as_deref(), stdout)
        }
        Command::Whatif {
            game,
            remove,
            all: _,
            format,
            budget,
            out,
        } => {
            let game = load_game(&game)?;
            let opts = budget.options();
            let n = game.player_count();
            let rows = match remove {
                Some(k) if k as usize > n => {
                    return Err(Failure::Usage(format!(
                        "--remove {k} is out of range for {n} players"
                    )))
                }
                Some(k) => vec![whatif(&game, k as usize - 1, &opts)?],
                None => summary(&game, &opts)?,
            };
            warn_uncertified(
                rows.iter()
                    .all(|r| r.report_before.optimal && r.report_after.optimal),
                stderr,
            );
            let text = match (format, remove) {
                (Format::Csv, _) => summary_csv(&rows)?,
                (Format::Json, Some(_)) => json(&rows[0])?,
                (Format::Json, None) => json(&SummaryReport::new(rows))?,
            };
            emit(&text, out.out.as_deref(), stdout)
        }
        Command::Simulate {
            game,
            runs,
            seed,
            include_runs,
            format,
            budget,
            out,
        } => {
            let Game::Degree(g) = load_game(&game)? else {
                return Err(Failure::Usage(
                    "simulate needs a degree game, not a link-bias game".into(),
                ));
            };
            let batch = simulate_batch_with(g.targets(), runs as usize, seed, &budget.options())?;
            warn_uncertified(batch.best_optimal, stderr);
            let text = match format {
                Format::Csv => statistics_csv(&batch_statistics(&batch)?)?,
                Format::Json if include_runs => json(&SimulationReport::new(batch)?)?,
                Format::Json => json(&SimulationSummary {
                    master_seed: batch.master_seed,
                    runs: batch.runs.len(),
                    best_objective: batch.best_objective,
                    best_optimal: batch.best_optimal,
                    poa: batch.runs.iter().map(|r| r.poa).collect(),
                    statistics: batch_statistics(&batch)?,
                })?,
            };
            emit(&text, out.out.as_deref(), stdout)
        }
        Command::ConstructCosts {
            degrees,
            budget,
            out,
        } => {
            let d = load_degrees(&degrees)?;
            let built = construct_cost_matrix_with(&d, &budget.options())?;
            let _ = writeln!(
                stderr,
                "stable graph degree distance from targets: {}{}",
                built.distance,
                if built.optimal {
                    ""
                } else {
                    " (not certified minimal)"
                }
            );
            let doc = GameDocument::from_game(&Game::LinkBias(built.game));
            emit(&json(&doc)?, out.out.as_deref(), stdout)
        }
        Command::Export {
            graph,
            dot,
            highlight,
        } => {
            let g = load_graph(&graph)?;
            let n = g.node_count();
            if let Some(&v) = highlight.iter().find(|&&v| v as usize > n) {
                return Err(Failure::Usage(format!(
                    "--highlight {v} is out of range for {n} vertices"
                )));
            }
            let highlight: Vec<usize> = highlight.iter().map(|&v| v as usize - 1).collect();
            emit(&export_dot(&g, &highlight, None), Some(&dot), stdout)
        }
        Command::Serve {
            port,
            snapshot,
            job_threshold,
            cors_origin,
            budget,
        } => {
            let job_threshold = Duration::try_from_secs_f64(job_threshold)
                .map_err(|e| Failure::Usage(format!("--job-threshold: {e}")))?;
            let port = resolve_port(port).map_err(Failure::Usage)?;
            let config = ServiceConfig {
                job_threshold,
                solver: budget.options(),
                cors_origin,
                snapshot,
            };
            let runtime = tokio::runtime::Runtime::new()
                .map_err(|e| Failure::Compute(format!("starting runtime: {e}")))?;
            let addr = SocketAddr::from((Ipv4Addr::LOCALHOST, port));
            runtime
                .block_on(netgame_service::serve(addr, config))
                .map_err(|e| Failure::Compute(format!("service: {e}")))
        }
    }
}

fn load_degrees(path: &Path) -> CliResult<DegreeSequence> {
    let text = read(path)?;
    let bad = |msg: String| Failure::Usage(format!("{}: {msg}", path.display()));
    let value: Value = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
    if value.is_array() {
        let d: Vec<usize> = serde_json::from_value(value).map_err(|e| bad(e.to_string()))?;
        return Ok(DegreeSequence::new(d));
    }
    match parse_game(&text).map_err(|e| bad(e.to_string()))? {
        Game::Degree(g) => Ok(g.targets().clone()),
        Game::LinkBias(_) => Err(bad("expected a degree game".into())),
    }
}

fn load_graph(path: &Path) -> CliResult<Graph> {
    let text = read(path)?;
    let bad = |msg: String| Failure::Usage(format!("{}: {msg}", path.display()));
    let mut value: Value = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
    if let Some(inner) = value.get_mut("graph") {
        value = inner.take();
    } else if let Some(map) = value.as_object_mut() {
        map.remove("schema_version");
    }
    serde_json::from_value(value).map_err(|e| bad(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (u8, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("netgame").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn unknown_subcommand_is_usage_error() {
        let (code, out, err) = run_args(&["frobnicate"]);
        assert_eq!(code, 1);
        assert!(out.is_empty());
        assert!(err.contains("frobnicate"));
    }

    #[test]
    fn help_exits_zero_on_stdout() {
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("construct-costs"));
    }

    #[test]
    fn flags_are_checked_before_reading_files() {
        for args in [
            &[
                "simulate",
                "--game",
                "missing.json",
                "--runs",
                "0",
                "--seed",
                "1",
            ][..],
            &["whatif", "--game", "missing.json", "--remove", "0"],
            &["whatif", "--game", "missing.json", "--remove", "2", "--all"],
            &["whatif", "--game", "missing.json"],
            &["solve", "--game", "missing.json", "--target", "middle"],
            &["serve", "--port", "http"],
        ] {
            let (code, _, err) = run_args(args);
            assert_eq!(code, 1, "{args:?}");
            assert!(!err.contains("missing.json"), "{args:?}: {err}");
        }
    }

    #[test]
    fn missing_file_is_usage_error() {
        let (code, _, err) = run_args(&["anarchy", "--game", "/nonexistent/game.json"]);
        assert_eq!(code, 1);
        assert!(err.starts_with("error: /nonexistent/game.json"));
    }

    #[test]
    fn graph_inputs_accept_reports_and_bare_graphs() {
        let dir = std::env::temp_dir().join(format!("netgame-cli-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let bare = dir.join("bare.json");
        let report = dir.join("report.json");
        fs::write(
            &bare,
            r#"{"n": 3, "edges": [[1, 2]], "schema_version": "1"}"#,
        )
        .unwrap();
        fs::write(
            &report,
            r#"{"graph": {"n": 3, "edges": [[1, 2]]}, "objective": 0}"#,
        )
        .unwrap();
        assert_eq!(load_graph(&bare).unwrap(), load_graph(&report).unwrap());
        fs::remove_dir_all(dir).unwrap();
    }
}
