//! `coarsepu`: build and certify partitions of unity from JSON inputs.
//!
//! Every subcommand prints one JSON run report on stdout. Exit status is 0
//! when every check passes, 1 when a mathematical check fails, and 2 when
//! an input cannot be read.

mod commands;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use coarsepu::metric::{random_graph, MetricSpec, SpaceSpec};
use coarsepu::ExtReal;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use commands::{Kind, ValidateArgs};
use report::{Failure, Inputs, Outcome};

fn parse_ext(s: &str) -> Result<ExtReal, String> {
    if s.eq_ignore_ascii_case("inf") {
        return Ok(ExtReal::INF);
    }
    let v: f64 = s.parse().map_err(|e| format!("{s:?} is not a number: {e}"))?;
    ExtReal::new(v).ok_or_else(|| format!("{s:?} must be nonnegative"))
}

#[derive(Parser)]
#[command(name = "coarsepu", version, about = "Partitions of unity on finite extended pseudo-metric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a JSON file of the given kind.
    Validate {
        path: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        /// Space file, for every kind but `space` (covers may name their own).
        #[arg(long)]
        space: Option<PathBuf>,
        /// `{"pairs": [[R, n], ...]}`, for decomposition trees.
        #[arg(long)]
        schedule: Option<PathBuf>,
        /// Disjointness scale to check each layer of a decomposition against.
        #[arg(long, value_parser = parse_ext)]
        r: Option<ExtReal>,
    },
    /// Natural partition of unity of a cover, with its modulus.
    BuildPu {
        #[arg(long)]
        space: Option<PathBuf>,
        #[arg(long)]
        cover: PathBuf,
        #[arg(long, value_parser = parse_ext)]
        r: ExtReal,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tree of partitions of unity from a decomposition tree.
    Convert {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        tree: PathBuf,
        /// `{"pairs": [[eps, R], ...]}`.
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Greedy R-separated nets, emitted as a decomposition into singletons.
    Nets {
        #[arg(long)]
        space: PathBuf,
        #[arg(long, value_parser = parse_ext)]
        r: ExtReal,
        /// JSON list of point ids giving the scan order.
        #[arg(long)]
        order: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a space description.
    Gen {
        #[command(subcommand)]
        generator: Generator,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Measure the modulus of continuity of a partition.
    Modulus {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        pu: PathBuf,
        #[arg(long, value_parser = parse_ext)]
        r: ExtReal,
        /// Fail unless the modulus is at most this.
        #[arg(long)]
        eps: Option<f64>,
    },
}

#[derive(Subcommand)]
enum Generator {
    /// `{0, ..., length-1}` on the line.
    Interval {
        #[arg(long)]
        length: usize,
    },
    /// ℓ¹ grid, e.g. `--sides 4,5`.
    Grid {
        #[arg(long, value_delimiter = ',', required = true)]
        sides: Vec<usize>,
    },
    /// Random graph metric with integer edge weights.
    Graph {
        #[arg(long)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3.0)]
        degree: f64,
        #[arg(long, default_value_t = 4)]
        max_weight: u32,
    },
}

fn run(cli: Cli, inputs: &mut Inputs) -> (String, Option<PathBuf>, Result<Outcome, Failure>) {
    match cli.command {
        Command::Validate { path, kind, space, schedule, r } => {
            if let Some(r) = r {
                inputs.note(&r.to_string());
            }
            let args = ValidateArgs { path: &path, kind, space: space.as_ref(), schedule: schedule.as_ref(), r };
            ("validate".into(), None, commands::validate(inputs, args))
        }
        Command::BuildPu { space, cover, r, eps, out } => {
            inputs.note(&format!("{r} {eps}"));
            ("build-pu".into(), out, commands::build_pu(inputs, space.as_ref(), &cover, r, eps))
        }
        Command::Convert { space, tree, schedule, out } => {
            ("convert".into(), out, commands::convert(inputs, &space, &tree, &schedule))
        }
        Command::Nets { space, r, order, out } => {
            inputs.note(&r.to_string());
            ("nets".into(), out, commands::nets(inputs, &space, r, order.as_ref()))
        }
        Command::Gen { generator, out } => {
            let spec = match generator {
                Generator::Interval { length } => {
                    Ok(SpaceSpec { points: None, metric: MetricSpec::Interval { length } })
                }
                Generator::Grid { sides } => Ok(SpaceSpec { points: None, metric: MetricSpec::Grid { sides } }),
                Generator::Graph { points, seed, degree, max_weight } => {
                    inputs.note(&format!("seed {seed}"));
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    Ok(random_graph(&mut rng, points, degree, max_weight).0)
                }
            };
            ("gen".into(), out, spec.and_then(|s| commands::gen(inputs, s)))
        }
        Command::Modulus { space, pu, r, eps } => {
            inputs.note(&format!("{r} {eps:?}"));
            ("modulus".into(), None, commands::modulus(inputs, &space, &pu, r, eps))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut inputs = Inputs::new();
    let (command, out, result) = run(cli, &mut inputs);
    let outcome = match result {
        Ok(o) => o,
        Err(Failure::Malformed(e)) => {
            eprintln!("coarsepu {command}: {e}");
            return ExitCode::from(2);
        }
        Err(Failure::Check(check)) => {
            eprintln!("coarsepu {command}: check {:?} failed", check.name);
            Outcome { checks: vec![*check], summary: None, artifact: None }
        }
    };
    let report = match inputs.finish(&command, outcome.checks, outcome.summary, outcome.artifact, out.as_ref()) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("coarsepu {command}: {e}");
            return ExitCode::from(2);
        }
    };
    // a closed stdout (e.g. piped into `head`) must not turn into a panic
    let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    for c in report.checks.iter().filter(|c| !c.pass) {
        eprintln!("FAIL {}: measured {} bound {}", c.name, c.measured, c.bound);
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
