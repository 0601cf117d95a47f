use std::path::PathBuf;
use std::process::ExitCode;
use std::rc::Rc;

use clap::{Parser, Subcommand};
use wbl_core::engine::{Player, StartPolicy};
use wbl_core::harness::{self, ExperimentSpec};
use wbl_core::minbox::{run_fuzz, FuzzConfig};
use wbl_core::solver::{self, SolveQuery, Target, DEFAULT_BUDGET};

#[derive(Parser)]
#[command(
    name = "wbl",
    version,
    about = "Walker-Breaker games on complete graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a JSON spec.
    Run {
        spec: PathBuf,
        /// Output directory (overrides WBL_OUT_DIR and the spec).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed_base: Option<u64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        b: Option<usize>,
        #[arg(long)]
        walker: Option<String>,
        #[arg(long)]
        breaker: Option<String>,
        #[arg(long)]
        profile: Option<String>,
    },
    /// Re-execute a transcript and verify it byte for byte.
    Replay { file: PathBuf },
    /// Solve a game on K_n exactly (n <= 6).
    Solve {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        b: usize,
        /// W or B.
        #[arg(long, default_value = "W")]
        first: String,
        /// `longest`, `cycle>=L` or `Ck`.
        #[arg(long, default_value = "longest")]
        target: String,
        /// Start vertex, or `chosen` to let Walker pick.
        #[arg(long, default_value = "0")]
        start: String,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        /// Print the principal variation.
        #[arg(long)]
        pv: bool,
        /// Write the principal variation of a `longest` solve to this file.
        #[arg(long)]
        fixture: Option<PathBuf>,
    },
    /// Fuzz the MinBox danger bound with randomized adversaries.
    MinboxFuzz {
        #[arg(long, value_delimiter = ',', default_value = "100,10000")]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "1,10,100")]
        b: Vec<usize>,
        #[arg(long, default_value_t = 10_000)]
        schedules: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        rounds: Option<usize>,
        /// Print every schedule outcome as JSON.
        #[arg(long)]
        json: bool,
    },
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

#[allow(clippy::too_many_arguments)]
fn run(
    path: PathBuf,
    out: Option<PathBuf>,
    trials: Option<usize>,
    seed_base: Option<u64>,
    n: Option<usize>,
    b: Option<usize>,
    walker: Option<String>,
    breaker: Option<String>,
    profile: Option<String>,
) -> ExitCode {
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) => return fail(format!("{}: {e}", path.display())),
    };
    let mut spec = match ExperimentSpec::from_json(&text) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    if let Some(v) = trials {
        spec.trials = v;
    }
    if let Some(v) = seed_base {
        spec.seed_base = v;
    }
    if let Some(v) = n {
        spec.n = v;
    }
    if let Some(v) = b {
        spec.b = v;
    }
    if walker.is_some() {
        spec.walker = walker;
    }
    if let Some(v) = breaker {
        spec.breaker = v;
    }
    if let Some(v) = profile {
        spec.profile = v;
    }
    let outcome = match harness::run_experiment(&spec) {
        Ok(o) => o,
        Err(e) => return fail(e),
    };
    let dir = out.unwrap_or_else(|| spec.resolved_out_dir());
    match harness::write_outputs(&outcome, &dir) {
        Ok(paths) => {
            for p in paths.iter().take(2) {
                println!("wrote {}", p.display());
            }
        }
        Err(e) => return fail(e),
    }
    let s = &outcome.summary;
    println!(
        "{}: {} trials, {} failed",
        spec.name,
        s.trials,
        s.failures.len()
    );
    for f in &s.failures {
        println!(
            "  trial {} seed {}: {}",
            f.trial,
            f.seed,
            f.reasons.join("; ")
        );
    }
    if s.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

#[allow(clippy::too_many_arguments)]
fn solve(
    n: usize,
    b: usize,
    first: &str,
    target: &str,
    start: &str,
    budget: usize,
    pv: bool,
    fixture: Option<PathBuf>,
) -> ExitCode {
    let Some(first) = Player::from_letter(first) else {
        return fail(format!("first mover `{first}` is neither W nor B"));
    };
    let start = match start {
        "chosen" => StartPolicy::StrategyChosen,
        v => match v.parse() {
            Ok(v) => StartPolicy::Declared(v),
            Err(_) => return fail(format!("bad start `{v}`")),
        },
    };
    let (solved, value) = if target == "longest" {
        match solver::value_longest_cycle(n, b, first, start, budget) {
            Ok(lc) => (lc.solved, Some(lc.value)),
            Err(e) => return fail(e),
        }
    } else {
        let target: Target = match target.parse() {
            Ok(t) => t,
            Err(e) => return fail(e),
        };
        let q = SolveQuery {
            n,
            b,
            first,
            start,
            target,
            budget,
        };
        match solver::solve(&q) {
            Ok(s) => (Rc::new(s), None),
            Err(e) => return fail(e),
        }
    };
    println!(
        "n={n} b={b} first={} target={}",
        first.letter(),
        solved.query.target
    );
    println!("states: {}", solved.states());
    println!("winner: {:?}", solved.winner());
    if let Some(v) = value {
        println!("value: {v}");
    }
    if let Some(path) = fixture {
        if value.is_none() || start != StartPolicy::Declared(0) {
            return fail("--fixture needs --target longest and --start 0");
        }
        match solver::fixture_transcript(n, b, first, budget) {
            Ok((_, t)) => {
                if let Err(e) = std::fs::write(&path, t.to_text()) {
                    return fail(format!("{}: {e}", path.display()));
                }
                println!("wrote {}", path.display());
            }
            Err(e) => return fail(e),
        }
    }
    if pv {
        match solver::solved_match(&solved) {
            Ok(t) => print!("{}", t.to_text()),
            Err(e) => return fail(e),
        }
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    env_logger::init();
    match Cli::parse().command {
        Command::Run {
            spec,
            out,
            trials,
            seed_base,
            n,
            b,
            walker,
            breaker,
            profile,
        } => run(spec, out, trials, seed_base, n, b, walker, breaker, profile),
        Command::Replay { file } => match harness::replay(&file) {
            Ok(r) => {
                println!("{}", serde_json::to_string(&r).expect("report serializes"));
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("replay failed: {e}");
                ExitCode::FAILURE
            }
        },
        Command::Solve {
            n,
            b,
            first,
            target,
            start,
            budget,
            pv,
            fixture,
        } => solve(n, b, &first, &target, &start, budget, pv, fixture),
        Command::MinboxFuzz {
            n,
            b,
            schedules,
            seed,
            rounds,
            json,
        } => {
            let summary = run_fuzz(&FuzzConfig {
                ns: n,
                biases: b,
                schedules,
                seed,
                rounds,
            });
            if json {
                println!(
                    "{}",
                    serde_json::to_string(&summary.outcomes).expect("outcomes serialize")
                );
            }
            println!(
                "schedules: {}  maker moves: {}  violations: {}  worst danger/bound: {:.4}",
                summary.schedules, summary.maker_moves, summary.violations, summary.worst_ratio
            );
            if summary.violations == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
