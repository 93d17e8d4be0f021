use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mps_orf::checks::{self, CheckResult, Suite, DEFAULT_SEED};
use mps_orf::fixtures::{compute_reference, reference_json, REFERENCE_M};
use mps_orf::output::emit_outputs;
use mps_orf::scenario::{builtin, load_config, run_all, thread_pool, Outcome, Scenario, BUILTIN_NAMES};

/// Multipoint Schur algorithm, Wall approximants and ORF diagnostics.
#[derive(Parser)]
#[command(name = "mps-orf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunOpts {
    /// Output directory (overrides `out_dir` in the config; default `out`).
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Also write one SVG line plot per series.
    #[arg(long)]
    plots: bool,
    /// Worker threads across and within scenarios.
    #[arg(long)]
    jobs: Option<usize>,
    /// Run even when M (1 - |alpha_n|) < 50.
    #[arg(long)]
    force: bool,
    /// Also run the randomized determinant and Euler property samples.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenarios of a JSON config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run a built-in scenario by name.
    Scenario {
        /// One of: lebesgue, half-z-classical, half-z-radial, atom-plus-smooth, inner-stress.
        name: String,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run the acceptance criteria and invariants; print a pass/fail table.
    Check {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Recompute the pinned reference fixture.
    Reference {
        #[arg(long, default_value_t = REFERENCE_M)]
        m: usize,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

const EXIT_FAIL: u8 = 1;
const EXIT_REFUSED: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, opts } => match load_config(&config) {
            Ok(list) => run(&list, &opts),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_FAIL)
            }
        },
        Command::Scenario { name, opts } => match builtin(&name) {
            Some(s) => run(&[s], &opts),
            None => {
                eprintln!("error: unknown scenario {name:?}; known: {}", BUILTIN_NAMES.join(", "));
                ExitCode::from(EXIT_FAIL)
            }
        },
        Command::Check { seed, jobs } => check(seed, jobs),
        Command::Reference { m, out } => reference(m, out.as_deref()),
    }
}

fn run(list: &[Scenario], opts: &RunOpts) -> ExitCode {
    let outcomes = match run_all(list, opts.jobs, opts.force) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_FAIL);
        }
    };
    let mut failed = false;
    let mut refused = false;
    for (s, outcome) in list.iter().zip(outcomes) {
        match outcome {
            Ok(Outcome::Report(report)) => {
                for w in &report.warnings {
                    eprintln!("warning [{}]: {w}", s.id);
                }
                let dir = opts
                    .out_dir
                    .clone()
                    .or_else(|| s.out_dir.as_ref().map(PathBuf::from))
                    .unwrap_or_else(|| PathBuf::from("out"));
                match emit_outputs(&report, &dir, opts.plots) {
                    Ok(files) => println!("{}: {} files in {}", s.id, files.len(), dir.display()),
                    Err(e) => {
                        eprintln!("error [{}]: {e}", s.id);
                        failed = true;
                    }
                }
            }
            Ok(Outcome::Refused(warnings)) => {
                for w in warnings {
                    eprintln!("refused [{}]: {w}", s.id);
                }
                eprintln!("refused [{}]: rerun with --force to accept under-resolved quadrature", s.id);
                refused = true;
            }
            Err(e) => {
                eprintln!("error: {e}");
                failed = true;
            }
        }
    }
    if let Some(seed) = opts.seed {
        for r in [checks::determinant(seed), checks::two_path_wall(seed)] {
            match r {
                Ok(r) => {
                    eprintln!("{r}");
                    failed |= !r.passed;
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    failed = true;
                }
            }
        }
    }
    if failed {
        ExitCode::from(EXIT_FAIL)
    } else if refused {
        ExitCode::from(EXIT_REFUSED)
    } else {
        ExitCode::SUCCESS
    }
}

fn check(seed: u64, jobs: Option<usize>) -> ExitCode {
    let pool = match thread_pool(jobs) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_FAIL);
        }
    };
    let results: Result<Vec<CheckResult>, _> = pool.install(|| {
        let suite = Suite::new(seed)?;
        let mut all = suite.acceptance()?;
        all.extend(suite.invariants()?);
        Ok::<_, mps_orf::Error>(all)
    });
    match results {
        Ok(all) => {
            for r in &all {
                println!("{r}");
            }
            let failed = all.iter().filter(|r| !r.passed).count();
            println!("{} passed, {failed} failed", all.len() - failed);
            if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAIL)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_FAIL)
        }
    }
}

fn reference(m: usize, out: Option<&Path>) -> ExitCode {
    let text = compute_reference(m).and_then(|r| reference_json(&r));
    match (text, out) {
        (Ok(t), Some(p)) => match std::fs::write(p, t + "\n") {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {}: {e}", p.display());
                ExitCode::from(EXIT_FAIL)
            }
        },
        (Ok(t), None) => {
            println!("{t}");
            ExitCode::SUCCESS
        }
        (Err(e), _) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_FAIL)
        }
    }
}
