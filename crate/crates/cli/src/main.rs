//! `statlab`: command-line front end for the stationary-point laboratory.
//!
//! Exit codes: 0 on success, 1 on usage or input errors, 2 when an
//! invariant or audit check fails.

use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use stationary_lab::adversary::{external_game, play_game, AdversarySession, GameSolver};
use stationary_lab::harness::{
    audit_failures, emit_plot, estimate_slope, read_csv, run_trials, write_csv, Algorithm,
    InstanceSource, JPolicy, TrialSpec,
};
use stationary_lab::instance::{make_fj, make_phi, read_instance, verify_instance};
use stationary_lab::PiecewiseInstance;

#[derive(Parser)]
#[command(name = "statlab", version, about = "Query complexity of finding ε-stationary points")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum InstanceKind {
    Fj,
    Phi,
    Custom,
}

#[derive(Subcommand)]
enum Command {
    /// Build an instance and print its verification report.
    Validate {
        #[arg(long, value_enum)]
        instance: InstanceKind,
        #[arg(long)]
        j: Option<u64>,
        #[arg(long)]
        eps: Option<f64>,
        /// Instance file for `--instance custom`.
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Run a trial matrix and write CSV rows.
    Run {
        #[arg(long)]
        alg: String,
        #[arg(long, value_enum, default_value = "fj")]
        instance: InstanceKind,
        #[arg(long)]
        file: Option<PathBuf>,
        /// Comma-separated epsilons; defaults to 2^-4 .. 2^-10.
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
        /// Comma-separated seeds or a half-open range `a..b`.
        #[arg(long, default_value = "0")]
        seeds: String,
        /// Fixed `j` for `f_j`; uniform per seed when omitted.
        #[arg(long)]
        j: Option<u64>,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the empirical complexity slope from a CSV file.
    Slope {
        #[arg(long = "in")]
        input: PathBuf,
        /// Restrict to one algorithm; all present algorithms otherwise.
        #[arg(long)]
        alg: Option<String>,
    },
    /// Play the resisting oracle against a solver and print the report.
    Adversary {
        /// `gd` or `random_search`; ignored with `--external`.
        #[arg(long, default_value = "gd")]
        alg: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        eps: f64,
        /// `auto` for floor(1/(32ε²)) or a number of queries.
        #[arg(long, default_value = "auto")]
        budget: String,
        /// Speak the line protocol on stdin/stdout; the report goes to
        /// `--out` or stderr.
        #[arg(long)]
        external: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a CSV file as an SVG plot.
    Plot {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

enum Failure {
    Usage(String),
    Audit(String),
}

type Outcome = Result<(), Failure>;

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

fn load_instance(kind: InstanceKind, j: Option<u64>, eps: Option<f64>, file: Option<&Path>) -> Result<PiecewiseInstance, Failure> {
    match kind {
        InstanceKind::Fj => {
            let eps = eps.ok_or_else(|| usage("--eps is required for fj"))?;
            let j = j.ok_or_else(|| usage("--j is required for fj"))?;
            make_fj(j, eps).map_err(usage)
        }
        InstanceKind::Phi => make_phi(eps.ok_or_else(|| usage("--eps is required for phi"))?).map_err(usage),
        InstanceKind::Custom => {
            let path = file.ok_or_else(|| usage("--file is required for custom"))?;
            let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            read_instance(&text).map_err(usage)
        }
    }
}

fn parse_seeds(s: &str) -> Result<Vec<u64>, Failure> {
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| usage(format!("bad seed range `{s}`")))?;
        let b: u64 = b.trim().parse().map_err(|_| usage(format!("bad seed range `{s}`")))?;
        return Ok((a..b).collect());
    }
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| usage(format!("bad seed `{t}`"))))
        .collect()
}

fn print_json<T: serde::Serialize>(value: &T) -> Outcome {
    let text = serde_json::to_string_pretty(value).map_err(usage)?;
    println!("{text}");
    Ok(())
}

fn validate(kind: InstanceKind, j: Option<u64>, eps: Option<f64>, file: Option<PathBuf>) -> Outcome {
    let f = load_instance(kind, j, eps, file.as_deref())?;
    let report = verify_instance(&f);
    print_json(&report)?;
    if report.within_bounds() {
        Ok(())
    } else {
        Err(Failure::Audit("instance exceeds its certified bounds".into()))
    }
}

#[allow(clippy::too_many_arguments)]
fn run(
    alg: &str,
    kind: InstanceKind,
    file: Option<PathBuf>,
    eps: Option<Vec<f64>>,
    seeds: &str,
    j: Option<u64>,
    budget: Option<u64>,
    out: Option<PathBuf>,
) -> Outcome {
    let algorithm: Algorithm = alg.parse().map_err(usage)?;
    let epsilons = eps.unwrap_or_else(|| (4..=10).map(|k| 0.5f64.powi(k)).collect());
    let mut spec = TrialSpec::new(algorithm, epsilons, parse_seeds(seeds)?);
    spec.budget = budget;
    spec.j_policy = j.map_or(JPolicy::Uniform, JPolicy::Fixed);
    spec.instance = match kind {
        InstanceKind::Fj => InstanceSource::Fj,
        InstanceKind::Custom => InstanceSource::Custom(load_instance(kind, None, None, file.as_deref())?),
        InstanceKind::Phi => return Err(usage("phi has no finite gap; use fj or custom")),
    };
    let rows = run_trials(&spec).map_err(usage)?;
    match out {
        Some(path) => {
            let f = File::create(&path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            write_csv(&rows, f).map_err(usage)?;
        }
        None => write_csv(&rows, io::stdout().lock()).map_err(usage)?,
    }
    let bad = audit_failures(&rows);
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Failure::Audit(format!(
            "{} stationary rows failed the gradient audit",
            bad.len()
        )))
    }
}

fn read_rows(path: &Path) -> Result<Vec<stationary_lab::harness::TrialRow>, Failure> {
    let f = File::open(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    read_csv(BufReader::new(f)).map_err(usage)
}

fn slope(input: &Path, alg: Option<String>) -> Outcome {
    let rows = read_rows(input)?;
    let algs: Vec<Algorithm> = match alg {
        Some(a) => vec![a.parse().map_err(usage)?],
        None => {
            let mut v: Vec<_> = rows.iter().map(|r| r.algorithm).collect();
            v.sort();
            v.dedup();
            v
        }
    };
    let mut fits = serde_json::Map::new();
    for a in algs {
        let est = estimate_slope(&rows, a).map_err(usage)?;
        fits.insert(a.as_str().to_string(), serde_json::to_value(est).map_err(usage)?);
    }
    print_json(&fits)
}

fn adversary(alg: &str, seed: u64, eps: f64, budget: &str, external: bool, out: Option<PathBuf>) -> Outcome {
    let session = AdversarySession::new(eps).map_err(usage)?;
    let budget = match budget {
        "auto" => session.guaranteed_budget(),
        n => n.parse().map_err(|_| usage(format!("--budget must be `auto` or an integer, got `{n}`")))?,
    };
    let report = if external {
        let stdin = io::stdin();
        external_game(stdin.lock(), io::stdout().lock(), eps, budget).map_err(usage)?
    } else {
        let solver = match alg {
            "gd" => GameSolver::Gd,
            "random_search" => GameSolver::RandomSearch { seed },
            other => other.parse().map_err(usage)?,
        };
        play_game(solver, eps, budget).map_err(usage)?
    };
    let text = serde_json::to_string_pretty(&report).map_err(usage)?;
    match (&out, external) {
        (Some(path), _) => std::fs::write(path, text + "\n").map_err(|e| usage(format!("{}: {e}", path.display())))?,
        (None, true) => eprintln!("{text}"),
        (None, false) => println!("{text}"),
    }
    if report.within_guarantee() && !report.all_ok() {
        Err(Failure::Audit("construction failed inside its guaranteed regime".into()))
    } else {
        Ok(())
    }
}

fn plot(input: &Path, out: &Path) -> Outcome {
    let rows = read_rows(input)?;
    emit_plot(&rows, out).map_err(usage)
}

fn dispatch(cmd: Command) -> Outcome {
    match cmd {
        Command::Validate { instance, j, eps, file } => validate(instance, j, eps, file),
        Command::Run { alg, instance, file, eps, seeds, j, budget, out } => {
            run(&alg, instance, file, eps, &seeds, j, budget, out)
        }
        Command::Slope { input, alg } => slope(&input, alg),
        Command::Adversary { alg, seed, eps, budget, external, out } => {
            adversary(&alg, seed, eps, &budget, external, out)
        }
        Command::Plot { input, out } => plot(&input, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = dispatch(cli.command);
    let _ = io::stdout().flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Audit(msg)) => {
            eprintln!("audit failed: {msg}");
            ExitCode::from(2)
        }
    }
}
