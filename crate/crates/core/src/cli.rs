//! Command-line front end. Exit codes: 0 success, 1 unreadable or invalid
//! input files, 2 usage errors, 3 validation failures.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::bco::{solve, Mode, SolverConfig};
use crate::bench::{derive_seed, generate_requests, generate_topology, run_experiment, ExperimentPlan};
use crate::error::Error;
use crate::io::{read_json, write_json, write_report, FileError, RequestsFile, SolutionFile};
use crate::placement::place_and_solve;
use crate::solution::validate_solution;
use crate::topology::{LightpathRequest, Topology};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INVALID: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "bco-rwa", version, about = "Bee colony routing and wavelength assignment for DWDM networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve an instance and write the solution JSON.
    Solve(SolveArgs),
    /// Check a solution file against its instance.
    Validate(ValidateArgs),
    /// Generate a random connected topology and demand set.
    Gen(GenArgs),
    /// Run the basic/prob/full comparison and write a CSV table.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long)]
    topology: PathBuf,
    #[arg(long)]
    requests: PathBuf,
    #[arg(long)]
    mode: Mode,
    /// Comma-separated converter nodes; required for `prob`.
    #[arg(long)]
    converters: Option<String>,
    /// Solver configuration JSON; unspecified fields keep their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long)]
    topology: PathBuf,
    #[arg(long)]
    requests: PathBuf,
    #[arg(long)]
    solution: PathBuf,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long)]
    nodes: usize,
    #[arg(long)]
    degree: f64,
    /// Number of requests to draw.
    #[arg(long)]
    requests: usize,
    #[arg(long, default_value_t = crate::topology::DEFAULT_WAVELENGTHS)]
    wavelengths: usize,
    #[arg(long)]
    seed: u64,
    /// Output prefix; writes `<prefix>.topology.json` and `<prefix>.requests.json`.
    #[arg(long)]
    out_prefix: String,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Node counts, as `a..b` (inclusive) or a comma list.
    #[arg(long)]
    sizes: Option<String>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
    /// Experiment plan JSON overriding the defaults; explicit flags win.
    #[arg(long)]
    plan: Option<PathBuf>,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_IO,
            message: message.into(),
        }
    }
}

impl From<FileError> for Failure {
    fn from(e: FileError) -> Self {
        Self::input(e.to_string())
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn load_instance(topology: &Path, requests: &Path) -> Result<(Topology, Vec<LightpathRequest>), Failure> {
    let topology: Topology = read_json(topology)?;
    let file: RequestsFile = read_json(requests)?;
    topology
        .validate_requests(&file.requests)
        .map_err(|e| Failure::input(format!("{}: {e}", requests.display())))?;
    Ok((topology, file.requests))
}

fn parse_converters(list: &str, topology: &Topology) -> Result<Vec<usize>, Failure> {
    let nodes = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>().map_err(|_| Failure::usage(format!("bad converter node {s:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(&bad) = nodes.iter().find(|&&v| v >= topology.node_count()) {
        return Err(Failure::usage(format!("converter node {bad} out of range")));
    }
    Ok(nodes)
}

fn cmd_solve(args: SolveArgs) -> Result<i32, Failure> {
    if args.mode == Mode::Prob && args.converters.is_none() {
        return Err(Failure::usage("mode prob needs an explicit --converters list"));
    }
    let (topology, requests) = load_instance(&args.topology, &args.requests)?;
    let base: SolverConfig = match &args.config {
        Some(path) => read_json(path)?,
        None => SolverConfig::default(),
    };
    let config = base.with_mode(args.mode).with_seed(args.seed);
    config.validate().map_err(|e| Failure::input(e.to_string()))?;
    let topology = match &args.converters {
        Some(list) => {
            let nodes = parse_converters(list, &topology)?;
            topology.with_converters(nodes).map_err(|e| Failure::usage(e.to_string()))?
        }
        None => topology,
    };

    let started = Instant::now();
    let (solution, converters) = match args.mode {
        Mode::Basic => (solve(&topology, &requests, &config), Vec::new()),
        Mode::Prob => (
            solve(&topology, &requests, &config),
            topology.converters().iter().copied().collect(),
        ),
        Mode::Full => match place_and_solve(&topology, &requests, &config, config.converter_count) {
            Ok(out) => {
                if out.no_transit() {
                    println!("note: no transit traffic during placement; fallback node used");
                }
                (Ok(out.solution), out.converters.into_iter().collect())
            }
            Err(e) => (Err(e), Vec::new()),
        },
    };
    let solution = solution.map_err(|e| match e {
        Error::TooManyConverters { .. } => Failure::usage(e.to_string()),
        other => Failure::input(other.to_string()),
    })?;
    let elapsed = started.elapsed().as_secs_f64();

    let objective = solution.objective;
    let file = SolutionFile::new(solution, args.seed, args.mode, converters.iter().copied());
    write_json(&args.out, &file)?;
    println!("objective: {objective} of {}", requests.len());
    println!("converters: {converters:?}");
    println!("time_s: {elapsed:.3}");
    Ok(EXIT_OK)
}

fn cmd_validate(args: ValidateArgs) -> Result<i32, Failure> {
    let (topology, requests) = load_instance(&args.topology, &args.requests)?;
    let file: SolutionFile = read_json(&args.solution)?;
    // continuity is judged against the converters the solution was built with
    let topology = topology
        .with_converters(file.converters.iter().copied())
        .map_err(|e| Failure::input(format!("{}: {e}", args.solution.display())))?;
    let report = validate_solution(&topology, &requests, &file.solution());
    if report.is_clean() {
        println!("ok: {} established, {} failed", file.objective, file.failed.len());
        return Ok(EXIT_OK);
    }
    for v in &report.violations {
        println!("{v}");
    }
    Ok(EXIT_INVALID)
}

fn cmd_gen(args: GenArgs) -> Result<i32, Failure> {
    if args.nodes < 2 {
        return Err(Failure::usage("need at least 2 nodes"));
    }
    let topology = generate_topology(args.nodes, args.degree, args.wavelengths, derive_seed(args.seed, &[1]))
        .map_err(|e| Failure::usage(e.to_string()))?;
    let requests = generate_requests(args.nodes, args.requests, derive_seed(args.seed, &[2]));
    let topology_path = PathBuf::from(format!("{}.topology.json", args.out_prefix));
    let requests_path = PathBuf::from(format!("{}.requests.json", args.out_prefix));
    write_json(&topology_path, &topology)?;
    write_json(&requests_path, &RequestsFile { requests })?;
    println!("wrote {} and {}", topology_path.display(), requests_path.display());
    Ok(EXIT_OK)
}

fn parse_sizes(text: &str) -> Result<Vec<usize>, Failure> {
    let bad = || Failure::usage(format!("bad --sizes {text:?}"));
    if let Some((a, b)) = text.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    text.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect()
}

fn cmd_bench(args: BenchArgs) -> Result<i32, Failure> {
    let mut plan: ExperimentPlan = match &args.plan {
        Some(path) => read_json(path)?,
        None => ExperimentPlan::default(),
    };
    if let Some(sizes) = &args.sizes {
        plan.sizes = parse_sizes(sizes)?;
    }
    if let Some(reps) = args.reps {
        plan.repetitions = reps;
    }
    if let Some(seed) = args.seed {
        plan.master_seed = seed;
    }
    plan.validate().map_err(|e| Failure::usage(e.to_string()))?;

    let report = run_experiment(&plan).map_err(|e| match e {
        Error::InfeasibleDegree { .. } => Failure::usage(e.to_string()),
        other => Failure::input(other.to_string()),
    })?;
    let sidecar = write_report(&args.out, &report)?;
    println!("{:>5} {:>6} {:>10} {:>10} {:>8}", "nodes", "mode", "mean", "variance", "time_s");
    for r in &report.rows {
        println!(
            "{:>5} {:>6} {:>10.2} {:>10.2} {:>8.3}",
            r.nodes, r.mode, r.mean, r.variance, r.time_s
        );
    }
    println!("wrote {} and {}", args.out.display(), sidecar.display());
    Ok(EXIT_OK)
}
