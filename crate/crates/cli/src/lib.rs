//! Command-line front end: solve instances, verify against the exact oracle,
//! run the scaling bench, and generate random instances.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use cyclecover::cyclegen::cover_to_dot;
use cyclecover::forest::{build_rooted_spanning_forest, forest_to_dot};
use cyclecover::instance::LoadError;
use cyclecover::oracle::OracleError;
use cyclecover::planner::trace_csv;
use cyclecover::{
    bench, generate, oracle, planner, validate_instance, MetricInstance, SolveOptions,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_GUARANTEE: i32 = 4;
pub const EXIT_TOO_LARGE: i32 = 5;

/// Environment variable supplying the default `--parallelism`.
pub const PARALLELISM_ENV: &str = "CYCLECOVER_PARALLELISM";

#[derive(Parser)]
#[command(
    name = "cyclecover",
    version,
    about = "Multi-depot min-max cycle cover planner"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Solve an instance and emit the solution as JSON.
    Solve(SolveArgs),
    /// Solve and compare against the exact oracle on a small instance.
    Verify(VerifyArgs),
    /// Run the scaling bench (size ladder and depot sweep) and emit CSV.
    Bench(BenchArgs),
    /// Generate a seeded random geometric instance file.
    Gen(GenArgs),
}

#[derive(Args)]
pub struct SolveArgs {
    /// Instance JSON file.
    #[arg(long)]
    pub input: PathBuf,
    /// Write the solution JSON here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Override the instance's epsilon.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Worker threads for the candidate fan-out.
    #[arg(long)]
    pub parallelism: Option<usize>,
    /// Write the per-candidate binary-search trace CSV here.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Write the cover as Graphviz DOT here (plus `<stem>-forest.dot`).
    #[arg(long)]
    pub dot: Option<PathBuf>,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Instance JSON file (must fit the exact oracle's size guard).
    #[arg(long)]
    pub input: PathBuf,
    /// Override the instance's epsilon.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Worker threads for the candidate fan-out.
    #[arg(long)]
    pub parallelism: Option<usize>,
}

#[derive(Args)]
pub struct BenchArgs {
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Seed for instance generation.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Timed repetitions per configuration; the minimum is recorded.
    #[arg(long, default_value_t = 3)]
    pub reps: usize,
}

#[derive(Args)]
pub struct GenArgs {
    /// Vertex count.
    #[arg(long)]
    pub n: usize,
    /// Depot count.
    #[arg(long)]
    pub m: usize,
    /// Cycle budget.
    #[arg(long)]
    pub k: usize,
    /// Epsilon stored in the instance.
    #[arg(long, default_value_t = 0.25)]
    pub epsilon: f64,
    /// Seed for instance generation.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the instance JSON here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Gen(args) => cmd_gen(args),
    }
}

fn cmd_solve(args: SolveArgs) -> i32 {
    let inst = match read_instance(&args.input, args.epsilon) {
        Ok(inst) => inst,
        Err(code) => return code,
    };
    let opts = SolveOptions {
        parallelism: parallelism(args.parallelism),
    };
    let solution = match planner::solve_with(&inst, opts) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_VALIDATION;
        }
    };
    if let Some(path) = &args.trace {
        if let Err(e) = fs::write(path, trace_csv(&solution.traces)) {
            eprintln!("error: cannot write trace {}: {e}", path.display());
            return EXIT_FAILURE;
        }
    }
    if let Some(path) = &args.dot {
        let fstar = build_rooted_spanning_forest(&inst);
        let forest_path = sibling_with_suffix(path, "-forest");
        let wrote = fs::write(path, cover_to_dot(&solution.cover, &inst))
            .and_then(|()| fs::write(&forest_path, forest_to_dot(&fstar, &inst)));
        if let Err(e) = wrote {
            eprintln!("error: cannot write dot output: {e}");
            return EXIT_FAILURE;
        }
    }
    let rendered = format!("{:#}", solution.to_json());
    emit(args.output.as_deref(), &rendered)
}

fn cmd_verify(args: VerifyArgs) -> i32 {
    let inst = match read_instance(&args.input, args.epsilon) {
        Ok(inst) => inst,
        Err(code) => return code,
    };
    let exact = match oracle::exact_solve(&inst) {
        Ok(e) => e,
        Err(e @ OracleError::InstanceTooLarge { .. }) => {
            eprintln!("error: {e}");
            return EXIT_TOO_LARGE;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_VALIDATION;
        }
    };
    let opts = SolveOptions {
        parallelism: parallelism(args.parallelism),
    };
    let solution = match planner::solve_with(&inst, opts) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_VALIDATION;
        }
    };
    let bound = (5.0 + inst.epsilon()) * exact.lambda_star;
    let within = solution.objective <= bound + 1e-9 * bound.abs().max(1.0);
    let ratio = if exact.lambda_star > 0.0 {
        Some(solution.objective / exact.lambda_star)
    } else if solution.objective == 0.0 {
        Some(1.0)
    } else {
        None
    };
    let report = json!({
        "lambda_star": exact.lambda_star,
        "alg_objective": solution.objective,
        "ratio": ratio,
    });
    println!("{report:#}");
    if within {
        EXIT_OK
    } else {
        eprintln!(
            "error: objective {} exceeds (5 + epsilon) * lambda* = {bound}",
            solution.objective
        );
        EXIT_GUARANTEE
    }
}

fn cmd_bench(args: BenchArgs) -> i32 {
    let mut rows = bench::run_ladder(&[50, 100, 200, 400, 800], 3, args.seed, args.reps);
    let sweep = bench::run_m_sweep(&[1, 2, 3, 4, 5], 100, 10, args.seed, args.reps);
    let slope = bench::loglog_slope(&rows);
    let ratio = bench::per_unit_m_ratio(&sweep);
    rows.extend(sweep);
    eprintln!("ladder log-log slope: {slope:.3}");
    eprintln!("m-sweep per-unit time ratio: {ratio:.3}");
    emit(args.output.as_deref(), bench::rows_to_csv(&rows).trim_end())
}

fn cmd_gen(args: GenArgs) -> i32 {
    if args.m == 0 || args.m > args.n {
        eprintln!(
            "error: need 1 <= m <= n, got m = {}, n = {}",
            args.m, args.n
        );
        return EXIT_VALIDATION;
    }
    if args.k < args.m {
        eprintln!(
            "error: k = {} is below the depot count m = {}",
            args.k, args.m
        );
        return EXIT_VALIDATION;
    }
    if !(args.epsilon > 0.0 && args.epsilon < 1.0) {
        eprintln!("error: epsilon = {} is outside (0, 1)", args.epsilon);
        return EXIT_VALIDATION;
    }
    let inst = generate::geometric_instance(args.n, args.m, args.k, args.epsilon, args.seed);
    let matrix: Vec<Vec<f64>> = (0..inst.n())
        .map(|i| (0..inst.n()).map(|j| inst.w(i, j)).collect())
        .collect();
    let file = json!({
        "n": inst.n(),
        "depots": inst.depots(),
        "k": inst.k(),
        "epsilon": inst.epsilon(),
        "matrix": matrix,
    });
    emit(args.output.as_deref(), &file.to_string())
}

fn read_instance(path: &Path, epsilon: Option<f64>) -> Result<MetricInstance, i32> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return Err(EXIT_FAILURE);
        }
    };
    let mut inst = match cyclecover::parse_instance(&text) {
        Ok(inst) => inst,
        Err(e @ (LoadError::Parse(_) | LoadError::Shape(_) | LoadError::Graph(_))) => {
            eprintln!("error: {e}");
            return Err(EXIT_PARSE);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return Err(EXIT_VALIDATION);
        }
    };
    if let Some(eps) = epsilon {
        inst = inst.with_epsilon(eps);
    }
    let report = validate_instance(&inst);
    if !report.is_valid() {
        eprint!("{report}");
        return Err(EXIT_VALIDATION);
    }
    Ok(inst)
}

fn parallelism(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var(PARALLELISM_ENV)
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(1)
    .max(1)
}

fn sibling_with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("dot");
    path.with_file_name(format!("{stem}{suffix}.{ext}"))
}

fn emit(output: Option<&Path>, content: &str) -> i32 {
    match output {
        Some(path) => {
            if let Err(e) = fs::write(path, format!("{content}\n")) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_FAILURE;
            }
        }
        None => println!("{content}"),
    }
    EXIT_OK
}
