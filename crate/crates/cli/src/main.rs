use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use phiconv::points::ReconstructionMode;
use phiconv_cli::{gallery, CliError, Options, Problem, Report, Task};

#[derive(Parser)]
#[command(name = "phiconv", version, about = "Φ-convexity on finite metric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Φ-convex hull of a set, with separating certificates
    Hull(ProblemArgs),
    /// Φ-exposed points and their witnesses
    Exposed(ProblemArgs),
    /// Φ-extremal points
    Extremal(ProblemArgs),
    /// Exposed, affine-exposed and extreme points of a coordinate set
    Compare(ProblemArgs),
    /// Reconstruction of K from its extremal or exposed points
    Check(ProblemArgs),
    /// Ill-posedness sampling, perturbation search and Gâteaux probes
    Variational(ProblemArgs),
    /// Dual ball, Choquet and Shilov boundaries
    Boundary(ProblemArgs),
    /// Run a built-in scenario, e.g. `truncated_cube(3)` or `stadium`
    Gallery(GalleryArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Extremal,
    Exposed,
}

#[derive(Args)]
struct Output {
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print a human-readable summary
    #[arg(long)]
    text: bool,
}

#[derive(Args)]
struct ProblemArgs {
    #[arg(long)]
    problem: PathBuf,
    #[arg(long)]
    set: Option<String>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    radius: Option<f64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct GalleryArgs {
    name: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

fn run_problem(task: Task, args: ProblemArgs) -> Result<(Report, Output), CliError> {
    let problem = Problem::load(&args.problem)?;
    let options = Options {
        set: args.set,
        mode: args.mode.map(|m| match m {
            Mode::Extremal => ReconstructionMode::Extremal,
            Mode::Exposed => ReconstructionMode::Exposed,
        }),
        tol: args.tol,
        seed: args.seed,
        samples: args.samples,
        epsilon: args.epsilon,
        budget: args.budget,
        radius: args.radius,
    };
    Ok((phiconv_cli::run(task, &problem, &options)?, args.output))
}

fn emit(report: &Report, output: &Output) -> Result<(), CliError> {
    match &output.out {
        Some(path) => {
            std::fs::write(path, report.to_json()).map_err(|e| CliError::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            if output.text {
                print!("{}", report.render_text());
            }
        }
        None if output.text => print!("{}", report.render_text()),
        None => print!("{}", report.to_json()),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Hull(a) => run_problem(Task::Hull, a),
        Command::Exposed(a) => run_problem(Task::Exposed, a),
        Command::Extremal(a) => run_problem(Task::Extremal, a),
        Command::Compare(a) => run_problem(Task::Compare, a),
        Command::Check(a) => run_problem(Task::Check, a),
        Command::Variational(a) => run_problem(Task::Variational, a),
        Command::Boundary(a) => run_problem(Task::Boundary, a),
        Command::Gallery(a) => gallery::run(&a.name, a.seed).map(|r| (r, a.output)),
    };
    match result.and_then(|(report, output)| emit(&report, &output).map(|_| report)) {
        Ok(report) if report.all_pass() => ExitCode::SUCCESS,
        Ok(report) => {
            for c in report.checks.iter().filter(|c| !c.pass) {
                log::error!("check {} failed: {}", c.name, c.details);
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
