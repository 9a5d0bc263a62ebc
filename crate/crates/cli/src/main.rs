//! `mslab`: command-line front end for the model-space operator lab.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use mslab_core::harness::{self, ExperimentConfig, Report, Verdict};
use mslab_core::operators::{self, compress};
use mslab_core::{BlaschkeProduct, CircleGrid, Frame, LabError, OperatorMatrix, SymbolSpec, Truncation};

#[derive(Parser, Debug)]
#[command(name = "mslab", version, about = "Truncated Toeplitz operators on model spaces of finite Blaschke products")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List registered experiments.
    List,
    /// Run an experiment and optionally write its JSON report.
    Run(RunArgs),
    /// Build one operator matrix and print or export it.
    Matrix(MatrixArgs),
    /// Summarise a saved report.
    Report { path: PathBuf },
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Experiment id (E1..E11) or name.
    id: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long = "max-degree")]
    max_degree: Option<usize>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    grid: Option<usize>,
    /// Override a tolerance, e.g. `--tol pi=1e-9`. Repeatable.
    #[arg(long = "tol", value_name = "NAME=VAL")]
    tol: Vec<String>,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record wall-clock time in the report summary.
    #[arg(long)]
    timing: bool,
    /// Print every trial instead of per-arm totals.
    #[arg(long)]
    verbose: bool,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Op {
    Tto,
    Dtto,
    Tho,
    Dtho,
    Block,
    Toeplitz,
    Hankel,
}

#[derive(Args, Debug)]
struct MatrixArgs {
    /// Inner function, e.g. `zeros=0,0` or `c=0+1i; zeros=0.5`.
    #[arg(long, default_value = "zeros=0")]
    theta: String,
    /// Symbol, e.g. `u:zeros=0.5; v:` or `laurent:0,1,0`.
    #[arg(long)]
    symbol: String,
    #[arg(long, value_enum, default_value = "tto")]
    op: Op,
    /// Window per side for dual frames; section size for `toeplitz`/`hankel`.
    #[arg(long, default_value_t = 8)]
    window: usize,
    #[arg(long, default_value_t = 1024)]
    grid: usize,
    #[arg(long = "emit-matrix")]
    emit_matrix: Option<PathBuf>,
    /// Write basis samples of the domain frame as CSV.
    #[arg(long = "emit-frame")]
    emit_frame: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match cli.command {
        Command::List => list(),
        Command::Run(args) => run(args),
        Command::Matrix(args) => matrix(args),
        Command::Report { path } => report(&path),
    };
    match out {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            let usage = err.downcast_ref::<LabError>().is_some_and(|e| {
                matches!(e, LabError::Parse(_) | LabError::UnknownExperiment(_) | LabError::InvalidConfig(_))
            });
            if usage {
                eprintln!("\n{}", Cli::command().render_usage());
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn list() -> anyhow::Result<ExitCode> {
    for e in harness::experiments() {
        println!("{:<4} {:<24} {}", e.id, e.name, e.description);
    }
    Ok(ExitCode::SUCCESS)
}

fn config(args: &RunArgs) -> anyhow::Result<ExperimentConfig> {
    let exp = harness::find_experiment(&args.id)?;
    let mut cfg = ExperimentConfig::new(exp.id);
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.trials {
        cfg.trials = v;
    }
    if let Some(v) = args.max_degree {
        cfg.max_degree = v;
    }
    if let Some(v) = args.radius {
        cfg.radius_cap = v;
    }
    if let Some(v) = args.window {
        cfg.window = v;
    }
    if let Some(v) = args.grid {
        cfg.grid_size = v;
    }
    for item in &args.tol {
        let (name, value) =
            item.split_once('=').ok_or_else(|| LabError::Parse(format!("--tol expects NAME=VAL, got `{item}`")))?;
        let value: f64 = value.trim().parse().map_err(|_| LabError::Parse(format!("bad tolerance value `{value}`")))?;
        cfg.set_tolerance(name.trim(), value)?;
    }
    cfg.timing = args.timing;
    cfg.validate()?;
    Ok(cfg)
}

fn run(args: RunArgs) -> anyhow::Result<ExitCode> {
    let cfg = config(&args)?;
    let report = harness::run_experiment(&cfg)?;
    if let Some(path) = &args.out {
        fs::write(path, report.to_json()).with_context(|| format!("writing {}", path.display()))?;
    }
    print_report(&report, args.verbose);
    Ok(exit_for(&report))
}

fn report(path: &Path) -> anyhow::Result<ExitCode> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let report = Report::from_json(&text)?;
    print_report(&report, false);
    Ok(exit_for(&report))
}

fn exit_for(report: &Report) -> ExitCode {
    if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn print_report(report: &Report, verbose: bool) {
    let s = &report.summary;
    println!("{} ({} trials, seed {})", report.experiment, report.config.trials, report.config.seed);
    let mut arms: Vec<&str> = Vec::new();
    for t in &report.trials {
        if !arms.contains(&t.arm.as_str()) {
            arms.push(&t.arm);
        }
    }
    for arm in arms {
        let (mut pass, mut fail, mut skip) = (0, 0, 0);
        let mut min_margin = f64::INFINITY;
        for t in report.arm(arm) {
            match t.verdict {
                Verdict::Pass => pass += 1,
                Verdict::Fail => fail += 1,
                Verdict::Skipped => skip += 1,
            }
            if let Some(m) = t.margin {
                min_margin = min_margin.min(m);
            }
            if verbose || t.verdict == Verdict::Fail {
                println!(
                    "  {:>6} {arm}[{}] seed={} margin={} {}",
                    format!("{:?}", t.verdict).to_lowercase(),
                    t.index,
                    t.seed,
                    t.margin.map_or("-".into(), |m| format!("{m:.3e}")),
                    t.skip_reason.as_deref().or(t.note.as_deref()).unwrap_or("")
                );
            }
        }
        let margin = if min_margin.is_finite() { format!("{min_margin:.3e}") } else { "-".into() };
        println!("  {arm:<24} pass {pass:>4}  fail {fail:>4}  skip {skip:>4}  min margin {margin}");
    }
    let fmt = |v: Option<f64>| v.map_or("-".to_string(), |m| format!("{m:.3e}"));
    println!(
        "total: pass {} fail {} skip {}  min margin {}  max defect {}",
        s.pass,
        s.fail,
        s.skip,
        fmt(s.min_margin),
        fmt(s.max_defect)
    );
}

fn matrix(args: MatrixArgs) -> anyhow::Result<ExitCode> {
    let theta: BlaschkeProduct = args.theta.parse().map_err(|e| LabError::Parse(format!("--theta: {e}")))?;
    let phi: SymbolSpec = args.symbol.parse().map_err(|e| LabError::Parse(format!("--symbol: {e}")))?;
    let grid = CircleGrid::new(args.grid).map_err(|e| LabError::InvalidConfig(e.to_string()))?;
    let w = args.window;
    let trunc = Truncation::symmetric(w);
    let model = || Frame::model_basis(&theta, &grid);
    let dual = || Frame::dual_frame(&theta, trunc, &grid);
    let (domain, m): (Frame, OperatorMatrix) = match args.op {
        Op::Tto => {
            let f = model()?;
            let m = compress(&phi, &f, &f, &grid)?;
            (f, m)
        }
        Op::Dtto => {
            let f = dual()?;
            let m = compress(&phi, &f, &f, &grid)?;
            (f, m)
        }
        Op::Tho => {
            let f = model()?;
            let m = compress(&phi, &f, &dual()?, &grid)?;
            (f, m)
        }
        Op::Dtho => {
            let f = dual()?;
            let m = compress(&phi, &f, &model()?, &grid)?;
            (f, m)
        }
        Op::Block => {
            let f = Frame::stack(&model()?, &dual()?)?;
            let m = operators::block_assemble(&phi, &theta, trunc, &grid)?;
            (f, m)
        }
        Op::Toeplitz => {
            let f = Frame::analytic_section(w, &grid)?;
            let m = compress(&phi, &f, &f, &grid)?;
            (f, m)
        }
        Op::Hankel => {
            let f = Frame::analytic_section(w, &grid)?;
            let m = compress(&phi, &f, &Frame::antianalytic_section(w, &grid)?, &grid)?;
            (f, m)
        }
    };
    if let Some(path) = &args.emit_frame {
        fs::write(path, domain.to_csv(&grid)?).with_context(|| format!("writing {}", path.display()))?;
    }
    match &args.emit_matrix {
        Some(path) => fs::write(path, m.to_csv()).with_context(|| format!("writing {}", path.display()))?,
        None => {
            let (rows, cols) = m.shape();
            println!("{} {rows}x{cols}", m.symbol_descriptor());
            print!("{}", m.to_csv());
        }
    }
    Ok(ExitCode::SUCCESS)
}
