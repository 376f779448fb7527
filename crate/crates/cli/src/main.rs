use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use epcharge::harness::{
    run_convergence, run_longtime, standard_probes, validate_model, ExperimentConfig, LongtimeSummary,
};
use epcharge::model::{BUILTIN_MODELS, DEFAULT_FD_STEP};
use epcharge::output::{fmt_f64, write_trajectory_csv};
use epcharge::{builtin_model, integrate, Error, MethodKind, MethodSpec, ParticleState, SolverParams, Vec3};

const EXIT_CONFIG: u8 = 2;
const EXIT_DIVERGENCE: u8 = 3;
const EXIT_PARTIAL: u8 = 4;
/// Validation ran but at least one check failed.
const EXIT_CHECK_FAILED: u8 = 1;

#[derive(Parser, Debug)]
#[command(name = "epcharge", version, about = "Energy-preserving integrators for charged-particle dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate one trajectory and write it as CSV.
    Integrate(IntegrateArgs),
    /// Global-error convergence study against a fine reference solution.
    Converge(ExperimentArgs),
    /// Long-time energy and momentum drift study.
    Longtime(LongtimeArgs),
    /// Check force, field and symmetry consistency of a model.
    Validate(ValidateArgs),
    /// List built-in field models.
    ListModels,
}

#[derive(Args, Debug)]
struct IntegrateArgs {
    #[arg(long, default_value = "paper-sec6")]
    model: String,
    /// boris, ep1, ep2, ep3 or ep-exact
    #[arg(long, default_value = "ep2")]
    method: MethodKind,
    #[arg(long, allow_hyphen_values = true)]
    h: f64,
    #[arg(long, allow_hyphen_values = true)]
    t_end: f64,
    /// Initial position as a,b,c (defaults to the model's initial state)
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    x0: Option<Vec3>,
    /// Initial velocity as a,b,c
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    v0: Option<Vec3>,
    /// Fixed-point tolerance
    #[arg(long, default_value_t = SolverParams::default().tol)]
    tol: f64,
    #[arg(long, default_value_t = SolverParams::default().max_iters)]
    max_iters: usize,
    #[arg(long, default_value_t = 1)]
    sample_every: usize,
    /// Output path, `-` for stdout
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[arg(long, default_value = "paper-sec6")]
    model: String,
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<MethodKind>>,
    #[arg(long, value_delimiter = ',')]
    stepsizes: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    horizons: Option<Vec<f64>>,
    #[arg(long)]
    tol: Option<f64>,
    /// Directory for CSV files and the run manifest
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LongtimeArgs {
    #[command(flatten)]
    common: ExperimentArgs,
    /// Sampling stride in steps (default: about once per unit time)
    #[arg(long)]
    sample_every: Option<usize>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[arg(long, default_value = "paper-sec6")]
    model: String,
}

fn parse_vec3(s: &str) -> Result<Vec3, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got '{s}'"));
    }
    let mut out = [0.0; 3];
    for (slot, p) in out.iter_mut().zip(&parts) {
        *slot = p
            .trim()
            .parse()
            .map_err(|_| format!("'{}' is not a number", p.trim()))?;
    }
    Ok(Vec3::from(out))
}

enum Failure {
    Config(String),
    Divergence(String),
    Other(u8, String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_divergence() {
            Failure::Divergence(e.to_string())
        } else {
            Failure::Config(e.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Integrate(args) => cmd_integrate(args),
        Command::Converge(args) => cmd_converge(args),
        Command::Longtime(args) => cmd_longtime(args),
        Command::Validate(args) => cmd_validate(args),
        Command::ListModels => {
            for name in BUILTIN_MODELS {
                println!("{name}");
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Divergence(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_DIVERGENCE)
        }
        Err(Failure::Other(code, msg)) => {
            eprintln!("{msg}");
            ExitCode::from(code)
        }
    }
}

fn io_failure(path: &str, e: io::Error) -> Failure {
    Failure::Config(format!("cannot write {path}: {e}"))
}

fn cmd_integrate(args: IntegrateArgs) -> Result<(), Failure> {
    let model = builtin_model(&args.model)?;
    let default = model.default_initial_state();
    let x0 = args.x0.or(default.map(|s| s.x));
    let v0 = args.v0.or(default.map(|s| s.v));
    let (Some(x0), Some(v0)) = (x0, v0) else {
        return Err(Failure::Config(format!("model '{}' needs --x0 and --v0", args.model)));
    };
    let state0 = ParticleState::new(x0, v0, 0.0);
    let method = MethodSpec::new(args.method, args.h)?;
    let solver = SolverParams::new(args.tol, args.max_iters)?;

    let record = match integrate(&state0, model.as_ref(), &method, &solver, args.t_end, args.sample_every) {
        Ok(r) => r,
        Err(e) if e.source.is_divergence() => {
            return Err(Failure::Divergence(format!(
                "{} (after {} recorded samples)",
                e,
                e.partial.samples().len()
            )))
        }
        Err(e) if e.source.is_config() => return Err(Failure::Config(e.source.to_string())),
        Err(e) => return Err(Failure::Divergence(e.to_string())),
    };

    let written = if args.out == "-" {
        write_trajectory_csv(&record, BufWriter::new(io::stdout().lock()))
    } else {
        File::create(&args.out).and_then(|f| {
            let mut w = BufWriter::new(f);
            write_trajectory_csv(&record, &mut w)?;
            w.flush()
        })
    };
    written.map_err(|e| io_failure(&args.out, e))
}

fn experiment_config(args: ExperimentArgs, base: ExperimentConfig) -> Result<ExperimentConfig, Failure> {
    let mut config = ExperimentConfig {
        model: args.model,
        out_dir: args.out_dir,
        ..base
    };
    if let Some(m) = args.methods {
        config.methods = m;
    }
    if let Some(h) = args.stepsizes {
        config.stepsizes = h;
    }
    if let Some(t) = args.horizons {
        config.horizons = t;
    }
    if let Some(tol) = args.tol {
        config.solver = SolverParams::new(tol, config.solver.max_iters)?;
    }
    config.validate()?;
    Ok(config)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.3e}")).unwrap_or_else(|| "-".to_string())
}

fn cmd_converge(args: ExperimentArgs) -> Result<(), Failure> {
    let config = experiment_config(args, ExperimentConfig::convergence_defaults())?;
    let table = run_convergence(&config)?;
    println!("{:<9}{:>9}{:>14}{:>14}{:>8}  status", "method", "T", "h", "error", "order");
    for r in &table.rows {
        let order = r.observed_order.map(|o| format!("{o:.3}")).unwrap_or_else(|| "-".into());
        let status = r.status.as_ref().err().map(String::as_str).unwrap_or("ok");
        println!(
            "{:<9}{:>9}{:>14}{:>14}{:>8}  {}",
            r.method.label(),
            fmt_f64(r.t_end),
            fmt_f64(r.h),
            opt(r.global_error),
            order,
            status
        );
    }
    let failed = table.failures().count();
    if failed > 0 {
        return Err(Failure::Other(
            EXIT_PARTIAL,
            format!("{failed} of {} cells failed", table.rows.len()),
        ));
    }
    Ok(())
}

fn print_longtime(summary: &LongtimeSummary) {
    println!(
        "{:<9}{:>8}{:>10}{:>14}{:>14}{:>9}  status",
        "method", "h", "T", "max dE", "max dM", "max it"
    );
    for r in &summary.rows {
        let status = r.status.as_ref().err().map(String::as_str).unwrap_or("ok");
        println!(
            "{:<9}{:>8}{:>10}{:>14}{:>14}{:>9}  {}",
            r.method.label(),
            fmt_f64(r.h),
            fmt_f64(r.t_end),
            opt(r.max_energy_drift),
            opt(r.max_momentum_drift),
            r.max_fp_iters,
            status
        );
    }
}

fn cmd_longtime(args: LongtimeArgs) -> Result<(), Failure> {
    let mut config = experiment_config(args.common, ExperimentConfig::longtime_defaults())?;
    config.sample_every = args.sample_every;
    config.validate()?;
    let summary = run_longtime(&config)?;
    print_longtime(&summary);
    let failed = summary.failures().count();
    if failed > 0 {
        return Err(Failure::Other(
            EXIT_PARTIAL,
            format!("{failed} of {} cells failed", summary.rows.len()),
        ));
    }
    Ok(())
}

fn cmd_validate(args: ValidateArgs) -> Result<(), Failure> {
    let model = builtin_model(&args.model)?;
    let report = validate_model(model.as_ref(), &standard_probes(), DEFAULT_FD_STEP)?;
    for c in &report.checks {
        let verdict = if c.passed() { "PASS" } else { "FAIL" };
        println!("{verdict} {:<32} {:.3e} (tol {:.0e})", c.name, c.value, c.tolerance);
    }
    for s in &report.skipped {
        println!("SKIP {s}");
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Other(EXIT_CHECK_FAILED, format!("model '{}' failed validation", args.model)))
    }
}
