use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use csprk::coefficients::{largest_eta, largest_zeta};
use csprk::*;

mod output;

/// Energy-preserving csPRK integrators for Hamiltonian systems.
#[derive(Debug, Parser)]
#[command(name = "csprk", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate a problem and write the trajectory as CSV.
    Run(RunArgs),
    /// Fit the convergence order against the exact solution, written as JSON.
    Order(OrderArgs),
    /// Verify a csPRK tableau and report its certified properties as JSON.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct MethodSource {
    /// Baseline name, or a preset name.
    #[arg(long)]
    method: Option<String>,
    /// Preset name: ex31, ex32, ex33, avf, symmetric_eta_s.
    #[arg(long)]
    preset: Option<String>,
    /// JSON file holding `{"s", "r", "alpha"}`.
    #[arg(long)]
    tableau: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MethodArgs {
    #[command(flatten)]
    source: MethodSource,
    /// Comma-separated preset parameters.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    params: Vec<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum QuadKind {
    Gauss,
    Interpolatory,
}

#[derive(Debug, Args)]
struct SolverArgs {
    #[arg(long, value_enum, default_value_t = QuadKind::Gauss)]
    quad: QuadKind,
    /// Gauss node count, or comma-separated nodes for an interpolatory rule.
    #[arg(long, value_delimiter = ',')]
    nodes: Vec<f64>,
    /// Fixed-point tolerance on coefficient updates.
    #[arg(long, default_value_t = 1e-14)]
    tol: f64,
    #[arg(long, default_value_t = 100)]
    max_iter: usize,
    /// Start each step from the previous stage polynomial.
    #[arg(long)]
    warm_start: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProblemName {
    Linear,
    HenonHeiles,
    Kepler,
}

#[derive(Debug, Args)]
struct ProblemArgs {
    #[arg(long, value_enum)]
    problem: ProblemName,
    /// Linear system coefficients and initial values.
    #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
    a: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = -1.0)]
    b: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 2.0)]
    c: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.5)]
    p0: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    q0: f64,
    /// Hénon-Heiles initial state `p1,p2,q1,q2`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    initial: Vec<f64>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    method: MethodArgs,
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, allow_negative_numbers = true)]
    h: f64,
    #[arg(long)]
    steps: usize,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OrderArgs {
    #[command(flatten)]
    method: MethodArgs,
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Comma-separated step sizes.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.05,0.025,0.0125")]
    h: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    t_end: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    method: MethodArgs,
    /// Total degree of a polynomial Hamiltonian, for the node-count advice.
    #[arg(long)]
    nu: Option<usize>,
    /// Grid size for sampling the energy conditions.
    #[arg(long, default_value_t = 21)]
    grid: usize,
    /// Also write the generating matrix as tableau JSON to this path.
    #[arg(long)]
    emit_tableau: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure classes mapped onto exit codes.
enum Failure {
    Config(anyhow::Error),
    Numerical(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Config(e)
    }
}

enum MethodChoice {
    Csprk(AlphaTableau),
    Baseline(BaselineMethod),
}

fn resolve_method(args: &MethodArgs) -> anyhow::Result<MethodChoice> {
    let src = &args.source;
    if let Some(path) = &src.tableau {
        if !args.params.is_empty() {
            bail!("--params only applies to presets");
        }
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read tableau {}", path.display()))?;
        let alpha: AlphaTableau = serde_json::from_str(&text)
            .with_context(|| format!("malformed tableau JSON in {}", path.display()))?;
        return Ok(MethodChoice::Csprk(alpha));
    }
    let name = src
        .preset
        .as_deref()
        .or(src.method.as_deref())
        .expect("clap requires one method source");
    if src.method.is_some() {
        if let Ok(b) = name.parse::<BaselineMethod>() {
            if !args.params.is_empty() {
                bail!("baseline `{b}` takes no --params");
            }
            return Ok(MethodChoice::Baseline(b));
        }
        if name.parse::<Preset>().is_err() {
            let baselines: Vec<_> = BaselineMethod::ALL.iter().map(|b| b.name()).collect();
            bail!(
                "unknown method `{name}`; baselines are {} and presets {}",
                baselines.join(", "),
                Preset::ALL.map(|p| p.name()).join(", ")
            );
        }
    }
    Ok(MethodChoice::Csprk(preset(name, &args.params)?))
}

fn build_problem(args: &ProblemArgs) -> anyhow::Result<Box<dyn HamiltonianSystem>> {
    Ok(match args.problem {
        ProblemName::Linear => {
            if !args.initial.is_empty() {
                bail!("use --p0/--q0 for the linear problem");
            }
            Box::new(linear_system(args.a, args.b, args.c, args.p0, args.q0))
        }
        ProblemName::HenonHeiles => {
            let mut sys = henon_heiles();
            if !args.initial.is_empty() {
                sys.initial = args
                    .initial
                    .as_slice()
                    .try_into()
                    .map_err(|_| anyhow!("--initial needs four values p1,p2,q1,q2"))?;
            }
            Box::new(sys)
        }
        ProblemName::Kepler => {
            if !args.initial.is_empty() {
                bail!("the Kepler problem uses its fixed circular orbit");
            }
            Box::new(kepler())
        }
    })
}

fn solver_options(args: &SolverArgs) -> anyhow::Result<SolverOptions> {
    if args.tol.is_nan() || args.tol <= 0.0 {
        bail!("--tol must be positive");
    }
    if args.max_iter == 0 {
        bail!("--max-iter must be positive");
    }
    Ok(SolverOptions {
        tolerance: args.tol,
        max_iterations: args.max_iter,
        guess: if args.warm_start {
            InitialGuess::PreviousStep
        } else {
            InitialGuess::Constant
        },
    })
}

/// Default node count: exact energy for polynomial problems, two spare
/// nodes otherwise.
fn default_nodes(alpha: &AlphaTableau, system: &dyn HamiltonianSystem) -> usize {
    let (s, r) = (alpha.s(), alpha.r());
    match system.poly_degree() {
        Some(nu) => min_nodes_for_exact_energy(nu, s, r),
        None => s.max(r) + 2,
    }
}

fn build_quadrature(
    args: &SolverArgs,
    alpha: &AlphaTableau,
    system: &dyn HamiltonianSystem,
) -> anyhow::Result<Quadrature> {
    match args.quad {
        QuadKind::Gauss => {
            let k = match args.nodes.as_slice() {
                [] => default_nodes(alpha, system),
                [k] if k.fract() == 0.0 && *k >= 1.0 => *k as usize,
                _ => bail!("--nodes for a Gauss rule is a single positive integer"),
            };
            Ok(gauss_legendre(k)?)
        }
        QuadKind::Interpolatory => {
            if args.nodes.is_empty() {
                bail!("an interpolatory rule needs --nodes c1,c2,...");
            }
            Ok(interpolatory(&args.nodes)?)
        }
    }
}

fn build_method(
    choice: MethodChoice,
    solver: &SolverArgs,
    system: &dyn HamiltonianSystem,
) -> anyhow::Result<Method> {
    Ok(match choice {
        MethodChoice::Baseline(b) => {
            if b == BaselineMethod::StormerVerlet && !system.is_separable() {
                bail!("stormer_verlet requires a separable problem (for linear, --b 0)");
            }
            b.into()
        }
        MethodChoice::Csprk(alpha) => {
            let quad = build_quadrature(solver, &alpha, system)?;
            CsprkScheme::new(build_tableau(&alpha)?, quad).into()
        }
    })
}

fn open_output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(
            fs::File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> anyhow::Result<()> {
    let mut out = open_output(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn cmd_run(args: RunArgs) -> Result<(), Failure> {
    if !args.h.is_finite() {
        return Err(anyhow!("--h must be finite").into());
    }
    let system = build_problem(&args.problem)?;
    let opts = solver_options(&args.solver)?;
    let method = build_method(resolve_method(&args.method)?, &args.solver, system.as_ref())?;
    let mut out = open_output(args.out.as_deref())?;
    let initial = system.initial_state();
    let result = method.integrate(system.as_ref(), &initial, args.h, args.steps, &opts);
    let trajectory = match &result {
        Ok(t) => t,
        Err(failure) => &failure.partial,
    };
    output::write_trajectory(&mut out, system.as_ref(), trajectory)
        .context("cannot write trajectory")?;
    if let Err(failure) = &result {
        writeln!(out, "# error: {failure}").context("cannot write trajectory")?;
    }
    out.flush().context("cannot write trajectory")?;
    result.map(|_| ()).map_err(|f| Failure::Numerical(f.into()))
}

fn cmd_order(args: OrderArgs) -> Result<(), Failure> {
    let system = build_problem(&args.problem)?;
    let opts = solver_options(&args.solver)?;
    let method = build_method(resolve_method(&args.method)?, &args.solver, system.as_ref())?;
    let study = convergence_study(&method, system.as_ref(), &args.h, args.t_end, &opts).map_err(
        |e| match e {
            method::ConvergenceError::Integration { .. } => Failure::Numerical(e.into()),
            other => Failure::Config(other.into()),
        },
    )?;
    write_json(args.out.as_deref(), &study)?;
    Ok(())
}

#[derive(Serialize)]
struct Residuals {
    start: f64,
    end: f64,
    symmetry: f64,
}

#[derive(Serialize)]
struct CheckReport {
    s: usize,
    r: usize,
    energy_condition: &'static str,
    residuals: Residuals,
    eta: Option<usize>,
    zeta: Option<usize>,
    certified_order: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    k_min: Option<usize>,
}

fn cmd_check(args: CheckArgs) -> Result<(), Failure> {
    let alpha = match resolve_method(&args.method)? {
        MethodChoice::Csprk(alpha) => alpha,
        MethodChoice::Baseline(b) => {
            return Err(anyhow!("`{b}` is a baseline; check needs a csPRK method").into())
        }
    };
    if let Some(path) = &args.emit_tableau {
        let json = serde_json::to_string_pretty(&alpha).map_err(anyhow::Error::from)?;
        fs::write(path, json + "\n").with_context(|| format!("cannot write {}", path.display()))?;
    }
    let tableau = build_tableau(&alpha).map_err(anyhow::Error::from)?;
    let report = check_energy_condition(&tableau, args.grid);
    let certificate = order_certificate(&tableau).map_err(anyhow::Error::from)?;
    let out = CheckReport {
        s: alpha.s(),
        r: alpha.r(),
        energy_condition: if report.passed() { "pass" } else { "fail" },
        residuals: Residuals {
            start: report.start_residual,
            end: report.end_residual,
            symmetry: report.symmetry_residual,
        },
        eta: largest_eta(&tableau),
        zeta: largest_zeta(&tableau),
        certified_order: certificate.order,
        k_min: args
            .nu
            .map(|nu| min_nodes_for_exact_energy(nu, alpha.s(), alpha.r())),
    };
    write_json(args.out.as_deref(), &out)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Order(args) => cmd_order(args),
        Command::Check(args) => cmd_check(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(e)) => {
            eprintln!("numerical failure: {e:#}");
            ExitCode::from(2)
        }
    }
}
