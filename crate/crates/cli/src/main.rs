use std::fmt;
use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hopf_delay::charsolve::linspace;
use hopf_delay::curves::{build_hopf_curves, compare_methods, CurveBuild, SimulatedRows};
use hopf_delay::ddesim::{classify_long_run, detect_hopf_bisection, integrate_from, DetectOptions, History, LongRunClass};
use hopf_delay::hopf::parse_method_list;
use hopf_delay::table::{self, CurveRow, CurveTable, CURVE_HEADER};
use hopf_delay::{Error, Method, SystemKind, SystemSpec};

const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_IO: u8 = 4;
const EXIT_SIMULATION: u8 = 5;

#[derive(Parser)]
#[command(name = "hopf-delay", version, about = "Hopf curves of oscillators with delayed self-feedback")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Critical delay curves over a grid of feedback gains.
    HopfCurves(CurvesArgs),
    /// Integrate the delay equation and classify its long-run behaviour.
    Simulate(SimulateArgs),
    /// Locate a Hopf delay by bisection on simulated stability.
    DetectHopf(DetectArgs),
    /// Per-method error of the critical delay against the exact curve.
    Compare(CompareArgs),
}

#[derive(Args)]
struct SystemArgs {
    /// duffing, vdp or erneux
    #[arg(long)]
    system: SystemKind,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Duffing damping; defaults to 0.05 for duffing and 0 otherwise.
    #[arg(long)]
    alpha: Option<f64>,
    /// Duffing cubic stiffness; defaults to 1 for duffing and 0 otherwise.
    #[arg(long)]
    gamma: Option<f64>,
}

impl SystemArgs {
    fn spec(&self, k: f64) -> SystemSpec {
        let duffing = self.system == SystemKind::Duffing;
        SystemSpec {
            kind: self.system,
            epsilon: self.epsilon,
            alpha: self.alpha.unwrap_or(if duffing { 0.05 } else { 0.0 }),
            gamma: self.gamma.unwrap_or(if duffing { 1.0 } else { 0.0 }),
            k,
        }
    }
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    k_min: f64,
    #[arg(long)]
    k_max: f64,
    /// Number of grid points, endpoints included.
    #[arg(long, default_value_t = 100)]
    k_steps: usize,
}

impl GridArgs {
    fn values(&self) -> Result<Vec<f64>, Error> {
        if !(self.k_min.is_finite() && self.k_max.is_finite() && self.k_min <= self.k_max) {
            return Err(Error::InvalidInput(format!(
                "need finite k-min <= k-max, got {} and {}",
                self.k_min, self.k_max
            )));
        }
        if self.k_steps == 0 || (self.k_steps == 1 && self.k_min != self.k_max) {
            return Err(Error::InvalidInput("k-steps must be >= 2 for a non-degenerate range".into()));
        }
        Ok(linspace(self.k_min, self.k_max, self.k_steps))
    }
}

#[derive(Args)]
struct SimArgs {
    /// Output sample spacing for simulations.
    #[arg(long, default_value_t = 0.05)]
    dt: f64,
    /// Simulated time per stability probe; defaults to 400/epsilon.
    #[arg(long)]
    t_end: Option<f64>,
    /// Constant history and initial displacement for the probes.
    #[arg(long, default_value_t = 0.1)]
    x0: f64,
}

impl SimArgs {
    fn options(&self) -> DetectOptions {
        DetectOptions {
            dt: self.dt,
            t_end: self.t_end,
            x0: self.x0,
            ..DetectOptions::default()
        }
    }
}

#[derive(Args)]
struct CurvesArgs {
    #[command(flatten)]
    system: SystemArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Comma-separated subset of approach1, approach2, exact, simulated.
    #[arg(long, default_value = "approach1,approach2,exact")]
    methods: String,
    #[command(flatten)]
    sim: SimArgs,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    system: SystemArgs,
    #[arg(long, default_value_t = 0.0)]
    k: f64,
    #[arg(long, default_value_t = 0.0)]
    delay: f64,
    #[arg(long, default_value_t = 0.05)]
    dt: f64,
    #[arg(long, default_value_t = 200.0)]
    t_end: f64,
    /// History for t <= 0, as const:<value>.
    #[arg(long, default_value = "const:0.1")]
    history: History,
    /// Initial displacement; defaults to the history at t = 0.
    #[arg(long)]
    x0: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    v0: f64,
    /// Fraction of the run, from the end, used for classification.
    #[arg(long, default_value_t = 0.25)]
    settle: f64,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DetectArgs {
    #[command(flatten)]
    system: SystemArgs,
    #[arg(long)]
    k: f64,
    #[arg(long)]
    t_lo: f64,
    #[arg(long)]
    t_hi: f64,
    /// Bisection stops when the bracket is narrower than this.
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    #[command(flatten)]
    sim: SimArgs,
    /// Curve table to append the point to; created with a header if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    system: SystemArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Methods to score against the exact curve.
    #[arg(long, default_value = "approach1,approach2")]
    methods: String,
    #[command(flatten)]
    sim: SimArgs,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Lib(Error),
    Io { path: String, source: io::Error },
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Lib(e) => write!(f, "{e}"),
            Failure::Io { path, source } => write!(f, "{path}: {source}"),
        }
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Io { .. } => EXIT_IO,
            Failure::Lib(e) => match e {
                Error::InvalidInput(_) => EXIT_USAGE,
                Error::Parse { .. } => EXIT_IO,
                Error::AmbiguousClassification { .. } | Error::InsufficientData(_) | Error::PolarSingularity { .. } => {
                    EXIT_SIMULATION
                }
                Error::NoHopf(_)
                | Error::SeriesDivergence { .. }
                | Error::Divergence { .. }
                | Error::SingularJacobian { .. }
                | Error::SeedFailure(_)
                | Error::NoCrossing { .. }
                | Error::EmptyReport(_) => EXIT_NUMERICAL,
            },
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> Failure + '_ {
    move |source| Failure::Io {
        path: path.display().to_string(),
        source,
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(io_err(path)),
        None => io::stdout().write_all(text.as_bytes()).map_err(io_err(Path::new("<stdout>"))),
    }
}

fn methods(list: &str) -> Result<Vec<Method>, Failure> {
    Ok(parse_method_list(list)?)
}

fn report_build(build: &CurveBuild) {
    let mut counts: Vec<(String, usize)> = Vec::new();
    for o in &build.omitted {
        let key = format!("{} {}", o.method, o.branch);
        match counts.iter_mut().find(|(k, _)| *k == key) {
            Some((_, n)) => *n += 1,
            None => counts.push((key, 1)),
        }
    }
    for (key, n) in counts {
        eprintln!("omitted {n} grid points for {key}");
    }
    for (branch, t) in &build.truncations {
        eprintln!("exact {branch} continuation stopped at k = {}: {}", t.at, t.reason);
    }
    eprintln!("wrote {} rows", build.table.len());
}

fn cmd_hopf_curves(args: &CurvesArgs) -> Result<(), Failure> {
    let ks = args.grid.values()?;
    let methods = methods(&args.methods)?;
    let sim = SimulatedRows {
        detect: args.sim.options(),
        ..SimulatedRows::default()
    };
    let build = build_hopf_curves(&args.system.spec(0.0), &ks, &methods, &sim)?;
    emit(args.out.as_deref(), &build.table.to_csv())?;
    report_build(&build);
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), Failure> {
    let spec = args.system.spec(args.k);
    let x0 = args.x0.unwrap_or_else(|| args.history.value(0.0));
    let traj = integrate_from(&spec, args.delay, &args.history, (x0, args.v0), args.dt, args.t_end)?;
    emit(args.out.as_deref(), &table::trajectory_to_csv(&traj))?;
    if traj.overflow {
        eprintln!("run stopped at t = {} after leaving the finite range", traj.t.last().copied().unwrap_or(0.0));
    }
    let class = classify_long_run(&traj, args.settle, &Default::default())?;
    match class {
        LongRunClass::LimitCycle { amplitude } => eprintln!("class=LimitCycle amplitude={amplitude}"),
        LongRunClass::DecayToOrigin => eprintln!("class=DecayToOrigin"),
        LongRunClass::Growth => eprintln!("class=Growth"),
    }
    Ok(())
}

fn append_row(path: &Path, row: &CurveRow) -> Result<(), Failure> {
    let fresh = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let mut text = CurveTable::new(vec![*row]).to_csv();
    if !fresh {
        text = text.split_once('\n').map(|(_, body)| body.to_string()).unwrap_or_default();
    } else {
        debug_assert!(text.starts_with(CURVE_HEADER));
    }
    let mut f = OpenOptions::new().create(true).append(true).open(path).map_err(io_err(path))?;
    f.write_all(text.as_bytes()).map_err(io_err(path))
}

fn cmd_detect_hopf(args: &DetectArgs) -> Result<(), Failure> {
    if args.t_lo > args.t_hi {
        return Err(Error::InvalidInput(format!("t-lo {} exceeds t-hi {}", args.t_lo, args.t_hi)).into());
    }
    let spec = args.system.spec(args.k);
    let p = detect_hopf_bisection(&spec, args.k, args.t_lo, args.t_hi, args.tol, &args.sim.options())?;
    println!(
        "{},{},{},method=simulated,branch={}",
        table::format_f64(p.k),
        table::format_f64(p.delay),
        table::format_f64(p.omega),
        p.branch
    );
    if let Some(path) = &args.out {
        append_row(path, &CurveRow::from_point(&spec, &p))?;
    }
    Ok(())
}

fn cmd_compare(args: &CompareArgs) -> Result<(), Failure> {
    let ks = args.grid.values()?;
    let mut wanted = methods(&args.methods)?;
    if !wanted.contains(&Method::ExactChar) {
        wanted.push(Method::ExactChar);
    }
    let sim = SimulatedRows {
        detect: args.sim.options(),
        ..SimulatedRows::default()
    };
    let build = build_hopf_curves(&args.system.spec(0.0), &ks, &wanted, &sim)?;
    report_build(&build);
    let requested = methods(&args.methods)?;
    let rows: Vec<_> = compare_methods(&build.table)?
        .into_iter()
        .filter(|r| requested.contains(&r.method))
        .collect();
    if rows.is_empty() {
        return Err(Error::EmptyReport("none of the requested methods overlaps the exact curve".into()).into());
    }
    emit(args.out.as_deref(), &table::comparison_to_csv(&rows))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::HopfCurves(a) => cmd_hopf_curves(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::DetectHopf(a) => cmd_detect_hopf(a),
        Command::Compare(a) => cmd_compare(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
