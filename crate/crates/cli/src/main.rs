use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use kaczmarz::analysis::{compute_gamma, noisy_bound, AnalysisReport};
use kaczmarz::experiment::{
    run_experiment, stream_for, write_trajectory_rows, ExperimentSpec, Purpose, TrajectoryPoint, DEFAULT_ITERS,
    DEFAULT_NOISE_NORM, DEFAULT_RECORD_EVERY, DEFAULT_TRIALS, TRAJECTORY_HEADER,
};
use kaczmarz::generators::{gen_noise, generate, random_unit, EnsembleKind, EnsembleSpec, NoiseKind};
use kaczmarz::io::{atomic_write, load_matrix, load_vector, save_matrix};
use kaczmarz::linalg::{distance, least_squares, sigma_extremes, AnyMatrix, AnyVector, DenseMatrix, Field, Scalar};
use kaczmarz::sampling::RngStream;
use kaczmarz::solver::{run, Schedule, SolveConfig};

/// Randomized Kaczmarz solver, analysis and experiment harness.
#[derive(Parser, Debug)]
#[command(name = "kaczmarz", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw a random matrix from an ensemble and write it as an rkmat file.
    Generate(GenerateArgs),
    /// Print singular values, R, gamma and the noise threshold of a matrix.
    Analyze(AnalyzeArgs),
    /// Run one solve and write its error trajectory as CSV.
    Solve(SolveArgs),
    /// Run many seeded noisy trials and write summary and trajectory CSVs.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    /// i.i.d. standard normal entries
    Gaussian,
    /// i.i.d. fair 0/1 entries
    Bernoulli,
    /// exp(2 pi i k t_j) at random nodes t_j; needs odd n
    Fourier,
}

impl From<Kind> for EnsembleKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Gaussian => EnsembleKind::Gaussian,
            Kind::Bernoulli => EnsembleKind::Bernoulli01,
            Kind::Fourier => EnsembleKind::PartialFourier,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum ScheduleArg {
    /// rows drawn with probability proportional to their squared norm
    #[default]
    Random,
    /// rows visited in order 0, 1, ..., m-1, 0, ...
    Cyclic,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Number of rows.
    #[arg(long)]
    m: usize,
    /// Number of columns.
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    /// Random stream id within the seed.
    #[arg(long, default_value_t = 0)]
    stream: u64,
    /// Output rkmat file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    /// Input rkmat file.
    #[arg(long)]
    matrix: PathBuf,
    /// Noise vector (rkvec) used for gamma and the threshold.
    #[arg(long)]
    noise: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("system").required(true).args(["rhs", "homogeneous"])))]
struct SolveArgs {
    /// Input rkmat file.
    #[arg(long)]
    matrix: PathBuf,
    /// Clean right-hand side (rkvec).
    #[arg(long)]
    rhs: Option<PathBuf>,
    /// Solve A x = 0; the solution is x = 0 and x0 is random unless --x0 is given.
    #[arg(long)]
    homogeneous: bool,
    /// Noise vector (rkvec) added to the right-hand side.
    #[arg(long, conflicts_with = "noise_norm")]
    noise: Option<PathBuf>,
    /// Draw Gaussian noise of this Euclidean norm and add it to the right-hand side.
    #[arg(long)]
    noise_norm: Option<f64>,
    /// Keep drawn noise real even for complex matrices.
    #[arg(long)]
    real_noise: bool,
    #[arg(long, default_value_t = DEFAULT_ITERS)]
    iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = ScheduleArg::Random)]
    schedule: ScheduleArg,
    /// Write one CSV row every this many iterations.
    #[arg(long, default_value_t = 1)]
    record_every: usize,
    /// Norm of the random initial iterate in homogeneous mode.
    #[arg(long, default_value_t = 1.0)]
    init_norm: f64,
    /// Initial iterate (rkvec); defaults to 0, or a random vector in homogeneous mode.
    #[arg(long)]
    x0: Option<PathBuf>,
    /// Solution the error is measured against (rkvec); defaults to the
    /// least-squares solution of the clean system, or 0 in homogeneous mode.
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Output trajectory CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Rows per matrix [default: 2000, or 700 for fourier].
    #[arg(long)]
    m: Option<usize>,
    /// Columns per matrix [default: 100, or 101 for fourier].
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, default_value_t = DEFAULT_ITERS)]
    iters: usize,
    #[arg(long, default_value_t = DEFAULT_RECORD_EVERY)]
    record_every: usize,
    #[arg(long, default_value_t = DEFAULT_NOISE_NORM)]
    noise_norm: f64,
    /// Master seed; every trial derives its own streams from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Norm of the random initial iterate.
    #[arg(long, default_value_t = 1.0)]
    init_norm: f64,
    /// Keep noise real even for complex matrices.
    #[arg(long)]
    real_noise: bool,
    /// Worker threads (defaults to all cores); output does not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    /// Directory receiving summary.csv and trajectories.csv.
    #[arg(long)]
    out_dir: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            // Fold clap's multi-line report into one line and drop the usage block.
            let text = e.to_string();
            let reason = text.split("Usage:").next().unwrap_or_default();
            let line: Vec<&str> = reason.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
            eprintln!("{}", line.join(" "));
            return ExitCode::from(2);
        }
    };
    let outcome = match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Experiment(args) => cmd_experiment(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", format!("{e:#}").replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<()> {
    let spec = EnsembleSpec::new(args.kind.into(), args.m, args.n, args.seed).with_stream(args.stream);
    let a = generate(&spec)?;
    save_matrix(&args.out, &a).with_context(|| format!("writing {}", args.out.display()))?;
    Ok(())
}

/// Reads a vector and converts it to the field of the matrix. Real vectors
/// are accepted for complex systems.
fn vector_for<T: Scalar>(path: &Path, len: usize, what: &str) -> Result<Vec<T>> {
    let v = load_vector(path).with_context(|| format!("reading {}", path.display()))?;
    let v: Vec<T> = match (v, T::FIELD) {
        (AnyVector::Real(r), Field::Complex) => r.into_iter().map(T::from_real).collect(),
        (v, _) => v.into_field()?,
    };
    if v.len() != len {
        bail!("{what} {} has length {}, expected {len}", path.display(), v.len());
    }
    Ok(v)
}

fn read_matrix_file(path: &Path) -> Result<AnyMatrix> {
    load_matrix(path).with_context(|| format!("reading {}", path.display()))
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<()> {
    match read_matrix_file(&args.matrix)? {
        AnyMatrix::Real(a) => analyze_typed(&a, args.noise.as_deref()),
        AnyMatrix::Complex(a) => analyze_typed(&a, args.noise.as_deref()),
    }
}

fn analyze_typed<T: Scalar>(a: &DenseMatrix<T>, noise: Option<&Path>) -> Result<()> {
    let noise = noise.map(|p| vector_for::<T>(p, a.rows(), "noise")).transpose()?;
    let sig = sigma_extremes(a)?;
    let mut out = std::io::stdout().lock();
    if sig.is_rank_deficient() {
        writeln!(out, "sigma_min={}", sig.sigma_min)?;
        writeln!(out, "sigma_max={}", sig.sigma_max)?;
        writeln!(out, "rank_deficient=true")?;
        bail!("matrix is rank deficient (sigma_min = {:e}, sigma_max = {:e})", sig.sigma_min, sig.sigma_max);
    }
    let rep = AnalysisReport::new(a, noise.as_deref())?;
    writeln!(out, "sigma_min={}", rep.sigma_min)?;
    writeln!(out, "sigma_max={}", rep.sigma_max)?;
    writeln!(out, "kappa={}", rep.kappa)?;
    writeln!(out, "R={}", rep.r)?;
    writeln!(out, "gamma={}", rep.gamma)?;
    writeln!(out, "threshold={}", rep.threshold)?;
    writeln!(out, "rank_deficient=false")?;
    Ok(())
}

fn cmd_solve(args: SolveArgs) -> Result<()> {
    match read_matrix_file(&args.matrix)? {
        AnyMatrix::Real(a) => solve_typed(&a, &args),
        AnyMatrix::Complex(a) => solve_typed(&a, &args),
    }
}

fn solve_typed<T: Scalar>(a: &DenseMatrix<T>, args: &SolveArgs) -> Result<()> {
    let (m, n) = (a.rows(), a.cols());
    // A single solve uses the stream layout of experiment trial 1.
    let stream = |p| stream_for(1, p);

    let clean = match &args.rhs {
        Some(p) => vector_for::<T>(p, m, "right-hand side")?,
        None => vec![T::zero(); m],
    };
    let noise_kind = if args.real_noise { NoiseKind::Real } else { NoiseKind::MatchField };
    let noise = match (&args.noise, args.noise_norm) {
        (Some(p), _) => vector_for::<T>(p, m, "noise")?,
        (None, Some(len)) => gen_noise(m, len, noise_kind, &mut RngStream::new(args.seed, stream(Purpose::Noise)))?,
        (None, None) => vec![T::zero(); m],
    };
    let rhs: Vec<T> = clean.iter().zip(&noise).map(|(&b, &r)| b + r).collect();

    let x0 = match &args.x0 {
        Some(p) => vector_for::<T>(p, n, "initial iterate")?,
        None if args.homogeneous => random_unit::<T>(n, &mut RngStream::new(args.seed, stream(Purpose::Start)))?
            .into_iter()
            .map(|x| x.scale(args.init_norm))
            .collect(),
        None => vec![T::zero(); n],
    };
    let reference = match &args.reference {
        Some(p) => vector_for::<T>(p, n, "reference")?,
        None if args.homogeneous => vec![T::zero(); n],
        None => least_squares(a, &clean).context("no --reference given and the least-squares solution is unavailable")?,
    };

    let schedule = match args.schedule {
        ScheduleArg::Random => Schedule::randomized(a)?,
        ScheduleArg::Cyclic => Schedule::Cyclic,
    };
    let cfg = SolveConfig::new(args.iters, args.seed)
        .record_every(args.record_every)
        .stream(stream(Purpose::Rows));
    let traj = run(a, &rhs, &x0, &schedule, &cfg, &reference)?;

    // The bound only describes the randomized schedule on a well-posed system.
    let init_err = distance(&x0, &reference);
    let bound_inputs = match args.schedule {
        ScheduleArg::Random => AnalysisReport::new(a, None)
            .ok()
            .and_then(|rep| compute_gamma(a, &noise).ok().map(|g| (rep.r, g))),
        ScheduleArg::Cyclic => None,
    };
    let points: Vec<TrajectoryPoint> = traj
        .records
        .iter()
        .map(|rec| TrajectoryPoint {
            iter: rec.iter,
            error: rec.error,
            noisy_bound: bound_inputs
                .and_then(|(r, g)| noisy_bound(r, g, init_err, rec.iter).ok())
                .unwrap_or(f64::NAN),
        })
        .collect();

    atomic_write(&args.out, |w| {
        writeln!(w, "{TRAJECTORY_HEADER}")?;
        write_trajectory_rows(w, 1, &points)
    })
    .with_context(|| format!("writing {}", args.out.display()))?;

    let mut out = std::io::stdout().lock();
    writeln!(out, "final_error={}", traj.final_error().unwrap_or(f64::NAN))?;
    if let Some((r, g)) = bound_inputs {
        writeln!(out, "threshold={}", r.sqrt() * g)?;
    }
    Ok(())
}

fn cmd_experiment(args: ExperimentArgs) -> Result<()> {
    let base = ExperimentSpec::new(args.kind.into());
    let spec = ExperimentSpec {
        m: args.m.unwrap_or(base.m),
        n: args.n.unwrap_or(base.n),
        trials: args.trials,
        iters: args.iters,
        record_every: args.record_every,
        noise_norm: args.noise_norm,
        noise_kind: if args.real_noise { NoiseKind::Real } else { NoiseKind::MatchField },
        init_norm: args.init_norm,
        master_seed: args.seed,
        ..base
    };
    spec.validate()?;

    let result = match args.threads {
        Some(0) => bail!("--threads must be at least 1"),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()?
            .install(|| run_experiment(&spec))?,
        None => run_experiment(&spec)?,
    };

    fs::create_dir_all(&args.out_dir).with_context(|| format!("creating {}", args.out_dir.display()))?;
    let (summary, trajectories) = result.write_outputs(&args.out_dir)?;

    let mut out = std::io::stdout().lock();
    writeln!(out, "trials={}", result.trials.len())?;
    writeln!(out, "mean_R={}", result.mean_r())?;
    writeln!(out, "mean_threshold={}", result.mean_threshold())?;
    writeln!(out, "mean_final_error={}", result.mean_final_error())?;
    writeln!(out, "pass_fraction={}", result.fraction_within(0.0))?;
    writeln!(out, "summary={}", summary.display())?;
    writeln!(out, "trajectories={}", trajectories.display())?;
    Ok(())
}
