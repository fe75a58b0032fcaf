use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use arnoldi_lsq::baselines::{
    build_basis_matrix, displacement_residual, krylov_matrix, rational_krylov_matrix, BasisKind, Displacement,
};
use arnoldi_lsq::experiment::{
    preset, run_experiment, sample_fit, sup_errors, ExperimentConfig, ExperimentKind, NodeCount, NodeSource,
    PoleSource, SampleGrid, Target, DEFAULT_SEED, PRESETS,
};
use arnoldi_lsq::linalg::DenseMatrix;
use arnoldi_lsq::nodes::{Interval, PairOrdering};
use arnoldi_lsq::report::{emit_report, render_report, ReportFormat};

#[derive(Parser)]
#[command(name = "arnoldi-lsq", version, about = "Least-squares fitting through (rational) Arnoldi")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Weighted polynomial fit of function values.
    FitPoly(FitArgs),
    /// Polynomial fit of function and derivative data.
    FitSobolevPoly(FitArgs),
    /// Rational fit with prescribed poles.
    FitRational(FitArgs),
    /// Rational fit of function and derivative data.
    FitSobolevRational(FitArgs),
    /// Direct solve in an explicit (monomial or Cauchy) basis.
    Baseline {
        #[arg(long, value_enum)]
        basis: BasisArg,
        #[command(flatten)]
        fit: FitArgs,
    },
    /// Runs a preset study or a JSON configuration and prints its error table.
    Experiment(ExperimentArgs),
    /// Displacement ranks of the explicit and Krylov matrices on a node set.
    DisplacementCheck(CommonArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Degree, or number of poles (conjugate pairs for `--poles conjugate`).
    #[arg(long, default_value_t = 10)]
    n: usize,
    /// Gram-Schmidt passes per step.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
    reorth: u8,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Number of sample points M.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    /// chebyshev | legendre | clustered | file:PATH
    #[arg(long, default_value = "chebyshev")]
    nodes: String,
    /// tapered | conjugate | file:PATH
    #[arg(long, default_value = "tapered")]
    poles: String,
    /// Gauss node count; defaults to 2n + 1.
    #[arg(long)]
    sigma: Option<usize>,
    /// Clustered node count.
    #[arg(long, default_value_t = 2000)]
    count: usize,
    #[arg(long, value_enum)]
    interval: Option<IntervalArg>,
    /// Random derivative orders up to this value on generated nodes.
    #[arg(long, default_value_t = 0)]
    max_order: usize,
}

#[derive(Args, Clone)]
struct FitArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Reference function; required unless the nodes come from a file.
    #[arg(long, value_enum)]
    target: Option<TargetArg>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Preset name or path to a JSON configuration.
    name: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    reorth: Option<u8>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Leave the runtime column empty for byte-stable output.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum IntervalArg {
    Unit,
    Symmetric,
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    Runge,
    Abs,
    Sqrt,
    TSqrt,
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisArg {
    Vandermonde,
    ConfluentVandermonde,
    CauchyWithOnes,
    ConfluentCauchy,
    ScaledCauchy,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Tsv,
    Markdown,
}

impl From<BasisArg> for BasisKind {
    fn from(b: BasisArg) -> Self {
        match b {
            BasisArg::Vandermonde => BasisKind::Vandermonde,
            BasisArg::ConfluentVandermonde => BasisKind::ConfluentVandermonde,
            BasisArg::CauchyWithOnes => BasisKind::CauchyWithOnes,
            BasisArg::ConfluentCauchy => BasisKind::ConfluentCauchy,
            BasisArg::ScaledCauchy => BasisKind::ScaledCauchy,
        }
    }
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => ReportFormat::Csv,
            FormatArg::Tsv => ReportFormat::Tsv,
            FormatArg::Markdown => ReportFormat::Markdown,
        }
    }
}

fn target_of(arg: TargetArg) -> Target {
    match arg {
        TargetArg::Runge => Target::Runge,
        TargetArg::Abs => Target::Abs,
        TargetArg::Sqrt => Target::Sqrt,
        TargetArg::TSqrt => Target::TSqrt,
    }
}

fn node_source(args: &CommonArgs, interval: Interval) -> anyhow::Result<NodeSource> {
    let sigma = args.sigma.map_or(NodeCount::Linear { per_degree: 2, offset: 1 }, NodeCount::Fixed);
    Ok(match args.nodes.as_str() {
        "chebyshev" => NodeSource::Chebyshev { sigma },
        "legendre" => NodeSource::Legendre { sigma },
        "clustered" => NodeSource::Clustered { count: args.count, interval },
        other => match other.strip_prefix("file:") {
            Some(path) => NodeSource::File { path: path.into() },
            None => bail!("unknown node source {other:?}"),
        },
    })
}

fn pole_source(text: &str) -> anyhow::Result<PoleSource> {
    Ok(match text {
        "tapered" => PoleSource::Tapered,
        "conjugate" => PoleSource::Conjugate { ordering: PairOrdering::Blocked },
        other => match other.strip_prefix("file:") {
            Some(path) => PoleSource::File { path: path.into() },
            None => bail!("unknown pole source {other:?}"),
        },
    })
}

fn interval_of(arg: Option<IntervalArg>, target: Option<Target>) -> Interval {
    match (arg, target) {
        (Some(IntervalArg::Unit), _) => Interval::UnitHalfOpen,
        (Some(IntervalArg::Symmetric), _) => Interval::Symmetric,
        (None, Some(Target::Sqrt | Target::TSqrt)) => Interval::UnitHalfOpen,
        (None, _) => Interval::Symmetric,
    }
}

fn fit_config(problem: ExperimentKind, basis: Option<BasisKind>, args: &FitArgs) -> anyhow::Result<ExperimentConfig> {
    let c = &args.common;
    let target = args.target.map(target_of);
    if target.is_none() && !c.nodes.starts_with("file:") {
        bail!("--target is required for generated nodes");
    }
    let interval = interval_of(c.interval, target);
    let rational = match problem {
        ExperimentKind::Rational | ExperimentKind::SobolevRational => true,
        ExperimentKind::DirectBaseline => basis.is_some_and(BasisKind::is_rational),
        _ => false,
    };
    let config = ExperimentConfig {
        name: String::new(),
        problem,
        baseline: basis,
        nodes: node_source(c, interval)?,
        max_order: c.max_order,
        poles: if rational { Some(pole_source(&c.poles)?) } else { None },
        target: target.unwrap_or(Target::Constant { value: 0.0 }),
        degrees: vec![c.n],
        samples: SampleGrid { count: c.samples, interval },
        reorth_passes: c.reorth as usize,
        seed: c.seed,
        output: c.out.clone(),
        timing: false,
    };
    config.validate()?;
    Ok(config)
}

fn run_fit(problem: ExperimentKind, basis: Option<BasisKind>, args: &FitArgs) -> anyhow::Result<()> {
    let config = fit_config(problem, basis, args)?;
    let fit = sample_fit(&config, args.common.n)?;
    let mut out: Box<dyn Write> = match &config.output {
        Some(path) => Box::new(std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?),
        None => Box::new(std::io::stdout().lock()),
    };
    writeln!(out, "x_re,x_im,order,value_re,value_im")?;
    let per_point = fit.order + 1;
    for (i, x) in fit.points.iter().enumerate() {
        for d in 0..per_point {
            let v: Complex64 = fit.values[i * per_point + fit.order - d];
            writeln!(out, "{},{},{},{:e},{:e}", x.re, x.im, d, v.re, v.im)?;
        }
    }
    out.flush()?;
    if args.target.is_some() {
        for (d, e) in sup_errors(&config.target, &fit.points, fit.order, &fit.values).iter().enumerate() {
            eprintln!("err{d} = {e:.3e}");
        }
    }
    eprintln!("flag = {}", fit.flag.as_str());
    Ok(())
}

fn run_named(args: &ExperimentArgs) -> anyhow::Result<()> {
    let mut config = match preset(&args.name) {
        Some(config) => config,
        None if args.name.ends_with(".json") => {
            ExperimentConfig::load(args.name.as_ref()).with_context(|| format!("loading {}", args.name))?
        }
        None => bail!("unknown experiment {:?}; presets: {}", args.name, PRESETS.join(", ")),
    };
    if let Some(n) = args.n {
        config.degrees = vec![n];
    }
    if let Some(r) = args.reorth {
        config.reorth_passes = r as usize;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(m) = args.samples {
        config.samples.count = m;
    }
    if args.out.is_some() {
        config.output = args.out.clone();
    }
    if args.no_timing {
        config.timing = false;
    }
    let report = run_experiment(&config)?;
    for row in report.rows.iter().filter(|r| r.message.is_some()) {
        eprintln!("n = {}: {}", row.n, row.message.as_deref().unwrap_or_default());
    }
    match &config.output {
        Some(path) => {
            let format = args.format.map_or_else(|| ReportFormat::from_path(path), ReportFormat::from);
            emit_report(&report, format, path, Some(&config))?;
            std::io::stdout().write_all(&render_report(&report, ReportFormat::Markdown)?)?;
        }
        None => {
            let format = args.format.map_or(ReportFormat::Markdown, ReportFormat::from);
            std::io::stdout().write_all(&render_report(&report, format)?)?;
            eprintln!("seed = {}", report.seed);
        }
    }
    Ok(())
}

fn run_displacement(args: &CommonArgs) -> anyhow::Result<()> {
    let config = ExperimentConfig {
        name: String::new(),
        problem: ExperimentKind::SobolevRational,
        baseline: None,
        nodes: node_source(args, interval_of(args.interval, None))?,
        max_order: args.max_order,
        poles: Some(pole_source(&args.poles)?),
        target: Target::Constant { value: 0.0 },
        degrees: vec![args.n],
        samples: SampleGrid { count: 1, interval: Interval::Symmetric },
        reorth_passes: 2,
        seed: args.seed,
        output: None,
        timing: false,
    };
    let (nodes, _) = config.data_for(args.n)?;
    let schedule = config.poles.as_ref().expect("set above").schedule(args.n)?;
    let poles = schedule.finite_values()?;
    let a = arnoldi_lsq::JordanOperator::from_node_set(&nodes).to_dense();
    let z = DenseMatrix::diagonal(nodes.nodes());
    let mut lines = Vec::new();
    let degree = poles.len();
    if nodes.is_plain() {
        let v = build_basis_matrix(BasisKind::Vandermonde, &nodes, None, args.n)?.matrix;
        lines.push(("vandermonde", displacement_residual(&z, &v, &Displacement::Shift)?.1));
        let c = build_basis_matrix(BasisKind::CauchyWithOnes, &nodes, Some(&schedule), degree)?.matrix;
        lines.push(("cauchy-with-ones", displacement_residual(&z, &c, &Displacement::Poles(poles.clone()))?.1));
    }
    let k = krylov_matrix(&nodes, args.n);
    lines.push(("krylov", displacement_residual(&a, &k, &Displacement::Shift)?.1));
    let rk = rational_krylov_matrix(&nodes, &poles)?;
    lines.push(("rational-krylov", displacement_residual(&a, &rk, &Displacement::Poles(poles))?.1));
    let mut out: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(std::fs::File::create(path)?),
        None => Box::new(std::io::stdout().lock()),
    };
    writeln!(out, "matrix,rank")?;
    for (name, rank) in lines {
        writeln!(out, "{name},{rank}")?;
    }
    Ok(())
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    match &cli.command {
        Command::FitPoly(args) => run_fit(ExperimentKind::Poly, None, args),
        Command::FitSobolevPoly(args) => run_fit(ExperimentKind::SobolevPoly, None, args),
        Command::FitRational(args) => run_fit(ExperimentKind::Rational, None, args),
        Command::FitSobolevRational(args) => run_fit(ExperimentKind::SobolevRational, None, args),
        Command::Baseline { basis, fit } => run_fit(ExperimentKind::DirectBaseline, Some((*basis).into()), fit),
        Command::Experiment(args) => run_named(args),
        Command::DisplacementCheck(args) => run_displacement(args),
    }
}
