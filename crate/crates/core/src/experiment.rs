//! Experiment configuration, the four preset studies, and the runner that
//! turns a configuration into an error table.

use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::baselines::{direct_fit_eval, BasisKind};
use crate::dataset::{load_dataset, read_points};
use crate::error::{Error, Result};
use crate::krylov::{fit_polynomial, fit_rational_space, ProblemKind, RecurrenceSign};
use crate::linalg::DenseVector;
use crate::nodes::{
    chebyshev_first_kind, clustered_nodes, conjugate_pair_poles_ordered, legendre_gauss, tapered_real_poles, Interval,
    NodeSet, PairOrdering, PoleSchedule,
};

/// Highest derivative order the error table reports.
pub const MAX_REPORTED_ORDER: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Poly,
    SobolevPoly,
    Rational,
    SobolevRational,
    DirectBaseline,
}

impl ExperimentKind {
    fn problem(self) -> Option<ProblemKind> {
        match self {
            Self::Poly => Some(ProblemKind::Poly),
            Self::SobolevPoly => Some(ProblemKind::SobolevPoly),
            Self::Rational => Some(ProblemKind::Rational),
            Self::SobolevRational => Some(ProblemKind::SobolevRational),
            Self::DirectBaseline => None,
        }
    }
}

/// Node count, either fixed or `per_degree * n + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NodeCount {
    Fixed(usize),
    Linear { per_degree: usize, offset: usize },
}

impl NodeCount {
    pub fn for_degree(self, n: usize) -> usize {
        match self {
            Self::Fixed(count) => count,
            Self::Linear { per_degree, offset } => per_degree * n + offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum NodeSource {
    Chebyshev {
        sigma: NodeCount,
    },
    Legendre {
        sigma: NodeCount,
    },
    Clustered {
        count: usize,
        interval: Interval,
    },
    /// Dataset file; supplies the orders and the fitted data.
    File {
        path: PathBuf,
    },
}

/// Pole generator; a degree `n` yields `n` poles, or `n` conjugate pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum PoleSource {
    Tapered,
    Conjugate {
        #[serde(default)]
        ordering: PairOrdering,
    },
    /// First `n` poles of an `re,im` list.
    File {
        path: PathBuf,
    },
}

impl PoleSource {
    pub fn schedule(&self, n: usize) -> Result<PoleSchedule> {
        match self {
            Self::Tapered => tapered_real_poles(n),
            Self::Conjugate { ordering } => conjugate_pair_poles_ordered(2 * n, *ordering),
            Self::File { path } => {
                let points = read_points(std::fs::File::open(path)?)?;
                if points.len() < n {
                    return Err(Error::DimensionMismatch { context: "pole file", expected: n, actual: points.len() });
                }
                PoleSchedule::from_poles(&points[..n])
            }
        }
    }
}

/// Reference function with closed-form derivatives up to second order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    /// `1 / (1 + 25 t^2)`
    Runge,
    /// `|t|`
    Abs,
    /// `sqrt(t)`
    Sqrt,
    /// `t sqrt(t)`
    TSqrt,
    Constant {
        value: f64,
    },
}

impl Target {
    /// `d`-th derivative at `t`, `d <= 2`.
    pub fn derivative(&self, d: usize, t: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        match (self, d) {
            (Self::Runge, 0) => one / (1.0 + 25.0 * t * t),
            (Self::Runge, 1) => -50.0 * t / (1.0 + 25.0 * t * t).powu(2),
            (Self::Runge, 2) => (3750.0 * t * t - 50.0) / (1.0 + 25.0 * t * t).powu(3),
            (Self::Abs, 0) => t.norm().into(),
            (Self::Abs, 1) => t.re.signum().into(),
            (Self::Abs, 2) => zero,
            (Self::Sqrt, 0) => t.sqrt(),
            (Self::Sqrt, 1) => 0.5 / t.sqrt(),
            (Self::Sqrt, 2) => -0.25 / (t * t.sqrt()),
            (Self::TSqrt, 0) => t * t.sqrt(),
            (Self::TSqrt, 1) => 1.5 * t.sqrt(),
            (Self::TSqrt, 2) => 0.75 / t.sqrt(),
            (Self::Constant { value }, 0) => (*value).into(),
            (Self::Constant { .. }, _) => zero,
            _ => panic!("derivative order {d} is not tabulated"),
        }
    }

    /// Data vector in per-node blocks `f^(s_j), ..., f_j`.
    pub fn stacked(&self, nodes: &NodeSet) -> DenseVector {
        nodes
            .nodes()
            .iter()
            .zip(nodes.orders())
            .flat_map(|(&z, &s)| (0..=s).rev().map(move |d| self.derivative(d, z)))
            .collect()
    }
}

/// `count` points on the interval: `a + (b - a) i / M` for `i = 1..=M` on a
/// half-open interval, equispaced including both ends on a closed one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleGrid {
    pub count: usize,
    pub interval: Interval,
}

impl SampleGrid {
    pub fn points(&self) -> Vec<Complex64> {
        let (a, b) = self.interval.bounds();
        let m = self.count;
        match self.interval {
            Interval::UnitHalfOpen => (1..=m).map(|i| Complex64::new(a + (b - a) * i as f64 / m as f64, 0.0)).collect(),
            Interval::Symmetric if m == 1 => vec![Complex64::new(0.5 * (a + b), 0.0)],
            Interval::Symmetric => {
                (0..m).map(|i| Complex64::new(a + (b - a) * i as f64 / (m - 1) as f64, 0.0)).collect()
            }
        }
    }
}

fn default_timing() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: String,
    pub problem: ExperimentKind,
    /// Explicit basis for `direct-baseline` runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline: Option<BasisKind>,
    pub nodes: NodeSource,
    /// Random `s_j` are drawn from `0..=max_order` for generated nodes;
    /// samples are evaluated up to this order.
    #[serde(default)]
    pub max_order: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poles: Option<PoleSource>,
    pub target: Target,
    pub degrees: Vec<usize>,
    pub samples: SampleGrid,
    pub reorth_passes: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// When false the runtime column is left empty so reports are byte-stable.
    #[serde(default = "default_timing")]
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    fn uses_derivatives(&self) -> bool {
        match self.problem {
            ExperimentKind::SobolevPoly | ExperimentKind::SobolevRational => true,
            ExperimentKind::DirectBaseline => self.baseline.is_some_and(BasisKind::allows_derivatives),
            ExperimentKind::Poly | ExperimentKind::Rational => false,
        }
    }

    fn is_rational(&self) -> bool {
        match self.problem {
            ExperimentKind::DirectBaseline => self.baseline.is_some_and(BasisKind::is_rational),
            kind => kind.problem().is_some_and(ProblemKind::is_rational),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::InvalidInput(msg.to_string()));
        if self.degrees.is_empty() {
            return fail("degree list is empty");
        }
        if self.samples.count == 0 {
            return fail("sample grid needs at least one point");
        }
        if !(1..=2).contains(&self.reorth_passes) {
            return fail("reorth_passes must be 1 or 2");
        }
        if self.max_order > MAX_REPORTED_ORDER {
            return fail("max_order above 2 is not tabulated");
        }
        if self.max_order > 0 && !self.uses_derivatives() {
            return fail("max_order > 0 needs a Sobolev problem or a confluent baseline");
        }
        if self.problem == ExperimentKind::DirectBaseline && self.baseline.is_none() {
            return fail("direct-baseline needs a baseline basis");
        }
        if self.is_rational() && self.poles.is_none() {
            return fail("rational problems need a pole source");
        }
        Ok(())
    }

    /// Fitting data for degree `n`: generated or loaded nodes and the data
    /// vector (from the file, or the target).
    pub fn data_for(&self, n: usize) -> Result<(NodeSet, DenseVector)> {
        let generated = match &self.nodes {
            NodeSource::Chebyshev { sigma } => chebyshev_first_kind(sigma.for_degree(n))?,
            NodeSource::Legendre { sigma } => legendre_gauss(sigma.for_degree(n))?,
            NodeSource::Clustered { count, interval } => clustered_nodes(*count, *interval)?,
            NodeSource::File { path } => {
                let (nodes, f) = load_dataset(path)?;
                if nodes.max_order() > MAX_REPORTED_ORDER {
                    return Err(Error::InvalidInput("dataset orders above 2 are not tabulated".into()));
                }
                return Ok((nodes, f));
            }
        };
        let nodes =
            if self.max_order > 0 { generated.with_random_orders(self.max_order, self.seed) } else { generated };
        let f = self.target.stacked(&nodes);
        Ok((nodes, f))
    }

    /// Derivative order evaluated at each sample point.
    pub fn sample_order(&self) -> usize {
        self.max_order
    }
}

/// Row status in a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowFlag {
    Ok,
    Breakdown,
    RankDeficient,
    NonFinite,
    Failed,
}

impl RowFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Ok => "ok",
            Self::Breakdown => "breakdown",
            Self::RankDeficient => "rank-deficient",
            Self::NonFinite => "non-finite",
            Self::Failed => "failed",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        [Self::Ok, Self::Breakdown, Self::RankDeficient, Self::NonFinite, Self::Failed]
            .into_iter()
            .find(|f| f.as_str() == text)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub n: usize,
    /// Sup error of derivative order `d` at index `d`; `None` when not measured.
    pub errors: [Option<f64>; MAX_REPORTED_ORDER + 1],
    pub runtime_ms: Option<f64>,
    pub flag: RowFlag,
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub name: String,
    pub seed: u64,
    pub rows: Vec<ReportRow>,
}

impl ErrorReport {
    pub fn row(&self, n: usize) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.n == n)
    }
}

fn fit_and_sample(
    config: &ExperimentConfig,
    nodes: &NodeSet,
    f: &DenseVector,
    n: usize,
    xs: &[Complex64],
    orders: &[usize],
) -> Result<(DenseVector, RowFlag)> {
    let poles = config.poles.as_ref().map(|p| p.schedule(n)).transpose()?;
    if config.problem.problem().is_some_and(|k| !k.is_sobolev()) && !nodes.is_plain() {
        return Err(Error::InvalidInput("derivative data needs a Sobolev problem".into()));
    }
    let reorth = config.reorth_passes;
    match config.problem.problem() {
        Some(kind) if kind.is_rational() => {
            let poles = poles.expect("validated");
            let (model, _) = fit_rational_space(kind, nodes, f, &poles, reorth)?;
            let sign = if kind.is_sobolev() { RecurrenceSign::Negated } else { RecurrenceSign::Standard };
            Ok((model.evaluate_with_sign(xs, orders, sign)?, RowFlag::Ok))
        }
        Some(kind) => {
            let (model, _) = fit_polynomial(kind, nodes, f, n, reorth)?;
            Ok((model.evaluate(xs, orders)?, RowFlag::Ok))
        }
        None => {
            let basis = config.baseline.expect("validated");
            let degree = poles.as_ref().map_or(n, PoleSchedule::len);
            let fit = direct_fit_eval(basis, nodes, poles.as_ref(), f, degree, xs, orders)?;
            let flag = if fit.is_rank_deficient() { RowFlag::RankDeficient } else { RowFlag::Ok };
            Ok((fit.values, flag))
        }
    }
}

/// Sup error per derivative order over `xs`; values come `(d = s, ..., 0)`
/// per point.
pub fn sup_errors(target: &Target, xs: &[Complex64], order: usize, values: &DenseVector) -> Vec<f64> {
    let mut errors = vec![0.0f64; order + 1];
    for (i, &x) in xs.iter().enumerate() {
        for (d, err) in errors.iter_mut().enumerate() {
            let v = values[i * (order + 1) + order - d];
            let e = (v - target.derivative(d, x)).norm();
            *err = if e.is_nan() || err.is_nan() { f64::NAN } else { err.max(e) };
        }
    }
    errors
}

/// Fitted values on the sample grid for degree `n`: points, per-point
/// order, and values `(d = order, ..., 0)` per point.
pub struct SampledFit {
    pub points: Vec<Complex64>,
    pub order: usize,
    pub values: DenseVector,
    pub flag: RowFlag,
}

pub fn sample_fit(config: &ExperimentConfig, n: usize) -> Result<SampledFit> {
    config.validate()?;
    let points = config.samples.points();
    let order = config.sample_order();
    let orders = vec![order; points.len()];
    let (nodes, f) = config.data_for(n)?;
    let (values, flag) = fit_and_sample(config, &nodes, &f, n, &points, &orders)?;
    Ok(SampledFit { points, order, values, flag })
}

fn run_row(config: &ExperimentConfig, n: usize) -> ReportRow {
    let start = Instant::now();
    let outcome = sample_fit(config, n);
    let runtime_ms = config.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
    let mut errors = [None; MAX_REPORTED_ORDER + 1];
    match outcome {
        Ok(SampledFit { points, order, values, mut flag }) => {
            for (d, e) in sup_errors(&config.target, &points, order, &values).into_iter().enumerate() {
                if !e.is_finite() && flag == RowFlag::Ok {
                    flag = RowFlag::NonFinite;
                }
                errors[d] = Some(e);
            }
            ReportRow { n, errors, runtime_ms, flag, message: None }
        }
        Err(err) => {
            let flag = if matches!(err, Error::Breakdown { .. }) { RowFlag::Breakdown } else { RowFlag::Failed };
            ReportRow { n, errors, runtime_ms, flag, message: Some(err.to_string()) }
        }
    }
}

/// Fits every degree in the list and tabulates sup errors on the sample
/// grid. Row failures are recorded in the flag column and do not stop the run.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ErrorReport> {
    config.validate()?;
    let mut degrees = config.degrees.clone();
    degrees.sort_unstable();
    degrees.dedup();
    let rows = degrees.into_iter().map(|n| run_row(config, n)).collect();
    Ok(ErrorReport { name: config.name.clone(), seed: config.seed, rows })
}

/// Default seed for the preset studies.
pub const DEFAULT_SEED: u64 = 20240601;

/// Names accepted by [`preset`].
pub const PRESETS: [&str; 11] = [
    "example1",
    "example1-legendre",
    "example1-single-pass",
    "example1-direct",
    "example2",
    "example2-direct",
    "example3",
    "example3-direct",
    "example3-scaled",
    "example4",
    "example4-direct",
];

/// The preset studies: Runge with derivative data on Gauss nodes, `|t|` with
/// conjugate poles, `sqrt(t)` and `t sqrt(t)` with tapered real poles.
pub fn preset(name: &str) -> Option<ExperimentConfig> {
    let symmetric = SampleGrid { count: 1000, interval: Interval::Symmetric };
    let unit = SampleGrid { count: 1000, interval: Interval::UnitHalfOpen };
    let gauss = NodeCount::Linear { per_degree: 2, offset: 1 };
    let runge = ExperimentConfig {
        name: name.to_string(),
        problem: ExperimentKind::SobolevPoly,
        baseline: None,
        nodes: NodeSource::Chebyshev { sigma: gauss },
        max_order: 2,
        poles: None,
        target: Target::Runge,
        degrees: vec![30, 60, 120, 240],
        samples: symmetric,
        reorth_passes: 2,
        seed: DEFAULT_SEED,
        output: None,
        timing: true,
    };
    let abs = ExperimentConfig {
        problem: ExperimentKind::Rational,
        nodes: NodeSource::Clustered { count: 2000, interval: Interval::Symmetric },
        max_order: 0,
        poles: Some(PoleSource::Conjugate { ordering: PairOrdering::Blocked }),
        target: Target::Abs,
        degrees: vec![15, 30, 60, 120],
        ..runge.clone()
    };
    let sqrt = ExperimentConfig {
        nodes: NodeSource::Clustered { count: 2000, interval: Interval::UnitHalfOpen },
        poles: Some(PoleSource::Tapered),
        target: Target::Sqrt,
        samples: unit,
        ..abs.clone()
    };
    let tsqrt = ExperimentConfig {
        problem: ExperimentKind::SobolevRational,
        max_order: 1,
        target: Target::TSqrt,
        degrees: vec![10, 20, 40, 80],
        ..sqrt.clone()
    };
    let direct = |base: &ExperimentConfig, kind: BasisKind| ExperimentConfig {
        problem: ExperimentKind::DirectBaseline,
        baseline: Some(kind),
        ..base.clone()
    };
    Some(match name {
        "example1" => runge,
        "example1-legendre" => ExperimentConfig { nodes: NodeSource::Legendre { sigma: gauss }, ..runge },
        "example1-single-pass" => ExperimentConfig { reorth_passes: 1, ..runge },
        "example1-direct" => direct(&runge, BasisKind::ConfluentVandermonde),
        "example2" => abs,
        "example2-direct" => direct(&abs, BasisKind::CauchyWithOnes),
        "example3" => sqrt,
        "example3-direct" => direct(&sqrt, BasisKind::CauchyWithOnes),
        "example3-scaled" => direct(&sqrt, BasisKind::ScaledCauchy),
        "example4" => tsqrt,
        "example4-direct" => direct(&tsqrt, BasisKind::ConfluentCauchy),
        _ => return None,
    })
}
