//! Node/weight sets, quadrature rules, clustered nodes, and pole schedules.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Fitting data layout: one entry per node with its weight, derivative order
/// `s_j`, and the `s_j` Jordan superdiagonal factors `alpha_1 ..= alpha_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet {
    nodes: Vec<Complex64>,
    weights: Vec<Complex64>,
    orders: Vec<usize>,
    alphas: Vec<Vec<Complex64>>,
}

impl NodeSet {
    /// Plain least-squares data (all `s_j = 0`).
    pub fn new(nodes: Vec<Complex64>, weights: Vec<Complex64>) -> Result<Self> {
        let orders = vec![0; nodes.len()];
        Self::with_derivatives(nodes, weights, orders, None)
    }

    /// Derivative-bearing data. `alphas = None` selects `alpha_r = 1` everywhere.
    pub fn with_derivatives(
        nodes: Vec<Complex64>,
        weights: Vec<Complex64>,
        orders: Vec<usize>,
        alphas: Option<Vec<Vec<Complex64>>>,
    ) -> Result<Self> {
        let sigma = nodes.len();
        if sigma == 0 {
            return Err(Error::InvalidInput("node set is empty".into()));
        }
        for (context, len) in [("node weights", weights.len()), ("node orders", orders.len())] {
            if len != sigma {
                return Err(Error::DimensionMismatch { context, expected: sigma, actual: len });
            }
        }
        let alphas = alphas.unwrap_or_else(|| orders.iter().map(|&s| vec![ONE; s]).collect());
        if alphas.len() != sigma {
            return Err(Error::DimensionMismatch { context: "node alphas", expected: sigma, actual: alphas.len() });
        }
        for (j, (a, &s)) in alphas.iter().zip(&orders).enumerate() {
            if a.len() != s {
                return Err(Error::DimensionMismatch { context: "alpha count for node", expected: s, actual: a.len() });
            }
            if let Some(r) = a.iter().position(|x| *x == Complex64::new(0.0, 0.0)) {
                return Err(Error::ZeroAlpha { node: j, order: r + 1 });
            }
        }
        let finite = |v: &[Complex64]| v.iter().all(|z| z.re.is_finite() && z.im.is_finite());
        if !finite(&nodes) || !finite(&weights) || !alphas.iter().all(|a| finite(a)) {
            return Err(Error::NonFinite("node set"));
        }
        check_distinct(&nodes)?;
        Ok(Self { nodes, weights, orders, alphas })
    }

    /// Replaces every order, resetting the alphas to one.
    pub fn with_orders(self, orders: Vec<usize>) -> Result<Self> {
        Self::with_derivatives(self.nodes, self.weights, orders, None)
    }

    /// Draws each `s_j` uniformly from `0..=max_order` with a seeded generator.
    pub fn with_random_orders(self, max_order: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let orders: Vec<usize> = (0..self.nodes.len()).map(|_| rng.gen_range(0..=max_order)).collect();
        let alphas = orders.iter().map(|&s| vec![ONE; s]).collect();
        Self { orders, alphas, ..self }
    }

    /// Number of nodes `sigma`.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    /// `alpha_1 ..= alpha_{s_j}` for node `j`.
    pub fn alphas(&self, j: usize) -> &[Complex64] {
        &self.alphas[j]
    }

    /// Row count `m = sigma + sum s_j`.
    pub fn total_rows(&self) -> usize {
        self.nodes.len() + self.orders.iter().sum::<usize>()
    }

    pub fn max_order(&self) -> usize {
        self.orders.iter().copied().max().unwrap_or(0)
    }

    /// True when no node carries derivative data.
    pub fn is_plain(&self) -> bool {
        self.orders.iter().all(|&s| s == 0)
    }

    pub fn min_pairwise_gap(&self) -> f64 {
        min_gap(&self.nodes)
    }

    /// Same nodes and orders, every weight multiplied by `factor`.
    pub fn scaled_weights(&self, factor: Complex64) -> Self {
        Self { weights: self.weights.iter().map(|w| w * factor).collect(), ..self.clone() }
    }
}

fn check_distinct(nodes: &[Complex64]) -> Result<()> {
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by(|&a, &b| nodes[a].re.total_cmp(&nodes[b].re).then(nodes[a].im.total_cmp(&nodes[b].im)));
    for pair in order.windows(2) {
        if nodes[pair[0]] == nodes[pair[1]] {
            let (first, second) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            return Err(Error::DuplicateNode { first, second });
        }
    }
    Ok(())
}

fn min_gap(points: &[Complex64]) -> f64 {
    let mut gap = f64::INFINITY;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            gap = gap.min((a - b).norm());
        }
    }
    gap
}

/// A point of the extended complex plane stored as `numerator / denominator`;
/// infinity has a zero denominator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioPoint {
    pub numerator: Complex64,
    pub denominator: Complex64,
}

impl RatioPoint {
    pub fn finite(value: Complex64) -> Self {
        Self { numerator: value, denominator: ONE }
    }

    pub fn infinity() -> Self {
        Self { numerator: ONE, denominator: Complex64::new(0.0, 0.0) }
    }

    pub fn is_infinite(&self) -> bool {
        self.denominator == Complex64::new(0.0, 0.0)
    }

    pub fn value(&self) -> Option<Complex64> {
        (!self.is_infinite()).then(|| self.numerator / self.denominator)
    }

    fn coincides(&self, other: &RatioPoint) -> bool {
        self.numerator * other.denominator == self.denominator * other.numerator
    }
}

/// Poles `xi_k = mu_k / nu_k` and shifts `phi_k = rho_k / eta_k` of a rational
/// Krylov space.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleSchedule {
    poles: Vec<RatioPoint>,
    shifts: Vec<RatioPoint>,
}

impl PoleSchedule {
    pub fn new(poles: Vec<RatioPoint>, shifts: Vec<RatioPoint>) -> Result<Self> {
        if poles.len() != shifts.len() {
            return Err(Error::DimensionMismatch {
                context: "pole shifts",
                expected: poles.len(),
                actual: shifts.len(),
            });
        }
        for (k, (p, s)) in poles.iter().zip(&shifts).enumerate() {
            if p.numerator == Complex64::new(0.0, 0.0) && p.is_infinite() {
                return Err(Error::InvalidInput(format!("pole {k} is 0/0")));
            }
            if p.coincides(s) {
                return Err(Error::PoleEqualsShift { index: k });
            }
        }
        Ok(Self { poles, shifts })
    }

    /// Shifts follow the resolvent-product convention: `phi_1` at infinity,
    /// `phi_k = xi_{k-1}` afterwards.
    pub fn from_points(poles: Vec<RatioPoint>) -> Result<Self> {
        let shifts = std::iter::once(RatioPoint::infinity()).chain(poles.iter().copied()).take(poles.len()).collect();
        Self::new(poles, shifts)
    }

    pub fn from_poles(poles: &[Complex64]) -> Result<Self> {
        Self::from_points(poles.iter().copied().map(RatioPoint::finite).collect())
    }

    pub fn len(&self) -> usize {
        self.poles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }

    pub fn poles(&self) -> &[RatioPoint] {
        &self.poles
    }

    pub fn shifts(&self) -> &[RatioPoint] {
        &self.shifts
    }

    /// Pole values; `None` for poles at infinity.
    pub fn values(&self) -> Vec<Option<Complex64>> {
        self.poles.iter().map(RatioPoint::value).collect()
    }

    /// All poles as finite values, or an error if any lies at infinity.
    pub fn finite_values(&self) -> Result<Vec<Complex64>> {
        self.poles
            .iter()
            .enumerate()
            .map(|(k, p)| p.value().ok_or_else(|| Error::InvalidInput(format!("pole {k} is at infinity"))))
            .collect()
    }

    /// Smallest distance between a finite pole and any of `points`.
    pub fn min_distance_to(&self, points: &[Complex64]) -> f64 {
        self.poles
            .iter()
            .filter_map(RatioPoint::value)
            .flat_map(|p| points.iter().map(move |z| (p - z).norm()))
            .fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn check_against(&self, nodes: &[Complex64]) -> Result<()> {
        for (k, p) in self.poles.iter().enumerate() {
            for (j, z) in nodes.iter().enumerate() {
                if p.denominator * z - p.numerator == Complex64::new(0.0, 0.0) {
                    return Err(Error::PoleEqualsNode { pole_index: k, node_index: j });
                }
            }
        }
        Ok(())
    }
}

/// Chebyshev-Gauss nodes of the first kind, `cos((2j-1) pi / (2 sigma))`,
/// with `w_j = sqrt(pi / sigma)`.
pub fn chebyshev_first_kind(sigma: usize) -> Result<NodeSet> {
    if sigma == 0 {
        return Err(Error::InvalidInput("Chebyshev rule needs sigma >= 1".into()));
    }
    let w = Complex64::new((PI / sigma as f64).sqrt(), 0.0);
    let nodes =
        (1..=sigma).map(|j| Complex64::new(((2 * j - 1) as f64 * PI / (2 * sigma) as f64).cos(), 0.0)).collect();
    NodeSet::new(nodes, vec![w; sigma])
}

/// `(P_n(x), P_{n-1}(x))` by the three-term recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let (mut prev, mut cur) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let next = ((2 * k + 1) as f64 * x * cur - k as f64 * prev) / (k + 1) as f64;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Gauss-Legendre nodes by Newton iteration on `P_sigma`, started from
/// Chebyshev-type guesses `cos(pi (j - 1/4) / (sigma + 1/2))`; `w_j` is the
/// square root of the quadrature weight.
pub fn legendre_gauss(sigma: usize) -> Result<NodeSet> {
    if sigma == 0 {
        return Err(Error::InvalidInput("Legendre rule needs sigma >= 1".into()));
    }
    let n = sigma as f64;
    let mut nodes = Vec::with_capacity(sigma);
    let mut weights = Vec::with_capacity(sigma);
    for j in 1..=sigma {
        let mut x = (PI * (j as f64 - 0.25) / (n + 0.5)).cos();
        let mut converged = false;
        for _ in 0..100 {
            let (p, q) = legendre_pair(sigma, x);
            let dp = n * (x * p - q) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-15 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NewtonDivergence { index: j - 1 });
        }
        let (p, q) = legendre_pair(sigma, x);
        let dp = n * (x * p - q) / (x * x - 1.0);
        let lambda = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes.push(Complex64::new(x, 0.0));
        weights.push(Complex64::new(lambda.sqrt(), 0.0));
    }
    NodeSet::new(nodes, weights)
}

/// Interval a node family lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Interval {
    /// `(0, 1]`
    #[serde(rename = "(0,1]", alias = "unit")]
    UnitHalfOpen,
    /// `[-1, 1]`
    #[serde(rename = "[-1,1]", alias = "symmetric")]
    Symmetric,
}

impl Interval {
    pub fn bounds(&self) -> (f64, f64) {
        match self {
            Interval::UnitHalfOpen => (0.0, 1.0),
            Interval::Symmetric => (-1.0, 1.0),
        }
    }
}

/// `-sqrt(2) pi (sqrt(n) - sqrt(j))`, the exponent of the tapered clustering law.
pub fn tapered_exponent(j: usize, n: usize) -> f64 {
    -SQRT_2 * PI * ((n as f64).sqrt() - (j as f64).sqrt())
}

/// Default clustering law: `exp(-sqrt(2) pi (sqrt(count) - sqrt(j)))`.
pub fn tapered_law(j: usize, count: usize) -> f64 {
    tapered_exponent(j, count).exp()
}

/// Nodes exponentially clustered at zero with unit weights.
pub fn clustered_nodes(count: usize, interval: Interval) -> Result<NodeSet> {
    clustered_nodes_with(count, interval, tapered_law)
}

/// Clustered nodes under a caller-supplied law `law(j, count)` for `j = 1..=count`;
/// on `[-1, 1]` half the count is generated and reflected.
pub fn clustered_nodes_with(count: usize, interval: Interval, law: impl Fn(usize, usize) -> f64) -> Result<NodeSet> {
    if count < 2 {
        return Err(Error::InvalidInput("clustered nodes need count >= 2".into()));
    }
    let nodes: Vec<Complex64> = match interval {
        Interval::UnitHalfOpen => (1..=count).map(|j| Complex64::new(law(j, count), 0.0)).collect(),
        Interval::Symmetric => {
            if !count.is_multiple_of(2) {
                return Err(Error::InvalidInput("symmetric clustered nodes need an even count".into()));
            }
            let half = count / 2;
            let positive: Vec<f64> = (1..=half).map(|j| law(j, half)).collect();
            positive
                .iter()
                .rev()
                .map(|&x| Complex64::new(-x, 0.0))
                .chain(positive.iter().map(|&x| Complex64::new(x, 0.0)))
                .collect()
        }
    };
    NodeSet::new(nodes, vec![ONE; count])
}

/// `xi_j = -2 exp(-sqrt(2) pi (sqrt(n) - sqrt(j)))`, `j = 1..=n`.
pub fn tapered_real_poles(n: usize) -> Result<PoleSchedule> {
    if n == 0 {
        return Err(Error::InvalidInput("tapered poles need n >= 1".into()));
    }
    let poles: Vec<Complex64> = (1..=n).map(|j| Complex64::new(-2.0 * tapered_law(j, n), 0.0)).collect();
    PoleSchedule::from_poles(&poles)
}

/// Order in which conjugate pole pairs are listed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairOrdering {
    /// All `+i` poles by ascending `j`, then all `-i` poles by ascending `j`.
    #[default]
    Blocked,
    /// `(+i, -i)` for each `j` in turn.
    Interleaved,
}

/// `+-i sqrt(|delta_j|)` with `delta_j` the tapered law over the `n/2` pairs,
/// in [`PairOrdering::Blocked`] order.
pub fn conjugate_pair_poles(n: usize) -> Result<PoleSchedule> {
    conjugate_pair_poles_ordered(n, PairOrdering::Blocked)
}

pub fn conjugate_pair_poles_ordered(n: usize, ordering: PairOrdering) -> Result<PoleSchedule> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!("conjugate pair poles need a positive even count, got {n}")));
    }
    let pairs = n / 2;
    let radii: Vec<f64> = (1..=pairs).map(|j| (2.0 * tapered_law(j, pairs)).sqrt()).collect();
    let poles: Vec<Complex64> = match ordering {
        PairOrdering::Blocked => radii
            .iter()
            .map(|&r| Complex64::new(0.0, r))
            .chain(radii.iter().map(|&r| Complex64::new(0.0, -r)))
            .collect(),
        PairOrdering::Interleaved => {
            radii.iter().flat_map(|&r| [Complex64::new(0.0, r), Complex64::new(0.0, -r)]).collect()
        }
    };
    PoleSchedule::from_poles(&poles)
}
