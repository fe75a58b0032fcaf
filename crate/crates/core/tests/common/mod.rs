//! Exact rational normal-equations oracle and random small instances shared
//! by the integration suites.
#![allow(dead_code)]

use arnoldi_lsq::linalg::{condition_number, DenseMatrix};
use arnoldi_lsq::{
    eval_poly, eval_rational, eval_sobolev_poly, eval_sobolev_rational, fit_poly, fit_rational, fit_sobolev_poly,
    fit_sobolev_rational, DenseVector, NodeSet, PoleSchedule, ProblemKind,
};
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Q = BigRational;
type Cq = Complex<Q>;

pub const KINDS: [ProblemKind; 4] =
    [ProblemKind::Poly, ProblemKind::SobolevPoly, ProblemKind::Rational, ProblemKind::SobolevRational];

fn q(x: f64) -> Q {
    Q::from_float(x).expect("finite input")
}

fn cq(z: Complex64) -> Cq {
    Cq::new(q(z.re), q(z.im))
}

fn to_c64(z: &Cq) -> Complex64 {
    Complex64::new(z.re.to_f64().unwrap(), z.im.to_f64().unwrap())
}

fn int(k: u64) -> Cq {
    Cq::new(Q::from_integer(k.into()), Q::zero())
}

fn factorial(d: usize) -> u64 {
    (1..=d as u64).product()
}

/// `d`-th derivative of basis function `k` at `t`: monomials for the
/// polynomial kinds, `1, 1/(t - xi_k)` for the rational ones.
fn basis(kind: ProblemKind, poles: &[Cq], k: usize, d: usize, t: &Cq) -> Cq {
    if kind.is_rational() {
        if k == 0 {
            return if d == 0 { Cq::one() } else { Cq::zero() };
        }
        let diff = t - &poles[k - 1];
        let mut power = diff.clone();
        for _ in 0..d {
            power = &power * &diff;
        }
        let value = int(factorial(d)) / power;
        if d.is_multiple_of(2) {
            value
        } else {
            -value
        }
    } else if d > k {
        Cq::zero()
    } else {
        let falling: u64 = ((k - d + 1) as u64..=k as u64).product();
        let mut power = Cq::one();
        for _ in 0..k - d {
            power = &power * t;
        }
        int(falling) * power
    }
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub kind: ProblemKind,
    pub nodes: NodeSet,
    pub alphas: Vec<Vec<Complex64>>,
    pub f: DenseVector,
    pub n: usize,
    pub poles: Option<PoleSchedule>,
    pub points: Vec<Complex64>,
    pub orders: Vec<usize>,
}

impl Instance {
    fn pole_values(&self) -> Vec<Complex64> {
        self.poles.as_ref().map(|p| p.finite_values().unwrap()).unwrap_or_default()
    }

    /// `(d, z, weight)` per data row, highest derivative first per node, with
    /// weight `w_j alpha_1 ... alpha_d / d!`.
    fn rows(&self) -> Vec<(usize, Cq, Cq)> {
        let mut rows = Vec::new();
        for (j, (&z, &w)) in self.nodes.nodes().iter().zip(self.nodes.weights()).enumerate() {
            let s = self.nodes.orders()[j];
            for d in (0..=s).rev() {
                let mut weight = cq(w);
                for a in &self.alphas[j][..d] {
                    weight = &weight * &cq(*a);
                }
                rows.push((d, cq(z), weight / int(factorial(d))));
            }
        }
        rows
    }

    /// `W B` in double precision, for conditioning checks.
    pub fn weighted_basis(&self) -> DenseMatrix {
        let poles: Vec<Cq> = self.pole_values().into_iter().map(cq).collect();
        let rows = self.rows();
        DenseMatrix::from_fn(rows.len(), self.n + 1, |i, k| {
            let (d, z, w) = &rows[i];
            to_c64(&(w * basis(self.kind, &poles, k, *d, z)))
        })
    }
}

fn random_small(rng: &mut ChaCha8Rng, scale: i32) -> f64 {
    rng.gen_range(-scale..=scale) as f64 / scale as f64
}

fn try_instance(kind: ProblemKind, rng: &mut ChaCha8Rng) -> Option<Instance> {
    let sobolev = kind.is_sobolev();
    let sigma = if sobolev { rng.gen_range(3..=7) } else { rng.gen_range(5..=14) };
    let mut nodes: Vec<Complex64> = Vec::new();
    while nodes.len() < sigma {
        let z = Complex64::new(random_small(rng, 32), if rng.gen_bool(0.5) { random_small(rng, 8) } else { 0.0 });
        if nodes.iter().all(|y| (y - z).norm() > 0.05) {
            nodes.push(z);
        }
    }
    let weights: Vec<Complex64> = (0..sigma).map(|_| Complex64::new(rng.gen_range(4..=12) as f64 / 8.0, 0.0)).collect();
    let orders: Vec<usize> = (0..sigma).map(|_| if sobolev { rng.gen_range(0..=2) } else { 0 }).collect();
    let rows: usize = orders.iter().map(|s| s + 1).sum();
    if rows > 14 {
        return None;
    }
    let alphas: Vec<Vec<Complex64>> = orders
        .iter()
        .map(|&s| {
            (0..s)
                .map(|_| {
                    let a = rng.gen_range(2..=8) as f64 / 4.0;
                    Complex64::new(if rng.gen_bool(0.5) { a } else { -a }, 0.0)
                })
                .collect()
        })
        .collect();
    let n = rng.gen_range(1..=6.min(rows - 1));
    let poles = if kind.is_rational() {
        let mut xi: Vec<Complex64> = Vec::new();
        while xi.len() < n {
            let p = Complex64::new(rng.gen_range(-24..=24) as f64 / 8.0, rng.gen_range(-24..=24) as f64 / 8.0);
            let far = nodes.iter().chain(&xi).all(|z| (z - p).norm() > 0.3);
            if far {
                xi.push(p);
            }
        }
        Some(PoleSchedule::from_poles(&xi).unwrap())
    } else {
        None
    };
    let node_set = NodeSet::with_derivatives(nodes, weights, orders, Some(alphas.clone())).unwrap();
    let f: DenseVector = (0..rows).map(|_| Complex64::new(random_small(rng, 16), random_small(rng, 16))).collect();
    let pole_values = poles.as_ref().map(|p| p.finite_values().unwrap()).unwrap_or_default();
    let mut points = Vec::new();
    while points.len() < 5 {
        let x = Complex64::new(random_small(rng, 64), random_small(rng, 64) * 0.25);
        if pole_values.iter().all(|p| (p - x).norm() > 0.3) {
            points.push(x);
        }
    }
    let top = if sobolev { node_set.max_order() } else { 0 };
    let orders = vec![top; points.len()];
    let instance = Instance { kind, nodes: node_set, alphas, f, n, poles, points, orders };
    let cond = condition_number(&instance.weighted_basis()).ok()?;
    (cond < 1e8).then_some(instance)
}

/// Random instance with `m <= 14`, `n <= 6` and `cond(W B) < 1e8`.
pub fn random_instance(kind: ProblemKind, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        if let Some(instance) = try_instance(kind, &mut rng) {
            return instance;
        }
    }
}

fn solve_exact(mut a: Vec<Vec<Cq>>, mut b: Vec<Cq>) -> Vec<Cq> {
    let n = b.len();
    for k in 0..n {
        let pivot = (k..n).find(|&i| !a[i][k].is_zero()).expect("normal equations are nonsingular");
        a.swap(k, pivot);
        b.swap(k, pivot);
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let factor = &a[i][k] / &a[k][k];
            for j in k..n {
                let t = &factor * &a[k][j];
                a[i][j] = &a[i][j] - t;
            }
            let t = &factor * &b[k];
            b[i] = &b[i] - t;
        }
    }
    let mut x = vec![Cq::zero(); n];
    for k in (0..n).rev() {
        let mut acc = b[k].clone();
        for j in k + 1..n {
            acc -= &a[k][j] * &x[j];
        }
        x[k] = acc / &a[k][k];
    }
    x
}

/// Exact solution of `(W B)^H (W B) c = (W B)^H W f`, evaluated exactly at
/// the sample points (highest derivative first per point) and rounded once.
pub fn oracle_eval(instance: &Instance) -> Vec<Complex64> {
    let poles: Vec<Cq> = instance.pole_values().into_iter().map(cq).collect();
    let rows = instance.rows();
    let p = instance.n + 1;
    let a: Vec<Vec<Cq>> =
        rows.iter().map(|(d, z, w)| (0..p).map(|k| w * basis(instance.kind, &poles, k, *d, z)).collect()).collect();
    let wf: Vec<Cq> = rows.iter().zip(instance.f.iter()).map(|((_, _, w), f)| w * cq(*f)).collect();
    let mut gram = vec![vec![Cq::zero(); p]; p];
    let mut rhs = vec![Cq::zero(); p];
    for (row, fi) in a.iter().zip(&wf) {
        for i in 0..p {
            let ci = row[i].conj();
            for j in 0..p {
                gram[i][j] = &gram[i][j] + &ci * &row[j];
            }
            rhs[i] = &rhs[i] + &ci * fi;
        }
    }
    let c = solve_exact(gram, rhs);
    let mut out = Vec::new();
    for (x, &s) in instance.points.iter().zip(&instance.orders) {
        let x = cq(*x);
        for d in (0..=s).rev() {
            let mut v = Cq::zero();
            for (k, ck) in c.iter().enumerate() {
                v += ck * basis(instance.kind, &poles, k, d, &x);
            }
            out.push(to_c64(&v));
        }
    }
    out
}

/// Sample values through the public Arnoldi fit and evaluation paths.
pub fn arnoldi_eval(instance: &Instance, passes: usize) -> Vec<Complex64> {
    let (nodes, f, n, xs, orders) = (&instance.nodes, &instance.f, instance.n, &instance.points, &instance.orders);
    let values = match instance.kind {
        ProblemKind::Poly => eval_poly(&fit_poly(nodes, f, n, passes).unwrap().0, xs),
        ProblemKind::SobolevPoly => eval_sobolev_poly(&fit_sobolev_poly(nodes, f, n, passes).unwrap().0, xs, orders),
        ProblemKind::Rational => {
            eval_rational(&fit_rational(nodes, f, instance.poles.as_ref().unwrap(), passes).unwrap().0, xs)
        }
        ProblemKind::SobolevRational => eval_sobolev_rational(
            &fit_sobolev_rational(nodes, f, instance.poles.as_ref().unwrap(), passes).unwrap().0,
            xs,
            orders,
        ),
    };
    values.unwrap().into_vec()
}

/// `max |a - b| / max |b|`.
pub fn relative_gap(a: &[Complex64], b: &[Complex64]) -> f64 {
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    let scale = b.iter().map(|y| y.norm()).fold(0.0, f64::max);
    diff / scale.max(f64::MIN_POSITIVE)
}

/// Worst oracle gap over `count` seeded instances of one kind.
pub fn worst_oracle_gap(kind: ProblemKind, count: u64, seed_base: u64) -> f64 {
    (0..count)
        .map(|i| {
            let instance = random_instance(kind, seed_base + i);
            relative_gap(&arnoldi_eval(&instance, 2), &oracle_eval(&instance))
        })
        .fold(0.0, f64::max)
}
