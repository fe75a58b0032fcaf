//! Arnoldi and rational Arnoldi on Jordan-like operators, the recurrences
//! that replay them at new points, and the shared fitted-model type.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jordan::JordanOperator;
use crate::linalg::{norm2, orthogonalize_next, project_rhs, DenseVector, Hessenberg, OrthoBasis};
use crate::nodes::{NodeSet, PoleSchedule};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Which least-squares problem a model solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    Poly,
    SobolevPoly,
    Rational,
    SobolevRational,
}

impl ProblemKind {
    pub fn is_rational(self) -> bool {
        matches!(self, ProblemKind::Rational | ProblemKind::SobolevRational)
    }

    pub fn is_sobolev(self) -> bool {
        matches!(self, ProblemKind::SobolevPoly | ProblemKind::SobolevRational)
    }
}

/// Recurrence coefficients: a Hessenberg matrix `H` with `Z Q_n = Q_{n+1} H`,
/// or a pencil `(H, K)` with `Z Q_{n+1} K = Q_{n+1} H`.
#[derive(Debug, Clone, PartialEq)]
pub enum Recurrence {
    Polynomial(Hessenberg),
    Rational { h: Hessenberg, k: Hessenberg },
}

impl Recurrence {
    pub fn degree(&self) -> usize {
        match self {
            Recurrence::Polynomial(h) => h.n(),
            Recurrence::Rational { h, .. } => h.n(),
        }
    }
}

/// Sign convention of the rational evaluation recurrence. `Negated` flips the
/// accumulation and the shifted solve together, which leaves every iterate
/// unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RecurrenceSign {
    #[default]
    Standard,
    Negated,
}

fn start_vector(v: &[Complex64]) -> Result<(DenseVector, f64)> {
    let norm = norm2(v);
    if norm == 0.0 {
        return Err(Error::InvalidInput("all node weights are zero".into()));
    }
    let inv = 1.0 / norm;
    Ok((v.iter().map(|x| x * inv).collect(), inv))
}

fn check_candidate(candidate: Vec<Complex64>) -> Result<DenseVector> {
    DenseVector::new(candidate).map_err(|_| Error::NonFinite("Krylov candidate"))
}

/// Arnoldi on `op` from `v`; returns `Q_{n+1}`, `H` and `1 / ||v||`.
pub(crate) fn arnoldi(
    op: &JordanOperator,
    v: &[Complex64],
    n: usize,
    reorth_passes: usize,
) -> Result<(OrthoBasis, Hessenberg, f64)> {
    let (q0, p0) = start_vector(v)?;
    let mut basis = OrthoBasis::empty(op.dim());
    basis.push(q0);
    let mut h = Hessenberg::zeros(n);
    for k in 1..=n {
        let candidate = check_candidate(op.apply(basis.column(k - 1).as_slice()))?;
        let step = orthogonalize_next(&candidate, &basis, reorth_passes)?;
        for (i, c) in step.coeffs.iter().enumerate() {
            h.set(i, k - 1, *c);
        }
        h.set(k, k - 1, Complex64::new(step.tail_norm, 0.0));
        basis.push(step.unit_vector);
    }
    Ok((basis, h, p0))
}

/// Rational Arnoldi with poles and shifts from `poles`; returns `Q_{n+1}`,
/// the pencil `(H, K)` and `1 / ||v||`.
pub(crate) fn rational_arnoldi(
    op: &JordanOperator,
    v: &[Complex64],
    poles: &PoleSchedule,
    reorth_passes: usize,
) -> Result<(OrthoBasis, Hessenberg, Hessenberg, f64)> {
    let (q0, r0) = start_vector(v)?;
    let n = poles.len();
    let mut basis = OrthoBasis::empty(op.dim());
    basis.push(q0);
    let mut raw = Hessenberg::zeros(n);
    for k in 1..=n {
        let pole = poles.poles()[k - 1];
        let shift = poles.shifts()[k - 1];
        let shifted = op.apply_shifted(shift.denominator, shift.numerator, basis.column(k - 1).as_slice());
        let candidate = op
            .solve_shifted(pole.denominator, pole.numerator, &shifted)
            .map_err(|j| Error::PoleEqualsNode { pole_index: k - 1, node_index: j })?;
        let step = orthogonalize_next(&check_candidate(candidate)?, &basis, reorth_passes)?;
        for (i, c) in step.coeffs.iter().enumerate() {
            raw.set(i, k - 1, *c);
        }
        raw.set(k, k - 1, Complex64::new(step.tail_norm, 0.0));
        basis.push(step.unit_vector);
    }
    let mut h = Hessenberg::zeros(n);
    let mut kk = Hessenberg::zeros(n);
    for col in 0..n {
        let pole = poles.poles()[col];
        let shift = poles.shifts()[col];
        for row in 0..=col + 1 {
            let r = raw.get(row, col);
            let (mut kv, mut hv) = (r * pole.denominator, r * pole.numerator);
            if row == col {
                kv -= shift.denominator;
                hv -= shift.numerator;
            }
            kk.set(row, col, kv);
            h.set(row, col, hv);
        }
        if h.subdiagonal(col) == ZERO && kk.subdiagonal(col) == ZERO {
            return Err(Error::PencilDegenerate { column: col });
        }
    }
    Ok((basis, h, kk, r0))
}

/// Columns `u_0 .. u_n` of the polynomial recurrence at the sample operator.
pub(crate) fn poly_recurrence(h: &Hessenberg, p0: f64, x: &JordanOperator) -> Vec<Vec<Complex64>> {
    let n = h.n();
    let mut u = Vec::with_capacity(n + 1);
    u.push(x.seed(|_| Complex64::new(p0, 0.0)));
    for k in 1..=n {
        let mut next = x.apply(&u[k - 1]);
        for (j, uj) in u.iter().enumerate() {
            let c = h.get(j, k - 1);
            for (a, b) in next.iter_mut().zip(uj) {
                *a -= c * b;
            }
        }
        let inv = 1.0 / h.subdiagonal(k - 1);
        for a in &mut next {
            *a *= inv;
        }
        u.push(next);
    }
    u
}

/// Columns `u_0 .. u_n` of the pencil recurrence at the sample operator.
pub(crate) fn rational_recurrence(
    h: &Hessenberg,
    k: &Hessenberg,
    r0: f64,
    x: &JordanOperator,
    sign: RecurrenceSign,
) -> Result<Vec<Vec<Complex64>>> {
    let n = h.n();
    let flip = match sign {
        RecurrenceSign::Standard => Complex64::new(1.0, 0.0),
        RecurrenceSign::Negated => Complex64::new(-1.0, 0.0),
    };
    let mut u = Vec::with_capacity(n + 1);
    let mut xu = Vec::with_capacity(n + 1);
    u.push(x.seed(|_| Complex64::new(r0, 0.0)));
    for col in 0..n {
        xu.push(x.apply(&u[col]));
        let mut rhs = vec![ZERO; x.dim()];
        for j in 0..=col {
            let hc = flip * h.get(j, col);
            let kc = flip * k.get(j, col);
            for ((r, a), b) in rhs.iter_mut().zip(&u[j]).zip(&xu[j]) {
                *r += hc * a - kc * b;
            }
        }
        let next = x
            .solve_shifted(flip * k.subdiagonal(col), flip * h.subdiagonal(col), &rhs)
            .map_err(|j| Error::EvaluationAtPole { point_index: j, pole_index: col })?;
        u.push(next);
    }
    Ok(u)
}

fn factorials(max: usize) -> Vec<f64> {
    let mut f = vec![1.0; max + 1];
    for i in 1..=max {
        f[i] = f[i - 1] * i as f64;
    }
    f
}

/// Rescales rows of a unit-alpha Jordan evaluation, `p^(d)/d!`, to `p^(d)`.
fn unscale(x: &JordanOperator, values: &mut [Complex64]) {
    let orders = x.row_orders();
    let fact = factorials(orders.iter().copied().max().unwrap_or(0));
    for (v, d) in values.iter_mut().zip(orders) {
        if d > 0 {
            *v *= fact[d];
        }
    }
}

/// A fitted least-squares model: recurrence, coefficients `y`, and the
/// degree-zero basis value. Evaluates the fit and its derivatives anywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct FitModel {
    kind: ProblemKind,
    recurrence: Recurrence,
    coeffs: DenseVector,
    p0: f64,
    poles: Option<PoleSchedule>,
    fit_orders: Vec<usize>,
}

impl FitModel {
    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn recurrence(&self) -> &Recurrence {
        &self.recurrence
    }

    /// The coefficient vector `y = Q^H W f`.
    pub fn coefficients(&self) -> &DenseVector {
        &self.coeffs
    }

    /// Value of the constant basis function, `1 / sqrt(sum |w_j|^2)`.
    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn degree(&self) -> usize {
        self.recurrence.degree()
    }

    pub fn poles(&self) -> Option<&PoleSchedule> {
        self.poles.as_ref()
    }

    /// Derivative orders of the fitting nodes.
    pub fn fit_orders(&self) -> &[usize] {
        &self.fit_orders
    }

    /// Fit values at `points`: per point, `(p^(s), ..., p', p)` with `s = orders[j]`.
    pub fn evaluate(&self, points: &[Complex64], orders: &[usize]) -> Result<DenseVector> {
        self.evaluate_with_sign(points, orders, RecurrenceSign::Standard)
    }

    pub fn evaluate_with_sign(
        &self,
        points: &[Complex64],
        orders: &[usize],
        sign: RecurrenceSign,
    ) -> Result<DenseVector> {
        let (x, u) = self.recurrence_columns(points, orders, sign)?;
        let mut out = vec![ZERO; x.dim()];
        for (col, y) in u.iter().zip(self.coeffs.iter()) {
            for (o, v) in out.iter_mut().zip(col) {
                *o += y * v;
            }
        }
        unscale(&x, &mut out);
        DenseVector::new(out).map_err(|_| Error::NonFinite("model evaluation"))
    }

    /// Every basis function `p_0 .. p_n` at `points`, stacked like [`Self::evaluate`].
    pub fn basis_values(&self, points: &[Complex64], orders: &[usize]) -> Result<Vec<DenseVector>> {
        let (x, u) = self.recurrence_columns(points, orders, RecurrenceSign::Standard)?;
        Ok(u.into_iter()
            .map(|mut col| {
                unscale(&x, &mut col);
                DenseVector::from_vec_unchecked(col)
            })
            .collect())
    }

    fn recurrence_columns(
        &self,
        points: &[Complex64],
        orders: &[usize],
        sign: RecurrenceSign,
    ) -> Result<(JordanOperator, Vec<Vec<Complex64>>)> {
        if orders.len() != points.len() {
            return Err(Error::DimensionMismatch {
                context: "sample orders",
                expected: points.len(),
                actual: orders.len(),
            });
        }
        if points.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("sample points"));
        }
        let x = JordanOperator::with_unit_alphas(points, orders)?;
        let u = match &self.recurrence {
            Recurrence::Polynomial(h) => poly_recurrence(h, self.p0, &x),
            Recurrence::Rational { h, k } => {
                if let Some(poles) = &self.poles {
                    for (pi, pole) in poles.values().iter().enumerate() {
                        if let Some(p) = pole {
                            if let Some(j) = points.iter().position(|z| z == p) {
                                return Err(Error::EvaluationAtPole { point_index: j, pole_index: pi });
                            }
                        }
                    }
                }
                rational_recurrence(h, k, self.p0, &x, sign)?
            }
        };
        Ok((x, u))
    }
}

fn check_problem(nodes: &NodeSet, f: &DenseVector, n: usize) -> Result<()> {
    let m = nodes.total_rows();
    if f.len() != m {
        return Err(Error::DimensionMismatch { context: "right-hand side", expected: m, actual: f.len() });
    }
    if n + 1 > m {
        return Err(Error::DegreeTooLarge { n, m });
    }
    Ok(())
}

/// Polynomial fit on the Jordan operator of `nodes` (diagonal when every `s_j = 0`).
pub(crate) fn fit_polynomial(
    kind: ProblemKind,
    nodes: &NodeSet,
    f: &DenseVector,
    n: usize,
    reorth_passes: usize,
) -> Result<(FitModel, OrthoBasis)> {
    check_problem(nodes, f, n)?;
    let (op, v, w) = crate::jordan::build_jordan(nodes);
    let (basis, h, p0) = arnoldi(&op, v.as_slice(), n, reorth_passes)?;
    let coeffs = project_rhs(&basis, &w, f)?;
    let model = FitModel {
        kind,
        recurrence: Recurrence::Polynomial(h),
        coeffs,
        p0,
        poles: None,
        fit_orders: nodes.orders().to_vec(),
    };
    Ok((model, basis))
}

/// Rational fit on the Jordan operator of `nodes` with the given poles.
pub(crate) fn fit_rational_space(
    kind: ProblemKind,
    nodes: &NodeSet,
    f: &DenseVector,
    poles: &PoleSchedule,
    reorth_passes: usize,
) -> Result<(FitModel, OrthoBasis)> {
    check_problem(nodes, f, poles.len())?;
    poles.check_against(nodes.nodes())?;
    let (op, v, w) = crate::jordan::build_jordan(nodes);
    let (basis, h, k, r0) = rational_arnoldi(&op, v.as_slice(), poles, reorth_passes)?;
    let coeffs = project_rhs(&basis, &w, f)?;
    let model = FitModel {
        kind,
        recurrence: Recurrence::Rational { h, k },
        coeffs,
        p0: r0,
        poles: Some(poles.clone()),
        fit_orders: nodes.orders().to_vec(),
    };
    Ok((model, basis))
}
