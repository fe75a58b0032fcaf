//! Weighted rational least squares with prescribed poles through rational
//! Arnoldi and a Hessenberg pencil.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::krylov::{fit_rational_space, FitModel, ProblemKind, Recurrence, RecurrenceSign};
use crate::linalg::{DenseVector, Hessenberg, OrthoBasis};
use crate::nodes::{NodeSet, PoleSchedule};

/// Rational function of type `(n, n)` with the given poles minimizing
/// `sum |w_j|^2 |r(z_j) - f_j|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFitModel(FitModel);

pub(crate) fn pencil_of(model: &FitModel) -> (&Hessenberg, &Hessenberg) {
    match model.recurrence() {
        Recurrence::Rational { h, k } => (h, k),
        Recurrence::Polynomial(_) => unreachable!("rational model holds a pencil"),
    }
}

impl RationalFitModel {
    /// `(H, K)` with `Z Q K = Q H`.
    pub fn pencil(&self) -> (&Hessenberg, &Hessenberg) {
        pencil_of(&self.0)
    }

    pub fn coefficients(&self) -> &DenseVector {
        self.0.coefficients()
    }

    pub fn r0(&self) -> f64 {
        self.0.p0()
    }

    pub fn poles(&self) -> &PoleSchedule {
        self.0.poles().expect("rational model has poles")
    }

    pub fn degree(&self) -> usize {
        self.0.degree()
    }

    pub fn eval(&self, points: &[Complex64]) -> Result<DenseVector> {
        self.0.evaluate(points, &vec![0; points.len()])
    }

    pub fn eval_with_sign(&self, points: &[Complex64], sign: RecurrenceSign) -> Result<DenseVector> {
        self.0.evaluate_with_sign(points, &vec![0; points.len()], sign)
    }

    /// `r_0 .. r_n` at `points`.
    pub fn basis_values(&self, points: &[Complex64]) -> Result<Vec<DenseVector>> {
        self.0.basis_values(points, &vec![0; points.len()])
    }

    pub fn as_fit_model(&self) -> &FitModel {
        &self.0
    }

    pub fn into_fit_model(self) -> FitModel {
        self.0
    }
}

/// Rational Arnoldi on `Z = diag(z)` from `v = w` with `n = poles.len()`.
pub fn fit_rational(
    nodes: &NodeSet,
    f: &DenseVector,
    poles: &PoleSchedule,
    reorth_passes: usize,
) -> Result<(RationalFitModel, OrthoBasis)> {
    if !nodes.is_plain() {
        return Err(Error::InvalidInput(
            "rational fit takes function values only; use the Sobolev rational fit for derivative data".into(),
        ));
    }
    let (model, basis) = fit_rational_space(ProblemKind::Rational, nodes, f, poles, reorth_passes)?;
    Ok((RationalFitModel(model), basis))
}

pub fn eval_rational(model: &RationalFitModel, points: &[Complex64]) -> Result<DenseVector> {
    model.eval(points)
}
