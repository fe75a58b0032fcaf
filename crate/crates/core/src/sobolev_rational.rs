//! Weighted Sobolev rational least squares: rational Arnoldi on a
//! Jordan-like operator.

use num_complex::Complex64;

use crate::error::Result;
use crate::krylov::{fit_rational_space, FitModel, ProblemKind, RecurrenceSign};
use crate::linalg::{DenseVector, Hessenberg, OrthoBasis};
use crate::nodes::{NodeSet, PoleSchedule};
use crate::rational::pencil_of;

/// Rational function with prescribed poles fitted to function and
/// derivative data.
#[derive(Debug, Clone, PartialEq)]
pub struct SobolevRationalFitModel(FitModel);

impl SobolevRationalFitModel {
    /// `(H, K)` with `J Q K = Q H`.
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

    pub fn orders(&self) -> &[usize] {
        self.0.fit_orders()
    }

    pub fn degree(&self) -> usize {
        self.0.degree()
    }

    /// `(r^(s), ..., r', r)` at each point, `s = orders[j]`.
    pub fn eval(&self, points: &[Complex64], orders: &[usize]) -> Result<DenseVector> {
        self.0.evaluate(points, orders)
    }

    pub fn eval_with_sign(&self, points: &[Complex64], orders: &[usize], sign: RecurrenceSign) -> Result<DenseVector> {
        self.0.evaluate_with_sign(points, orders, sign)
    }

    pub fn basis_values(&self, points: &[Complex64], orders: &[usize]) -> Result<Vec<DenseVector>> {
        self.0.basis_values(points, orders)
    }

    pub fn as_fit_model(&self) -> &FitModel {
        &self.0
    }

    pub fn into_fit_model(self) -> FitModel {
        self.0
    }
}

/// `f` is stacked per node as `f^(s_j), ..., f'_j, f_j`.
pub fn fit_sobolev_rational(
    nodes: &NodeSet,
    f: &DenseVector,
    poles: &PoleSchedule,
    reorth_passes: usize,
) -> Result<(SobolevRationalFitModel, OrthoBasis)> {
    let (model, basis) = fit_rational_space(ProblemKind::SobolevRational, nodes, f, poles, reorth_passes)?;
    Ok((SobolevRationalFitModel(model), basis))
}

/// Evaluation through the sign-negated form of the pencil recurrence.
pub fn eval_sobolev_rational(
    model: &SobolevRationalFitModel,
    sample_nodes: &[Complex64],
    sample_orders: &[usize],
) -> Result<DenseVector> {
    model.eval_with_sign(sample_nodes, sample_orders, RecurrenceSign::Negated)
}
