//! Weighted Sobolev polynomial least squares: Arnoldi on a Jordan-like
//! operator fits function and derivative data together.

use num_complex::Complex64;

use crate::error::Result;
use crate::krylov::{fit_polynomial, FitModel, ProblemKind, Recurrence};
use crate::linalg::{DenseVector, Hessenberg, OrthoBasis};
use crate::nodes::NodeSet;

pub use crate::jordan::{build_jordan, sobolev_weights};

/// Degree-`n` polynomial minimizing the discrete Sobolev residual over
/// function values and derivatives up to order `s_j` at each node.
#[derive(Debug, Clone, PartialEq)]
pub struct SobolevPolyFitModel(FitModel);

impl SobolevPolyFitModel {
    pub fn hessenberg(&self) -> &Hessenberg {
        match self.0.recurrence() {
            Recurrence::Polynomial(h) => h,
            Recurrence::Rational { .. } => unreachable!("polynomial model holds a single Hessenberg"),
        }
    }

    pub fn coefficients(&self) -> &DenseVector {
        self.0.coefficients()
    }

    pub fn p0(&self) -> f64 {
        self.0.p0()
    }

    pub fn degree(&self) -> usize {
        self.0.degree()
    }

    /// Derivative orders of the fitting nodes.
    pub fn orders(&self) -> &[usize] {
        self.0.fit_orders()
    }

    /// `(p^(s), ..., p', p)` at each point, `s = orders[j]`.
    pub fn eval(&self, points: &[Complex64], orders: &[usize]) -> Result<DenseVector> {
        self.0.evaluate(points, orders)
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
pub fn fit_sobolev_poly(
    nodes: &NodeSet,
    f: &DenseVector,
    n: usize,
    reorth_passes: usize,
) -> Result<(SobolevPolyFitModel, OrthoBasis)> {
    let (model, basis) = fit_polynomial(ProblemKind::SobolevPoly, nodes, f, n, reorth_passes)?;
    Ok((SobolevPolyFitModel(model), basis))
}

pub fn eval_sobolev_poly(
    model: &SobolevPolyFitModel,
    sample_nodes: &[Complex64],
    sample_orders: &[usize],
) -> Result<DenseVector> {
    model.eval(sample_nodes, sample_orders)
}
