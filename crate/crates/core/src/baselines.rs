//! Explicit coefficient matrices, direct least-squares solves in those
//! bases, and displacement-rank diagnostics.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jordan::{build_jordan, sobolev_weights};
use crate::linalg::{numerical_rank, solve_dense_ls_flagged, DenseMatrix, DenseVector};
use crate::nodes::{NodeSet, PoleSchedule};

/// Relative singular-value cutoff for displacement ranks.
pub const DISPLACEMENT_RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisKind {
    /// Monomials `1, t, ..., t^n`.
    Vandermonde,
    /// Monomials with derivative rows.
    ConfluentVandermonde,
    /// `1, 1/(t - xi_1), ..., 1/(t - xi_n)`.
    CauchyWithOnes,
    /// `1, 1/(t - xi_k)` with derivative rows.
    ConfluentCauchy,
    /// `1, xi_1/(t - xi_1), ..., xi_n/(t - xi_n)`, derivative rows allowed.
    ScaledCauchy,
}

impl BasisKind {
    pub fn is_rational(self) -> bool {
        matches!(self, Self::CauchyWithOnes | Self::ConfluentCauchy | Self::ScaledCauchy)
    }

    pub fn allows_derivatives(self) -> bool {
        !matches!(self, Self::Vandermonde | Self::CauchyWithOnes)
    }
}

/// Explicit basis sampled at the data rows, `m x (n + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitBasisMatrix {
    pub kind: BasisKind,
    pub matrix: DenseMatrix,
}

/// Coefficients of a direct solve together with the sample values they give.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectFit {
    pub coefficients: DenseVector,
    pub values: DenseVector,
    /// First column whose triangular pivot fell below the rank tolerance.
    pub rank_deficient_at: Option<usize>,
}

impl DirectFit {
    pub fn is_rank_deficient(&self) -> bool {
        self.rank_deficient_at.is_some()
    }
}

/// `k!/(k-d)!`
fn falling(k: usize, d: usize) -> f64 {
    ((k - d + 1)..=k).map(|i| i as f64).product()
}

/// `d`-th derivative of the `k`-th basis function at `t`.
fn basis_derivative(kind: BasisKind, poles: &[Complex64], k: usize, d: usize, t: Complex64) -> Complex64 {
    if kind.is_rational() {
        if k == 0 {
            return if d == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
        }
        let xi = poles[k - 1];
        let fact: f64 = (1..=d).map(|i| i as f64).product();
        let sign = if d.is_multiple_of(2) { 1.0 } else { -1.0 };
        let cauchy = sign * fact / (t - xi).powu(d as u32 + 1);
        if kind == BasisKind::ScaledCauchy {
            xi * cauchy
        } else {
            cauchy
        }
    } else if d > k {
        Complex64::new(0.0, 0.0)
    } else {
        falling(k, d) * t.powu((k - d) as u32)
    }
}

fn checked_poles(kind: BasisKind, poles: Option<&PoleSchedule>, n: usize) -> Result<Vec<Complex64>> {
    if !kind.is_rational() {
        return Ok(Vec::new());
    }
    let schedule = poles.ok_or_else(|| Error::InvalidInput(format!("{kind:?} basis needs a pole schedule")))?;
    let values = schedule.finite_values()?;
    if values.len() < n {
        return Err(Error::DimensionMismatch { context: "explicit basis poles", expected: n, actual: values.len() });
    }
    Ok(values[..n].to_vec())
}

fn row_layout(points: &[Complex64], orders: &[usize]) -> Vec<(usize, Complex64)> {
    points.iter().zip(orders).flat_map(|(&z, &s)| (0..=s).rev().map(move |d| (d, z))).collect()
}

fn sampled(
    kind: BasisKind,
    poles: &[Complex64],
    n: usize,
    points: &[Complex64],
    orders: &[usize],
) -> Result<DenseMatrix> {
    for (i, &z) in points.iter().enumerate() {
        if let Some(k) = poles.iter().position(|&xi| xi == z) {
            return Err(Error::EvaluationAtPole { point_index: i, pole_index: k });
        }
    }
    let rows = row_layout(points, orders);
    let matrix = DenseMatrix::from_fn(rows.len(), n + 1, |i, k| basis_derivative(kind, poles, k, rows[i].0, rows[i].1));
    if !matrix.is_finite() {
        return Err(Error::NonFinite("explicit basis matrix"));
    }
    Ok(matrix)
}

/// Explicit basis matrix with rows in node order, highest derivative first
/// within each node.
pub fn build_basis_matrix(
    kind: BasisKind,
    nodes: &NodeSet,
    poles: Option<&PoleSchedule>,
    n: usize,
) -> Result<ExplicitBasisMatrix> {
    if !kind.allows_derivatives() && !nodes.is_plain() {
        return Err(Error::InvalidInput(format!("{kind:?} basis takes function values only")));
    }
    let poles = checked_poles(kind, poles, n)?;
    for (k, xi) in poles.iter().enumerate() {
        if let Some(j) = nodes.nodes().iter().position(|z| z == xi) {
            return Err(Error::PoleEqualsNode { pole_index: k, node_index: j });
        }
    }
    let matrix = sampled(kind, &poles, n, nodes.nodes(), nodes.orders())?;
    Ok(ExplicitBasisMatrix { kind, matrix })
}

/// Solves `W B c ~ W f` directly and evaluates `sum c_k b_k^(d)` at the
/// samples, `(d = s, ..., 0)` per point.
#[allow(clippy::too_many_arguments)]
pub fn direct_fit_eval(
    kind: BasisKind,
    nodes: &NodeSet,
    poles: Option<&PoleSchedule>,
    f: &DenseVector,
    n: usize,
    points: &[Complex64],
    orders: &[usize],
) -> Result<DirectFit> {
    if points.len() != orders.len() {
        return Err(Error::DimensionMismatch {
            context: "sample orders",
            expected: points.len(),
            actual: orders.len(),
        });
    }
    if f.len() != nodes.total_rows() {
        return Err(Error::DimensionMismatch { context: "data vector", expected: nodes.total_rows(), actual: f.len() });
    }
    if n + 1 > nodes.total_rows() {
        return Err(Error::DegreeTooLarge { n, m: nodes.total_rows() });
    }
    let basis = build_basis_matrix(kind, nodes, poles, n)?;
    let w = sobolev_weights(nodes);
    let a = basis.matrix.scale_rows(w.as_slice())?;
    let b: DenseVector = w.iter().zip(f.iter()).map(|(wi, fi)| wi * fi).collect();
    let solution = solve_dense_ls_flagged(&a, &b)?;
    let pole_values = checked_poles(kind, poles, n)?;
    let samples = sampled(kind, &pole_values, n, points, orders)?;
    let values = samples.matvec(&solution.coeffs)?;
    Ok(DirectFit { coefficients: solution.coeffs, values, rank_deficient_at: solution.rank_deficient_at })
}

/// `[v, Jv, ..., J^n v]` for the Jordan operator and start vector of `nodes`.
pub fn krylov_matrix(nodes: &NodeSet, n: usize) -> DenseMatrix {
    let (j, v, _) = build_jordan(nodes);
    let mut col = v.into_vec();
    let mut cols = Vec::with_capacity(n + 1);
    for _ in 0..=n {
        let next = j.apply(&col);
        cols.push(DenseVector::from_iter(col));
        col = next;
    }
    DenseMatrix::from_columns(&cols).expect("columns share the row count")
}

/// `[v, psi_1(J) v, ..., psi_n(J) v]` with `psi_k(J) = (J - xi_k I)^{-1}`
/// after telescoping the resolvent products.
pub fn rational_krylov_matrix(nodes: &NodeSet, poles: &[Complex64]) -> Result<DenseMatrix> {
    let (j, v, _) = build_jordan(nodes);
    let one = Complex64::new(1.0, 0.0);
    let mut cols = vec![v.clone()];
    for (k, &xi) in poles.iter().enumerate() {
        let col = j
            .solve_shifted(one, xi, v.as_slice())
            .map_err(|node| Error::PoleEqualsNode { pole_index: k, node_index: node })?;
        cols.push(col.into_iter().collect());
    }
    DenseMatrix::from_columns(&cols)
}

/// Right operator of a displacement equation.
#[derive(Debug, Clone, PartialEq)]
pub enum Displacement {
    /// Down-shift `S` with ones on the subdiagonal, so `(B S)_k = B_{k+1}`.
    Shift,
    /// `Psi = diag(1, xi_1, ..., xi_n)`.
    Poles(Vec<Complex64>),
}

/// `A B - B S` (or `A B - B Psi`) and its numerical rank at
/// [`DISPLACEMENT_RANK_TOL`].
pub fn displacement_residual(a: &DenseMatrix, b: &DenseMatrix, aux: &Displacement) -> Result<(DenseMatrix, usize)> {
    let ab = a.matmul(b)?;
    let cols = b.cols();
    let right =
        match aux {
            Displacement::Shift => DenseMatrix::from_fn(b.rows(), cols, |i, k| {
                if k + 1 < cols {
                    b[(i, k + 1)]
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
            Displacement::Poles(poles) => {
                if poles.len() + 1 != cols {
                    return Err(Error::DimensionMismatch {
                        context: "displacement poles",
                        expected: cols.saturating_sub(1),
                        actual: poles.len(),
                    });
                }
                DenseMatrix::from_fn(b.rows(), cols, |i, k| if k == 0 { b[(i, 0)] } else { b[(i, k)] * poles[k - 1] })
            }
        };
    let residual = ab.sub(&right)?;
    let rank = numerical_rank(&residual, DISPLACEMENT_RANK_TOL)?;
    Ok((residual, rank))
}
