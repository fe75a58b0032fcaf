//! Dense complex containers and the kernels shared by every fitting path:
//! Gram-Schmidt orthogonalization with optional re-orthogonalization, the
//! weighted projection of a right-hand side onto an orthonormal basis, a
//! Householder least-squares solver, and an SVD-based numerical rank.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default bound on `max |Q^H Q - I|` for an [`OrthoBasis`].
pub const ORTHO_TOL: f64 = 1e-12;
/// Relative tail norm below which the next Krylov vector is treated as dependent.
pub const BREAKDOWN_TOL: f64 = 1e-14;
/// Relative pivot magnitude below which a triangular factor counts as rank deficient.
pub const RANK_TOL: f64 = 1e-14;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

fn all_finite(values: &[Complex64]) -> bool {
    values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// `x^H y`.
pub(crate) fn dot_conj(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    let mut acc = ZERO;
    for (a, b) in x.iter().zip(y) {
        acc += a.conj() * b;
    }
    acc
}

pub(crate) fn norm2(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// A vector of complex scalars with finite entries.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DenseVector(Vec<Complex64>);

impl DenseVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if !all_finite(&entries) {
            return Err(Error::NonFinite("vector entries"));
        }
        Ok(Self(entries))
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![ZERO; len])
    }

    /// Unit vector `e_index` of length `len`.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.0[index] = ONE;
        v
    }

    pub(crate) fn from_vec_unchecked(entries: Vec<Complex64>) -> Self {
        Self(entries)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.0.iter()
    }

    pub fn norm(&self) -> f64 {
        norm2(&self.0)
    }

    /// `self^H other`.
    pub fn dot_conj(&self, other: &DenseVector) -> Complex64 {
        dot_conj(&self.0, &other.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        all_finite(&self.0)
    }
}

impl Index<usize> for DenseVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for DenseVector {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.0[i]
    }
}

impl FromIterator<Complex64> for DenseVector {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::DimensionMismatch {
                context: "matrix entries",
                expected: rows * cols,
                actual: data.len(),
            });
        }
        if !all_finite(&data) {
            return Err(Error::NonFinite("matrix entries"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    /// `rows x cols` matrix with ones on the main diagonal.
    pub fn identity(rows: usize, cols: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows.min(cols) {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_columns(columns: &[DenseVector]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, DenseVector::len);
        if let Some(bad) = columns.iter().find(|c| c.len() != rows) {
            return Err(Error::DimensionMismatch { context: "matrix columns", expected: rows, actual: bad.len() });
        }
        Ok(Self::from_fn(rows, cols, |i, j| columns[j][i]))
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in entries.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> DenseVector {
        DenseVector((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                context: "matrix product",
                expected: self.cols,
                actual: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let src = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &DenseVector) -> Result<DenseVector> {
        if self.cols != x.len() {
            return Err(Error::DimensionMismatch {
                context: "matrix-vector product",
                expected: self.cols,
                actual: x.len(),
            });
        }
        Ok((0..self.rows).map(|i| self.row(i).iter().zip(x.iter()).map(|(a, b)| a * b).sum()).collect())
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                context: "matrix difference",
                expected: self.rows * self.cols,
                actual: other.rows * other.cols,
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    /// `diag(weights) * self`.
    pub fn scale_rows(&self, weights: &[Complex64]) -> Result<Self> {
        if weights.len() != self.rows {
            return Err(Error::DimensionMismatch {
                context: "row scaling",
                expected: self.rows,
                actual: weights.len(),
            });
        }
        Ok(Self::from_fn(self.rows, self.cols, |i, j| weights[i] * self[(i, j)]))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm2(&self.data)
    }

    pub fn is_finite(&self) -> bool {
        all_finite(&self.data)
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// An `(n+1) x n` upper Hessenberg matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Hessenberg {
    matrix: DenseMatrix,
}

impl Hessenberg {
    pub fn zeros(n: usize) -> Self {
        Self { matrix: DenseMatrix::zeros(n + 1, n) }
    }

    /// Wraps an `(n+1) x n` matrix, rejecting non-zeros below the first subdiagonal.
    pub fn new(matrix: DenseMatrix) -> Result<Self> {
        if matrix.rows() != matrix.cols() + 1 {
            return Err(Error::DimensionMismatch {
                context: "Hessenberg rows",
                expected: matrix.cols() + 1,
                actual: matrix.rows(),
            });
        }
        for j in 0..matrix.cols() {
            for i in j + 2..matrix.rows() {
                if matrix[(i, j)] != ZERO {
                    return Err(Error::InvalidInput(format!("entry ({i}, {j}) lies below the first subdiagonal")));
                }
            }
        }
        Ok(Self { matrix })
    }

    /// Number of columns `n`.
    pub fn n(&self) -> usize {
        self.matrix.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, value: Complex64) {
        debug_assert!(i <= j + 1);
        self.matrix[(i, j)] = value;
    }

    /// Entry `(k+1, k)` (zero-based column `k`).
    pub fn subdiagonal(&self, k: usize) -> Complex64 {
        self.matrix[(k + 1, k)]
    }

    pub fn as_matrix(&self) -> &DenseMatrix {
        &self.matrix
    }
}

/// Nested orthonormal basis stored column by column.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthoBasis {
    rows: usize,
    columns: Vec<DenseVector>,
}

impl OrthoBasis {
    pub fn empty(rows: usize) -> Self {
        Self { rows, columns: Vec::new() }
    }

    /// Checks `max |Q^H Q - I| <= tol` before accepting the columns.
    pub fn from_columns(columns: Vec<DenseVector>, tol: f64) -> Result<Self> {
        let rows = columns.first().map_or(0, DenseVector::len);
        if let Some(bad) = columns.iter().find(|c| c.len() != rows) {
            return Err(Error::DimensionMismatch { context: "basis columns", expected: rows, actual: bad.len() });
        }
        let basis = Self { rows, columns };
        let err = basis.orthogonality_error();
        if err > tol {
            return Err(Error::InvalidInput(format!("columns are not orthonormal: max |Q^H Q - I| = {err:e}")));
        }
        Ok(basis)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn column(&self, k: usize) -> &DenseVector {
        &self.columns[k]
    }

    pub fn columns(&self) -> &[DenseVector] {
        &self.columns
    }

    pub(crate) fn push(&mut self, column: DenseVector) {
        debug_assert_eq!(column.len(), self.rows);
        self.columns.push(column);
    }

    pub fn to_matrix(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.rows, self.columns.len(), |i, j| self.columns[j][i])
    }

    /// `max |Q^H Q - I|`.
    pub fn orthogonality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (j, qj) in self.columns.iter().enumerate() {
            for (i, qi) in self.columns.iter().enumerate().take(j + 1) {
                let mut g = qi.dot_conj(qj);
                if i == j {
                    g -= ONE;
                }
                worst = worst.max(g.norm());
            }
        }
        worst
    }

    /// `Q y`.
    pub fn combine(&self, coeffs: &DenseVector) -> Result<DenseVector> {
        if coeffs.len() != self.columns.len() {
            return Err(Error::DimensionMismatch {
                context: "basis combination",
                expected: self.columns.len(),
                actual: coeffs.len(),
            });
        }
        let mut out = vec![ZERO; self.rows];
        for (q, &c) in self.columns.iter().zip(coeffs.iter()) {
            for (o, x) in out.iter_mut().zip(q.iter()) {
                *o += c * x;
            }
        }
        Ok(DenseVector(out))
    }
}

/// Result of orthogonalizing one candidate against a basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Orthogonalized {
    pub unit_vector: DenseVector,
    /// Projection coefficients accumulated over all passes.
    pub coeffs: DenseVector,
    /// Norm of the residual before normalization.
    pub tail_norm: f64,
}

/// Modified Gram-Schmidt against every basis column, repeated `reorth_passes`
/// times (1 or 2), then normalization.
pub fn orthogonalize_next(candidate: &DenseVector, basis: &OrthoBasis, reorth_passes: usize) -> Result<Orthogonalized> {
    orthogonalize_with_tol(candidate, basis, reorth_passes, BREAKDOWN_TOL)
}

pub(crate) fn orthogonalize_with_tol(
    candidate: &DenseVector,
    basis: &OrthoBasis,
    reorth_passes: usize,
    breakdown_tol: f64,
) -> Result<Orthogonalized> {
    if !(1..=2).contains(&reorth_passes) {
        return Err(Error::InvalidInput(format!("reorth_passes must be 1 or 2, got {reorth_passes}")));
    }
    if candidate.len() != basis.rows() {
        return Err(Error::DimensionMismatch {
            context: "orthogonalization candidate",
            expected: basis.rows(),
            actual: candidate.len(),
        });
    }
    let candidate_norm = candidate.norm();
    let mut w = candidate.0.clone();
    let mut coeffs = vec![ZERO; basis.len()];
    for _ in 0..reorth_passes {
        for (q, acc) in basis.columns.iter().zip(coeffs.iter_mut()) {
            let h = dot_conj(&q.0, &w);
            for (wi, qi) in w.iter_mut().zip(&q.0) {
                *wi -= h * qi;
            }
            *acc += h;
        }
    }
    let tail_norm = norm2(&w);
    if tail_norm.is_nan() || tail_norm <= breakdown_tol * candidate_norm {
        return Err(Error::Breakdown { step: basis.len(), tail_norm, candidate_norm });
    }
    let inv = 1.0 / tail_norm;
    for wi in &mut w {
        *wi *= inv;
    }
    Ok(Orthogonalized { unit_vector: DenseVector(w), coeffs: DenseVector(coeffs), tail_norm })
}

/// `y = Q^H diag(weights) f`.
pub fn project_rhs(basis: &OrthoBasis, weights: &DenseVector, f: &DenseVector) -> Result<DenseVector> {
    for (context, len) in [("projection weights", weights.len()), ("projection rhs", f.len())] {
        if len != basis.rows() {
            return Err(Error::DimensionMismatch { context, expected: basis.rows(), actual: len });
        }
    }
    let wf: Vec<Complex64> = weights.iter().zip(f.iter()).map(|(w, x)| w * x).collect();
    Ok(basis.columns.iter().map(|q| dot_conj(&q.0, &wf)).collect())
}

/// Least-squares solution with a flag instead of an error on small pivots.
#[derive(Debug, Clone, PartialEq)]
pub struct FlaggedSolution {
    pub coeffs: DenseVector,
    /// First pivot that fell below `RANK_TOL * ||A||`, if any.
    pub rank_deficient_at: Option<usize>,
}

/// Minimizes `||A c - b||_2` through Householder QR; errors on a pivot below
/// `RANK_TOL * ||A||` where `||A||` is the largest column norm.
pub fn solve_dense_ls(a: &DenseMatrix, b: &DenseVector) -> Result<DenseVector> {
    let (solution, pivots, threshold) = householder_ls(a, b)?;
    if let Some(pivot) = solution.rank_deficient_at {
        return Err(Error::RankDeficient { pivot, magnitude: pivots[pivot], threshold });
    }
    Ok(solution.coeffs)
}

/// Same factorization as [`solve_dense_ls`], but a rank deficiency is reported
/// through the flag. Exactly-zero pivots zero the matching coefficient; tiny
/// pivots are divided through as is.
pub fn solve_dense_ls_flagged(a: &DenseMatrix, b: &DenseVector) -> Result<FlaggedSolution> {
    householder_ls(a, b).map(|(s, _, _)| s)
}

fn householder_ls(a: &DenseMatrix, b: &DenseVector) -> Result<(FlaggedSolution, Vec<f64>, f64)> {
    let (m, n) = (a.rows(), a.cols());
    if b.len() != m {
        return Err(Error::DimensionMismatch { context: "least-squares rhs", expected: m, actual: b.len() });
    }
    if m < n {
        return Err(Error::InvalidInput(format!("least squares needs rows >= cols, got {m}x{n}")));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::NonFinite("least-squares input"));
    }
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| a.column(j).0).collect();
    let mut rhs = b.0.clone();
    let scale = cols.iter().map(|c| norm2(c)).fold(0.0, f64::max);

    for k in 0..n {
        let norm_x = norm2(&cols[k][k..]);
        if norm_x == 0.0 {
            continue;
        }
        let x0 = cols[k][k];
        let phase = if x0 == ZERO { ONE } else { x0 / x0.norm() };
        let alpha = -phase * norm_x;
        let mut v: Vec<Complex64> = cols[k][k..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        for col in cols.iter_mut().skip(k) {
            let s = dot_conj(&v, &col[k..]) * beta;
            for (c, vi) in col[k..].iter_mut().zip(&v) {
                *c -= s * vi;
            }
        }
        let s = dot_conj(&v, &rhs[k..]) * beta;
        for (r, vi) in rhs[k..].iter_mut().zip(&v) {
            *r -= s * vi;
        }
        cols[k][k] = alpha;
        for c in cols[k][k + 1..].iter_mut() {
            *c = ZERO;
        }
    }

    let threshold = RANK_TOL * scale;
    let pivots: Vec<f64> = (0..n).map(|k| cols[k][k].norm()).collect();
    let rank_deficient_at = pivots.iter().position(|&p| p.is_nan() || p <= threshold);
    let mut c = vec![ZERO; n];
    for k in (0..n).rev() {
        let mut acc = rhs[k];
        for j in k + 1..n {
            acc -= cols[j][k] * c[j];
        }
        let r = cols[k][k];
        c[k] = if r == ZERO { ZERO } else { acc / r };
    }
    Ok((FlaggedSolution { coeffs: DenseVector(c), rank_deficient_at }, pivots, threshold))
}

/// Singular values in descending order by one-sided (Hestenes) Jacobi
/// rotations on the columns of `m` (or of `m^H` when `m` is wide).
pub fn singular_values(m: &DenseMatrix) -> Result<Vec<f64>> {
    if !m.is_finite() {
        return Err(Error::NonFinite("singular value input"));
    }
    let work = if m.rows() >= m.cols() { m.clone() } else { m.adjoint() };
    let n = work.cols();
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| work.column(j).0).collect();
    const MAX_SWEEPS: usize = 80;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma = dot_conj(&cols[p], &cols[q]);
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // align the phase of column q so that a_p^H a_q is real positive
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(q);
                for (ap, aq) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    let x = *ap;
                    let y = *aq * phase;
                    *ap = x * c - y * s;
                    *aq = x * s + y * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols.iter().map(|c| norm2(c)).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// Count of singular values above `tol * sigma_max`.
pub fn numerical_rank(m: &DenseMatrix, tol: f64) -> Result<usize> {
    let sv = singular_values(m)?;
    let top = sv.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > tol * top).count())
}

/// 2-norm condition number `sigma_max / sigma_min` (infinite when singular).
pub fn condition_number(m: &DenseMatrix) -> Result<f64> {
    let sv = singular_values(m)?;
    match (sv.first(), sv.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => Ok(hi / lo),
        _ => Ok(f64::INFINITY),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn basis_of(cols: &[DenseVector]) -> OrthoBasis {
        OrthoBasis::from_columns(cols.to_vec(), ORTHO_TOL).unwrap()
    }

    fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> DenseVector {
        (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
    }

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix {
        DenseMatrix::from_fn(rows, cols, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn random_ortho(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> OrthoBasis {
        let mut basis = OrthoBasis::empty(rows);
        for _ in 0..cols {
            let v = random_vector(rng, rows);
            let o = orthogonalize_next(&v, &basis, 2).unwrap();
            basis.push(o.unit_vector);
        }
        basis
    }

    #[test]
    fn already_orthogonal_candidate_is_returned() {
        let basis = basis_of(&[DenseVector::unit(3, 1)]);
        let o = orthogonalize_next(&DenseVector::unit(3, 0), &basis, 1).unwrap();
        assert_eq!(o.unit_vector, DenseVector::unit(3, 0));
        assert_eq!(o.coeffs.as_slice(), &[c(0.0)]);
        assert_eq!(o.tail_norm, 1.0);
    }

    #[test]
    fn dependent_candidate_breaks_down() {
        let basis = basis_of(&[DenseVector::unit(3, 1)]);
        let err = orthogonalize_next(&DenseVector::unit(3, 1), &basis, 2).unwrap_err();
        assert!(matches!(err, Error::Breakdown { step: 1, .. }));
    }

    #[test]
    fn hand_gram_schmidt() {
        // [1,1,0] - <[1,1,0], e1> e1 = [0,1,0]
        let basis = basis_of(&[DenseVector::unit(3, 0)]);
        let cand = DenseVector::from_real(&[1.0, 1.0, 0.0]).unwrap();
        let o = orthogonalize_next(&cand, &basis, 2).unwrap();
        assert_abs_diff_eq!(o.coeffs[0].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(o.tail_norm, 1.0, epsilon = 1e-15);
        assert_eq!(o.unit_vector, DenseVector::unit(3, 1));
    }

    #[test]
    fn rejects_bad_pass_count_and_length() {
        let basis = basis_of(&[DenseVector::unit(3, 0)]);
        let cand = DenseVector::unit(3, 1);
        assert!(matches!(orthogonalize_next(&cand, &basis, 3), Err(Error::InvalidInput(_))));
        assert!(matches!(
            orthogonalize_next(&DenseVector::unit(4, 1), &basis, 1),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn non_finite_vectors_are_rejected() {
        assert!(DenseVector::from_real(&[1.0, f64::NAN]).is_err());
        assert!(DenseMatrix::new(1, 2, vec![c(1.0), c(f64::INFINITY)]).is_err());
        assert!(DenseMatrix::new(2, 2, vec![c(1.0)]).is_err());
    }

    #[test]
    fn projection_with_identity_basis() {
        let basis = basis_of(&[DenseVector::unit(3, 0), DenseVector::unit(3, 1), DenseVector::unit(3, 2)]);
        let f = DenseVector::from_real(&[1.0, 2.0, 3.0]).unwrap();
        let ones = DenseVector::from_real(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(project_rhs(&basis, &ones, &f).unwrap(), f);
        let w = DenseVector::from_real(&[2.0, 0.0, 1.0]).unwrap();
        assert_eq!(project_rhs(&basis, &w, &ones).unwrap(), w);
    }

    #[test]
    fn projection_matches_triple_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let q = random_ortho(&mut rng, 6, 3);
        let w = random_vector(&mut rng, 6);
        let f = random_vector(&mut rng, 6);
        let y = project_rhs(&q, &w, &f).unwrap();
        let qm = q.to_matrix();
        for k in 0..3 {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..6 {
                acc += qm[(i, k)].conj() * w[i] * f[i];
            }
            assert_abs_diff_eq!((acc - y[k]).norm(), 0.0, epsilon = 1e-15);
        }
        let short = DenseVector::zeros(5);
        assert!(project_rhs(&q, &short, &f).is_err());
    }

    #[test]
    fn dense_ls_small_cases() {
        let a = DenseMatrix::identity(2, 2);
        let b = DenseVector::from_real(&[3.0, 4.0]).unwrap();
        let x = solve_dense_ls(&a, &b).unwrap();
        assert_abs_diff_eq!((x[0] - c(3.0)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((x[1] - c(4.0)).norm(), 0.0, epsilon = 1e-15);

        let a = DenseMatrix::new(2, 1, vec![c(1.0), c(1.0)]).unwrap();
        let b = DenseVector::from_real(&[0.0, 2.0]).unwrap();
        let x = solve_dense_ls(&a, &b).unwrap();
        assert_abs_diff_eq!((x[0] - c(1.0)).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn dense_ls_reports_rank_deficiency() {
        let a = DenseMatrix::new(3, 2, vec![c(1.0), c(2.0), c(1.0), c(2.0), c(1.0), c(2.0)]).unwrap();
        let b = DenseVector::from_real(&[1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(solve_dense_ls(&a, &b), Err(Error::RankDeficient { pivot: 1, .. })));
        let flagged = solve_dense_ls_flagged(&a, &b).unwrap();
        assert_eq!(flagged.rank_deficient_at, Some(1));
        assert!(solve_dense_ls(&DenseMatrix::zeros(2, 3), &DenseVector::zeros(2)).is_err());
    }

    #[test]
    fn dense_ls_residual_is_orthogonal_to_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let a = random_matrix(&mut rng, 12, 5);
            let b = random_vector(&mut rng, 12);
            let x = solve_dense_ls(&a, &b).unwrap();
            let ax = a.matvec(&x).unwrap();
            let r: DenseVector = ax.iter().zip(b.iter()).map(|(p, q)| p - q).collect();
            let g = a.adjoint().matvec(&r).unwrap();
            let bound = 1e-10 * a.frobenius_norm() * b.norm();
            assert!(g.norm() <= bound, "{} > {}", g.norm(), bound);
        }
    }

    #[test]
    fn rank_of_simple_matrices() {
        assert_eq!(numerical_rank(&DenseMatrix::zeros(3, 3), 1e-10).unwrap(), 0);
        assert_eq!(numerical_rank(&DenseMatrix::identity(3, 3), 1e-10).unwrap(), 3);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = random_vector(&mut rng, 5);
        let v = random_vector(&mut rng, 4);
        let outer = DenseMatrix::from_fn(5, 4, |i, j| u[i] * v[j].conj());
        assert_eq!(numerical_rank(&outer, 1e-10).unwrap(), 1);
        assert_eq!(numerical_rank(&outer.adjoint(), 1e-10).unwrap(), 1);
    }

    #[test]
    fn singular_values_of_diagonal() {
        let d = DenseMatrix::diagonal(&[c(3.0), Complex64::new(0.0, -5.0), c(1.0)]);
        let sv = singular_values(&d).unwrap();
        for (got, want) in sv.iter().zip([5.0, 3.0, 1.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(condition_number(&d).unwrap(), 5.0, epsilon = 1e-13);
    }

    #[test]
    fn hessenberg_rejects_fill_below_subdiagonal() {
        let mut m = DenseMatrix::zeros(3, 2);
        m[(2, 0)] = c(1.0);
        assert!(Hessenberg::new(m).is_err());
        assert!(Hessenberg::new(DenseMatrix::zeros(2, 2)).is_err());
        assert_eq!(Hessenberg::new(DenseMatrix::zeros(3, 2)).unwrap().n(), 2);
    }

    #[test]
    fn second_pass_never_hurts_orthogonality() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        // Krylov vectors of a diagonal operator lose orthogonality quickly under one pass.
        let z: Vec<Complex64> = (0..200).map(|i| c(-1.0 + 2.0 * i as f64 / 199.0)).collect();
        let v = random_vector(&mut rng, 200);
        let run = |passes: usize| {
            let mut basis = OrthoBasis::empty(200);
            let first = DenseVector(v.0.iter().map(|x| x / v.norm()).collect());
            basis.push(first);
            for _ in 0..60 {
                let last = basis.column(basis.len() - 1);
                let cand: DenseVector = last.iter().zip(&z).map(|(a, b)| a * b).collect();
                let o = orthogonalize_next(&cand, &basis, passes).unwrap();
                basis.push(o.unit_vector);
            }
            basis.orthogonality_error()
        };
        let one = run(1);
        let two = run(2);
        assert!(two <= one, "two passes {two:e} vs one pass {one:e}");
        assert!(two <= 1e-13);
    }
}
