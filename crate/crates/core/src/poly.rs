//! Weighted polynomial least squares through Vandermonde-with-Arnoldi.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::krylov::{fit_polynomial, FitModel, ProblemKind, Recurrence};
use crate::linalg::{DenseVector, Hessenberg, OrthoBasis};
use crate::nodes::NodeSet;

/// Degree-`n` polynomial minimizing `sum |w_j|^2 |p(z_j) - f_j|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyFitModel(FitModel);

impl PolyFitModel {
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

    pub fn eval(&self, points: &[Complex64]) -> Result<DenseVector> {
        self.0.evaluate(points, &vec![0; points.len()])
    }

    /// `p_0 .. p_n` at `points`.
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

/// Arnoldi on `Z = diag(z)` from `v = w`, then `y = Q^H W f`.
pub fn fit_poly(
    nodes: &NodeSet,
    f: &DenseVector,
    n: usize,
    reorth_passes: usize,
) -> Result<(PolyFitModel, OrthoBasis)> {
    if !nodes.is_plain() {
        return Err(Error::InvalidInput(
            "polynomial fit takes function values only; use the Sobolev fit for derivative data".into(),
        ));
    }
    let (model, basis) = fit_polynomial(ProblemKind::Poly, nodes, f, n, reorth_passes)?;
    Ok((PolyFitModel(model), basis))
}

/// Runs the Hessenberg recurrence at `points` and combines with `y`.
pub fn eval_poly(model: &PolyFitModel, points: &[Complex64]) -> Result<DenseVector> {
    model.eval(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{solve_dense_ls, DenseMatrix};
    use crate::nodes::chebyshev_first_kind;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    }

    fn residual(nodes: &NodeSet, values: &DenseVector, f: &DenseVector) -> f64 {
        nodes
            .weights()
            .iter()
            .zip(values.iter().zip(f.iter()))
            .map(|(w, (p, y))| w.norm_sqr() * (p - y).norm_sqr())
            .sum()
    }

    #[test]
    fn constant_fit() {
        let nodes = chebyshev_first_kind(7).unwrap();
        let f = DenseVector::new(vec![c(2.5, -1.0); 7]).unwrap();
        let (model, _) = fit_poly(&nodes, &f, 0, 2).unwrap();
        let vals = eval_poly(&model, nodes.nodes()).unwrap();
        assert!(vals.iter().all(|v| (v - c(2.5, -1.0)).norm() < 1e-14));
        let y0 = model.coefficients()[0] * model.p0();
        assert!((y0 - c(2.5, -1.0)).norm() < 1e-14);
        let away = eval_poly(&model, &[c(10.0, 3.0)]).unwrap();
        assert!((away[0] - c(2.5, -1.0)).norm() < 1e-14);
    }

    #[test]
    fn interpolation_when_square() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let z: Vec<Complex64> = (0..6).map(|j| c(j as f64 / 5.0 + rng.gen_range(0.0..0.05), 0.0)).collect();
        let nodes = NodeSet::new(z, vec![c(1.0, 0.0); 6]).unwrap();
        let f: DenseVector = (0..6).map(|_| c(rng.gen_range(-1.0..1.0), 0.0)).collect();
        let (model, _) = fit_poly(&nodes, &f, 5, 2).unwrap();
        let vals = eval_poly(&model, nodes.nodes()).unwrap();
        for (v, y) in vals.iter().zip(f.iter()) {
            assert!((v - y).norm() < 1e-10);
        }
    }

    #[test]
    fn matches_dense_monomial_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (m, n) = (12, 5);
        let z: Vec<Complex64> = (0..m).map(|_| random_complex(&mut rng)).collect();
        let w: Vec<Complex64> = (0..m).map(|_| c(rng.gen_range(0.5..1.5), 0.0)).collect();
        let f: DenseVector = (0..m).map(|_| random_complex(&mut rng)).collect();
        let nodes = NodeSet::new(z.clone(), w.clone()).unwrap();
        let (model, _) = fit_poly(&nodes, &f, n, 2).unwrap();
        let a = DenseMatrix::from_fn(m, n + 1, |i, k| w[i] * z[i].powu(k as u32));
        let b: DenseVector = (0..m).map(|i| w[i] * f[i]).collect();
        let coef = solve_dense_ls(&a, &b).unwrap();
        let vals = eval_poly(&model, &z).unwrap();
        for i in 0..m {
            let direct: Complex64 = (0..=n).map(|k| coef[k] * z[i].powu(k as u32)).sum();
            assert!((vals[i] - direct).norm() < 1e-8);
        }
    }

    #[test]
    fn node_values_match_basis_combination() {
        let nodes = chebyshev_first_kind(20).unwrap();
        let f: DenseVector = nodes.nodes().iter().map(|z| (z * 3.0).exp()).collect();
        let (model, basis) = fit_poly(&nodes, &f, 8, 2).unwrap();
        let qy = basis.combine(model.coefficients()).unwrap();
        let vals = eval_poly(&model, nodes.nodes()).unwrap();
        for ((v, q), w) in vals.iter().zip(qy.iter()).zip(nodes.weights()) {
            assert!((v - q / w).norm() < 1e-12);
        }
    }

    #[test]
    fn arnoldi_relation_and_gram_identity() {
        let nodes = chebyshev_first_kind(101).unwrap();
        let f: DenseVector = nodes.nodes().iter().map(|z| 1.0 / (1.0 + 25.0 * z * z)).collect();
        let n = 50;
        let (model, basis) = fit_poly(&nodes, &f, n, 2).unwrap();
        let h = model.hessenberg();
        let zmax = nodes.nodes().iter().map(|z| z.norm()).fold(0.0, f64::max);
        for k in 0..n {
            for i in 0..nodes.len() {
                let lhs = nodes.nodes()[i] * basis.column(k)[i];
                let rhs: Complex64 = (0..=k + 1).map(|j| basis.column(j)[i] * h.get(j, k)).sum();
                assert!((lhs - rhs).norm() <= 1e-12 * zmax);
            }
            assert!(h.subdiagonal(k).re > 0.0 && h.subdiagonal(k).im == 0.0);
        }
        let p = model.basis_values(nodes.nodes()).unwrap();
        for a in 0..=n {
            for b in 0..=n {
                let g: Complex64 =
                    (0..nodes.len()).map(|j| nodes.weights()[j].norm_sqr() * p[a][j] * p[b][j].conj()).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                assert!((g - target).norm() <= 1e-10, "G[{a},{b}] = {g}");
            }
        }
    }

    #[test]
    fn runge_degree_thirty() {
        let nodes = chebyshev_first_kind(61).unwrap();
        let f: DenseVector = nodes.nodes().iter().map(|z| 1.0 / (1.0 + 25.0 * z * z)).collect();
        let (model, _) = fit_poly(&nodes, &f, 30, 1).unwrap();
        let xs: Vec<Complex64> = (0..1000).map(|i| c(-1.0 + 2.0 * i as f64 / 999.0, 0.0)).collect();
        let vals = eval_poly(&model, &xs).unwrap();
        let err = xs.iter().zip(vals.iter()).map(|(x, p)| (1.0 / (1.0 + 25.0 * x * x) - p).norm()).fold(0.0, f64::max);
        assert!((1e-3..=1e-1).contains(&err), "sup error {err:e}");
    }

    #[test]
    fn rejects_bad_degree_and_derivative_data() {
        let nodes = chebyshev_first_kind(4).unwrap();
        let f = DenseVector::from_real(&[1.0; 4]).unwrap();
        assert!(matches!(fit_poly(&nodes, &f, 4, 2), Err(Error::DegreeTooLarge { n: 4, m: 4 })));
        let sob = nodes.clone().with_orders(vec![1, 0, 0, 0]).unwrap();
        let f5 = DenseVector::from_real(&[1.0; 5]).unwrap();
        assert!(fit_poly(&sob, &f5, 2, 2).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn weight_scaling_leaves_fit_unchanged(seed in any::<u64>(), scale in 0.01f64..100.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = 15;
            let z: Vec<Complex64> = (0..m).map(|j| c(-1.0 + 2.0 * j as f64 / (m - 1) as f64, 0.0)).collect();
            let w: Vec<Complex64> = (0..m).map(|_| c(rng.gen_range(0.2..2.0), 0.0)).collect();
            let f: DenseVector = (0..m).map(|_| random_complex(&mut rng)).collect();
            let base = NodeSet::new(z.clone(), w).unwrap();
            let scaled = base.scaled_weights(c(scale, 0.0));
            let xs = [c(0.13, 0.0), c(-0.77, 0.2)];
            let (a, _) = fit_poly(&base, &f, 6, 2).unwrap();
            let (b, _) = fit_poly(&scaled, &f, 6, 2).unwrap();
            let (va, vb) = (eval_poly(&a, &xs).unwrap(), eval_poly(&b, &xs).unwrap());
            for (x, y) in va.iter().zip(vb.iter()) {
                prop_assert!((x - y).norm() <= 1e-12 * (1.0 + x.norm()));
            }
        }

        #[test]
        fn residual_is_non_increasing_in_degree(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = 20;
            let nodes = NodeSet::new(
                (0..m).map(|_| random_complex(&mut rng)).collect(),
                (0..m).map(|_| c(rng.gen_range(0.2..2.0), 0.0)).collect(),
            ).unwrap();
            let f: DenseVector = (0..m).map(|_| random_complex(&mut rng)).collect();
            let mut last = f64::INFINITY;
            for n in 0..10 {
                let (model, _) = fit_poly(&nodes, &f, n, 2).unwrap();
                let r = residual(&nodes, &eval_poly(&model, nodes.nodes()).unwrap(), &f);
                prop_assert!(r <= last * (1.0 + 1e-10) + 1e-14);
                last = r;
            }
        }
    }
}
