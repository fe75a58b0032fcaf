//! Block-diagonal Jordan-like operators and their Sobolev weight vectors.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, DenseVector};
use crate::nodes::NodeSet;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[derive(Debug, Clone, PartialEq)]
struct Block {
    offset: usize,
    node: Complex64,
    /// Superdiagonal read top to bottom: `alpha_s, ..., alpha_1`.
    upper: Vec<Complex64>,
}

impl Block {
    fn size(&self) -> usize {
        self.upper.len() + 1
    }
}

/// Upper bidiagonal blocks, one per node, of order `s_j + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct JordanOperator {
    blocks: Vec<Block>,
    dim: usize,
}

impl JordanOperator {
    /// Blocks for `nodes` with orders `orders` and per-node `alpha_1 ..= alpha_s`.
    pub fn new(nodes: &[Complex64], orders: &[usize], alphas: &[Vec<Complex64>]) -> Result<Self> {
        if orders.len() != nodes.len() || alphas.len() != nodes.len() {
            return Err(Error::DimensionMismatch {
                context: "Jordan block data",
                expected: nodes.len(),
                actual: orders.len().min(alphas.len()),
            });
        }
        let mut blocks = Vec::with_capacity(nodes.len());
        let mut offset = 0;
        for (j, ((&node, &s), a)) in nodes.iter().zip(orders).zip(alphas).enumerate() {
            if a.len() != s {
                return Err(Error::DimensionMismatch { context: "Jordan block alphas", expected: s, actual: a.len() });
            }
            if let Some(r) = a.iter().position(|x| *x == ZERO) {
                return Err(Error::ZeroAlpha { node: j, order: r + 1 });
            }
            blocks.push(Block { offset, node, upper: a.iter().rev().copied().collect() });
            offset += s + 1;
        }
        Ok(Self { blocks, dim: offset })
    }

    /// Sampling operator with unit superdiagonals.
    pub fn with_unit_alphas(nodes: &[Complex64], orders: &[usize]) -> Result<Self> {
        let alphas: Vec<Vec<Complex64>> = orders.iter().map(|&s| vec![ONE; s]).collect();
        Self::new(nodes, orders, &alphas)
    }

    pub fn from_node_set(nodes: &NodeSet) -> Self {
        let alphas: Vec<Vec<Complex64>> = (0..nodes.len()).map(|j| nodes.alphas(j).to_vec()).collect();
        Self::new(nodes.nodes(), nodes.orders(), &alphas).expect("node set invariants hold")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// `(offset, size, node)` of block `j`.
    pub fn block(&self, j: usize) -> (usize, usize, Complex64) {
        let b = &self.blocks[j];
        (b.offset, b.size(), b.node)
    }

    /// Block index owning row `row`.
    pub fn block_of_row(&self, row: usize) -> usize {
        self.blocks.partition_point(|b| b.offset + b.size() <= row)
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.blocks
            .iter()
            .flat_map(|b| std::iter::once(b.node.norm()).chain(b.upper.iter().map(|a| a.norm())))
            .fold(0.0, f64::max)
    }

    /// `out = (eta J - rho I) x`.
    pub fn apply_shifted(&self, eta: Complex64, rho: Complex64, x: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.dim];
        for b in &self.blocks {
            let d = eta * b.node - rho;
            let o = b.offset;
            for i in 0..b.size() {
                let mut acc = d * x[o + i];
                if i < b.upper.len() {
                    acc += eta * b.upper[i] * x[o + i + 1];
                }
                out[o + i] = acc;
            }
        }
        out
    }

    /// `J x`.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.apply_shifted(ONE, ZERO, x)
    }

    /// Solves `(nu J - mu I) u = rhs` block by block with bidiagonal
    /// back-substitution. Returns the first singular block on failure.
    pub fn solve_shifted(
        &self,
        nu: Complex64,
        mu: Complex64,
        rhs: &[Complex64],
    ) -> std::result::Result<Vec<Complex64>, usize> {
        let mut u = vec![ZERO; self.dim];
        for (j, b) in self.blocks.iter().enumerate() {
            let d = nu * b.node - mu;
            if d == ZERO {
                return Err(j);
            }
            let o = b.offset;
            let last = b.size() - 1;
            u[o + last] = rhs[o + last] / d;
            for i in (0..last).rev() {
                u[o + i] = (rhs[o + i] - nu * b.upper[i] * u[o + i + 1]) / d;
            }
        }
        Ok(u)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.dim, self.dim);
        for b in &self.blocks {
            for i in 0..b.size() {
                m[(b.offset + i, b.offset + i)] = b.node;
                if i < b.upper.len() {
                    m[(b.offset + i, b.offset + i + 1)] = b.upper[i];
                }
            }
        }
        m
    }

    /// Vector with `value_j` in the last slot of block `j` and zeros elsewhere.
    pub fn seed(&self, values: impl Fn(usize) -> Complex64) -> Vec<Complex64> {
        let mut v = vec![ZERO; self.dim];
        for (j, b) in self.blocks.iter().enumerate() {
            v[b.offset + b.size() - 1] = values(j);
        }
        v
    }

    /// Derivative order carried by each row: `s_j, ..., 1, 0` within block `j`.
    pub fn row_orders(&self) -> Vec<usize> {
        self.blocks.iter().flat_map(|b| (0..b.size()).rev()).collect()
    }
}

/// `(Prod_{r<=i} alpha_r / i!) w_j` for `i = s_j` down to `0`, stacked per node.
pub fn sobolev_weights(nodes: &NodeSet) -> DenseVector {
    let mut out = Vec::with_capacity(nodes.total_rows());
    for j in 0..nodes.len() {
        let w = nodes.weights()[j];
        let alphas = nodes.alphas(j);
        let mut scale = vec![ONE; alphas.len() + 1];
        for i in 1..scale.len() {
            scale[i] = scale[i - 1] * alphas[i - 1] / i as f64;
        }
        out.extend(scale.iter().rev().map(|c| c * w));
    }
    DenseVector::from_vec_unchecked(out)
}

/// Jordan operator, starting vector (`w_j` in each block's last slot), and
/// the diagonal of the Sobolev weight matrix.
pub fn build_jordan(nodes: &NodeSet) -> (JordanOperator, DenseVector, DenseVector) {
    let op = JordanOperator::from_node_set(nodes);
    let v = op.seed(|j| nodes.weights()[j]);
    (op, DenseVector::from_vec_unchecked(v), sobolev_weights(nodes))
}
