//! Gauss-Lobatto-Legendre nodes, weights and the collocation differentiation
//! matrix on the reference interval [-1, 1].

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::real::Real;

pub const MAX_ORDER: usize = 15;

/// One-dimensional LGL operator of polynomial degree `order`.
///
/// Everything is computed in `f64` and converted once, so `f32` operators
/// carry correctly rounded entries.
#[derive(Clone, Debug, PartialEq)]
pub struct LglOperator<T> {
    order: usize,
    nodes: Vec<T>,
    weights: Vec<T>,
    /// Row-major `(N+1) x (N+1)` differentiation matrix.
    diff: Vec<T>,
    /// Row-major map from nodal values to orthonormal Legendre coefficients.
    modal: Vec<T>,
    barycentric: Vec<f64>,
    nodes_f64: Vec<f64>,
}

/// Legendre polynomial `P_n(x)` and `P_{n-1}(x)` by the three-term recursion.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut prev, mut cur) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let next = ((2.0 * kf - 1.0) * x * cur - (kf - 1.0) * prev) / kf;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

pub fn legendre(n: usize, x: f64) -> f64 {
    legendre_pair(n, x).0
}

/// Nodes and weights of the `(n+1)`-point Gauss-Lobatto rule.
fn lobatto_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let nf = n as f64;
    let mut x = vec![0.0; n + 1];
    x[0] = -1.0;
    x[n] = 1.0;
    // Interior nodes are the roots of q = P_{n+1} - P_{n-1}, q' = (2n+1) P_n.
    for j in 1..n.div_ceil(2) {
        let mut xj = -(std::f64::consts::PI * j as f64 / nf).cos();
        for _ in 0..100 {
            let (pn, pnm1) = legendre_pair(n, xj);
            let pnp1 = ((2.0 * nf + 1.0) * xj * pn - nf * pnm1) / (nf + 1.0);
            let q = pnp1 - pnm1;
            let dq = (2.0 * nf + 1.0) * pn;
            let step = q / dq;
            xj -= step;
            if step.abs() <= 4.0 * f64::EPSILON * xj.abs().max(1.0) {
                break;
            }
        }
        x[j] = xj;
        x[n - j] = -xj;
    }
    if n.is_multiple_of(2) {
        x[n / 2] = 0.0;
    }
    let w = x
        .iter()
        .map(|&xj| {
            let pn = legendre(n, xj);
            2.0 / (nf * (nf + 1.0) * pn * pn)
        })
        .collect();
    (x, w)
}

fn barycentric_weights(x: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|j| {
            let prod: f64 = (0..x.len()).filter(|&k| k != j).map(|k| x[j] - x[k]).product();
            prod.recip()
        })
        .collect()
}

/// Builds the LGL operator of degree `order` (`1 <= order <= 15`).
pub fn lgl_operator<T: Real>(order: usize) -> Result<LglOperator<T>> {
    if !(1..=MAX_ORDER).contains(&order) {
        return Err(Error::InvalidArgument(format!(
            "polynomial degree {order} outside 1..={MAX_ORDER}"
        )));
    }
    let n = order + 1;
    let (x, w) = lobatto_rule(order);
    let lambda = barycentric_weights(&x);

    let mut d = vec![0.0f64; n * n];
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i != j {
                let dij = lambda[j] / lambda[i] / (x[i] - x[j]);
                d[i * n + j] = dij;
                diag -= dij;
            }
        }
        // Negative row sum: constants are differentiated to zero.
        d[i * n + i] = diag;
    }

    let vandermonde = DMatrix::from_fn(n, n, |i, j| legendre(j, x[i]) * (j as f64 + 0.5).sqrt());
    let inverse = vandermonde
        .try_inverse()
        .expect("Legendre Vandermonde matrix on LGL nodes is invertible");
    let modal = (0..n * n).map(|idx| T::lit(inverse[(idx / n, idx % n)])).collect();

    Ok(LglOperator {
        order,
        nodes: x.iter().map(|&v| T::lit(v)).collect(),
        weights: w.iter().map(|&v| T::lit(v)).collect(),
        diff: d.iter().map(|&v| T::lit(v)).collect(),
        modal,
        barycentric: lambda,
        nodes_f64: x,
    })
}

impl<T: Real> LglOperator<T> {
    /// Polynomial degree `N`.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of nodes `N + 1`.
    pub fn len(&self) -> usize {
        self.order + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    #[inline(always)]
    pub fn d(&self, i: usize, j: usize) -> T {
        self.diff[i * self.len() + j]
    }

    pub fn diff_matrix(&self) -> DMatrix<T> {
        let n = self.len();
        DMatrix::from_row_slice(n, n, &self.diff)
    }

    /// Coefficient `j` of the orthonormal Legendre expansion is
    /// `sum_i modal(j, i) * values[i]`.
    #[inline(always)]
    pub fn modal(&self, j: usize, i: usize) -> T {
        self.modal[j * self.len() + i]
    }

    /// Lagrange basis values at a reference coordinate `xi`.
    pub fn interpolation_weights(&self, xi: f64) -> Vec<T> {
        let x = &self.nodes_f64;
        if let Some(hit) = x.iter().position(|&xj| xj == xi) {
            return (0..x.len()).map(|j| if j == hit { T::one() } else { T::zero() }).collect();
        }
        let terms: Vec<f64> = x
            .iter()
            .zip(&self.barycentric)
            .map(|(&xj, &lj)| lj / (xi - xj))
            .collect();
        let total: f64 = terms.iter().sum();
        terms.iter().map(|&t| T::lit(t / total)).collect()
    }
}
