//! One-dimensional Gauss rules by the Golub-Welsch algorithm.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{invalid, Result};
use crate::special::gamma::ln_beta;

/// Nodes and weights of a one-dimensional quadrature rule.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Gauss-Jacobi rule on `[0, 1]` for the weight `t^b (1 - t)^a`.
///
/// Exact for polynomials of degree `2n - 1` against that weight.
pub fn gauss_jacobi_unit(n: usize, a: f64, b: f64) -> Result<GaussRule> {
    if n == 0 {
        return invalid("a Gauss rule needs at least one node");
    }
    if !(a > -1.0) || !(b > -1.0) {
        return invalid(format!("Jacobi exponents must exceed -1 (a={a}, b={b})"));
    }
    // monic recurrence on [-1, 1] for (1-x)^a (1+x)^b, mapped by t = (1+x)/2
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    let ab = a + b;
    for (i, d) in diag.iter_mut().enumerate() {
        let i = i as f64;
        let alpha_x = if i == 0.0 {
            (b - a) / (ab + 2.0)
        } else {
            (b * b - a * a) / ((2.0 * i + ab) * (2.0 * i + ab + 2.0))
        };
        *d = 0.5 * (1.0 + alpha_x);
    }
    for (i, o) in off.iter_mut().enumerate() {
        let i = (i + 1) as f64;
        let s = 2.0 * i + ab;
        let beta_x = if i == 1.0 {
            4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
        } else {
            4.0 * i * (i + a) * (i + b) * (i + ab) / (s * s * (s + 1.0) * (s - 1.0))
        };
        *o = 0.5 * beta_x.sqrt();
    }
    let mu0 = ln_beta(a + 1.0, b + 1.0).exp();
    Ok(golub_welsch(&diag, &off, mu0))
}

/// Gauss-Legendre rule on `[0, 1]`.
pub fn gauss_legendre_unit(n: usize) -> Result<GaussRule> {
    gauss_jacobi_unit(n, 0.0, 0.0)
}

fn golub_welsch(diag: &[f64], off: &[f64], mu0: f64) -> GaussRule {
    let n = diag.len();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = diag[i];
    }
    for (i, &o) in off.iter().enumerate() {
        m[(i, i + 1)] = o;
        m[(i + 1, i)] = o;
    }
    let eig = SymmetricEigen::new(m);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|j| {
            let v0 = eig.eigenvectors[(0, j)];
            (eig.eigenvalues[j], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    GaussRule { nodes: pairs.iter().map(|p| p.0).collect(), weights: pairs.iter().map(|p| p.1).collect() }
}
