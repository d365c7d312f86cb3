//! Haar-distributed matrices from the classical groups and their truncations.
//!
//! Every class is stored as a complex matrix. Symplectic matrices use the
//! `2N x 2N` representation whose `2 x 2` blocks have the form
//! `[[a, -conj(b)], [b, conj(a)]]`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::ensemble::{Beta, MomentOrder};
use crate::error::{invalid, Error, Result};

const RETRIES: usize = 3;

/// A Haar sample together with its symmetry class.
#[derive(Debug, Clone, PartialEq)]
pub struct HaarMatrix {
    pub beta: Beta,
    pub n: usize,
    pub entries: DMatrix<Complex64>,
}

impl HaarMatrix {
    /// Largest entry of `U^* U - I`.
    pub fn unitarity_residual(&self) -> f64 {
        let p = self.entries.adjoint() * &self.entries;
        max_dev(&p, &DMatrix::identity(p.nrows(), p.ncols()))
    }

    /// Largest entry of `U J U^T - J` (symplectic class only).
    pub fn symplectic_residual(&self) -> Option<f64> {
        if self.beta != Beta::Symplectic {
            return None;
        }
        let j = j_matrix(self.n);
        let p = &self.entries * &j * self.entries.transpose();
        Some(max_dev(&p, &j))
    }

    /// Largest imaginary part (real class only).
    pub fn imaginary_residual(&self) -> Option<f64> {
        (self.beta == Beta::Orthogonal).then(|| self.entries.iter().map(|z| z.im.abs()).fold(0.0, f64::max))
    }
}

fn max_dev(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Block-diagonal `J` with blocks `[[0, 1], [-1, 0]]`.
pub fn j_matrix(n: usize) -> DMatrix<Complex64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for b in 0..n {
        j[(2 * b, 2 * b + 1)] = Complex64::new(1.0, 0.0);
        j[(2 * b + 1, 2 * b)] = Complex64::new(-1.0, 0.0);
    }
    j
}

fn gaussian(beta: Beta, len: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    (0..len)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = if beta == Beta::Orthogonal { 0.0 } else { rng.sample(StandardNormal) };
            Complex64::new(re, im)
        })
        .collect()
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `-J conj(u)`, the partner column of `u` in the symplectic representation.
fn partner(u: &[Complex64]) -> Vec<Complex64> {
    let mut v = vec![Complex64::default(); u.len()];
    for b in 0..u.len() / 2 {
        v[2 * b] = -u[2 * b + 1].conj();
        v[2 * b + 1] = u[2 * b].conj();
    }
    v
}

fn try_columns(beta: Beta, n: usize, m: usize, rng: &mut impl Rng) -> Option<Vec<Vec<Complex64>>> {
    let dim = beta.block() * n;
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(beta.block() * m);
    for _ in 0..m {
        let mut v = gaussian(beta, dim, rng);
        let start = norm(&v);
        // two passes keep the columns orthogonal to rounding level
        for _ in 0..2 {
            for q in &cols {
                let c = dot(q, &v);
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
            }
        }
        let r = norm(&v);
        if !(r > 1e-10 * start) {
            return None;
        }
        v.iter_mut().for_each(|x| *x /= r);
        if beta == Beta::Symplectic {
            let w = partner(&v);
            cols.push(v);
            cols.push(w);
        } else {
            cols.push(v);
        }
    }
    Some(cols)
}

/// The first `m` (quaternionic) columns of a Haar matrix of size `n`, as a
/// `block*n x block*m` complex matrix.
pub fn haar_columns(beta: Beta, n: usize, m: usize, rng: &mut impl Rng) -> Result<DMatrix<Complex64>> {
    if n == 0 || m > n {
        return invalid(format!("need 1 <= m <= n, got m={m}, n={n}"));
    }
    for _ in 0..RETRIES {
        if let Some(cols) = try_columns(beta, n, m, rng) {
            let rows = beta.block() * n;
            return Ok(DMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i]));
        }
    }
    Err(Error::Degenerate(format!("Gram-Schmidt failed {RETRIES} times for n={n}")))
}

/// A Haar sample of `O(n)`, `U(n)` or `Sp(2n)`.
pub fn haar_sample(beta: Beta, n: usize, rng: &mut impl Rng) -> Result<HaarMatrix> {
    Ok(HaarMatrix { beta, n, entries: haar_columns(beta, n, n, rng)? })
}

/// The leading `m x m` (quaternionic) block.
pub fn truncate(u: &HaarMatrix, m: usize) -> Result<DMatrix<Complex64>> {
    if m == 0 || m > u.n {
        return invalid(format!("truncation size {m} outside 1..={}", u.n));
    }
    let d = u.beta.block() * m;
    Ok(u.entries.view((0, 0), (d, d)).into_owned())
}

/// A truncation sampled directly from the first `m` columns.
pub fn truncation_sample(beta: Beta, n: usize, m: usize, rng: &mut impl Rng) -> Result<DMatrix<Complex64>> {
    let cols = haar_columns(beta, n, m, rng)?;
    let d = beta.block() * m;
    Ok(cols.view((0, 0), (d, d)).into_owned())
}

/// The natural determinant of `x - A`: `det(x - A)` for beta 1, 2 (its
/// modulus) and the complex determinant of `x_hat - A` with
/// `x_hat = diag(x, conj x, ...)` for beta 4, which is real and nonnegative.
pub fn natural_det(a: &DMatrix<Complex64>, x: Complex64, beta: Beta) -> Result<f64> {
    if a.nrows() != a.ncols() || !a.nrows().is_multiple_of(beta.block()) {
        return Err(Error::Dimension(format!("matrix is {}x{}", a.nrows(), a.ncols())));
    }
    let mut s = -a;
    for i in 0..s.nrows() {
        let shift = if beta == Beta::Symplectic && i % 2 == 1 { x.conj() } else { x };
        s[(i, i)] += shift;
    }
    let d = s.determinant();
    Ok(match beta {
        Beta::Symplectic => d.re.max(0.0),
        _ => d.norm(),
    })
}

/// The moment statistic of `A` at `x`: `|det(x - A)|^gamma` for beta 1, 2
/// and `det_C(x_hat - A)^{gamma/2}` for beta 4.
pub fn charpoly_value(a: &DMatrix<Complex64>, x: Complex64, beta: Beta, order: MomentOrder) -> Result<f64> {
    Ok(power(natural_det(a, x, beta)?, order, beta))
}

pub(crate) fn power(det: f64, order: MomentOrder, beta: Beta) -> f64 {
    match (order, beta) {
        (MomentOrder::Integer(0), _) => 1.0,
        (MomentOrder::Integer(k), Beta::Symplectic) => det.powi(k as i32),
        (MomentOrder::Integer(k), _) => det.powi(2 * k as i32),
        (o, b) => det.powf(o.det_exponent(b)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::stats::sample_rng;

    #[test]
    fn group_membership() {
        for beta in Beta::ALL {
            for n in [1, 2, 5, 40] {
                let u = haar_sample(beta, n, &mut sample_rng(7, n as u64)).unwrap();
                assert!(u.unitarity_residual() < 1e-12, "{beta} n={n}");
                if let Some(r) = u.symplectic_residual() {
                    assert!(r < 1e-12);
                }
                if let Some(r) = u.imaginary_residual() {
                    assert_eq!(r, 0.0);
                }
            }
        }
    }

    #[test]
    fn large_unitary() {
        let u = haar_sample(Beta::Unitary, 256, &mut sample_rng(1, 0)).unwrap();
        assert!(u.unitarity_residual() < 1e-12);
    }

    #[test]
    fn truncation_shapes() {
        let u = haar_sample(Beta::Symplectic, 4, &mut sample_rng(2, 0)).unwrap();
        assert_eq!(truncate(&u, 3).unwrap().nrows(), 6);
        assert!(truncate(&u, 5).is_err());
        assert!(truncate(&u, 0).is_err());
        let a = truncation_sample(Beta::Orthogonal, 5, 2, &mut sample_rng(2, 1)).unwrap();
        assert_eq!(a.shape(), (2, 2));
    }

    #[test]
    fn full_truncation_on_circle() {
        // A = U: |det(x - U)| at x = 0 is 1
        for beta in Beta::ALL {
            let u = haar_sample(beta, 3, &mut sample_rng(3, 0)).unwrap();
            let a = truncate(&u, 3).unwrap();
            let d = natural_det(&a, Complex64::new(0.0, 0.0), beta).unwrap();
            assert!((d - 1.0).abs() < 1e-12, "{beta}: {d}");
        }
    }

    #[test]
    fn symplectic_det_is_real() {
        let u = haar_sample(Beta::Symplectic, 5, &mut sample_rng(4, 0)).unwrap();
        let a = truncate(&u, 3).unwrap();
        let x = Complex64::new(0.3, 0.4);
        let mut s = -&a;
        for i in 0..6 {
            s[(i, i)] += if i % 2 == 0 { x } else { x.conj() };
        }
        let d = s.determinant();
        assert!(d.im.abs() < 1e-12 * d.norm());
        assert!(d.re > 0.0);
    }

    #[test]
    fn statistic_conventions() {
        let a = DMatrix::from_element(1, 1, Complex64::new(0.5, 0.0));
        let x = Complex64::new(-1.0, 0.0);
        let v = charpoly_value(&a, x, Beta::Unitary, MomentOrder::Integer(2)).unwrap();
        assert!((v - 1.5f64.powi(4)).abs() < 1e-12);
        let r = charpoly_value(&a, x, Beta::Unitary, MomentOrder::Real(4.0)).unwrap();
        assert!((v - r).abs() < 1e-12);
        assert_eq!(charpoly_value(&a, x, Beta::Orthogonal, MomentOrder::Integer(0)).unwrap(), 1.0);
    }
}
