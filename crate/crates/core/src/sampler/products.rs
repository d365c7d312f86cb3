//! Samplers built from products of independent Beta variables: the
//! boundary characteristic polynomial and the log-determinant.

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::ensemble::{Beta, EnsembleSpec};
use crate::error::{invalid, Error, Result};

fn gamma_draw(shape: f64, rng: &mut impl Rng) -> f64 {
    if shape == 0.0 {
        return 0.0;
    }
    Gamma::new(shape, 1.0).expect("positive shape").sample(rng)
}

/// `Beta(a, b)` as a ratio of Gamma variables; `Beta(a, 0) = 1`.
pub fn beta_draw(a: f64, b: f64, rng: &mut impl Rng) -> f64 {
    let x = gamma_draw(a, rng);
    let y = gamma_draw(b, rng);
    if y == 0.0 {
        1.0
    } else {
        x / (x + y)
    }
}

/// One draw of the boundary statistic at `|x| = 1`: `det(I - A)` for
/// beta 1, `|det(I - A)|` for beta 2 and the complex `2M x 2M`
/// determinant for beta 4.
pub fn bhny_boundary_sample(spec: &EnsembleSpec, rng: &mut impl Rng) -> f64 {
    let n = spec.n_total();
    let mut prod = 1.0;
    for k in 1..=spec.m_trunc() {
        let rest = (n - k) as f64;
        prod *= match spec.beta() {
            Beta::Orthogonal => {
                let eps = if rng.random::<bool>() { 1.0 } else { -1.0 };
                1.0 - eps * beta_draw(0.5, rest / 2.0, rng).sqrt()
            }
            Beta::Unitary => {
                let r = beta_draw(1.0, rest, rng).sqrt();
                let w = rng.random::<f64>() * std::f64::consts::TAU;
                (1.0 - r * w.cos()).hypot(r * w.sin())
            }
            Beta::Symplectic => {
                // first two coordinates of a uniform unit vector in C^{2(rest+1)}
                let g: [f64; 4] = std::array::from_fn(|_| rng.sample::<f64, _>(StandardNormal));
                let head = g.iter().map(|v| v * v).sum::<f64>() / 2.0;
                let tail = gamma_draw(2.0 * rest, rng);
                let s = (head + tail).sqrt() * std::f64::consts::SQRT_2;
                let (a, b, c, d) = (g[0] / s, g[1] / s, g[2] / s, g[3] / s);
                (1.0 - a).powi(2) + b * b + c * c + d * d
            }
        };
    }
    prod
}

/// How `log|det A|` is written as a sum of log-Beta variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogdetFold {
    /// `M` factors `B(beta(1+j)/2, beta kappa/2)`.
    MFold,
    /// `kappa` factors `B(beta(1+j)/2, beta M/2)`.
    KappaFold,
}

/// One draw of `log|det A|` (quaternion modulus for beta 4).
pub fn beta_product_logdet_sample(spec: &EnsembleSpec, fold: LogdetFold, rng: &mut impl Rng) -> Result<f64> {
    let h = spec.beta().value() / 2.0;
    let (count, b) = match fold {
        LogdetFold::MFold => (spec.m_trunc(), h * spec.kappa() as f64),
        LogdetFold::KappaFold => {
            if spec.kappa() == 0 {
                return invalid("the kappa-fold product needs N > M");
            }
            (spec.kappa(), h * spec.m_trunc() as f64)
        }
    };
    if b == 0.0 {
        // N = M: A is unitary and log|det A| = 0
        return Ok(0.0);
    }
    let mut s = 0.0;
    for j in 0..count {
        let v = beta_draw(h * (1.0 + j as f64), b, rng);
        if v <= 0.0 {
            return Err(Error::Degenerate("Beta variate underflowed to zero".into()));
        }
        s += v.ln();
    }
    Ok(0.5 * s)
}
