//! Leading-order asymptotics of the moments and the limit-theorem
//! parameters of `log|det|`.
//!
//! Only leading terms are returned; the `o(1)` corrections are not
//! modelled. Finite-`M` evaluations use `mu = M/N` throughout.

use std::fmt;

use num_complex::Complex64;

use crate::ensemble::{Beta, EnsembleSpec};
use crate::error::{invalid, Error, Result};
use crate::quadrature::{gbe_max_cdf, lbe_max_cdf, QuadratureSpec};
use crate::special::ln_gamma;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Weak,
    Strong,
    OriginStrong,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Weak => "weak",
            Regime::Strong => "strong",
            Regime::OriginStrong => "origin_strong",
        })
    }
}

/// Centering and scale of a Gaussian limit for `log|det|`.
///
/// For the boundary regimes `e_beta`, `v_beta` are the coefficients of
/// `log M`; in the weak regime `mean` and `variance` hold those same
/// coefficients (multiply by `log M`). For the origin regime `e_beta` is the
/// `log M` coefficient of the centering and `v_beta = 1/(2 beta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CLTParams {
    pub e_beta: f64,
    pub v_beta: f64,
    pub mean: f64,
    pub variance: f64,
    pub regime: Regime,
}

/// `(e_beta, v_beta)`.
pub fn clt_coefficients(beta: Beta) -> (f64, f64) {
    match beta {
        Beta::Orthogonal => (-0.5, 1.0),
        Beta::Unitary => (0.0, 0.5),
        Beta::Symplectic => (0.5, 1.0),
    }
}

fn check_mu(mu: f64) -> Result<()> {
    if mu > 0.0 && mu < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("mu must lie in (0, 1), got {mu}")))
    }
}

pub fn clt_params_boundary(beta: Beta, regime: Regime, mu_tilde: Option<f64>) -> Result<CLTParams> {
    let (e, v) = clt_coefficients(beta);
    match regime {
        Regime::Weak => Ok(CLTParams { e_beta: e, v_beta: v, mean: e, variance: v, regime }),
        Regime::Strong => {
            let mu = mu_tilde.ok_or_else(|| Error::InvalidParameter("strong regime needs mu_tilde".into()))?;
            check_mu(mu)?;
            let l = (1.0 - mu).ln();
            Ok(CLTParams { e_beta: e, v_beta: v, mean: -e * l, variance: -v * l, regime })
        }
        Regime::OriginStrong => invalid("use clt_params_origin for the origin"),
    }
}

/// Centering and variance of `log|det A|` at finite `M`; the `O(1)` part
/// of the centering is dropped.
pub fn clt_params_origin(spec: &EnsembleSpec) -> Result<CLTParams> {
    let mu = spec.mu();
    check_mu(mu)?;
    let m = spec.m_trunc() as f64;
    let b = spec.beta().value();
    let e = 0.25 * (2.0 / b - 1.0);
    let v = 1.0 / (2.0 * b);
    let mean = 0.5 * m * (mu.ln() + (1.0 / mu - 1.0) * (1.0 - mu).ln()) + e * m.ln();
    Ok(CLTParams { e_beta: e, v_beta: v, mean, variance: v * m.ln(), regime: Regime::OriginStrong })
}

/// The pieces of the strong-regime approximation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrongApprox {
    pub value: f64,
    pub ln_prefactor: f64,
    /// Largest-eigenvalue CDF factor of the `k x k` Gaussian ensemble.
    pub cdf_factor: f64,
    pub cdf_argument: f64,
    pub mu: f64,
}

pub fn strong_approx_detail(spec: &EnsembleSpec, k: u32, x: Complex64, q: &QuadratureSpec) -> Result<StrongApprox> {
    let mu = spec.mu();
    check_mu(mu)?;
    if k == 0 {
        return invalid("strong_approx needs k >= 1");
    }
    if spec.beta() == Beta::Orthogonal && x.im != 0.0 {
        return Err(Error::WrongBeta("beta = 1 requires real x".into()));
    }
    let r2 = x.norm_sqr();
    if !(r2 < 1.0) {
        return Err(Error::Domain(format!("|x|^2 must be below 1, got {r2}")));
    }
    let kf = f64::from(k);
    let m = spec.m_trunc() as f64;
    let tb = 2.0 / spec.beta().value();
    let lm = (1.0 - mu).ln();
    let lx = (1.0 - r2).ln();
    let mut ln = (kf * kf / spec.beta().value() + 0.5 * kf * (1.0 - tb)) * m.ln()
        + m * kf * mu.ln()
        + m * kf * (1.0 / mu - 1.0) * (lm - lx)
        + (kf + tb * kf * (kf - 1.0)) * (0.5 * lm - lx)
        + 0.5 * kf * std::f64::consts::TAU.ln();
    for j in 0..k {
        ln -= ln_gamma(1.0 + tb * f64::from(j));
    }
    let s = m.sqrt() * (mu - r2) / (mu * (1.0 - mu).sqrt());
    let cdf = gbe_max_cdf(k as usize, spec.beta_prime() as u32, s, q)?;
    Ok(StrongApprox { value: (ln + cdf.ln()).exp(), ln_prefactor: ln, cdf_factor: cdf, cdf_argument: s, mu })
}

/// Leading-order `R_{2k}(x)` for `M/N` fixed in `(0, 1)`.
pub fn strong_approx(spec: &EnsembleSpec, k: u32, x: Complex64, q: &QuadratureSpec) -> Result<f64> {
    Ok(strong_approx_detail(spec, k, x, q)?.value)
}

/// Leading-order `R_{2k}(x)` at `|x|^2 = 1 - 2u/M` for `N - M = kappa` fixed.
pub fn weak_approx(beta: Beta, kappa: usize, k: u32, u: f64, m_trunc: usize, q: &QuadratureSpec) -> Result<f64> {
    if k == 0 || m_trunc == 0 {
        return invalid("weak_approx needs k >= 1 and M >= 1");
    }
    if !(u > 0.0) || !u.is_finite() {
        return invalid(format!("u must be positive, got {u}"));
    }
    let kf = f64::from(k);
    let tb = 2.0 / beta.value();
    let l2u = (2.0 * u).ln();
    let mut ln = (tb * kf * kf + kf * (1.0 - tb)) * ((m_trunc as f64).ln() - l2u) - kf * kappa as f64 * l2u;
    for j in 0..k {
        let a = tb * f64::from(j);
        ln += ln_gamma(kappa as f64 + 1.0 + a) - ln_gamma(1.0 + a);
    }
    let cdf = lbe_max_cdf(k as usize, beta.dual().index(), kappa, u, q)?;
    Ok((ln + cdf.ln()).exp())
}

/// The evaluation point `|x| = sqrt(1 - 2u/M)` on the positive axis.
pub fn weak_point(u: f64, m_trunc: usize) -> Result<f64> {
    let r2 = 1.0 - 2.0 * u / m_trunc as f64;
    if !(r2 >= 0.0) {
        return Err(Error::Domain(format!("1 - 2u/M = {r2} is negative")));
    }
    Ok(r2.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::exact_moment;
    use crate::quadrature::duality_moment;
    use crate::special::{gamma_limit_mgf, logdet_cumulants, logdet_mgf};

    fn spec(b: Beta, n: usize, m: usize) -> EnsembleSpec {
        EnsembleSpec::new(b, n, m).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a / b - 1.0).abs()
    }

    #[test]
    fn boundary_tables() {
        let p = clt_params_boundary(Beta::Orthogonal, Regime::Weak, None).unwrap();
        assert_eq!((p.e_beta, p.v_beta), (-0.5, 1.0));
        let p = clt_params_boundary(Beta::Symplectic, Regime::Weak, None).unwrap();
        assert_eq!((p.e_beta, p.v_beta), (0.5, 1.0));
        let p = clt_params_boundary(Beta::Unitary, Regime::Strong, Some(1.0 - (-1.0f64).exp())).unwrap();
        assert_eq!(p.mean, 0.0);
        assert!((p.variance - 0.5).abs() < 1e-15);
        assert!(clt_params_boundary(Beta::Unitary, Regime::Strong, Some(1.0)).is_err());
        assert!(clt_params_boundary(Beta::Unitary, Regime::Strong, None).is_err());
    }

    #[test]
    fn origin_centering() {
        let p = clt_params_origin(&spec(Beta::Unitary, 200, 100)).unwrap();
        assert_eq!(p.e_beta, 0.0);
        assert!(p.variance > 0.0);
        assert!(clt_params_origin(&spec(Beta::Unitary, 4, 4)).is_err());
        // leading term tracks the exact mean
        let mut last = f64::INFINITY;
        for m in [50, 200, 800] {
            let s = spec(Beta::Unitary, 2 * m, m);
            let exact = logdet_cumulants(&s, 1, false).unwrap();
            let r = rel(clt_params_origin(&s).unwrap().mean, exact);
            assert!(r < last);
            last = r;
        }
        assert!(last < 1e-2);
    }

    #[test]
    fn weak_unitary_kappa_zero() {
        let q = QuadratureSpec::default();
        for u in [0.5, 1.0, 3.0] {
            let got = weak_approx(Beta::Unitary, 0, 1, u, 100, &q).unwrap();
            let want = 100.0 * (1.0 - (-2.0 * u).exp()) / (2.0 * u);
            assert!(rel(got, want) < 1e-10, "u={u}");
        }
    }

    #[test]
    fn weak_converges() {
        let q = QuadratureSpec::default();
        for beta in Beta::ALL {
            for kappa in [0usize, 1] {
                let err = |m: usize| {
                    let x = weak_point(1.0, m).unwrap();
                    let s = spec(beta, m + kappa, m);
                    let d = duality_moment(&s, 1, Complex64::new(x, 0.0), &q).unwrap().value;
                    rel(weak_approx(beta, kappa, 1, 1.0, m, &q).unwrap(), d)
                };
                let (a, b) = (err(100), err(400));
                assert!(b < a, "{beta} kappa={kappa}: {a} -> {b}");
                assert!(a < 0.1, "{beta} kappa={kappa}: {a}");
            }
        }
    }

    #[test]
    fn strong_converges() {
        let q = QuadratureSpec::default();
        for k in [1u32, 2] {
            for x in [0.0, 0.4] {
                let err = |m: usize| {
                    let s = spec(Beta::Unitary, 2 * m, m);
                    let e = exact_moment(&s, k).eval_at(Complex64::new(x, 0.0));
                    rel(strong_approx(&s, k, Complex64::new(x, 0.0), &q).unwrap(), e)
                };
                let (a, b) = (err(30), err(60));
                assert!(b < a && b < 0.1, "k={k} x={x}: {a} -> {b}");
            }
        }
    }

    #[test]
    fn strong_cdf_factor() {
        let q = QuadratureSpec::default();
        let s = spec(Beta::Unitary, 120, 60);
        let d = strong_approx_detail(&s, 2, Complex64::new(0.0, 0.0), &q).unwrap();
        assert!((d.cdf_factor - 1.0).abs() < 1e-6);
        let edge = Complex64::new(0.5f64.sqrt(), 0.0);
        let d = strong_approx_detail(&s, 1, edge, &q).unwrap();
        assert!(d.cdf_argument.abs() < 1e-12);
        assert!((d.cdf_factor - 0.5).abs() < 1e-8);
        assert!(strong_approx(&spec(Beta::Unitary, 4, 4), 1, edge, &q).is_err());
    }

    #[test]
    fn gamma_limit() {
        let b = Beta::Orthogonal;
        let err = |m: usize| {
            let s = spec(b, m + 2, m);
            let shifted = logdet_mgf(&s, 1.0).unwrap().ln() + 1.0 * 0.5 * 2.0 * (b.value() * m as f64 / 2.0).ln();
            (shifted - gamma_limit_mgf(2, b, 1.0).unwrap().ln()).exp_m1().abs()
        };
        assert!(err(1000) < 0.02);
        assert!(err(1000) < err(100));
    }
}
