//! Closed-form Gamma-product evaluators.
//!
//! Every product is accumulated as a pairwise sum of log-Gamma terms and
//! returned as a [`GammaProductValue`]; callers exponentiate only when the
//! value is known to fit in an `f64`.

use std::f64::consts::{LN_2, PI};

use crate::ensemble::{Beta, EnsembleSpec};
use crate::error::{invalid, Error, Result};
use crate::special::gamma::ln_gamma_checked;
use crate::special::sum::pairwise_sum;

/// A positive Gamma product carried on the log scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaProductValue {
    pub log_value: f64,
    pub sign: i8,
}

impl GammaProductValue {
    pub const ONE: GammaProductValue = GammaProductValue { log_value: 0.0, sign: 1 };

    pub fn from_log(log_value: f64) -> Self {
        Self { log_value, sign: 1 }
    }

    pub fn value(&self) -> f64 {
        f64::from(self.sign) * self.log_value.exp()
    }

    pub fn ln(&self) -> f64 {
        self.log_value
    }
}

/// One factor of a Gamma product: `sum(ln Gamma(num)) - sum(ln Gamma(den))`.
fn ratio_term(num: &[f64], den: &[f64]) -> Result<f64> {
    let mut t = 0.0;
    for &a in num {
        t += ln_gamma_checked(a)?;
    }
    for &b in den {
        t -= ln_gamma_checked(b)?;
    }
    Ok(t)
}

fn product<F>(range: impl Iterator<Item = usize>, mut term: F) -> Result<GammaProductValue>
where
    F: FnMut(f64) -> Result<f64>,
{
    let terms = range.map(|j| term(j as f64)).collect::<Result<Vec<_>>>()?;
    Ok(GammaProductValue::from_log(pairwise_sum(&terms)))
}

/// Selberg's integral
/// `S_m(a, b, lambda) = int_{[0,1]^m} prod y^a (1-y)^b |Delta(y)|^lambda dy`.
pub fn selberg_const(m: usize, a: f64, b: f64, lambda: f64) -> Result<GammaProductValue> {
    if m == 0 {
        return invalid("Selberg dimension m must be positive");
    }
    if !(a > -1.0) || !(b > -1.0) || !(lambda >= 0.0) {
        return invalid(format!(
            "Selberg parameters need a > -1, b > -1, lambda >= 0 (got a={a}, b={b}, lambda={lambda})"
        ));
    }
    let h = lambda / 2.0;
    let mf = m as f64;
    product(0..m, |j| {
        ratio_term(
            &[a + 1.0 + j * h, b + 1.0 + j * h, 1.0 + (j + 1.0) * h],
            &[a + b + 2.0 + (mf + j - 1.0) * h, 1.0 + h],
        )
    })
}

/// Normalisation `S_{k,N}(beta)` of the k-fold duality integral.
pub fn skn_const(k: usize, n_total: usize, beta: Beta) -> Result<GammaProductValue> {
    if k == 0 || n_total == 0 {
        return invalid("skn_const needs k >= 1 and N >= 1");
    }
    let c = beta.alpha();
    let n = n_total as f64;
    let kf = k as f64;
    product(0..k, |j| {
        ratio_term(
            &[n + 1.0 + j * c, 1.0 + j * c, 1.0 + (j + 1.0) * c],
            &[n + 2.0 + (kf + j - 1.0) * c, 1.0 + c],
        )
    })
}

fn is_zero_or_pi(theta: f64) -> bool {
    let t = theta.rem_euclid(2.0 * PI);
    t.abs() < 1e-12 || (t - PI).abs() < 1e-12 || (t - 2.0 * PI).abs() < 1e-12
}

/// Moments of the characteristic polynomial on the unit circle.
///
/// For beta 1 this is `E det(I - A)^gamma` (theta must be 0 or pi), for
/// beta 2 `E |det(e^{i theta} - A)|^gamma`, and for beta 4
/// `E det(e^{i theta} - A)^gamma` with the determinant of the `2M x 2M`
/// complex representation. The value does not depend on theta.
pub fn boundary_moment(spec: &EnsembleSpec, gamma: f64, theta: f64) -> Result<GammaProductValue> {
    if !gamma.is_finite() || !theta.is_finite() {
        return invalid("gamma and theta must be finite");
    }
    let beta = spec.beta();
    if beta == Beta::Orthogonal && !is_zero_or_pi(theta) {
        return Err(Error::Domain(format!("beta = 1 boundary moments need theta in {{0, pi}}, got {theta}")));
    }
    if gamma == 0.0 {
        return Ok(GammaProductValue::ONE);
    }
    match beta {
        Beta::Unitary if gamma <= -1.0 => {
            return Err(Error::Domain(format!("beta = 2 boundary moments need gamma > -1, got {gamma}")))
        }
        Beta::Orthogonal | Beta::Symplectic if gamma < 0.0 => {
            return Err(Error::Domain(format!("beta = {beta} boundary moments need gamma > 0, got {gamma}")))
        }
        _ => {}
    }
    let lo = spec.kappa() + 1;
    let hi = spec.n_total();
    let g = gamma;
    match beta {
        Beta::Orthogonal => product(lo..=hi, |j| {
            ratio_term(&[j / 2.0, (j - 1.0) / 2.0 + g], &[j / 2.0 + g / 2.0, (j - 1.0) / 2.0 + g / 2.0])
        }),
        Beta::Unitary => product(lo..=hi, |j| ratio_term(&[j, j + g], &[j + g / 2.0, j + g / 2.0])),
        Beta::Symplectic => product(lo..=hi, |j| {
            ratio_term(&[2.0 * j, 2.0 * j + 2.0 * g + 1.0], &[2.0 * j + g, 2.0 * j + g + 1.0])
        }),
    }
}

/// Compact groups with closed-form characteristic-polynomial moments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaarGroup {
    /// `U(n)`: `E |det(e^{i theta} - U)|^gamma`.
    Unitary,
    /// `SO(2n)`: `E det(I - U)^gamma`.
    SpecialOrthogonalEven,
    /// `Sp(2n)`: `E det(e^{i theta} - U)^gamma`.
    Symplectic,
    /// `O(2n)`: half the `SO(2n)` value for `gamma > 0`.
    OrthogonalEven,
}

impl HaarGroup {
    pub fn parse(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "u" | "unitary" => Ok(HaarGroup::Unitary),
            "so" | "so_even" | "so-even" => Ok(HaarGroup::SpecialOrthogonalEven),
            "sp" | "symplectic" => Ok(HaarGroup::Symplectic),
            "o" | "o_even" | "o-even" => Ok(HaarGroup::OrthogonalEven),
            other => invalid(format!("unknown group '{other}' (expected U, SO, Sp or O)")),
        }
    }
}

/// Characteristic-polynomial moments of the full compact groups.
pub fn haar_group_moment(group: HaarGroup, n: usize, gamma: f64) -> Result<GammaProductValue> {
    if n == 0 {
        return invalid("group size n must be positive");
    }
    if !gamma.is_finite() {
        return invalid("gamma must be finite");
    }
    let nf = n as f64;
    let g = gamma;
    match group {
        HaarGroup::Unitary => {
            if g <= -1.0 {
                return Err(Error::Domain(format!("U(n) moments need gamma > -1, got {g}")));
            }
            product(1..=n, |j| ratio_term(&[j, j + g], &[j + g / 2.0, j + g / 2.0]))
        }
        HaarGroup::Symplectic => {
            if g < 0.0 {
                return Err(Error::Domain(format!("Sp(2n) moments need gamma > 0, got {g}")));
            }
            let p = product(1..=n, |j| {
                ratio_term(&[1.0 + nf + j, 0.5 + g + j], &[0.5 + j, 1.0 + g + nf + j])
            })?;
            Ok(GammaProductValue::from_log(p.log_value + 2.0 * nf * g * LN_2))
        }
        HaarGroup::SpecialOrthogonalEven => {
            if g < 0.0 {
                return Err(Error::Domain(format!("SO(2n) moments need gamma > 0, got {g}")));
            }
            so_even(nf, n, g)
        }
        HaarGroup::OrthogonalEven => {
            if g <= 0.0 {
                return Err(Error::Domain(format!(
                    "O(2n) moments are half the SO(2n) value only for gamma > 0, got {g}"
                )));
            }
            let so = so_even(nf, n, g)?;
            Ok(GammaProductValue::from_log(so.log_value - LN_2))
        }
    }
}

fn so_even(nf: f64, n: usize, g: f64) -> Result<GammaProductValue> {
    let p = product(1..=n, |j| {
        ratio_term(&[nf - 1.0 + j, g - 0.5 + j], &[j - 0.5, nf - 1.0 + g + j])
    })?;
    Ok(GammaProductValue::from_log(p.log_value + 2.0 * nf * g * LN_2))
}

/// `E |det A|^gamma` as an `M`-fold Gamma product.
///
/// For beta 4, `|det A|` is the quaternion modulus, i.e. the square root of
/// the complex-representation determinant.
pub fn logdet_mgf(spec: &EnsembleSpec, gamma: f64) -> Result<GammaProductValue> {
    if !gamma.is_finite() {
        return invalid("gamma must be finite");
    }
    if gamma == 0.0 {
        return Ok(GammaProductValue::ONE);
    }
    let h = spec.beta().value() / 2.0;
    let kap = spec.kappa() as f64;
    let g = gamma / 2.0;
    product(0..spec.m_trunc(), |j| {
        ratio_term(
            &[g + h + h * j, h * kap + h + h * j],
            &[h + h * j, h * kap + h + g + h * j],
        )
    })
}

/// The same moment rearranged as a `kappa`-fold product.
pub fn logdet_mgf_rearranged(spec: &EnsembleSpec, gamma: f64) -> Result<GammaProductValue> {
    if !gamma.is_finite() {
        return invalid("gamma must be finite");
    }
    if gamma == 0.0 {
        return Ok(GammaProductValue::ONE);
    }
    let h = spec.beta().value() / 2.0;
    let m = spec.m_trunc() as f64;
    let g = gamma / 2.0;
    product(0..spec.kappa(), |j| {
        ratio_term(
            &[h * (m + 1.0 + j), g + h * (1.0 + j)],
            &[h * (1.0 + j), g + h * (m + 1.0 + j)],
        )
    })
}

/// MGF of `(1/2) sum_{j<kappa} log G_j` with independent
/// `G_j ~ Gamma(beta/2 + beta j / 2)`.
pub fn gamma_limit_mgf(kappa: usize, beta: Beta, gamma: f64) -> Result<GammaProductValue> {
    if !gamma.is_finite() {
        return invalid("gamma must be finite");
    }
    let h = beta.value() / 2.0;
    let g = gamma / 2.0;
    product(0..kappa, |j| ratio_term(&[h + h * j + g], &[h + h * j]))
}

/// Normalisation of the Gaussian beta-ensemble largest-eigenvalue integral,
/// `int_{R^k} prod e^{-t^2/2} |Delta|^{4/beta}`.
pub fn gaussian_norm(k: usize, beta: Beta) -> Result<GammaProductValue> {
    let c = beta.alpha();
    let p = product(0..k, |j| ratio_term(&[1.0 + (1.0 + j) * c], &[1.0 + c]))?;
    Ok(GammaProductValue::from_log(p.log_value + 0.5 * k as f64 * (2.0 * PI).ln()))
}

/// Normalisation of the Laguerre beta-ensemble integral,
/// `int_{(0,inf)^k} prod e^{-t} t^kappa |Delta|^{4/beta}`.
pub fn laguerre_norm(k: usize, kappa: usize, beta: Beta) -> Result<GammaProductValue> {
    let c = beta.alpha();
    let kap = kappa as f64;
    product(0..k, |j| ratio_term(&[1.0 + (j + 1.0) * c, kap + 1.0 + j * c], &[1.0 + c]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(beta: u32, n: usize, m: usize) -> EnsembleSpec {
        EnsembleSpec::new(Beta::from_index(beta).unwrap(), n, m).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn selberg_examples() {
        assert!(selberg_const(1, 0.0, 0.0, 2.0).unwrap().ln().abs() < 1e-13);
        // int (y1 - y2)^2 over the unit square
        assert!(close(selberg_const(2, 0.0, 0.0, 2.0).unwrap().value(), 1.0 / 6.0, 1e-14));
        // one-dimensional Beta integral
        let (a, b) = (1.5, 2.25);
        let beta_fn = (crate::special::gamma::ln_beta(a + 1.0, b + 1.0)).exp();
        assert!(close(selberg_const(1, a, b, 3.0).unwrap().value(), beta_fn, 1e-14));
        assert!(selberg_const(2, -1.0, 0.0, 2.0).is_err());
        assert!(selberg_const(0, 0.0, 0.0, 2.0).is_err());
    }

    #[test]
    fn selberg_matches_direct_double_integral() {
        // midpoint rule on a fine grid, lambda = 1 so |Delta| is non-smooth
        let n = 800;
        let h = 1.0 / n as f64;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                let y1 = (i as f64 + 0.5) * h;
                let y2 = (j as f64 + 0.5) * h;
                s += y1 * (1.0 - y2) * (1.0 - y1) * y2 * (y1 - y2).abs();
            }
        }
        s *= h * h;
        assert!(close(selberg_const(2, 1.0, 1.0, 1.0).unwrap().value(), s, 1e-4));
    }

    #[test]
    fn skn_examples() {
        for beta in Beta::ALL {
            for n in 1..8 {
                let v = skn_const(1, n, beta).unwrap().value();
                assert!(close(v, 1.0 / (n as f64 + 1.0), 1e-14));
            }
        }
        assert!(close(skn_const(1, 1, Beta::Symplectic).unwrap().value(), 0.5, 1e-13));
    }

    #[test]
    fn skn_is_selberg_with_top_power_n() {
        for beta in Beta::ALL {
            for k in 1..5 {
                for n in 1..9 {
                    let a = skn_const(k, n, beta).unwrap().ln();
                    let b = selberg_const(k, n as f64, 0.0, 4.0 / beta.value()).unwrap().ln();
                    assert!((a - b).abs() < 1e-12, "beta={beta} k={k} n={n}");
                }
            }
        }
    }

    #[test]
    fn boundary_examples() {
        assert!(close(boundary_moment(&spec(2, 1, 1), 2.0, 0.7).unwrap().value(), 2.0, 1e-14));
        assert!(close(boundary_moment(&spec(2, 2, 1), 2.0, 0.0).unwrap().value(), 1.5, 1e-14));
        assert!(close(boundary_moment(&spec(1, 1, 1), 2.0, 0.0).unwrap().value(), 2.0, 1e-14));
        assert!(close(boundary_moment(&spec(4, 1, 1), 1.0, 0.0).unwrap().value(), 2.0, 1e-14));
        for b in [1, 2, 4] {
            assert_eq!(boundary_moment(&spec(b, 5, 3), 0.0, 0.0).unwrap().value(), 1.0);
        }
    }

    #[test]
    fn boundary_domain_checks() {
        assert!(matches!(boundary_moment(&spec(1, 3, 2), 2.0, 0.5), Err(Error::Domain(_))));
        assert!(boundary_moment(&spec(1, 3, 2), 2.0, PI).is_ok());
        assert!(matches!(boundary_moment(&spec(2, 3, 2), -1.0, 0.0), Err(Error::Domain(_))));
        assert!(boundary_moment(&spec(2, 3, 2), -0.5, 0.0).is_ok());
        assert!(matches!(boundary_moment(&spec(4, 3, 2), -0.5, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn group_examples() {
        assert!(close(haar_group_moment(HaarGroup::Unitary, 1, 2.0).unwrap().value(), 2.0, 1e-14));
        assert!(close(haar_group_moment(HaarGroup::Symplectic, 1, 1.0).unwrap().value(), 2.0, 1e-14));
        // SO(2): E (2 - 2 cos phi)^2 = 6
        assert!(close(haar_group_moment(HaarGroup::SpecialOrthogonalEven, 1, 2.0).unwrap().value(), 6.0, 1e-14));
        for n in 1..6 {
            let so = haar_group_moment(HaarGroup::SpecialOrthogonalEven, n, 1.3).unwrap().value();
            let o = haar_group_moment(HaarGroup::OrthogonalEven, n, 1.3).unwrap().value();
            assert!(close(o, so / 2.0, 1e-14));
        }
        assert!(haar_group_moment(HaarGroup::OrthogonalEven, 2, 0.0).is_err());
        assert!(haar_group_moment(HaarGroup::OrthogonalEven, 2, -0.5).is_err());
    }

    #[test]
    fn truncation_reduces_to_group_moments() {
        for n in 1..8 {
            for &g in &[0.5, 1.0, 2.0, 3.7] {
                let u = boundary_moment(&spec(2, n, n), g, 0.0).unwrap().ln();
                assert!((u - haar_group_moment(HaarGroup::Unitary, n, g).unwrap().ln()).abs() < 1e-12);
                let sp = boundary_moment(&spec(4, n, n), g, 0.0).unwrap().ln();
                assert!((sp - haar_group_moment(HaarGroup::Symplectic, n, g).unwrap().ln()).abs() < 1e-11);
                let o = boundary_moment(&spec(1, 2 * n, 2 * n), g, 0.0).unwrap().ln();
                let o_group = haar_group_moment(HaarGroup::OrthogonalEven, n, g).unwrap().ln();
                assert!((o - o_group).abs() < 1e-11, "n={n} g={g}: {o} vs {o_group}");
            }
        }
    }

    #[test]
    fn haar_decomposition_identity() {
        for b in [1, 2, 4] {
            for n in 2..9 {
                for m in 1..n {
                    for &g in &[0.4, 1.0, 2.5] {
                        let lhs = boundary_moment(&spec(b, n, m), g, 0.0).unwrap().ln()
                            + boundary_moment(&spec(b, n - m, n - m), g, 0.0).unwrap().ln();
                        let rhs = boundary_moment(&spec(b, n, n), g, 0.0).unwrap().ln();
                        assert!((lhs - rhs).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn logdet_examples() {
        for n in 1..10 {
            let v = logdet_mgf(&spec(2, n, 1), 2.0).unwrap().value();
            assert!(close(v, 1.0 / n as f64, 1e-14));
        }
        assert!(close(logdet_mgf(&spec(2, 4, 2), 2.0).unwrap().value(), 1.0 / 6.0, 1e-14));
        assert_eq!(logdet_mgf(&spec(4, 7, 3), 0.0).unwrap().value(), 1.0);
        assert!(matches!(logdet_mgf(&spec(2, 4, 2), -2.0), Err(Error::Pole(_))));
        // unitary determinant has modulus one
        assert!(logdet_mgf(&spec(1, 5, 5), 1.7).unwrap().ln().abs() < 1e-13);
    }

    #[test]
    fn gamma_limit_examples() {
        assert_eq!(gamma_limit_mgf(0, Beta::Unitary, 3.0).unwrap().value(), 1.0);
        assert!(close(gamma_limit_mgf(1, Beta::Unitary, 2.0).unwrap().value(), 1.0, 1e-14));
        assert!(close(gamma_limit_mgf(2, Beta::Orthogonal, 2.0).unwrap().value(), 0.5, 1e-14));
    }

    #[test]
    fn normalisations_at_k1() {
        for beta in Beta::ALL {
            assert!(close(gaussian_norm(1, beta).unwrap().value(), (2.0 * PI).sqrt(), 1e-14));
            assert!(close(laguerre_norm(1, 3, beta).unwrap().value(), 6.0, 1e-14));
        }
    }

    #[test]
    fn large_products_stay_finite() {
        let s = spec(4, 1_000_000, 500_000);
        assert!(logdet_mgf(&s, 100.0).unwrap().ln().is_finite());
        assert!(boundary_moment(&s, 100.0, 0.0).unwrap().ln().is_finite());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn rearrangement_identity(b in prop::sample::select(vec![1u32, 2, 4]), n in 1usize..40, m_frac in 0.0f64..1.0, g in -0.9f64..12.0) {
                let m = 1 + ((n - 1) as f64 * m_frac) as usize;
                let s = spec(b, n, m);
                let a = logdet_mgf(&s, g).unwrap().ln();
                let r = logdet_mgf_rearranged(&s, g).unwrap().ln();
                prop_assert!((a - r).abs() <= 1e-12 * a.abs().max(1.0), "{} vs {}", a, r);
            }
        }
    }
}
