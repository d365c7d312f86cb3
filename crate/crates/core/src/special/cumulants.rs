//! Cumulants of log-determinants by differentiating the Gamma products.

use crate::ensemble::{Beta, EnsembleSpec};
use crate::error::{invalid, Error, Result};
use crate::special::gamma::polygamma;
use crate::special::sum::CompensatedSum;

/// The `order`-th cumulant of `log|det A|` (`at_boundary = false`) or of
/// `log|det(e^{i theta} - A)|` (`at_boundary = true`).
///
/// The two cases follow the conventions of
/// [`logdet_mgf`](crate::special::products::logdet_mgf) and
/// [`boundary_moment`](crate::special::products::boundary_moment)
/// respectively: each cumulant is the derivative of the log of that
/// product at `gamma = 0`.
pub fn logdet_cumulants(spec: &EnsembleSpec, order: u32, at_boundary: bool) -> Result<f64> {
    if !(1..=3).contains(&order) {
        return invalid(format!("cumulant order must be 1, 2 or 3, got {order}"));
    }
    let n = order;
    let p = |x: f64| polygamma(n - 1, x);
    let scale = 0.5f64.powi(n as i32);
    let mut acc = CompensatedSum::new();
    if !at_boundary {
        let h = spec.beta().value() / 2.0;
        let kap = spec.kappa() as f64;
        if spec.kappa() == 0 {
            // |det A| = 1 for a full Haar matrix
            return Ok(0.0);
        }
        for j in 0..spec.m_trunc() {
            let j = j as f64;
            acc.add(scale * (p(h * (1.0 + j)) - p(h * kap + h + h * j)));
        }
        return Ok(acc.value());
    }
    let lo = spec.kappa() + 1;
    let hi = spec.n_total();
    match spec.beta() {
        Beta::Unitary => {
            let c = 1.0 - 2.0 * scale;
            for j in lo..=hi {
                acc.add(c * p(j as f64));
            }
        }
        Beta::Orthogonal => {
            if spec.kappa() == 0 {
                return Err(Error::Domain(
                    "log|det(I - A)| is not integrable for a full orthogonal matrix (kappa = 0)".into(),
                ));
            }
            for j in lo..=hi {
                let j = j as f64;
                let a = p((j - 1.0) / 2.0);
                acc.add(a - scale * (p(j / 2.0) + a));
            }
        }
        Beta::Symplectic => {
            let c = 2f64.powi(n as i32);
            for j in lo..=hi {
                let j = j as f64;
                let b = p(2.0 * j + 1.0);
                acc.add(c * b - p(2.0 * j) - b);
            }
        }
    }
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::products::logdet_mgf;

    fn spec(beta: u32, n: usize, m: usize) -> EnsembleSpec {
        EnsembleSpec::new(Beta::from_index(beta).unwrap(), n, m).unwrap()
    }

    #[test]
    fn example_mean() {
        let c = logdet_cumulants(&spec(2, 2, 1), 1, false).unwrap();
        assert!((c + 0.5).abs() < 1e-14);
    }

    // Central finite differences of the log-MGF as an independent check.
    fn fd(f: impl Fn(f64) -> f64, order: u32) -> f64 {
        let h = 1e-3;
        match order {
            1 => (f(h) - f(-h)) / (2.0 * h),
            2 => (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h),
            _ => {
                let h = 2e-3;
                (f(2.0 * h) - 2.0 * f(h) + 2.0 * f(-h) - f(-2.0 * h)) / (2.0 * h * h * h)
            }
        }
    }

    #[test]
    fn matches_finite_differences_interior() {
        for b in [1, 2, 4] {
            for (n, m) in [(5, 2), (9, 7), (12, 1)] {
                let s = spec(b, n, m);
                for order in 1..=3 {
                    let exact = logdet_cumulants(&s, order, false).unwrap();
                    let approx = fd(|g| logdet_mgf(&s, g).unwrap().ln(), order);
                    assert!((exact - approx).abs() < 1e-4, "b={b} n={n} m={m} order={order}: {exact} vs {approx}");
                }
            }
        }
    }

    #[test]
    fn matches_finite_differences_boundary() {
        let reference = crate::special::boundary_moment(&spec(4, 5, 2), 1.5, 0.0).unwrap().ln();
        assert!((boundary_moment_any_sign(&spec(4, 5, 2), 1.5) - reference).abs() < 1e-12);
        for b in [2, 4] {
            for (n, m) in [(5, 2), (9, 7), (6, 6)] {
                let s = spec(b, n, m);
                for order in 1..=3 {
                    let exact = logdet_cumulants(&s, order, true).unwrap();
                    let approx = fd(|g| boundary_moment_any_sign(&s, g), order);
                    assert!((exact - approx).abs() < 1e-4, "b={b} n={n} m={m} order={order}: {exact} vs {approx}");
                }
            }
        }
        let s = spec(1, 7, 4);
        for order in 1..=3 {
            let exact = logdet_cumulants(&s, order, true).unwrap();
            let approx = fd(|g| boundary_moment_any_sign(&s, g), order);
            assert!((exact - approx).abs() < 1e-4, "order={order}: {exact} vs {approx}");
        }
    }

    // The boundary products continue analytically to small negative gamma.
    fn boundary_moment_any_sign(s: &EnsembleSpec, g: f64) -> f64 {
        use crate::special::gamma::ln_gamma;
        (s.kappa() + 1..=s.n_total())
            .map(|j| {
                let j = j as f64;
                match s.beta() {
                    Beta::Orthogonal => {
                        ln_gamma(j / 2.0) + ln_gamma((j - 1.0) / 2.0 + g)
                            - ln_gamma(j / 2.0 + g / 2.0)
                            - ln_gamma((j - 1.0) / 2.0 + g / 2.0)
                    }
                    Beta::Unitary => ln_gamma(j) + ln_gamma(j + g) - 2.0 * ln_gamma(j + g / 2.0),
                    Beta::Symplectic => {
                        ln_gamma(2.0 * j) + ln_gamma(2.0 * j + 2.0 * g + 1.0)
                            - ln_gamma(2.0 * j + g)
                            - ln_gamma(2.0 * j + g + 1.0)
                    }
                }
            })
            .sum()
    }

    #[test]
    fn variances_nonnegative() {
        for b in [1, 2, 4] {
            for n in 2..30 {
                for m in 1..n {
                    let s = spec(b, n, m);
                    assert!(logdet_cumulants(&s, 2, false).unwrap() >= 0.0);
                    assert!(logdet_cumulants(&s, 2, true).unwrap() >= 0.0);
                }
            }
        }
    }

    #[test]
    fn boundary_unitary_mean_vanishes() {
        assert_eq!(logdet_cumulants(&spec(2, 40, 17), 1, true).unwrap(), 0.0);
    }

    #[test]
    fn weak_regime_growth_rates() {
        // Var grows like v_beta log M and the mean like e_beta log M at fixed kappa
        let v = [(1u32, -0.5, 1.0), (2, 0.0, 0.5), (4, 0.5, 1.0)];
        for (b, e, vb) in v {
            let s1 = spec(b, 1001, 1000);
            let s2 = spec(b, 100_001, 100_000);
            let dm = logdet_cumulants(&s2, 1, true).unwrap() - logdet_cumulants(&s1, 1, true).unwrap();
            let dv = logdet_cumulants(&s2, 2, true).unwrap() - logdet_cumulants(&s1, 2, true).unwrap();
            let dl = (100.0f64).ln();
            assert!((dm / dl - e).abs() < 1e-3, "beta={b}: mean slope {}", dm / dl);
            assert!((dv / dl - vb).abs() < 1e-3, "beta={b}: var slope {}", dv / dl);
        }
    }

    #[test]
    fn rejects_bad_order() {
        assert!(logdet_cumulants(&spec(2, 3, 2), 0, false).is_err());
        assert!(logdet_cumulants(&spec(2, 3, 2), 4, true).is_err());
        assert!(logdet_cumulants(&spec(1, 3, 3), 2, true).is_err());
    }
}
