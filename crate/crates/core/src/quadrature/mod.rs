//! Selberg-weighted k-fold integrals: the duality representations of the
//! moments and the largest-eigenvalue distributions of the Gaussian and
//! Laguerre beta ensembles.

pub mod kfold;
pub mod rules;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::ensemble::{Beta, EnsembleSpec, Estimate};
use crate::error::{invalid, Error, Result};
use crate::special::products::{gaussian_norm, laguerre_norm, selberg_const, skn_const};

pub use kfold::{kfold_rule, kfold_rule_names, Integral, KFoldRule, RuleOptions, SelbergIntegrand};
pub use rules::{gauss_jacobi_unit, gauss_legendre_unit, GaussRule};

/// Named quadrature rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureRule {
    GaussJacobi,
    GaussLegendre,
    OrderedSimplexMc,
}

impl QuadratureRule {
    pub fn name(self) -> &'static str {
        match self {
            QuadratureRule::GaussJacobi => "gauss_jacobi",
            QuadratureRule::GaussLegendre => "gauss_legendre",
            QuadratureRule::OrderedSimplexMc => "ordered_simplex_mc",
        }
    }
}

impl fmt::Display for QuadratureRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for QuadratureRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gauss_jacobi" => Ok(QuadratureRule::GaussJacobi),
            "gauss_legendre" => Ok(QuadratureRule::GaussLegendre),
            "ordered_simplex_mc" => Ok(QuadratureRule::OrderedSimplexMc),
            other => invalid(format!("unknown quadrature rule '{other}'")),
        }
    }
}

/// Quadrature controls shared by the duality integrals and the CDFs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// `None` selects the smallest exact node count (or a default for
    /// non-polynomial integrands).
    pub nodes_per_dim: Option<usize>,
    pub rule: QuadratureRule,
    pub mc_samples: usize,
    /// Lower cut-off `-domain_cut` replacing minus infinity.
    pub domain_cut: f64,
    pub seed: u64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { nodes_per_dim: None, rule: QuadratureRule::GaussJacobi, mc_samples: 200_000, domain_cut: 12.0, seed: 1 }
    }
}

impl QuadratureSpec {
    pub fn with_nodes(mut self, n: usize) -> Self {
        self.nodes_per_dim = Some(n);
        self
    }

    pub fn with_rule(mut self, rule: QuadratureRule) -> Self {
        self.rule = rule;
        self
    }

    fn options(&self) -> RuleOptions {
        RuleOptions { nodes_per_dim: self.nodes_per_dim, mc_samples: self.mc_samples, seed: self.seed }
    }

    /// Picks the strategy: odd Vandermonde powers go to the ordered
    /// simplex, deterministically up to three dimensions.
    fn strategy(&self, k: usize, vandermonde_power: u32) -> Result<&'static dyn KFoldRule> {
        let name = match self.rule {
            QuadratureRule::OrderedSimplexMc => "ordered_simplex_mc",
            _ if vandermonde_power % 2 == 1 && k > 3 => "ordered_simplex_mc",
            _ if vandermonde_power % 2 == 1 && k > 1 => "ordered_simplex",
            QuadratureRule::GaussJacobi => "gauss_jacobi",
            QuadratureRule::GaussLegendre => "gauss_legendre",
        };
        kfold_rule(name)
    }

    fn integrate(&self, g: &SelbergIntegrand<'_>) -> Result<Integral> {
        self.strategy(g.k, g.vandermonde_power)?.integrate(g, &self.options())
    }
}

fn squared_modulus(beta: Beta, x: Complex64) -> Result<f64> {
    if beta == Beta::Orthogonal {
        if x.im != 0.0 {
            return Err(Error::WrongBeta(format!("beta = 1 moments need a real argument, got {x}")));
        }
        return Ok(x.re * x.re);
    }
    Ok(x.norm_sqr())
}

fn to_estimate(integral: Integral, scale: f64, rule: &str) -> Estimate {
    Estimate {
        value: integral.value * scale,
        stderr: integral.stderr.map(|s| s * scale.abs()),
        n_samples: integral.stderr.map(|_| integral.evaluations),
        method: format!("duality/{rule}"),
    }
}

/// `R_{2k}(x)` from the k-fold duality integral
/// `(1/S_{k,N}) int_{[0,1]^k} prod t^{N-M} (1 + (|x|^2 - 1) t)^M |Delta|^{4/beta}`.
pub fn duality_moment(spec: &EnsembleSpec, k: u32, x: Complex64, q: &QuadratureSpec) -> Result<Estimate> {
    let x_sq = squared_modulus(spec.beta(), x)?;
    duality_integral(spec, k, x_sq, &vec![1.0; spec.m_trunc()], q)
}

/// `E |det(x - A V)|^{2k}` with `Sigma = V V^dagger` given by its eigenvalues.
///
/// The integrand is the product over `t_i` and `j` of
/// `(|x|^2 - sigma_j)(t_i - gamma_j) = sigma_j + (|x|^2 - sigma_j) t_i`.
pub fn duality_moment_general(
    spec: &EnsembleSpec,
    k: u32,
    x: Complex64,
    sigma_eigs: &[f64],
    q: &QuadratureSpec,
) -> Result<Estimate> {
    let x_sq = squared_modulus(spec.beta(), x)?;
    check_sigma(spec, sigma_eigs, x_sq)?;
    duality_integral(spec, k, x_sq, sigma_eigs, q)
}

fn duality_integral(spec: &EnsembleSpec, k: u32, x_sq: f64, sigma_eigs: &[f64], q: &QuadratureSpec) -> Result<Estimate> {
    if k == 0 {
        return invalid("duality integrals need k >= 1");
    }
    let m = spec.m_trunc();
    let f = |t: &[f64]| {
        t.iter().map(|&ti| sigma_eigs.iter().map(|&s| s + (x_sq - s) * ti).product::<f64>()).product::<f64>()
    };
    let k = k as usize;
    let b = 4 / spec.beta().index();
    let g = SelbergIntegrand { k, weight_power: spec.kappa() as f64, vandermonde_power: b, degree: Some(m), f: &f };
    let strategy = q.strategy(k, b)?;
    let integral = strategy.integrate(&g, &q.options())?;
    let norm = skn_const(k, spec.n_total(), spec.beta())?;
    Ok(to_estimate(integral, (-norm.ln()).exp(), strategy.name()))
}

fn check_sigma(spec: &EnsembleSpec, sigma_eigs: &[f64], x_sq: f64) -> Result<()> {
    if sigma_eigs.len() != spec.m_trunc() {
        return Err(Error::Dimension(format!(
            "expected {} eigenvalues of Sigma, got {}",
            spec.m_trunc(),
            sigma_eigs.len()
        )));
    }
    for &s in sigma_eigs {
        if !(s >= 0.0) || !s.is_finite() {
            return invalid(format!("Sigma eigenvalues must be finite and nonnegative, got {s}"));
        }
        if (x_sq - s).abs() <= 1e-14 * x_sq.max(1.0) {
            return Err(Error::SingularShift(s));
        }
    }
    Ok(())
}

/// `E det(x - A V)^{2k+1}` for real truncations (beta 1), `x` real.
///
/// The k-fold integral carries the weight `t^{N-M} (1-t)^2 |Delta|^4` and
/// the prefactor `x^M det(x^2 - Sigma)^k`; `k = 0` gives the mean `x^M`.
pub fn odd_moment_real(
    spec: &EnsembleSpec,
    k: u32,
    x: f64,
    sigma_eigs: &[f64],
    q: &QuadratureSpec,
) -> Result<Estimate> {
    if spec.beta() != Beta::Orthogonal {
        return Err(Error::WrongBeta(format!("odd moments are defined for beta = 1 only, got beta = {}", spec.beta())));
    }
    let m = spec.m_trunc();
    let x_sq = x * x;
    check_sigma(spec, sigma_eigs, x_sq)?;
    let lead = x.powi(m as i32);
    if k == 0 {
        return Ok(Estimate::exact(lead, "duality/closed"));
    }
    let f = |t: &[f64]| {
        t.iter()
            .map(|&ti| (1.0 - ti).powi(2) * sigma_eigs.iter().map(|&s| s + (x_sq - s) * ti).product::<f64>())
            .product::<f64>()
    };
    let k = k as usize;
    let g = SelbergIntegrand { k, weight_power: spec.kappa() as f64, vandermonde_power: 4, degree: Some(m + 2), f: &f };
    let strategy = q.strategy(k, 4)?;
    let integral = strategy.integrate(&g, &q.options())?;
    let norm = selberg_const(k, spec.n_total() as f64, 2.0, 4.0)?;
    Ok(to_estimate(integral, lead * (-norm.ln()).exp(), strategy.name()))
}

fn beta_from_prime(beta_prime: u32) -> Result<Beta> {
    match beta_prime {
        1 => Ok(Beta::Symplectic),
        2 => Ok(Beta::Unitary),
        4 => Ok(Beta::Orthogonal),
        other => invalid(format!("beta' must be 1, 2 or 4, got {other}")),
    }
}

/// `P(lambda_max < s)` for the k x k Gaussian beta' ensemble with density
/// proportional to `prod e^{-t^2/2} |Delta|^{beta'}`.
pub fn gbe_max_cdf(k: usize, beta_prime: u32, s: f64, q: &QuadratureSpec) -> Result<f64> {
    if k == 0 {
        return invalid("gbe_max_cdf needs k >= 1");
    }
    let beta = beta_from_prime(beta_prime)?;
    let lo = -q.domain_cut;
    if s <= lo {
        return Ok(0.0);
    }
    let len = s - lo;
    let f = |y: &[f64]| y.iter().map(|&v| (-0.5 * (lo + len * v).powi(2)).exp()).product::<f64>();
    let g = SelbergIntegrand { k, weight_power: 0.0, vandermonde_power: beta_prime, degree: None, f: &f };
    let q = smooth_nodes(q, 64);
    let integral = q.integrate(&g)?;
    let kf = k as f64;
    let jac = (kf + f64::from(beta_prime) * kf * (kf - 1.0) / 2.0) * len.ln();
    let ln_norm = gaussian_norm(k, beta)?.ln();
    Ok(clamp_probability(integral.value * (jac - ln_norm).exp()))
}

/// `P(lambda_max < 2u)` for the k x k Laguerre beta' ensemble with density
/// proportional to `prod e^{-t} t^kappa |Delta|^{beta'}` on `(0, inf)^k`.
pub fn lbe_max_cdf(k: usize, beta_prime: u32, kappa: usize, u: f64, q: &QuadratureSpec) -> Result<f64> {
    if k == 0 {
        return invalid("lbe_max_cdf needs k >= 1");
    }
    if !(u > 0.0) {
        return invalid(format!("u must be positive, got {u}"));
    }
    let beta = beta_from_prime(beta_prime)?;
    let len = 2.0 * u;
    let f = |y: &[f64]| y.iter().map(|&v| (-len * v).exp()).product::<f64>();
    let g = SelbergIntegrand { k, weight_power: kappa as f64, vandermonde_power: beta_prime, degree: None, f: &f };
    let nodes = (48.0 + 1.5 * len).min(400.0) as usize;
    let q = smooth_nodes(q, nodes);
    let integral = q.integrate(&g)?;
    let kf = k as f64;
    let jac = (kf * (1.0 + kappa as f64) + f64::from(beta_prime) * kf * (kf - 1.0) / 2.0) * len.ln();
    let ln_norm = laguerre_norm(k, kappa, beta)?.ln();
    Ok(clamp_probability(integral.value * (jac - ln_norm).exp()))
}

fn smooth_nodes(q: &QuadratureSpec, default: usize) -> QuadratureSpec {
    let mut q = *q;
    if q.nodes_per_dim.is_none() {
        q.nodes_per_dim = Some(default);
    }
    q
}

fn clamp_probability(p: f64) -> f64 {
    p.clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::exact_moment;
    use crate::special::gamma::normal_cdf;

    fn spec(beta: u32, n: usize, m: usize) -> EnsembleSpec {
        EnsembleSpec::new(Beta::from_index(beta).unwrap(), n, m).unwrap()
    }

    fn binom(n: usize, k: usize) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn k1_at_origin_is_inverse_binomial() {
        for b in [1, 2, 4] {
            for n in 1..8 {
                for m in 1..=n {
                    let v = duality_moment(&spec(b, n, m), 1, Complex64::new(0.0, 0.0), &q()).unwrap().value;
                    assert!((v - 1.0 / binom(n, m)).abs() < 1e-12, "b={b} n={n} m={m}");
                }
            }
        }
    }

    #[test]
    fn matches_partition_series() {
        let s = spec(2, 4, 2);
        let v = duality_moment(&s, 2, Complex64::new(0.5, 0.0), &q()).unwrap().value;
        let want = exact_moment(&s, 2).eval(0.25);
        assert!((v - want).abs() < 1e-10 * want);
        for b in [1u32, 2, 4] {
            for (n, m) in [(5, 3), (6, 6), (7, 2)] {
                for k in 1..=3 {
                    let s = spec(b, n, m);
                    let x = Complex64::new(0.8, 0.0);
                    let v = duality_moment(&s, k, x, &q()).unwrap().value;
                    let want = exact_moment(&s, k).eval(0.64);
                    assert!((v - want).abs() < 1e-10 * want, "b={b} n={n} m={m} k={k}: {v} vs {want}");
                }
            }
        }
    }

    #[test]
    fn beta_independent_at_k1() {
        let x = 1.3;
        let vals: Vec<f64> = [1, 2, 4]
            .iter()
            .map(|&b| duality_moment(&spec(b, 6, 3), 1, Complex64::new(x, 0.0), &q()).unwrap().value)
            .collect();
        assert!((vals[0] - vals[1]).abs() < 1e-12 * vals[1]);
        assert!((vals[2] - vals[1]).abs() < 1e-12 * vals[1]);
    }

    #[test]
    fn node_doubling_is_stable() {
        let s = spec(2, 9, 4);
        let x = Complex64::new(0.3, 0.9);
        let base = duality_moment(&s, 3, x, &q()).unwrap().value;
        let doubled = duality_moment(&s, 3, x, &q().with_nodes(10)).unwrap().value;
        assert!((base - doubled).abs() < 1e-12 * base.abs());
        let legendre = duality_moment(&s, 3, x, &q().with_rule(QuadratureRule::GaussLegendre)).unwrap().value;
        assert!((base - legendre).abs() < 1e-11 * base.abs());
    }

    #[test]
    fn insufficient_nodes_and_wrong_beta() {
        let s = spec(2, 9, 4);
        assert!(matches!(
            duality_moment(&s, 3, Complex64::new(0.3, 0.0), &q().with_nodes(2)),
            Err(Error::InsufficientNodes { .. })
        ));
        assert!(matches!(duality_moment(&spec(1, 4, 2), 1, Complex64::new(0.3, 0.1), &q()), Err(Error::WrongBeta(_))));
    }

    #[test]
    fn symplectic_simplex_mc_path() {
        let s = spec(4, 7, 3);
        let x = Complex64::new(0.6, 0.0);
        let exact = exact_moment(&s, 4).eval(0.36);
        let det = duality_moment(&s, 3, x, &q()).unwrap();
        assert!(det.stderr.is_none());
        assert!((det.value - exact_moment(&s, 3).eval(0.36)).abs() < 1e-10 * det.value);
        let mc = duality_moment(&s, 4, x, &q()).unwrap();
        let se = mc.stderr.unwrap();
        assert!((mc.value - exact).abs() < 5.0 * se, "{} vs {exact} (se {se})", mc.value);
    }

    #[test]
    fn general_sigma() {
        let s = spec(2, 5, 3);
        let x = Complex64::new(1.4, 0.2);
        let ones = duality_moment_general(&s, 2, x, &[1.0, 1.0, 1.0], &q()).unwrap().value;
        let plain = duality_moment(&s, 2, x, &q()).unwrap().value;
        assert!((ones - plain).abs() < 1e-13 * plain);
        let err = duality_moment_general(&s, 1, Complex64::new(0.5, 0.0), &[0.25, 0.3, 0.1], &q());
        assert!(matches!(err, Err(Error::SingularShift(_))));
        assert!(matches!(duality_moment_general(&s, 1, x, &[1.0], &q()), Err(Error::Dimension(_))));
        // large |x|: ratio to |x|^{2M} tends to one
        let big = Complex64::new(1e4, 0.0);
        let v = duality_moment_general(&s, 1, big, &[0.2, 0.5, 0.9], &q()).unwrap().value;
        assert!((v / 1e24 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn sigma_zero_is_pure_power() {
        // V = 0 makes det(x - AV) = x^M
        let s = spec(2, 4, 2);
        let v = duality_moment_general(&s, 2, Complex64::new(0.7, 0.0), &[0.0, 0.0], &q()).unwrap().value;
        assert!((v - 0.7f64.powi(8)).abs() < 1e-13);
    }

    #[test]
    fn odd_moments() {
        let s = spec(1, 1, 1);
        let x = 0.3;
        let v = odd_moment_real(&s, 1, x, &[1.0], &q()).unwrap().value;
        let want = ((x - 1.0f64).powi(3) + (x + 1.0f64).powi(3)) / 2.0;
        assert!((v - want).abs() < 1e-13);
        let s = spec(1, 5, 3);
        assert!((odd_moment_real(&s, 0, 0.7, &[1.0; 3], &q()).unwrap().value - 0.343).abs() < 1e-15);
        assert!(matches!(odd_moment_real(&spec(2, 5, 3), 1, 0.7, &[1.0; 3], &q()), Err(Error::WrongBeta(_))));
        let big = 1e3;
        let v = odd_moment_real(&s, 2, big, &[1.0; 3], &q()).unwrap().value;
        assert!((v / big.powi(15) - 1.0).abs() < 1e-4);
    }

    #[test]
    fn odd_moments_of_full_orthogonal_two_by_two() {
        // O(2): rotations (eigenvalues e^{+-i phi}) and reflections (+-1) with
        // probability 1/2 each, so E det(x - O)^3 is an explicit average
        let s = spec(1, 2, 2);
        let x: f64 = 1.7;
        let n = 4000;
        let rot: f64 = (0..n)
            .map(|i| {
                let phi = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / n as f64;
                (x * x - 2.0 * x * phi.cos() + 1.0).powi(3)
            })
            .sum::<f64>()
            / n as f64;
        let refl = (x * x - 1.0).powi(3);
        let want = 0.5 * (rot + refl);
        let v = odd_moment_real(&s, 1, x, &[1.0, 1.0], &q()).unwrap().value;
        assert!((v - want).abs() < 1e-10 * want, "{v} vs {want}");
    }

    #[test]
    fn gaussian_cdf() {
        for bp in [1, 2, 4] {
            assert!((gbe_max_cdf(1, bp, 0.0, &q()).unwrap() - 0.5).abs() < 1e-13);
            for s in [-2.0, -0.3, 1.1, 2.5] {
                assert!((gbe_max_cdf(1, bp, s, &q()).unwrap() - normal_cdf(s)).abs() < 1e-12);
            }
        }
        assert!((gbe_max_cdf(2, 2, 6.0, &q()).unwrap() - 1.0).abs() < 1e-6);
        for bp in [1, 2, 4] {
            let mut last = 0.0;
            for i in 0..30 {
                let s = -4.0 + 0.3 * f64::from(i);
                let p = gbe_max_cdf(3, bp, s, &q()).unwrap();
                assert!((0.0..=1.0).contains(&p));
                assert!(p >= last - 1e-14);
                last = p;
            }
        }
    }

    #[test]
    fn gue_two_by_two_closed_form() {
        // For 2x2 GUE with weight e^{-t^2/2}, P(max < s) has the closed form
        // Phi(s)^2 - phi(s) (s Phi(s) + phi(s))
        let s: f64 = 0.7;
        let phi = (-0.5 * s * s).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let cap = normal_cdf(s);
        let want = cap * cap - phi * (s * cap + phi);
        let got = gbe_max_cdf(2, 2, s, &q()).unwrap();
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }

    #[test]
    fn laguerre_cdf() {
        for bp in [1, 2, 4] {
            for u in [0.1, 0.8, 3.0] {
                let p0 = lbe_max_cdf(1, bp, 0, u, &q()).unwrap();
                assert!((p0 - (1.0 - (-2.0 * u).exp())).abs() < 1e-12);
                let p1 = lbe_max_cdf(1, bp, 1, u, &q()).unwrap();
                assert!((p1 - (1.0 - (-2.0 * u).exp() * (1.0 + 2.0 * u))).abs() < 1e-12);
            }
            assert!((lbe_max_cdf(2, bp, 1, 60.0, &q()).unwrap() - 1.0).abs() < 1e-10);
            let mut last = 0.0;
            for i in 1..25 {
                let p = lbe_max_cdf(3, bp, 2, 0.5 * f64::from(i), &q()).unwrap();
                assert!((0.0..=1.0).contains(&p) && p >= last - 1e-14);
                last = p;
            }
        }
    }
}
