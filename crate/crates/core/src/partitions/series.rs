//! The scalar-argument hypergeometric series for the moments.

use num_complex::Complex64;

use crate::ensemble::{EnsembleSpec, MomentQuery};
use crate::error::{invalid, Error, Result};
use crate::partitions::jack::{gen_pochhammer_signed, ln_jack_identity_value, SignedLog};
use crate::partitions::partition::{Partition, WeightShell};
use crate::special::gamma::ln_gamma;
use crate::special::sum::CompensatedSum;

/// `R_{2k}` as a polynomial in `|x|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesPolynomial {
    /// `coefficients[p]` multiplies `|x|^{2p}`.
    pub coefficients: Vec<f64>,
    pub spec: EnsembleSpec,
    pub k: u32,
}

impl SeriesPolynomial {
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn leading(&self) -> f64 {
        *self.coefficients.last().expect("non-empty coefficients")
    }

    /// Evaluates at `|x|^2 = x_sq`.
    pub fn eval(&self, x_sq: f64) -> f64 {
        let mut acc = CompensatedSum::new();
        let mut pow = 1.0;
        for &c in &self.coefficients {
            acc.add(c * pow);
            pow *= x_sq;
        }
        acc.value()
    }

    /// Evaluates at a complex point (real for beta 1).
    pub fn eval_at(&self, x: Complex64) -> f64 {
        self.eval(x.norm_sqr())
    }
}

/// The log-magnitude and sign of one series term, without the power of `x`.
fn series_term(a: f64, b: f64, c: f64, alpha: f64, m: usize, nu: &Partition) -> SignedLog {
    let num = gen_pochhammer_signed(a, alpha, nu).mul(gen_pochhammer_signed(b, alpha, nu));
    if num.is_zero() {
        return SignedLog::ZERO;
    }
    let Some(ln_c) = ln_jack_identity_value(nu, alpha, m) else {
        return SignedLog::ZERO;
    };
    let den = gen_pochhammer_signed(c, alpha, nu);
    num.div(den).scale_log(ln_c - ln_gamma(f64::from(nu.weight()) + 1.0))
}

/// Exact `R_{2k}(x)` as a terminating partition series in `|x|^2`.
///
/// For beta 1 the argument is real and `|x|^2 = x^2`; for beta 4 the
/// moment is the `k`-th power of the `2M x 2M` complex determinant.
pub fn exact_moment(spec: &EnsembleSpec, k: u32) -> SeriesPolynomial {
    let m = spec.m_trunc();
    let beta = spec.beta().value();
    let alpha = spec.alpha();
    let kf = f64::from(k);
    let (a, b, c) = (-kf, -kf + 1.0 - beta / 2.0, beta * spec.n_total() as f64 / 2.0);
    let top = k as usize * m;
    let mut sums = vec![CompensatedSum::new(); top + 1];
    for w in 0..=top as u32 {
        for nu in WeightShell::new(w, k, m) {
            let t = series_term(a, b, c, alpha, m, &nu);
            if !t.is_zero() {
                sums[top - w as usize].add(t.value());
            }
        }
    }
    SeriesPolynomial { coefficients: sums.iter().map(CompensatedSum::value).collect(), spec: *spec, k }
}

/// Default weight cap for [`noninteger_moment`].
pub const DEFAULT_WEIGHT_CAP: u32 = 60;

/// A truncated series value with its tail estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesEstimate {
    pub value: f64,
    /// Geometric estimate of the omitted tail, `|S_last| r / (1 - r)`.
    pub tail: f64,
    /// Ratio of the last two weight-shell sums.
    pub shell_ratio: f64,
    /// Set when the shell ratio is not below one.
    pub non_convergent: bool,
    pub weight_cap: u32,
}

/// The moment at real order `gamma` (statistic `|det|^gamma`, or
/// `det_C^{gamma/2}` for beta 4) for `|x| > 1`, summing all weight shells
/// up to `weight_cap`.
pub fn noninteger_moment(spec: &EnsembleSpec, gamma: f64, x_mod: f64, weight_cap: u32) -> Result<SeriesEstimate> {
    if !(x_mod > 1.0) {
        return Err(Error::ConvergenceDomain(format!("the series needs |x| > 1, got {x_mod}")));
    }
    if !(gamma > -1.0) || !gamma.is_finite() {
        return invalid(format!("gamma must exceed -1, got {gamma}"));
    }
    if gamma == 0.0 {
        return Ok(SeriesEstimate { value: 1.0, tail: 0.0, shell_ratio: 0.0, non_convergent: false, weight_cap });
    }
    let m = spec.m_trunc();
    let beta = spec.beta().value();
    let alpha = spec.alpha();
    let (a, b, c) = (-gamma / 2.0, -gamma / 2.0 + 1.0 - beta / 2.0, beta * spec.n_total() as f64 / 2.0);
    let ln_r = -2.0 * x_mod.ln();
    let ln_pref = gamma * m as f64 * x_mod.ln();
    let mut total = CompensatedSum::new();
    let mut shells = Vec::with_capacity(weight_cap as usize + 1);
    for w in 0..=weight_cap {
        let mut shell = CompensatedSum::new();
        for nu in WeightShell::new(w, w, m) {
            let t = series_term(a, b, c, alpha, m, &nu);
            if !t.is_zero() {
                shell.add(t.scale_log(ln_pref + f64::from(w) * ln_r).value());
            }
        }
        let s = shell.value();
        total.add(s);
        shells.push(s);
    }
    let (tail, ratio) = tail_estimate(&shells);
    Ok(SeriesEstimate {
        value: total.value(),
        tail,
        shell_ratio: ratio,
        non_convergent: !(ratio < 1.0),
        weight_cap,
    })
}

fn tail_estimate(shells: &[f64]) -> (f64, f64) {
    let n = shells.len();
    if n < 2 {
        return (0.0, 0.0);
    }
    let last = shells[n - 1].abs();
    let prev = shells[n - 2].abs();
    if last == 0.0 {
        return (0.0, 0.0);
    }
    if prev == 0.0 {
        return (f64::INFINITY, f64::INFINITY);
    }
    let r = last / prev;
    if r >= 1.0 {
        return (f64::INFINITY, r);
    }
    (last * r / (1.0 - r), r)
}

/// Evaluates an even moment query exactly, or the series for real orders.
pub fn series_value(spec: &EnsembleSpec, query: &MomentQuery) -> Result<SeriesEstimate> {
    query.validate(spec.beta())?;
    match query.order.as_integer() {
        Some(k) => {
            let poly = exact_moment(spec, k);
            Ok(SeriesEstimate {
                value: poly.eval_at(query.x),
                tail: 0.0,
                shell_ratio: 0.0,
                non_convergent: false,
                weight_cap: k * spec.m_trunc() as u32,
            })
        }
        None => noninteger_moment(spec, query.order.gamma(), query.x.norm(), DEFAULT_WEIGHT_CAP),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::Beta;
    use crate::special::products::{boundary_moment, logdet_mgf};

    fn spec(beta: u32, n: usize, m: usize) -> EnsembleSpec {
        EnsembleSpec::new(Beta::from_index(beta).unwrap(), n, m).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn k_zero_is_one() {
        let p = exact_moment(&spec(1, 5, 3), 0);
        assert_eq!(p.coefficients, vec![1.0]);
    }

    #[test]
    fn examples() {
        assert!(close(exact_moment(&spec(2, 4, 2), 1).eval(0.0), 1.0 / 6.0, 1e-13));
        assert!(close(exact_moment(&spec(2, 2, 1), 1).eval(1.0), 1.5, 1e-14));
        let b4 = boundary_moment(&spec(4, 2, 1), 1.0, 0.0).unwrap().value();
        assert!(close(exact_moment(&spec(4, 2, 1), 1).eval(1.0), b4, 1e-13));
    }

    #[test]
    fn degree_and_leading_coefficient() {
        for b in [1, 2, 4] {
            for n in 1..6 {
                for m in 1..=n {
                    for k in 0..4 {
                        let p = exact_moment(&spec(b, n, m), k);
                        assert_eq!(p.degree(), k as usize * m);
                        assert!(close(p.leading(), 1.0, 1e-13));
                    }
                }
            }
        }
    }

    #[test]
    fn gauss_summation_at_the_boundary() {
        for b in [1u32, 2, 4] {
            for n in 1..=6 {
                for m in 1..=n {
                    for k in 1..=3u32 {
                        let s = spec(b, n, m);
                        let gamma = if b == 4 { f64::from(k) } else { 2.0 * f64::from(k) };
                        let want = boundary_moment(&s, gamma, 0.0).unwrap().value();
                        let got = exact_moment(&s, k).eval(1.0);
                        assert!(close(got, want, 1e-10), "beta={b} n={n} m={m} k={k}: {got} vs {want}");
                    }
                }
            }
        }
    }

    #[test]
    fn origin_matches_logdet_mgf() {
        for b in [1u32, 2, 4] {
            for n in 1..=6 {
                for m in 1..=n {
                    for k in 1..=3u32 {
                        let s = spec(b, n, m);
                        // x = 0 picks out the |nu| = kM shell
                        let want = logdet_mgf(&s, 2.0 * f64::from(k)).unwrap().value();
                        let got = exact_moment(&s, k).eval(0.0);
                        assert!(close(got, want, 1e-10), "beta={b} n={n} m={m} k={k}: {got} vs {want}");
                    }
                }
            }
        }
    }

    #[test]
    fn full_unitary_is_shifted_power() {
        // M = N = 1, beta 2: E|x - e^{i phi}|^2 = 1 + |x|^2
        let p = exact_moment(&spec(2, 1, 1), 1);
        assert!(close(p.coefficients[0], 1.0, 1e-14));
        assert!(close(p.coefficients[1], 1.0, 1e-14));
        // beta 1, M = N = 1: E (x - s)^4 over s = +-1 is x^4 + 6x^2 + 1
        let p = exact_moment(&spec(1, 1, 1), 2);
        for (c, w) in p.coefficients.iter().zip([1.0, 6.0, 1.0]) {
            assert!(close(*c, w, 1e-13));
        }
    }

    #[test]
    fn noninteger_agrees_with_exact_at_even_orders() {
        for b in [1u32, 2, 4] {
            let s = spec(b, 5, 2);
            for k in 1..=2u32 {
                let e = noninteger_moment(&s, 2.0 * f64::from(k), 1.7, 30).unwrap();
                let want = exact_moment(&s, k).eval(1.7 * 1.7);
                assert!((e.value - want).abs() <= 1e-10 * want + e.tail);
            }
        }
    }

    #[test]
    fn noninteger_edge_cases() {
        let s = spec(2, 2, 1);
        let z = noninteger_moment(&s, 0.0, 3.0, 10).unwrap();
        assert_eq!((z.value, z.tail), (1.0, 0.0));
        assert!(matches!(noninteger_moment(&s, 1.0, 1.0, 10), Err(Error::ConvergenceDomain(_))));
        assert!(matches!(noninteger_moment(&s, 1.0, 0.5, 10), Err(Error::ConvergenceDomain(_))));
    }

    #[test]
    fn noninteger_single_row_closed_form() {
        // M = 1, beta = 2: |x - a|^gamma with |a|^2 ~ Beta(1, N - 1) and a
        // uniform phase; compare with a direct two-dimensional quadrature.
        let s = spec(2, 2, 1);
        let (gamma, x) = (1.0, 2.0);
        let est = noninteger_moment(&s, gamma, x, DEFAULT_WEIGHT_CAP).unwrap();
        assert!(!est.non_convergent);
        // N = 2: |a|^2 is uniform on [0, 1]
        let n = 2000;
        let mut acc = 0.0;
        for i in 0..n {
            let u = (i as f64 + 0.5) / n as f64;
            let r = u.sqrt();
            for j in 0..n {
                let phi = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / n as f64;
                let d = Complex64::new(x - r * phi.cos(), -r * phi.sin());
                acc += d.norm().powf(gamma);
            }
        }
        acc /= (n * n) as f64;
        assert!((est.value - acc).abs() < 1e-6, "{} vs {}", est.value, acc);
        assert!(est.tail < 1e-12);
    }

    #[test]
    fn larger_window_adds_nothing() {
        // widening the box to nu_1 = k + 1 contributes exactly zero
        let s = spec(1, 5, 3);
        let k = 2;
        let alpha = s.alpha();
        let a = -f64::from(k);
        let b = a + 1.0 - 0.5;
        let c = 2.5;
        for w in 0..=((k + 1) * 3) {
            for nu in WeightShell::new(w, k + 1, 3) {
                if nu.first() == k + 1 {
                    assert!(series_term(a, b, c, alpha, 3, &nu).is_zero());
                }
            }
        }
    }
}
