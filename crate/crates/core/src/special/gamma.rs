//! Log-Gamma and the first three polygamma functions on the positive axis.
//!
//! Arguments below a threshold are shifted upward with the recurrence and
//! the Stirling / Bernoulli asymptotic series is applied there.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const SHIFT_THRESHOLD: f64 = 15.0;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// `ln Gamma(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0, "ln_gamma requires x > 0, got {x}");
    if x < SHIFT_THRESHOLD {
        let mut y = x;
        let mut prod = 1.0;
        // keep the running product bounded so the log is taken once
        let mut log_acc = 0.0;
        while y < SHIFT_THRESHOLD {
            prod *= y;
            if prod > 1e280 {
                log_acc += prod.ln();
                prod = 1.0;
            }
            y += 1.0;
        }
        return stirling(y) - log_acc - prod.ln();
    }
    stirling(x)
}

fn stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // B_{2n} / (2n (2n-1)) for n = 1..8
    let series = inv
        * (1.0 / 12.0
            + inv2
                * (-1.0 / 360.0
                    + inv2
                        * (1.0 / 1260.0
                            + inv2
                                * (-1.0 / 1680.0
                                    + inv2
                                        * (1.0 / 1188.0
                                            + inv2
                                                * (-691.0 / 360_360.0
                                                    + inv2 * (1.0 / 156.0 + inv2 * (-3617.0 / 122_400.0))))))));
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + series
}

/// `ln Gamma(x)` with a pole check, for use inside Gamma products.
pub fn ln_gamma_checked(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Pole(format!("Gamma argument {x} is not positive")));
    }
    Ok(ln_gamma(x))
}

/// `Gamma(x)` for moderate positive `x`.
pub fn gamma(x: f64) -> f64 {
    ln_gamma(x).exp()
}

/// Digamma `psi(x)` for `x > 0`.
pub fn digamma(x: f64) -> f64 {
    polygamma(0, x)
}

/// Trigamma `psi'(x)` for `x > 0`.
pub fn trigamma(x: f64) -> f64 {
    polygamma(1, x)
}

/// Tetragamma `psi''(x)` for `x > 0`.
pub fn tetragamma(x: f64) -> f64 {
    polygamma(2, x)
}

/// `psi^{(n)}(x)` for `n <= 2` and `x > 0`.
pub fn polygamma(n: u32, x: f64) -> f64 {
    assert!(n <= 2, "polygamma implemented for n <= 2");
    debug_assert!(x > 0.0, "polygamma requires x > 0, got {x}");
    let mut y = x;
    let mut shift = 0.0;
    while y < SHIFT_THRESHOLD {
        shift += match n {
            0 => -1.0 / y,
            1 => 1.0 / (y * y),
            _ => -2.0 / (y * y * y),
        };
        y += 1.0;
    }
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    let asym = match n {
        0 => {
            y.ln() - 0.5 * inv
                - inv2
                    * (1.0 / 12.0
                        + inv2
                            * (-1.0 / 120.0
                                + inv2
                                    * (1.0 / 252.0
                                        + inv2
                                            * (-1.0 / 240.0
                                                + inv2
                                                    * (1.0 / 132.0
                                                        + inv2 * (-691.0 / 32_760.0 + inv2 * (1.0 / 12.0)))))))
        }
        1 => {
            inv + 0.5 * inv2
                + inv
                    * inv2
                    * (1.0 / 6.0
                        + inv2
                            * (-1.0 / 30.0
                                + inv2
                                    * (1.0 / 42.0
                                        + inv2
                                            * (-1.0 / 30.0
                                                + inv2
                                                    * (5.0 / 66.0
                                                        + inv2 * (-691.0 / 2730.0 + inv2 * (7.0 / 6.0)))))))
        }
        _ => {
            -(inv2
                + inv * inv2
                + inv2
                    * inv2
                    * (0.5
                        + inv2
                            * (-1.0 / 6.0
                                + inv2
                                    * (1.0 / 6.0
                                        + inv2
                                            * (-0.3
                                                + inv2
                                                    * (5.0 / 6.0
                                                        + inv2 * (-691.0 / 210.0 + inv2 * 17.5)))))))
        }
    };
    asym + shift
}

/// `ln B(a, b)`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Standard normal CDF via the complementary error function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Complementary error function: power series below 2, continued fraction above.
pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 2.0 {
        // erf series: 2/sqrt(pi) * sum (-1)^n x^{2n+1} / (n! (2n+1))
        let mut term = x;
        let mut sum = x;
        let x2 = x * x;
        let mut n = 0.0;
        loop {
            n += 1.0;
            term *= -x2 / n;
            let add = term / (2.0 * n + 1.0);
            sum += add;
            if add.abs() <= 1e-17 * sum.abs() {
                break;
            }
        }
        return 1.0 - 2.0 / PI.sqrt() * sum;
    }
    // Lentz continued fraction for erfc
    let tiny = 1e-300;
    let x2 = x * x;
    // erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + 1/2/(x + 1/(x + 3/2/(x + ...))))
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for i in 1..500 {
        let a = f64::from(i) * 0.5;
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x2).exp() / (f * PI.sqrt())
}
