//! Generalised Pochhammer symbols and Jack polynomials at the identity.

use crate::partitions::partition::Partition;
use crate::special::gamma::ln_gamma;

/// A real number stored as `sign * exp(log_abs)`; `sign == 0` means zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    pub log_abs: f64,
    pub sign: i8,
}

impl SignedLog {
    pub const ONE: SignedLog = SignedLog { log_abs: 0.0, sign: 1 };
    pub const ZERO: SignedLog = SignedLog { log_abs: f64::NEG_INFINITY, sign: 0 };

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            Self { log_abs: x.abs().ln(), sign: if x > 0.0 { 1 } else { -1 } }
        }
    }

    pub fn value(self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            f64::from(self.sign) * self.log_abs.exp()
        }
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    pub fn mul(self, other: SignedLog) -> SignedLog {
        if self.sign == 0 || other.sign == 0 {
            return Self::ZERO;
        }
        Self { log_abs: self.log_abs + other.log_abs, sign: self.sign * other.sign }
    }

    pub fn div(self, other: SignedLog) -> SignedLog {
        assert!(other.sign != 0, "division by zero in SignedLog");
        if self.sign == 0 {
            return Self::ZERO;
        }
        Self { log_abs: self.log_abs - other.log_abs, sign: self.sign * other.sign }
    }

    pub fn scale_log(self, log_factor: f64) -> SignedLog {
        if self.sign == 0 {
            return self;
        }
        Self { log_abs: self.log_abs + log_factor, sign: self.sign }
    }
}

/// Classical rising factorial `(u)_n` as a signed log.
pub fn rising_factorial(u: f64, n: u32) -> SignedLog {
    let mut log_abs = 0.0;
    let mut sign = 1i8;
    // products of up to 32 factors at a time keep the logs few and the
    // partial products inside f64 range
    let mut block = 1.0f64;
    for i in 0..n {
        let f = u + f64::from(i);
        if f == 0.0 {
            return SignedLog::ZERO;
        }
        block *= f;
        if i % 32 == 31 {
            log_abs += block.abs().ln();
            if block < 0.0 {
                sign = -sign;
            }
            block = 1.0;
        }
    }
    log_abs += block.abs().ln();
    if block < 0.0 {
        sign = -sign;
    }
    SignedLog { log_abs, sign }
}

/// `[u]^{(alpha)}_nu = prod_j (u - (j-1)/alpha)_{nu_j}` as a signed log.
pub fn gen_pochhammer_signed(u: f64, alpha: f64, nu: &Partition) -> SignedLog {
    let mut acc = SignedLog::ONE;
    for (j, &p) in nu.parts().iter().enumerate() {
        acc = acc.mul(rising_factorial(u - j as f64 / alpha, p));
        if acc.is_zero() {
            break;
        }
    }
    acc
}

/// Generalised Pochhammer symbol `[u]^{(alpha)}_nu`.
pub fn gen_pochhammer(u: f64, alpha: f64, nu: &Partition) -> f64 {
    gen_pochhammer_signed(u, alpha, nu).value()
}

/// `ln d'_nu = sum over boxes of ln(alpha (arm + 1) + leg)`.
pub fn ln_jack_dprime(nu: &Partition, alpha: f64) -> f64 {
    let mut s = 0.0;
    nu.for_each_box(|arm, leg, _, _| s += (alpha * f64::from(arm + 1) + f64::from(leg)).ln());
    s
}

/// The normalisation constant `d'_nu` relating `C_nu` to the monic `P_nu`.
pub fn jack_dprime(nu: &Partition, alpha: f64) -> f64 {
    ln_jack_dprime(nu, alpha).exp()
}

/// `d'_nu` from its defining ratio with `m >= len(nu)` padding variables,
/// `alpha^|nu| [(m-1)/alpha + 1]_nu / fbar(nu)`.
pub fn jack_dprime_padded(nu: &Partition, alpha: f64, m: usize) -> f64 {
    assert!(m >= nu.len(), "padding m must be at least the length of nu");
    let c = 1.0 / alpha;
    let lnpoch = |u: f64, n: f64| ln_gamma(u + n) - ln_gamma(u);
    let mut ln_num = f64::from(nu.weight()) * alpha.ln();
    let u = (m as f64 - 1.0) / alpha + 1.0;
    for j in 0..m {
        ln_num += lnpoch(u - j as f64 / alpha, f64::from(nu.part(j)));
    }
    let mut ln_f = 0.0;
    for i in 0..m {
        for j in i + 1..m {
            let base = 1.0 + (j - i - 1) as f64 / alpha;
            let diff = f64::from(nu.part(i)) - f64::from(nu.part(j));
            ln_f += lnpoch(base + diff, c) - lnpoch(base, c);
        }
    }
    (ln_num - ln_f).exp()
}

/// `ln C^{(alpha)}_nu(1^m)`; `None` when `len(nu) > m` (the value is zero).
pub fn ln_jack_identity_value(nu: &Partition, alpha: f64, m: usize) -> Option<f64> {
    if nu.len() > m {
        return None;
    }
    let n = nu.weight();
    let mf = m as f64;
    let mut s = f64::from(n) * alpha.ln() + ln_gamma(f64::from(n) + 1.0);
    nu.for_each_box(|arm, leg, coarm, coleg| {
        let a = f64::from(arm);
        let l = f64::from(leg);
        s += (mf - f64::from(coleg) + alpha * f64::from(coarm)).ln();
        s -= (alpha * a + l + 1.0).ln();
        s -= (alpha * (a + 1.0) + l).ln();
    });
    Some(s)
}

/// `C^{(alpha)}_nu(1^m)`, the normalised Jack polynomial at the `m x m`
/// identity.
pub fn jack_identity_value(nu: &Partition, alpha: f64, m: usize) -> f64 {
    ln_jack_identity_value(nu, alpha, m).map_or(0.0, f64::exp)
}
