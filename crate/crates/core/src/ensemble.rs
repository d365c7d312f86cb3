//! Ensemble descriptors and moment queries shared by every engine.

use std::fmt;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Dyson index of the symmetry class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Beta {
    /// Real orthogonal group O(N).
    Orthogonal,
    /// Unitary group U(N).
    Unitary,
    /// Unitary symplectic group Sp(2N), quaternion entries.
    Symplectic,
}

impl Beta {
    pub const ALL: [Beta; 3] = [Beta::Orthogonal, Beta::Unitary, Beta::Symplectic];

    pub fn from_index(beta: u32) -> Result<Self> {
        match beta {
            1 => Ok(Beta::Orthogonal),
            2 => Ok(Beta::Unitary),
            4 => Ok(Beta::Symplectic),
            other => invalid(format!("beta must be 1, 2 or 4, got {other}")),
        }
    }

    pub fn index(self) -> u32 {
        match self {
            Beta::Orthogonal => 1,
            Beta::Unitary => 2,
            Beta::Symplectic => 4,
        }
    }

    pub fn value(self) -> f64 {
        f64::from(self.index())
    }

    /// Jack parameter `2/beta`.
    pub fn alpha(self) -> f64 {
        2.0 / self.value()
    }

    /// Dual class with Dyson index `4/beta`.
    pub fn dual(self) -> Beta {
        match self {
            Beta::Orthogonal => Beta::Symplectic,
            Beta::Unitary => Beta::Unitary,
            Beta::Symplectic => Beta::Orthogonal,
        }
    }

    /// Size of the complex representation of one matrix entry.
    pub fn block(self) -> usize {
        match self {
            Beta::Symplectic => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// The truncated ensemble: an `M x M` corner of a Haar matrix of size `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EnsembleSpec {
    beta: Beta,
    n_total: usize,
    m_trunc: usize,
}

impl EnsembleSpec {
    pub fn new(beta: Beta, n_total: usize, m_trunc: usize) -> Result<Self> {
        if m_trunc == 0 {
            return invalid("truncation size M must be positive");
        }
        if m_trunc > n_total {
            return invalid(format!("truncation size M = {m_trunc} exceeds N = {n_total}"));
        }
        Ok(Self { beta, n_total, m_trunc })
    }

    pub fn beta(&self) -> Beta {
        self.beta
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    pub fn m_trunc(&self) -> usize {
        self.m_trunc
    }

    /// Number of truncated rows, `N - M`.
    pub fn kappa(&self) -> usize {
        self.n_total - self.m_trunc
    }

    /// Aspect ratio `M / N`.
    pub fn mu(&self) -> f64 {
        self.m_trunc as f64 / self.n_total as f64
    }

    pub fn alpha(&self) -> f64 {
        self.beta.alpha()
    }

    /// `4 / beta`, the Vandermonde exponent of the dual integrals.
    pub fn beta_prime(&self) -> f64 {
        4.0 / self.beta.value()
    }
}

/// Order of a moment of the characteristic polynomial.
///
/// `Integer(k)` is the even moment indexed by `2k`: `E det(x-A)^{2k}` for
/// real matrices, `E |det(x-A)|^{2k}` for complex ones and `E det(x-A)^k`
/// for quaternion matrices, where the quaternion determinant is taken in the
/// `2M x 2M` complex representation.
///
/// `Real(gamma)` is the same family continued to real exponent: the
/// statistic is `|det|^gamma` for beta 1, 2 and `det_C^{gamma/2}` for
/// beta 4, so that `Real(2k)` and `Integer(k)` coincide.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MomentOrder {
    Integer(u32),
    Real(f64),
}

impl MomentOrder {
    /// The exponent `gamma` with `Integer(k) = Real(2k)`.
    pub fn gamma(&self) -> f64 {
        match *self {
            MomentOrder::Integer(k) => 2.0 * f64::from(k),
            MomentOrder::Real(g) => g,
        }
    }

    /// The exponent applied to the natural determinant of the class: the
    /// complex `det` for beta 1, 2 and the `2M x 2M` complex determinant for
    /// beta 4.
    pub fn det_exponent(&self, beta: Beta) -> f64 {
        match beta {
            Beta::Symplectic => self.gamma() / 2.0,
            _ => self.gamma(),
        }
    }

    pub fn as_integer(&self) -> Option<u32> {
        match *self {
            MomentOrder::Integer(k) => Some(k),
            MomentOrder::Real(g) => {
                let k = (g / 2.0).round();
                if g >= 0.0 && (g - 2.0 * k).abs() == 0.0 && k <= f64::from(u32::MAX) {
                    Some(k as u32)
                } else {
                    None
                }
            }
        }
    }
}

impl fmt::Display for MomentOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MomentOrder::Integer(k) => write!(f, "k={k}"),
            MomentOrder::Real(g) => write!(f, "gamma={g}"),
        }
    }
}

/// A moment order together with the evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentQuery {
    pub order: MomentOrder,
    pub x: Complex64,
}

impl MomentQuery {
    pub fn new(order: MomentOrder, x: Complex64) -> Self {
        Self { order, x }
    }

    pub fn even(k: u32, x: Complex64) -> Self {
        Self::new(MomentOrder::Integer(k), x)
    }

    /// Checks the per-class restrictions on `x` and on the order.
    pub fn validate(&self, beta: Beta) -> Result<()> {
        if !self.x.re.is_finite() || !self.x.im.is_finite() {
            return invalid("evaluation point must be finite");
        }
        if beta == Beta::Orthogonal && self.x.im != 0.0 {
            return Err(Error::WrongBeta(format!(
                "beta = 1 requires a real evaluation point, got imaginary part {}",
                self.x.im
            )));
        }
        if let MomentOrder::Real(g) = self.order {
            if !g.is_finite() || g <= -1.0 {
                return invalid(format!("moment exponent gamma must exceed -1, got {g}"));
            }
        }
        Ok(())
    }

    /// `|x|^2`, read as `x^2` for beta 1.
    pub fn x_sq(&self) -> f64 {
        self.x.norm_sqr()
    }
}

/// A value with an optional standard error, the common output of every engine.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: Option<f64>,
    pub n_samples: Option<u64>,
    pub method: String,
}

impl Estimate {
    pub fn exact(value: f64, method: impl Into<String>) -> Self {
        Self { value, stderr: None, n_samples: None, method: method.into() }
    }
}
