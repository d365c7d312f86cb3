//! k-fold integrals of Selberg type,
//! `int_{[0,1]^k} prod_i t_i^a f(t) |Delta(t)|^b dt`, with interchangeable
//! integration strategies.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::quadrature::rules::{gauss_jacobi_unit, GaussRule};
use crate::special::gamma::ln_gamma;
use crate::special::sum::CompensatedSum;

/// The integrand of a Selberg-type k-fold integral.
pub struct SelbergIntegrand<'a> {
    pub k: usize,
    /// Exponent `a` of the product weight `prod t_i^a`.
    pub weight_power: f64,
    /// Exponent `b` of `|Delta(t)|`.
    pub vandermonde_power: u32,
    /// Per-variable polynomial degree of `f`, or `None` when `f` is not a
    /// polynomial.
    pub degree: Option<usize>,
    /// Symmetric remaining factor `f(t)`.
    pub f: &'a (dyn Fn(&[f64]) -> f64 + Sync),
}

impl SelbergIntegrand<'_> {
    fn check(&self) -> Result<()> {
        if self.k == 0 {
            return invalid("integration dimension k must be positive");
        }
        if !(self.weight_power > -1.0) {
            return invalid(format!("weight exponent must exceed -1, got {}", self.weight_power));
        }
        Ok(())
    }
}

/// Result of a k-fold integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// Standard error for stochastic rules.
    pub stderr: Option<f64>,
    pub evaluations: u64,
}

/// Controls of an integration strategy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleOptions {
    /// Nodes per dimension; `None` picks the smallest exact count (or a
    /// default for non-polynomial integrands).
    pub nodes_per_dim: Option<usize>,
    pub mc_samples: usize,
    pub seed: u64,
}

/// Node count used for smooth non-polynomial integrands when none is given.
pub const DEFAULT_SMOOTH_NODES: usize = 48;

/// An integration strategy for [`SelbergIntegrand`]s.
pub trait KFoldRule: Send + Sync {
    fn name(&self) -> &'static str;
    fn integrate(&self, g: &SelbergIntegrand<'_>, opts: &RuleOptions) -> Result<Integral>;
}

fn vandermonde(t: &[f64], power: u32) -> f64 {
    let mut v = 1.0;
    for i in 0..t.len() {
        for j in i + 1..t.len() {
            v *= (t[j] - t[i]).abs();
        }
    }
    v.powi(power as i32)
}

fn resolve_nodes(required: Option<usize>, given: Option<usize>) -> Result<usize> {
    match (required, given) {
        (Some(r), Some(g)) if g < r => Err(Error::InsufficientNodes { required: r, given: g }),
        (_, Some(0)) => invalid("nodes_per_dim must be positive"),
        (_, Some(g)) => Ok(g),
        (Some(r), None) => Ok(r.max(1)),
        (None, None) => Ok(DEFAULT_SMOOTH_NODES),
    }
}

/// Tensor rule summed in odometer order for a deterministic result.
fn tensor_sum(rules: &[GaussRule], mut eval: impl FnMut(&[f64]) -> f64) -> (f64, u64) {
    let k = rules.len();
    let mut idx = vec![0usize; k];
    let mut pt = vec![0.0; k];
    let mut acc = CompensatedSum::new();
    let mut count = 0u64;
    loop {
        let mut w = 1.0;
        for d in 0..k {
            pt[d] = rules[d].nodes[idx[d]];
            w *= rules[d].weights[idx[d]];
        }
        acc.add(w * eval(&pt));
        count += 1;
        let mut d = 0;
        loop {
            if d == k {
                return (acc.value(), count);
            }
            idx[d] += 1;
            if idx[d] < rules[d].len() {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// Gauss-Jacobi in every coordinate with the `t^a` weight absorbed.
/// Exact for even Vandermonde powers.
pub struct TensorGaussJacobi;

impl KFoldRule for TensorGaussJacobi {
    fn name(&self) -> &'static str {
        "gauss_jacobi"
    }

    fn integrate(&self, g: &SelbergIntegrand<'_>, opts: &RuleOptions) -> Result<Integral> {
        g.check()?;
        if g.vandermonde_power % 2 == 1 && g.k > 1 {
            return invalid("tensor Gauss rules need an even Vandermonde power; use the ordered simplex");
        }
        let required = g.degree.map(|d| (d + g.vandermonde_power as usize * (g.k - 1) + 2) / 2);
        let n = resolve_nodes(required, opts.nodes_per_dim)?;
        let rule = gauss_jacobi_unit(n, 0.0, g.weight_power)?;
        let rules = vec![rule; g.k];
        let b = g.vandermonde_power;
        let (value, evaluations) = tensor_sum(&rules, |t| (g.f)(t) * vandermonde(t, b));
        Ok(Integral { value, stderr: None, evaluations })
    }
}

/// Gauss-Legendre in every coordinate; the weight is part of the integrand.
pub struct TensorGaussLegendre;

impl KFoldRule for TensorGaussLegendre {
    fn name(&self) -> &'static str {
        "gauss_legendre"
    }

    fn integrate(&self, g: &SelbergIntegrand<'_>, opts: &RuleOptions) -> Result<Integral> {
        g.check()?;
        if g.vandermonde_power % 2 == 1 && g.k > 1 {
            return invalid("tensor Gauss rules need an even Vandermonde power; use the ordered simplex");
        }
        let integer_weight = g.weight_power.fract() == 0.0;
        let required = g
            .degree
            .filter(|_| integer_weight)
            .map(|d| (d + g.weight_power as usize + g.vandermonde_power as usize * (g.k - 1) + 2) / 2);
        let n = resolve_nodes(required, opts.nodes_per_dim)?;
        let rule = gauss_jacobi_unit(n, 0.0, 0.0)?;
        let rules = vec![rule; g.k];
        let (a, b) = (g.weight_power, g.vandermonde_power);
        let (value, evaluations) = tensor_sum(&rules, |t| {
            let w: f64 = t.iter().map(|&x| x.powf(a)).product();
            w * (g.f)(t) * vandermonde(t, b)
        });
        Ok(Integral { value, stderr: None, evaluations })
    }
}

/// Integration over the ordered simplex `t_1 < ... < t_k` times `k!`, in
/// collapsed coordinates `t_i = prod_{j >= i} y_j`.
///
/// The Jacobian and the weight combine to `y_j^{a j + j - 1}` in dimension
/// `j` and the Vandermonde becomes a polynomial, so Gauss-Jacobi rules in
/// the `y_j` are exact for polynomial `f` and any integer power.
pub struct OrderedSimplexGauss;

impl OrderedSimplexGauss {
    fn required(g: &SelbergIntegrand<'_>, j: usize) -> Option<usize> {
        let k = g.k;
        let b = g.vandermonde_power as usize;
        g.degree.map(|d| {
            let vdeg: usize = (1..=j).map(|i| k - i).sum::<usize>() * b;
            (d * j + vdeg + 2) / 2
        })
    }
}

pub(crate) fn collapse(y: &[f64], t: &mut [f64]) {
    let k = y.len();
    let mut p = 1.0;
    for i in (0..k).rev() {
        p *= y[i];
        t[i] = p;
    }
}

impl KFoldRule for OrderedSimplexGauss {
    fn name(&self) -> &'static str {
        "ordered_simplex"
    }

    fn integrate(&self, g: &SelbergIntegrand<'_>, opts: &RuleOptions) -> Result<Integral> {
        g.check()?;
        let k = g.k;
        let mut rules = Vec::with_capacity(k);
        for j in 1..=k {
            let n = resolve_nodes(Self::required(g, j), opts.nodes_per_dim)?;
            let power = g.weight_power * j as f64 + (j - 1) as f64;
            rules.push(gauss_jacobi_unit(n, 0.0, power)?);
        }
        let b = g.vandermonde_power;
        let mut t = vec![0.0; k];
        let (value, evaluations) = tensor_sum(&rules, |y| {
            collapse(y, &mut t);
            (g.f)(&t) * vandermonde(&t, b)
        });
        let k_fact = ln_gamma(k as f64 + 1.0).exp();
        Ok(Integral { value: value * k_fact, stderr: None, evaluations })
    }
}

/// Stratified Monte Carlo with the `t^a` weight sampled exactly:
/// `t = U^{1/(a+1)}`, the first uniform stratified into equal bins.
pub struct OrderedSimplexMc;

impl KFoldRule for OrderedSimplexMc {
    fn name(&self) -> &'static str {
        "ordered_simplex_mc"
    }

    fn integrate(&self, g: &SelbergIntegrand<'_>, opts: &RuleOptions) -> Result<Integral> {
        g.check()?;
        let strata = 64usize;
        let per = (opts.mc_samples / strata).max(2);
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let inv = 1.0 / (g.weight_power + 1.0);
        let scale = inv.powi(g.k as i32);
        let mut t = vec![0.0; g.k];
        let mut mean = CompensatedSum::new();
        let mut var = 0.0;
        for s in 0..strata {
            let mut vals = Vec::with_capacity(per);
            for _ in 0..per {
                let u0 = (s as f64 + rng.random::<f64>()) / strata as f64;
                t[0] = u0.powf(inv);
                for ti in t.iter_mut().skip(1) {
                    *ti = rng.random::<f64>().powf(inv);
                }
                vals.push(scale * (g.f)(&t) * vandermonde(&t, g.vandermonde_power));
            }
            let m = vals.iter().sum::<f64>() / per as f64;
            let v = vals.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (per - 1) as f64;
            mean.add(m / strata as f64);
            var += v / per as f64 / (strata * strata) as f64;
        }
        Ok(Integral { value: mean.value(), stderr: Some(var.sqrt()), evaluations: (strata * per) as u64 })
    }
}

fn registry() -> &'static BTreeMap<&'static str, Box<dyn KFoldRule>> {
    static REG: OnceLock<BTreeMap<&'static str, Box<dyn KFoldRule>>> = OnceLock::new();
    REG.get_or_init(|| {
        let rules: Vec<Box<dyn KFoldRule>> = vec![
            Box::new(TensorGaussJacobi),
            Box::new(TensorGaussLegendre),
            Box::new(OrderedSimplexGauss),
            Box::new(OrderedSimplexMc),
        ];
        rules.into_iter().map(|r| (r.name(), r)).collect()
    })
}

/// Looks up an integration strategy by name.
pub fn kfold_rule(name: &str) -> Result<&'static dyn KFoldRule> {
    registry()
        .get(name)
        .map(|b| b.as_ref())
        .ok_or_else(|| Error::InvalidParameter(format!("unknown quadrature rule '{name}'")))
}

/// Names of all registered strategies.
pub fn kfold_rule_names() -> Vec<&'static str> {
    registry().keys().copied().collect()
}
