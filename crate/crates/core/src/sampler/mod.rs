//! Monte Carlo estimation of characteristic-polynomial moments.

pub mod haar;
pub mod products;
pub mod stats;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;

use crate::ensemble::{Beta, EnsembleSpec, MomentOrder, MomentQuery};
use crate::error::{Error, Result};

pub use haar::{charpoly_value, haar_sample, truncate, truncation_sample, HaarMatrix};
pub use products::{bhny_boundary_sample, beta_product_logdet_sample, LogdetFold};
pub use stats::{parallel_moments, MCEstimate};

/// Draws the moment statistic for several queries from one random matrix.
pub trait MomentSampler: Send + Sync {
    fn name(&self) -> &'static str;

    /// Rejects queries the sampler cannot serve.
    fn check(&self, spec: &EnsembleSpec, query: &MomentQuery) -> Result<()>;

    /// Fills `out[i]` with the statistic for `queries[i]`, all from one draw.
    fn draw(&self, spec: &EnsembleSpec, queries: &[MomentQuery], rng: &mut ChaCha8Rng, out: &mut [f64]) -> Result<()>;
}

/// Truncations of Haar matrices; any query.
pub struct HaarSampler;

/// Boundary points only, from the Beta-product law.
pub struct BoundarySampler;

/// The origin only, from the log-determinant Beta product.
pub struct LogdetSampler;

impl MomentSampler for HaarSampler {
    fn name(&self) -> &'static str {
        "haar"
    }

    fn check(&self, spec: &EnsembleSpec, query: &MomentQuery) -> Result<()> {
        query.validate(spec.beta())
    }

    fn draw(&self, spec: &EnsembleSpec, queries: &[MomentQuery], rng: &mut ChaCha8Rng, out: &mut [f64]) -> Result<()> {
        let beta = spec.beta();
        let a = truncation_sample(beta, spec.n_total(), spec.m_trunc(), rng)?;
        let mut cache: Vec<(Complex64, f64)> = Vec::new();
        for (q, o) in queries.iter().zip(out.iter_mut()) {
            let d = match cache.iter().find(|c| c.0 == q.x) {
                Some(c) => c.1,
                None => {
                    let d = haar::natural_det(&a, q.x, beta)?;
                    cache.push((q.x, d));
                    d
                }
            };
            *o = haar::power(d, q.order, beta);
        }
        Ok(())
    }
}

impl MomentSampler for BoundarySampler {
    fn name(&self) -> &'static str {
        "bhny"
    }

    fn check(&self, spec: &EnsembleSpec, query: &MomentQuery) -> Result<()> {
        query.validate(spec.beta())?;
        if (query.x.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("boundary sampler needs |x| = 1, got {}", query.x.norm())));
        }
        Ok(())
    }

    fn draw(&self, spec: &EnsembleSpec, queries: &[MomentQuery], rng: &mut ChaCha8Rng, out: &mut [f64]) -> Result<()> {
        let d = bhny_boundary_sample(spec, rng);
        for (q, o) in queries.iter().zip(out.iter_mut()) {
            *o = haar::power(d, q.order, spec.beta());
        }
        Ok(())
    }
}

impl MomentSampler for LogdetSampler {
    fn name(&self) -> &'static str {
        "beta_product"
    }

    fn check(&self, spec: &EnsembleSpec, query: &MomentQuery) -> Result<()> {
        query.validate(spec.beta())?;
        if query.x != Complex64::new(0.0, 0.0) {
            return Err(Error::Domain("log-determinant sampler needs x = 0".into()));
        }
        Ok(())
    }

    fn draw(&self, spec: &EnsembleSpec, queries: &[MomentQuery], rng: &mut ChaCha8Rng, out: &mut [f64]) -> Result<()> {
        let l = beta_product_logdet_sample(spec, LogdetFold::MFold, rng)?;
        for (q, o) in queries.iter().zip(out.iter_mut()) {
            *o = (q.order.gamma() * l).exp();
        }
        Ok(())
    }
}

fn registry() -> &'static BTreeMap<&'static str, Box<dyn MomentSampler>> {
    static REG: OnceLock<BTreeMap<&'static str, Box<dyn MomentSampler>>> = OnceLock::new();
    REG.get_or_init(|| {
        let all: Vec<Box<dyn MomentSampler>> = vec![Box::new(HaarSampler), Box::new(BoundarySampler), Box::new(LogdetSampler)];
        all.into_iter().map(|s| (s.name(), s)).collect()
    })
}

pub fn sampler(name: &str) -> Result<&'static dyn MomentSampler> {
    registry()
        .get(name)
        .map(|b| b.as_ref())
        .ok_or_else(|| Error::InvalidParameter(format!("unknown sampler '{name}'")))
}

pub fn sampler_names() -> Vec<&'static str> {
    registry().keys().copied().collect()
}

/// Monte Carlo estimates for several queries sharing each draw.
pub fn mc_moment_batch_with(
    sampler: &dyn MomentSampler,
    spec: &EnsembleSpec,
    queries: &[MomentQuery],
    n_samples: u64,
    seed: u64,
) -> Result<Vec<MCEstimate>> {
    for q in queries {
        sampler.check(spec, q)?;
    }
    // order zero is exactly one; skip the draws if nothing else is asked
    if queries.iter().all(|q| q.order.gamma() == 0.0) {
        return Ok(queries.iter().map(|_| MCEstimate { mean: 1.0, stderr: 0.0, n_samples, seed }).collect());
    }
    let m = parallel_moments(n_samples, seed, queries.len(), |rng, out| sampler.draw(spec, queries, rng, out))?;
    Ok(m.iter().map(|m| m.estimate(seed)).collect())
}

pub fn mc_moment_batch(spec: &EnsembleSpec, queries: &[MomentQuery], n_samples: u64, seed: u64) -> Result<Vec<MCEstimate>> {
    mc_moment_batch_with(&HaarSampler, spec, queries, n_samples, seed)
}

/// Monte Carlo estimate of one moment from Haar truncations.
pub fn mc_moment(spec: &EnsembleSpec, query: &MomentQuery, n_samples: u64, seed: u64) -> Result<MCEstimate> {
    Ok(mc_moment_batch(spec, std::slice::from_ref(query), n_samples, seed)?[0])
}

/// `E stat^gamma` from Beta-product boundary draws, with the statistic in
/// the natural determinant of each class.
pub fn bhny_moment(spec: &EnsembleSpec, gamma: f64, n_samples: u64, seed: u64) -> Result<MCEstimate> {
    let order = MomentOrder::Real(if spec.beta() == Beta::Symplectic { 2.0 * gamma } else { gamma });
    let q = MomentQuery::new(order, Complex64::new(1.0, 0.0));
    Ok(mc_moment_batch_with(&BoundarySampler, spec, &[q], n_samples, seed)?[0])
}
