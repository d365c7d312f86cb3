//! Moment engines behind one interface, selected by name.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::ensemble::{Beta, EnsembleSpec, Estimate, MomentQuery};
use crate::error::{Error, Result};
use crate::partitions::series_value;
use crate::quadrature::{duality_moment, QuadratureSpec};
use crate::sampler::{mc_moment_batch_with, sampler};
use crate::special::{boundary_moment, logdet_mgf};

/// Settings shared by all engines; each reads what it needs.
#[derive(Debug, Clone, PartialEq)]
pub struct EngineOptions {
    pub quadrature: QuadratureSpec,
    pub mc_samples: u64,
    pub seed: u64,
    pub sampler: String,
}

impl Default for EngineOptions {
    fn default() -> Self {
        Self { quadrature: QuadratureSpec::default(), mc_samples: 200_000, seed: 1, sampler: "haar".into() }
    }
}

pub trait MomentEngine: Send + Sync {
    fn name(&self) -> &'static str;
    fn estimate(&self, spec: &EnsembleSpec, query: &MomentQuery, opts: &EngineOptions) -> Result<Estimate>;
}

/// Partition series: exact polynomials for integer orders.
pub struct ExactEngine;
/// k-fold duality integral.
pub struct DualityEngine;
/// Gamma products at `|x| = 1` and at `x = 0`.
pub struct ClosedFormEngine;
/// Monte Carlo through a registered sampler.
pub struct MonteCarloEngine;

impl MomentEngine for ExactEngine {
    fn name(&self) -> &'static str {
        "exact"
    }

    fn estimate(&self, spec: &EnsembleSpec, query: &MomentQuery, _: &EngineOptions) -> Result<Estimate> {
        let s = series_value(spec, query)?;
        if query.order.as_integer().is_some() {
            return Ok(Estimate::exact(s.value, "exact"));
        }
        if s.non_convergent {
            return Err(Error::ConvergenceDomain(format!("shell ratio {} at weight cap {}", s.shell_ratio, s.weight_cap)));
        }
        Ok(Estimate { value: s.value, stderr: Some(s.tail), n_samples: None, method: format!("series/cap={}", s.weight_cap) })
    }
}

impl MomentEngine for DualityEngine {
    fn name(&self) -> &'static str {
        "duality"
    }

    fn estimate(&self, spec: &EnsembleSpec, query: &MomentQuery, opts: &EngineOptions) -> Result<Estimate> {
        query.validate(spec.beta())?;
        let k = query
            .order
            .as_integer()
            .ok_or_else(|| Error::InvalidParameter("the duality integral needs an integer order k".into()))?;
        duality_moment(spec, k, query.x, &opts.quadrature)
    }
}

impl MomentEngine for ClosedFormEngine {
    fn name(&self) -> &'static str {
        "closed-form"
    }

    fn estimate(&self, spec: &EnsembleSpec, query: &MomentQuery, _: &EngineOptions) -> Result<Estimate> {
        query.validate(spec.beta())?;
        let r = query.x.norm();
        if r == 0.0 {
            return Ok(Estimate::exact(logdet_mgf(spec, query.order.gamma())?.value(), "closed-form/origin"));
        }
        if (r - 1.0).abs() <= 1e-12 {
            let g = query.order.det_exponent(spec.beta());
            let theta = query.x.arg();
            let theta = if spec.beta() == Beta::Orthogonal && query.x.re < 0.0 { std::f64::consts::PI } else { theta };
            return Ok(Estimate::exact(boundary_moment(spec, g, theta)?.value(), "closed-form/boundary"));
        }
        Err(Error::Domain(format!("closed forms exist only at x = 0 and |x| = 1, got |x| = {r}")))
    }
}

impl MomentEngine for MonteCarloEngine {
    fn name(&self) -> &'static str {
        "mc"
    }

    fn estimate(&self, spec: &EnsembleSpec, query: &MomentQuery, opts: &EngineOptions) -> Result<Estimate> {
        let s = sampler(&opts.sampler)?;
        let e = mc_moment_batch_with(s, spec, std::slice::from_ref(query), opts.mc_samples, opts.seed)?[0];
        Ok(Estimate { value: e.mean, stderr: Some(e.stderr), n_samples: Some(e.n_samples), method: format!("mc/{}", s.name()) })
    }
}

fn registry() -> &'static BTreeMap<&'static str, Box<dyn MomentEngine>> {
    static REG: OnceLock<BTreeMap<&'static str, Box<dyn MomentEngine>>> = OnceLock::new();
    REG.get_or_init(|| {
        let all: Vec<Box<dyn MomentEngine>> =
            vec![Box::new(ExactEngine), Box::new(DualityEngine), Box::new(ClosedFormEngine), Box::new(MonteCarloEngine)];
        all.into_iter().map(|e| (e.name(), e)).collect()
    })
}

pub fn engine(name: &str) -> Result<&'static dyn MomentEngine> {
    registry()
        .get(name)
        .map(|b| b.as_ref())
        .ok_or_else(|| Error::InvalidParameter(format!("unknown engine '{name}'; known: {}", engine_names().join(", "))))
}

pub fn engine_names() -> Vec<&'static str> {
    registry().keys().copied().collect()
}
