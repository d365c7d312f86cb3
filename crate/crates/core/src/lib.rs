#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::should_implement_trait)]

pub mod asymptotics;
pub mod engine;
pub mod ensemble;
pub mod error;
pub mod partitions;
pub mod quadrature;
pub mod sampler;
pub mod special;
pub mod validation;

pub use ensemble::{Beta, EnsembleSpec, Estimate, MomentOrder, MomentQuery};
pub use error::{Error, Result};
