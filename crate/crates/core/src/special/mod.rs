//! Scalar special functions and closed-form Gamma products.

pub mod cumulants;
pub mod gamma;
pub mod products;
pub mod sum;

pub use cumulants::logdet_cumulants;
pub use gamma::{digamma, ln_gamma, normal_cdf, polygamma, trigamma};
pub use products::{
    boundary_moment, gamma_limit_mgf, haar_group_moment, logdet_mgf, logdet_mgf_rearranged, selberg_const,
    skn_const, GammaProductValue, HaarGroup,
};
