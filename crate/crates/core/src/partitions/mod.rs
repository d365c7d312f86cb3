//! Partitions, Jack polynomials at the identity and the terminating
//! hypergeometric series for even moments.

pub mod jack;
pub mod partition;
pub mod series;

pub use jack::{gen_pochhammer, jack_dprime, jack_dprime_padded, jack_identity_value};
pub use partition::{enumerate_partitions, Partition, WeightShell};
pub use series::{exact_moment, noninteger_moment, series_value, SeriesEstimate, SeriesPolynomial, DEFAULT_WEIGHT_CAP};
