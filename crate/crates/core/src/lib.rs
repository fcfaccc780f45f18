//! Gini coefficients for fat-tailed data, estimated directly from the sample
//! and indirectly through the maximum-likelihood tail exponent, together with
//! the exact finite-sample law of the indirect estimator and a deterministic
//! Monte Carlo harness comparing the two.

pub mod cli;
pub mod direct;
pub mod distributions;
pub mod error;
pub mod experiments;

pub mod numerics;
pub mod tail_ml;

pub use direct::{
    gini_of_union, gini_ordered, gini_pairwise, GiniMethod, GiniResult, Normalization,
};
pub use distributions::{Distribution, Family, LomaxSpec, ParetoSpec, Sample, TailDistribution};
pub use error::{Error, Result};
pub use tail_ml::{derived_gini, ml_alpha, DerivedGiniDistribution, ScaleChoice, TailEstimate};
