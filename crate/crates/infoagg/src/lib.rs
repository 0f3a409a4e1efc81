//! Multiplicative fusion of probability distributions over finite
//! populations.
//!
//! The core operation multiplies two densities pointwise and renormalizes —
//! the unweighted logarithmic opinion pool. Over full-support distributions
//! on a fixed finite population it forms an Abelian group: uniform identity,
//! reciprocal-weight inverses, and order-free composition. On top of the
//! group sit:
//!
//! - parametric closed forms for Gaussians and a grid fallback for other
//!   continuous densities ([`GaussianDistribution`], [`GridDensity`]);
//! - aggregation with sets (conditioning), with evidence (via abduction),
//!   and across forecasts sharing a prior ([`extensions`]);
//! - a finite-population causal engine with distribution-consistent
//!   counterfactuals, evaluated by exact enumeration ([`disco`]);
//! - the closed-form solution of KL-anchored reward maximization, read as
//!   policy fusion ([`dpo`]).
//!
//! Everything is immutable after construction and all operations are pure,
//! so values can be shared and used freely across threads.
//!
//! See the crate examples for one runnable walkthrough per capability, and
//! [`cli`] for the file-based command-line front end.

pub mod cli;
pub mod continuous;
pub mod disco;
pub mod dpo;
pub mod error;
pub mod extensions;
pub mod group;
pub mod io;
pub mod population;

pub use continuous::{GaussianDistribution, GridDensity};
pub use error::{Error, Result};
pub use group::{aggregate, aggregate_many, gaussian_aggregate, grid_aggregate, inverse, power};
pub use population::{DiscreteDistribution, FinitePopulation};

#[cfg(test)]
mod tests {
    fn assert_send_sync<T: Send + Sync>() {}

    #[test]
    fn values_cross_threads() {
        assert_send_sync::<crate::FinitePopulation>();
        assert_send_sync::<crate::DiscreteDistribution>();
        assert_send_sync::<crate::GaussianDistribution>();
        assert_send_sync::<crate::GridDensity>();
        assert_send_sync::<crate::disco::DiscoModel>();
        assert_send_sync::<crate::dpo::Policy>();
    }
}
