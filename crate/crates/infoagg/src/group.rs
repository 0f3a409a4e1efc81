//! The multiplicative aggregation operator and its Abelian-group surface.
//!
//! Aggregating two distributions multiplies their densities pointwise and
//! renormalizes:
//!
//! ```text
//! (p1 ⊎ p2)(u) = p1(u) p2(u) / C,    C = Σ_u p1(u) p2(u)
//! ```
//!
//! Over the full-support distributions on a fixed finite population this is
//! an Abelian group: the uniform distribution is the identity, and the
//! inverse of `p` has weights proportional to `1/p(u)`. A vanishing `C`
//! (disjoint supports) means the aggregate does not exist and is reported as
//! [`Error::EmptySupport`] rather than smoothed away.
//!
//! The same operation on Gaussian densities stays Gaussian with
//! precision-weighted parameters, and on grid densities it reduces to a
//! pointwise log-density sum with trapezoidal renormalization.

use crate::continuous::{GaussianDistribution, GridDensity};
use crate::error::{Error, Result};
use crate::population::DiscreteDistribution;

/// `p1 ⊎ p2`: entrywise log-weight sums, renormalized.
///
/// The support of the result is the intersection of the operand supports;
/// disjoint supports fail with [`Error::EmptySupport`].
pub fn aggregate(
    p1: &DiscreteDistribution,
    p2: &DiscreteDistribution,
) -> Result<DiscreteDistribution> {
    if !p1.population().same_as(p2.population()) {
        return Err(Error::PopulationMismatch);
    }
    let raw: Vec<f64> = p1
        .log_weights()
        .iter()
        .zip(p2.log_weights())
        .map(|(a, b)| a + b)
        .collect();
    DiscreteDistribution::normalize(&raw, p1.population())
}

/// n-ary aggregation: sums all log-weights and normalizes once at the end.
///
/// Algebraically identical to a left fold of [`aggregate`] (intermediate
/// normalization constants cancel), numerically tighter.
///
/// # Panics
///
/// Panics when `ps` is empty; callers must supply at least one distribution.
pub fn aggregate_many(ps: &[DiscreteDistribution]) -> Result<DiscreteDistribution> {
    assert!(
        !ps.is_empty(),
        "aggregate_many requires at least one distribution"
    );
    let population = ps[0].population();
    let mut raw = ps[0].log_weights().to_vec();
    for p in &ps[1..] {
        if !p.population().same_as(population) {
            return Err(Error::PopulationMismatch);
        }
        for (acc, w) in raw.iter_mut().zip(p.log_weights()) {
            *acc += w;
        }
    }
    DiscreteDistribution::normalize(&raw, population)
}

/// The group inverse: weights proportional to reciprocal probabilities,
/// so that `p ⊎ inverse(p)` is uniform.
///
/// Defined only for full-support `p`; a unit with zero probability has no
/// reciprocal weight and the call fails with [`Error::NotFullSupport`].
pub fn inverse(p: &DiscreteDistribution) -> Result<DiscreteDistribution> {
    if !p.has_full_support() {
        return Err(Error::NotFullSupport);
    }
    let raw: Vec<f64> = p.log_weights().iter().map(|w| -w).collect();
    DiscreteDistribution::normalize(&raw, p.population())
}

/// Iterated aggregation: `p ⊎ p ⊎ ... ⊎ p` (k times), with `k = 0` giving
/// the uniform identity and negative `k` going through the inverse.
///
/// `k <= 0` requires full support.
pub fn power(p: &DiscreteDistribution, k: i32) -> Result<DiscreteDistribution> {
    if k <= 0 && !p.has_full_support() {
        return Err(Error::NotFullSupport);
    }
    if k == 0 {
        return Ok(DiscreteDistribution::uniform(p.population()));
    }
    let raw: Vec<f64> = p.log_weights().iter().map(|w| f64::from(k) * w).collect();
    DiscreteDistribution::normalize(&raw, p.population())
}

/// The Gaussian closed form: multiplying two normal densities and
/// renormalizing yields a normal with precision-weighted parameters,
///
/// ```text
/// 1/v = 1/v1 + 1/v2,    m = v (m1/v1 + m2/v2)
/// ```
pub fn gaussian_aggregate(
    g1: &GaussianDistribution,
    g2: &GaussianDistribution,
) -> GaussianDistribution {
    let precision = 1.0 / g1.variance() + 1.0 / g2.variance();
    let variance = 1.0 / precision;
    let mean = variance * (g1.mean() / g1.variance() + g2.mean() / g2.variance());
    GaussianDistribution::new(mean, variance)
        .expect("product of valid Gaussians is a valid Gaussian")
}

/// Pointwise log-density sum on a shared grid, renormalized by trapezoidal
/// quadrature. Fails with [`Error::GridMismatch`] on different grids and
/// [`Error::EmptySupport`] when the product integrates to zero.
pub fn grid_aggregate(d1: &GridDensity, d2: &GridDensity) -> Result<GridDensity> {
    if !d1.same_grid(d2) {
        return Err(Error::GridMismatch);
    }
    let raw: Vec<f64> = d1
        .log_density_values()
        .iter()
        .zip(d2.log_density_values())
        .map(|(a, b)| a + b)
        .collect();
    GridDensity::from_log_density(d1.lower(), d1.upper(), raw)
}
