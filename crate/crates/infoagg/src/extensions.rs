//! Aggregation beyond plain distributions: with sets, with evidence traces,
//! and across forecasts sharing a common prior.
//!
//! A set enters the operator as the uniform distribution on its members, so
//! aggregating with a set is exactly conditioning. Evidence enters through
//! abduction (the posterior over units it induces). A shared prior `S` is
//! removed through its group inverse `S*`: the pooled forecast
//!
//! ```text
//! S ⊎ (F1 ⊎ S*) ⊎ ... ⊎ (Fn ⊎ S*)  ∝  s(u)^(1-n) · Π f_i(u)
//! ```
//!
//! counts the prior once instead of n times.

use crate::disco::{DiscoModel, Evidence};
use crate::error::{Error, Result};
use crate::group::{aggregate, inverse};
use crate::population::{DiscreteDistribution, FinitePopulation};

/// A non-empty subset of a population's units.
#[derive(Debug, Clone)]
pub struct UnitSet {
    population: FinitePopulation,
    members: Vec<usize>,
}

impl UnitSet {
    /// Build from member labels. Duplicates are collapsed; an unknown label
    /// or an empty member list is an error.
    pub fn new<I, S>(population: &FinitePopulation, members: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut indices: Vec<usize> = members
            .into_iter()
            .map(|label| {
                population
                    .index_of(label.as_ref())
                    .ok_or_else(|| Error::UnknownUnit(label.as_ref().to_string()))
            })
            .collect::<Result<_>>()?;
        indices.sort_unstable();
        indices.dedup();
        if indices.is_empty() {
            return Err(Error::EmptyUnitSet);
        }
        Ok(Self {
            population: population.clone(),
            members: indices,
        })
    }

    pub fn population(&self) -> &FinitePopulation {
        &self.population
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn member_indices(&self) -> &[usize] {
        &self.members
    }
}

/// The uniform distribution supported on the set's members.
pub fn set_to_distribution(a: &UnitSet) -> DiscreteDistribution {
    let lw = -(a.len() as f64).ln();
    let mut raw = vec![f64::NEG_INFINITY; a.population().len()];
    for &i in a.member_indices() {
        raw[i] = lw;
    }
    DiscreteDistribution::normalize(&raw, a.population()).expect("set is non-empty")
}

/// `x ⊎ A`: aggregation with the uniform distribution on `A`, which equals
/// conditioning `x` on membership in `A`.
pub fn aggregate_with_set(x: &DiscreteDistribution, a: &UnitSet) -> Result<DiscreteDistribution> {
    aggregate(x, &set_to_distribution(a))
}

/// Aggregation of two evidence traces: the aggregate of the posteriors each
/// induces over the model's units.
pub fn aggregate_evidence(
    model: &DiscoModel,
    e1: &Evidence,
    e2: &Evidence,
) -> Result<DiscreteDistribution> {
    aggregate(&model.abduct(e1)?, &model.abduct(e2)?)
}

/// A full-support prior together with its cached group inverse.
#[derive(Debug, Clone)]
pub struct PriorContext {
    prior: DiscreteDistribution,
    inverse: DiscreteDistribution,
}

impl PriorContext {
    /// Caches and validates the inverse up front; fails with
    /// [`Error::NotFullSupport`] when the prior has a zero-probability unit.
    pub fn new(prior: DiscreteDistribution) -> Result<Self> {
        let inv = inverse(&prior)?;
        debug_assert!(
            aggregate(&prior, &inv)
                .unwrap()
                .total_variation(&DiscreteDistribution::uniform(prior.population()))
                .unwrap()
                <= 1e-9
        );
        Ok(Self {
            prior,
            inverse: inv,
        })
    }

    pub fn prior(&self) -> &DiscreteDistribution {
        &self.prior
    }

    pub fn inverse(&self) -> &DiscreteDistribution {
        &self.inverse
    }
}

/// `y ⊎ S*`: strip the prior back out of a total, so that re-aggregating the
/// prior recovers `y`.
pub fn remove_prior(y: &DiscreteDistribution, ctx: &PriorContext) -> Result<DiscreteDistribution> {
    aggregate(y, ctx.inverse())
}

/// Pool `n` forecasts that all share the prior `S`:
/// result `∝ s(u)^(1-n) · Π_i f_i(u)`.
///
/// One forecast passes through unchanged; with a uniform prior this is plain
/// n-ary aggregation. Computed in a single pass with one normalization.
///
/// # Panics
///
/// Panics when `forecasts` is empty.
pub fn forecast_aggregate_with_prior(
    forecasts: &[DiscreteDistribution],
    ctx: &PriorContext,
) -> Result<DiscreteDistribution> {
    assert!(
        !forecasts.is_empty(),
        "forecast aggregation requires at least one forecast"
    );
    let population = ctx.prior().population();
    let prior_exponent = 1.0 - forecasts.len() as f64;
    let mut raw: Vec<f64> = ctx
        .prior()
        .log_weights()
        .iter()
        .map(|s| prior_exponent * s)
        .collect();
    for f in forecasts {
        if !f.population().same_as(population) {
            return Err(Error::PopulationMismatch);
        }
        for (acc, w) in raw.iter_mut().zip(f.log_weights()) {
            *acc += w;
        }
    }
    DiscreteDistribution::normalize(&raw, population)
}
