//! Finite-population structural causal models with distribution-consistent
//! counterfactuals, evaluated by exact enumeration.
//!
//! A model is a tuple of a unit-selection population `U` (uniform by
//! default), finite exogenous noise `E` independent of `U`, endogenous
//! variables `V`, and per-unit deterministic mechanisms
//! `v_i <- f_i(pa_i, e_i; u)`.
//!
//! An intervention `do(x)` replaces the mechanisms of the intervened
//! variables with constants and attaches a *fresh copy* of the noise with
//! the same distribution. Counterfactual probabilities therefore condition
//! on nothing: observing an outcome under the factual noise says nothing
//! about the independent counterfactual copy, only about which unit we are
//! looking at.
//!
//! Valuations are organized in three layers, all computed by summing noise
//! probability over instantiations consistent with the queried outcomes:
//!
//! - Layer 1 `P(y; u)` — observational, factual noise only;
//! - Layer 2 `P(y_x; u)` — one intervention regime, one noise copy;
//! - Layer 3 `P(y_x, ..., z_w; u)` — several regimes, one independent noise
//!   copy per distinct regime, enumerated over the product space.
//!
//! Population-level answers follow the abduction / valuation / reduction
//! pattern: infer `P(u|e)` from the evidence, value each unit, and average.

mod model;
mod models;
mod valuation;

pub use model::{
    DiscoModel, DiscoModelBuilder, EndogenousVariable, NoiseVariable, ENUMERATION_BUDGET,
};
pub use models::{build_incentive_model, build_reference_model, simulate_incentive_csv};

use rand::SeedableRng;

use crate::error::{Error, Result};
use crate::group::aggregate;
use crate::population::DiscreteDistribution;

/// A partial assignment of endogenous variables to values, by label.
///
/// Serves both as an observed evidence trace (e.g. `{T=1, Y=0}`) and as the
/// outcome pattern a valuation asks about.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Assignment {
    pairs: Vec<(String, String)>,
}

/// An observed trace of endogenous variables.
pub type Evidence = Assignment;

impl Assignment {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Add one `variable = value` pair.
    pub fn with(mut self, variable: impl Into<String>, value: impl Into<String>) -> Self {
        self.pairs.push((variable.into(), value.into()));
        self
    }

    /// Parse `"T=1,Y=0"` style text.
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = Self::empty();
        let trimmed = text.trim();
        if trimmed.is_empty() {
            return Ok(out);
        }
        for part in trimmed.split(',') {
            let (var, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected `var=value`, got `{part}`")))?;
            let var = var.trim();
            let value = value.trim();
            if var.is_empty() || value.is_empty() {
                return Err(Error::Parse(format!("expected `var=value`, got `{part}`")));
            }
            if out.pairs.iter().any(|(v, _)| v == var) {
                return Err(Error::Parse(format!("variable `{var}` assigned twice")));
            }
            out.pairs.push((var.to_string(), value.to_string()));
        }
        Ok(out)
    }

    pub fn pairs(&self) -> &[(String, String)] {
        &self.pairs
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn value_of(&self, variable: &str) -> Option<&str> {
        self.pairs
            .iter()
            .find(|(v, _)| v == variable)
            .map(|(_, val)| val.as_str())
    }
}

/// A `do(·)` intervention: constants forced onto a set of variables.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Intervention {
    assignments: Assignment,
}

impl Intervention {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn with(mut self, variable: impl Into<String>, value: impl Into<String>) -> Self {
        self.assignments = self.assignments.with(variable, value);
        self
    }

    pub fn from_assignment(assignments: Assignment) -> Self {
        Self { assignments }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(Self {
            assignments: Assignment::parse(text)?,
        })
    }

    pub fn assignments(&self) -> &Assignment {
        &self.assignments
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }
}

/// A joint counterfactual question: a list of `(variable, regime)` targets,
/// where targets sharing a regime share one noise copy and distinct regimes
/// get independent copies.
#[derive(Debug, Clone, Default)]
pub struct CounterfactualQuery {
    targets: Vec<(String, Intervention)>,
}

impl CounterfactualQuery {
    pub fn new() -> Self {
        Self::default()
    }

    /// Ask about `variable` under the given intervention regime.
    pub fn with_target(mut self, variable: impl Into<String>, regime: Intervention) -> Self {
        self.targets.push((variable.into(), regime));
        self
    }

    pub fn targets(&self) -> &[(String, Intervention)] {
        &self.targets
    }
}

/// Fuse a campaign-level treatment prior with a per-unit treatment policy
/// and draw one treatment from the combined distribution.
///
/// Both distributions live on the same treatment-domain population; the draw
/// uses a deterministic generator seeded with `seed`.
pub fn allocate_treatment(
    prior_policy: &DiscreteDistribution,
    unit_policy: &DiscreteDistribution,
    seed: u64,
) -> Result<String> {
    let combined = aggregate(prior_policy, unit_policy)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    Ok(combined.sample(&mut rng).to_string())
}
