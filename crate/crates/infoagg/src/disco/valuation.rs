//! Layer 1/2/3 valuations, abduction, and the population-level reduction,
//! all by exact enumeration of the finite noise space.

use crate::error::{Error, Result};
use crate::population::DiscreteDistribution;

use super::model::{DiscoModel, ENUMERATION_BUDGET};
use super::{Assignment, CounterfactualQuery, Evidence, Intervention};

impl DiscoModel {
    /// Layer 1: observational probability `P(values; u)`, the total noise
    /// probability of instantiations whose outputs match the (full or
    /// partial) assignment.
    pub fn layer1(&self, unit: &str, values: &Assignment) -> Result<f64> {
        self.layer2(unit, &Intervention::empty(), values)
    }

    /// Layer 2: interventional probability `P(values_x; u)`. Mechanisms of
    /// intervened variables are replaced by constants; the counterfactual
    /// noise copy has the same distribution as the factual one, so the sum
    /// runs over the same instantiations.
    pub fn layer2(
        &self,
        unit: &str,
        intervention: &Intervention,
        values: &Assignment,
    ) -> Result<f64> {
        let unit = self.unit_index(unit)?;
        let overrides = self.resolve_intervention(intervention)?;
        let targets = self.resolve_assignment(values)?;
        Ok(self.regime_probability(unit, &overrides, &targets))
    }

    /// Layer 3: joint counterfactual probability across intervention
    /// regimes, `P(y_x, ..., z_w; u)`.
    ///
    /// Each *distinct* regime gets an independent copy of the noise with the
    /// factual distribution; targets sharing a regime share its copy. The
    /// sum enumerates the full product of the per-regime noise spaces and
    /// adds the joint probability of every instantiation that matches all
    /// targets. `values[i]` is the queried value for `query.targets()[i]`.
    pub fn layer3(&self, unit: &str, query: &CounterfactualQuery, values: &[&str]) -> Result<f64> {
        if values.len() != query.targets().len() {
            return Err(Error::InvalidQuery(format!(
                "{} values supplied for {} targets",
                values.len(),
                query.targets().len()
            )));
        }
        let unit = self.unit_index(unit)?;

        // Group targets by regime, preserving first-appearance order.
        struct Regime<'q> {
            intervention: &'q Intervention,
            overrides: Vec<Option<usize>>,
            targets: Vec<(usize, usize)>,
        }
        let mut regimes: Vec<Regime<'_>> = Vec::new();
        for ((variable, regime), value) in query.targets().iter().zip(values) {
            let var = self
                .variable_index(variable)
                .ok_or_else(|| Error::UnknownVariable(variable.clone()))?;
            let val = self.value_index(var, value)?;
            match regimes.iter_mut().find(|r| r.intervention == regime) {
                Some(r) => r.targets.push((var, val)),
                None => regimes.push(Regime {
                    intervention: regime,
                    overrides: self.resolve_intervention(regime)?,
                    targets: vec![(var, val)],
                }),
            }
        }
        if regimes.is_empty() {
            return Ok(1.0);
        }

        let atoms = self
            .noise_space_size()
            .checked_pow(regimes.len() as u32)
            .unwrap_or(u128::MAX);
        if atoms > ENUMERATION_BUDGET {
            return Err(Error::QueryTooLarge {
                atoms,
                budget: ENUMERATION_BUDGET,
            });
        }

        if regimes.len() == 1 {
            return Ok(self.regime_probability(unit, &regimes[0].overrides, &regimes[0].targets));
        }

        // Cache, per regime, the match flag of every noise instantiation;
        // the weights are shared since every copy has the same distribution.
        let mut weights: Vec<f64> = Vec::new();
        let mut matches: Vec<Vec<bool>> = vec![Vec::new(); regimes.len()];
        let mut iter = self.noise_instantiations();
        while let Some((noise_values, weight)) = iter.next_instantiation() {
            weights.push(weight);
            for (r, regime) in regimes.iter().enumerate() {
                let values = self.evaluate(unit, noise_values, &regime.overrides);
                matches[r].push(regime.targets.iter().all(|&(var, val)| values[var] == val));
            }
        }

        // Enumerate the product space (e_x, ..., e_w) with an odometer.
        let size = weights.len();
        let mut digits = vec![0usize; regimes.len()];
        let mut total = 0.0;
        loop {
            let mut joint = 1.0;
            let mut all_match = true;
            for (r, &k) in digits.iter().enumerate() {
                if !matches[r][k] {
                    all_match = false;
                    break;
                }
                joint *= weights[k];
            }
            if all_match {
                total += joint;
            }
            let mut advanced = false;
            for d in digits.iter_mut().rev() {
                if *d + 1 < size {
                    *d += 1;
                    advanced = true;
                    break;
                }
                *d = 0;
            }
            if !advanced {
                break;
            }
        }
        Ok(total)
    }

    /// The three readings of "the probability that the outcome would be `y`
    /// under `do(x)`" at one unit:
    ///
    /// 1. `P(y_x | e; u)` — counterfactual conditioned on the factual trace,
    /// 2. `P(y_x; u)` — plain interventional probability,
    /// 3. `P(y | x; u)` — observational conditional.
    ///
    /// Because the counterfactual noise copy is independent of the factual
    /// one given the unit, the three coincide; this computes each through
    /// its own route and returns the triple for inspection.
    ///
    /// `evidence` must contain the intervened variable at its intervention
    /// value and must have positive likelihood at the unit.
    pub fn individual_valuation_check(
        &self,
        unit: &str,
        intervention: &Intervention,
        outcome: (&str, &str),
        evidence: &Evidence,
    ) -> Result<(f64, f64, f64)> {
        let pairs = intervention.assignments().pairs();
        if pairs.len() != 1 {
            return Err(Error::InvalidQuery(format!(
                "expected an intervention on exactly one variable, got {}",
                pairs.len()
            )));
        }
        let (x_var, x_val) = &pairs[0];
        match evidence.value_of(x_var) {
            Some(observed) if observed == x_val => {}
            _ => {
                return Err(Error::InvalidQuery(format!(
                    "evidence must contain {x_var}={x_val}"
                )))
            }
        }

        let unit_idx = self.unit_index(unit)?;
        let factual = self.resolve_intervention(&Intervention::empty())?;
        let intervened = self.resolve_intervention(intervention)?;
        let evidence_targets = self.resolve_assignment(evidence)?;
        let outcome_var = self
            .variable_index(outcome.0)
            .ok_or_else(|| Error::UnknownVariable(outcome.0.to_string()))?;
        let outcome_target = (outcome_var, self.value_index(outcome_var, outcome.1)?);

        let p_evidence = self.regime_probability(unit_idx, &factual, &evidence_targets);
        if p_evidence == 0.0 {
            return Err(Error::ZeroEvidenceLikelihood);
        }

        // P(y_x | e; u): joint over the independent (factual, counterfactual)
        // noise copies, divided by the evidence probability.
        let mut joint = 0.0;
        let mut outer = self.noise_instantiations();
        while let Some((factual_noise, w_f)) = outer.next_instantiation() {
            let observed = self.evaluate(unit_idx, factual_noise, &factual);
            if !evidence_targets.iter().all(|&(v, val)| observed[v] == val) {
                continue;
            }
            let mut inner = self.noise_instantiations();
            while let Some((cf_noise, w_c)) = inner.next_instantiation() {
                let cf = self.evaluate(unit_idx, cf_noise, &intervened);
                if cf[outcome_target.0] == outcome_target.1 {
                    joint += w_f * w_c;
                }
            }
        }
        let conditioned = joint / p_evidence;

        // P(y_x; u)
        let interventional = self.regime_probability(unit_idx, &intervened, &[outcome_target]);

        // P(y | x; u)
        let x_resolved = self.resolve_assignment(&Assignment::empty().with(x_var, x_val))?;
        let p_x = self.regime_probability(unit_idx, &factual, &x_resolved);
        let mut joint_targets = x_resolved;
        joint_targets.push(outcome_target);
        let p_xy = self.regime_probability(unit_idx, &factual, &joint_targets);
        let observational = p_xy / p_x;

        Ok((conditioned, interventional, observational))
    }

    /// Abduction: the posterior `P(u | e) ∝ P(e; u) P(u)` over units, with
    /// the uniform default prior.
    pub fn abduct(&self, evidence: &Evidence) -> Result<DiscreteDistribution> {
        let raw = self.log_likelihoods(evidence)?;
        DiscreteDistribution::normalize(&raw, self.population())
    }

    /// Abduction against a non-uniform prior, combined multiplicatively.
    pub fn abduct_with_prior(
        &self,
        evidence: &Evidence,
        prior: &DiscreteDistribution,
    ) -> Result<DiscreteDistribution> {
        if !prior.population().same_as(self.population()) {
            return Err(Error::PopulationMismatch);
        }
        let mut raw = self.log_likelihoods(evidence)?;
        for (w, p) in raw.iter_mut().zip(prior.log_weights()) {
            *w += p;
        }
        DiscreteDistribution::normalize(&raw, self.population())
    }

    fn log_likelihoods(&self, evidence: &Evidence) -> Result<Vec<f64>> {
        let factual = self.resolve_intervention(&Intervention::empty())?;
        let targets = self.resolve_assignment(evidence)?;
        Ok((0..self.population().len())
            .map(|u| self.regime_probability(u, &factual, &targets).ln())
            .collect())
    }

    /// Population-level valuation `P(Y(x)=y | e)` by abduction, per-unit
    /// interventional valuation, and the reduction sum
    /// `Σ_u P(y_x; u) P(u|e)`.
    pub fn population_valuation(
        &self,
        intervention: &Intervention,
        outcome: (&str, &str),
        evidence: &Evidence,
    ) -> Result<f64> {
        let posterior = self.abduct(evidence)?;
        let overrides = self.resolve_intervention(intervention)?;
        let outcome_var = self
            .variable_index(outcome.0)
            .ok_or_else(|| Error::UnknownVariable(outcome.0.to_string()))?;
        let target = (outcome_var, self.value_index(outcome_var, outcome.1)?);
        let mut total = 0.0;
        for u in 0..self.population().len() {
            let p_u = posterior.prob(u);
            if p_u > 0.0 {
                total += self.regime_probability(u, &overrides, &[target]) * p_u;
            }
        }
        Ok(total)
    }

    /// Single-regime enumeration: total noise probability of instantiations
    /// whose (possibly intervened) outputs match every target.
    fn regime_probability(
        &self,
        unit: usize,
        overrides: &[Option<usize>],
        targets: &[(usize, usize)],
    ) -> f64 {
        let mut total = 0.0;
        let mut iter = self.noise_instantiations();
        while let Some((noise_values, weight)) = iter.next_instantiation() {
            let values = self.evaluate(unit, noise_values, overrides);
            if targets.iter().all(|&(var, val)| values[var] == val) {
                total += weight;
            }
        }
        total
    }
}
