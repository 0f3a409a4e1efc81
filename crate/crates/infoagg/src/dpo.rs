//! Policy fusion: the closed-form solution of KL-anchored reward
//! maximization, read as an aggregation.
//!
//! Maximizing expected reward under a KL penalty toward a reference policy
//! has the closed-form solution
//!
//! ```text
//! π'(y|x) = π_ref(y|x) · exp(r(x,y)/β) / Z(x)
//! ```
//!
//! which is exactly the multiplicative aggregate of the reference policy
//! with the softmax-of-reward distribution: `π(·|x) = π_ref(·|x) ⊎
//! softmax(r(x,·)/β)`. The temperature β interpolates between exploiting the
//! reward (β → 0 concentrates on the argmax within the reference support)
//! and reproducing the reference policy (β → ∞).
//!
//! [`aggregate_policy`] goes through the group operator; an independent
//! linear-space evaluation of the closed form lives in
//! [`closed_form_policy`] so the two can cross-check each other.

use crate::error::{Error, Result};
use crate::group::aggregate;
use crate::population::{DiscreteDistribution, FinitePopulation};

/// The KL-penalty weight β; strictly positive and finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Temperature {
    beta: f64,
}

impl Temperature {
    pub fn new(beta: f64) -> Result<Self> {
        if !beta.is_finite() || beta <= 0.0 {
            return Err(Error::InvalidTemperature(beta));
        }
        Ok(Self { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// A finite reward table `r(x, y)` over contexts × actions.
#[derive(Debug, Clone)]
pub struct RewardTable {
    contexts: Vec<String>,
    actions: FinitePopulation,
    rewards: Vec<Vec<f64>>,
}

impl RewardTable {
    pub fn new(
        contexts: Vec<String>,
        actions: Vec<String>,
        rewards: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if contexts.is_empty() {
            return Err(Error::InvalidRewards("no contexts".to_string()));
        }
        let actions = FinitePopulation::new(actions)?;
        if rewards.len() != contexts.len() {
            return Err(Error::InvalidRewards(format!(
                "{} reward rows for {} contexts",
                rewards.len(),
                contexts.len()
            )));
        }
        for (i, row) in rewards.iter().enumerate() {
            if row.len() != actions.len() {
                return Err(Error::InvalidRewards(format!(
                    "row {i} has {} entries for {} actions",
                    row.len(),
                    actions.len()
                )));
            }
            if let Some(bad) = row.iter().find(|r| !r.is_finite()) {
                return Err(Error::InvalidRewards(format!(
                    "row {i} contains non-finite reward {bad}"
                )));
            }
        }
        Ok(Self {
            contexts,
            actions,
            rewards,
        })
    }

    pub fn contexts(&self) -> &[String] {
        &self.contexts
    }

    pub fn actions(&self) -> &FinitePopulation {
        &self.actions
    }

    pub fn rewards(&self) -> &[Vec<f64>] {
        &self.rewards
    }

    pub fn context_index(&self, context: &str) -> Result<usize> {
        self.contexts
            .iter()
            .position(|c| c == context)
            .ok_or_else(|| Error::UnknownContext(context.to_string()))
    }
}

/// Per-context action distributions over a shared action population.
#[derive(Debug, Clone)]
pub struct Policy {
    contexts: Vec<String>,
    actions: FinitePopulation,
    rows: Vec<DiscreteDistribution>,
}

impl Policy {
    /// Build from linear-space probability rows, one per context.
    pub fn from_probs(
        contexts: Vec<String>,
        actions: Vec<String>,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if contexts.is_empty() {
            return Err(Error::InvalidProbabilities("no contexts".to_string()));
        }
        if rows.len() != contexts.len() {
            return Err(Error::InvalidProbabilities(format!(
                "{} policy rows for {} contexts",
                rows.len(),
                contexts.len()
            )));
        }
        let actions = FinitePopulation::new(actions)?;
        let rows = rows
            .iter()
            .map(|row| DiscreteDistribution::from_probs(row, &actions))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            contexts,
            actions,
            rows,
        })
    }

    pub fn from_rows(contexts: Vec<String>, rows: Vec<DiscreteDistribution>) -> Result<Self> {
        if rows.is_empty() || rows.len() != contexts.len() {
            return Err(Error::InvalidProbabilities(
                "contexts and rows must be non-empty and aligned".to_string(),
            ));
        }
        let actions = rows[0].population().clone();
        if rows.iter().any(|r| !r.population().same_as(&actions)) {
            return Err(Error::PopulationMismatch);
        }
        Ok(Self {
            contexts,
            actions,
            rows,
        })
    }

    pub fn contexts(&self) -> &[String] {
        &self.contexts
    }

    pub fn actions(&self) -> &FinitePopulation {
        &self.actions
    }

    pub fn rows(&self) -> &[DiscreteDistribution] {
        &self.rows
    }

    pub fn row(&self, context: &str) -> Result<&DiscreteDistribution> {
        let i = self
            .contexts
            .iter()
            .position(|c| c == context)
            .ok_or_else(|| Error::UnknownContext(context.to_string()))?;
        Ok(&self.rows[i])
    }
}

/// The softmax-of-reward distribution `p_r(·|x; β) ∝ exp(r(x,·)/β)`.
/// Always full support, since rewards are finite.
pub fn softmax_reward(
    table: &RewardTable,
    context: &str,
    beta: Temperature,
) -> Result<DiscreteDistribution> {
    let row = &table.rewards[table.context_index(context)?];
    let raw: Vec<f64> = row.iter().map(|r| r / beta.beta()).collect();
    DiscreteDistribution::normalize(&raw, &table.actions)
}

/// Fuse the reference policy with the softmax-of-reward distribution,
/// context by context: `π(·|x) = π_ref(·|x) ⊎ p_r(·|x; β)`.
///
/// The result's support per context equals the reference row's support.
pub fn aggregate_policy(
    ref_policy: &Policy,
    table: &RewardTable,
    beta: Temperature,
) -> Result<Policy> {
    if ref_policy.contexts != table.contexts || !ref_policy.actions.same_as(&table.actions) {
        return Err(Error::PopulationMismatch);
    }
    let rows = ref_policy
        .contexts
        .iter()
        .zip(&ref_policy.rows)
        .map(|(context, row)| aggregate(row, &softmax_reward(table, context, beta)?))
        .collect::<Result<Vec<_>>>()?;
    Policy::from_rows(ref_policy.contexts.clone(), rows)
}

/// Direct linear-space evaluation of
/// `π'(y|x) = π_ref(y|x) · exp(r(x,y)/β) / Z(x)`,
/// sharing no intermediate computation with [`aggregate_policy`] so it can
/// serve as an oracle for it. The exponent is shifted by the row maximum
/// before exponentiation; the shift cancels in `Z(x)`.
pub fn closed_form_policy(
    ref_policy: &Policy,
    table: &RewardTable,
    beta: Temperature,
) -> Result<Policy> {
    if ref_policy.contexts != table.contexts || !ref_policy.actions.same_as(&table.actions) {
        return Err(Error::PopulationMismatch);
    }
    let mut rows = Vec::with_capacity(ref_policy.contexts.len());
    for (row, rewards) in ref_policy.rows.iter().zip(&table.rewards) {
        let shift = rewards
            .iter()
            .map(|r| r / beta.beta())
            .fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = row
            .probs()
            .iter()
            .zip(rewards)
            .map(|(p, r)| p * (r / beta.beta() - shift).exp())
            .collect();
        let z: f64 = weights.iter().sum();
        if z == 0.0 {
            return Err(Error::EmptySupport);
        }
        let probs: Vec<f64> = weights.iter().map(|w| w / z).collect();
        rows.push(DiscreteDistribution::from_probs(
            &probs,
            &ref_policy.actions,
        )?);
    }
    Policy::from_rows(ref_policy.contexts.clone(), rows)
}

/// The most probable action in a context; ties go to the lowest action
/// index.
pub fn argmax_action<'p>(policy: &'p Policy, context: &str) -> Result<&'p str> {
    let row = policy.row(context)?;
    let mut best = 0usize;
    for (i, &w) in row.log_weights().iter().enumerate() {
        if w > row.log_weights()[best] {
            best = i;
        }
    }
    Ok(policy.actions.label(best))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn simple_table(rewards: Vec<Vec<f64>>) -> RewardTable {
        let n = rewards[0].len();
        let actions = (0..n).map(|i| format!("a{i}")).collect();
        let contexts = (0..rewards.len()).map(|i| format!("c{i}")).collect();
        RewardTable::new(contexts, actions, rewards).unwrap()
    }

    fn simple_policy(rows: Vec<Vec<f64>>) -> Policy {
        let n = rows[0].len();
        let actions = (0..n).map(|i| format!("a{i}")).collect();
        let contexts = (0..rows.len()).map(|i| format!("c{i}")).collect();
        Policy::from_probs(contexts, actions, rows).unwrap()
    }

    #[test]
    fn temperature_must_be_positive_and_finite() {
        assert!(Temperature::new(0.0).is_err());
        assert!(Temperature::new(-1.0).is_err());
        assert!(Temperature::new(f64::INFINITY).is_err());
        assert!(Temperature::new(f64::NAN).is_err());
        assert!(Temperature::new(1e-9).is_ok());
    }

    #[test]
    fn softmax_constant_rewards_is_uniform() {
        let table = simple_table(vec![vec![3.0, 3.0, 3.0]]);
        let d = softmax_reward(&table, "c0", Temperature::new(1.0).unwrap()).unwrap();
        for i in 0..3 {
            assert_abs_diff_eq!(d.prob(i), 1.0 / 3.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn softmax_hand_computed() {
        // rewards (0, ln 2) at β = 1: weights (1, 2) -> (1/3, 2/3)
        let table = simple_table(vec![vec![0.0, 2.0_f64.ln()]]);
        let d = softmax_reward(&table, "c0", Temperature::new(1.0).unwrap()).unwrap();
        assert_abs_diff_eq!(d.prob(0), 1.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.prob(1), 2.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn softmax_sharpens_at_low_temperature() {
        let table = simple_table(vec![vec![0.0, 1.0]]);
        let d = softmax_reward(&table, "c0", Temperature::new(1e-6).unwrap()).unwrap();
        assert!(d.prob(0) < 1e-3);
        assert!(d.prob(1) > 1.0 - 1e-3);
    }

    #[test]
    fn softmax_unknown_context() {
        let table = simple_table(vec![vec![0.0, 1.0]]);
        assert_eq!(
            softmax_reward(&table, "nope", Temperature::new(1.0).unwrap()).unwrap_err(),
            Error::UnknownContext("nope".into())
        );
    }

    #[test]
    fn constant_rewards_return_reference() {
        let reference = simple_policy(vec![vec![0.7, 0.2, 0.1]]);
        let table = simple_table(vec![vec![5.0, 5.0, 5.0]]);
        let fused = aggregate_policy(&reference, &table, Temperature::new(2.0).unwrap()).unwrap();
        for i in 0..3 {
            assert_abs_diff_eq!(
                fused.rows()[0].prob(i),
                reference.rows()[0].prob(i),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn uniform_reference_returns_softmax() {
        let reference = simple_policy(vec![vec![0.5, 0.5]]);
        let table = simple_table(vec![vec![1.0, 3.0]]);
        let beta = Temperature::new(1.5).unwrap();
        let fused = aggregate_policy(&reference, &table, beta).unwrap();
        let softmax = softmax_reward(&table, "c0", beta).unwrap();
        for i in 0..2 {
            assert_abs_diff_eq!(fused.rows()[0].prob(i), softmax.prob(i), epsilon = 1e-12);
        }
    }

    #[test]
    fn aggregate_policy_hand_computed() {
        // ref (0.5, 0.5), rewards (0, ln 4), β = 1: ∝ (0.5, 2.0) -> (0.2, 0.8)
        let reference = simple_policy(vec![vec![0.5, 0.5]]);
        let table = simple_table(vec![vec![0.0, 4.0_f64.ln()]]);
        let fused = aggregate_policy(&reference, &table, Temperature::new(1.0).unwrap()).unwrap();
        assert_abs_diff_eq!(fused.rows()[0].prob(0), 0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(fused.rows()[0].prob(1), 0.8, epsilon = 1e-12);
    }

    #[test]
    fn zero_reference_mass_stays_zero() {
        let reference = simple_policy(vec![vec![0.0, 0.4, 0.6]]);
        let table = simple_table(vec![vec![100.0, 0.0, 0.0]]);
        let beta = Temperature::new(1.0).unwrap();
        let fused = aggregate_policy(&reference, &table, beta).unwrap();
        assert_eq!(fused.rows()[0].prob(0), 0.0);
        let closed = closed_form_policy(&reference, &table, beta).unwrap();
        assert_eq!(closed.rows()[0].prob(0), 0.0);
    }

    #[test]
    fn mismatched_contexts_fail() {
        let reference = simple_policy(vec![vec![0.5, 0.5]]);
        let table = RewardTable::new(
            vec!["other".into()],
            vec!["a0".into(), "a1".into()],
            vec![vec![0.0, 1.0]],
        )
        .unwrap();
        assert_eq!(
            aggregate_policy(&reference, &table, Temperature::new(1.0).unwrap()).unwrap_err(),
            Error::PopulationMismatch
        );
    }

    #[test]
    fn beta_limits() {
        let reference = simple_policy(vec![vec![0.3, 0.3, 0.4]]);
        let table = simple_table(vec![vec![0.5, 2.0, 1.0]]);

        // β → ∞ proxy: reference recovered
        let wide = closed_form_policy(&reference, &table, Temperature::new(1e6).unwrap()).unwrap();
        let tv = wide.rows()[0]
            .total_variation(&reference.rows()[0])
            .unwrap();
        assert!(tv < 1e-3, "tv = {tv}");

        // β → 0 proxy: point mass on the reward argmax
        let sharp =
            closed_form_policy(&reference, &table, Temperature::new(1e-6).unwrap()).unwrap();
        assert!(sharp.rows()[0].prob(1) > 1.0 - 1e-3);
        assert_eq!(argmax_action(&sharp, "c0").unwrap(), "a1");
    }

    #[test]
    fn sharpening_is_monotone_in_beta() {
        let reference = simple_policy(vec![vec![0.25, 0.25, 0.5]]);
        let table = simple_table(vec![vec![1.0, 3.0, 2.0]]);
        let mut last = 0.0;
        for beta in [10.0, 1.0, 0.1, 0.01] {
            let fused =
                aggregate_policy(&reference, &table, Temperature::new(beta).unwrap()).unwrap();
            let top = fused.rows()[0].prob(1);
            assert!(top >= last - 1e-12, "β = {beta}: {top} < {last}");
            last = top;
        }
    }

    #[test]
    fn sharp_argmax_respects_reference_support() {
        // the best-rewarded action overall has zero reference mass; the
        // fused argmax is the best-rewarded action among supported ones
        let reference = simple_policy(vec![vec![0.0, 0.5, 0.5]]);
        let table = simple_table(vec![vec![10.0, 1.0, 0.0]]);
        let fused = aggregate_policy(&reference, &table, Temperature::new(0.01).unwrap()).unwrap();
        assert!(fused.rows()[0].prob(1) > 0.99);
        assert_eq!(argmax_action(&fused, "c0").unwrap(), "a1");
    }

    #[test]
    fn argmax_examples() {
        let policy = simple_policy(vec![vec![0.2, 0.8], vec![0.5, 0.5], vec![0.0, 1.0]]);
        assert_eq!(argmax_action(&policy, "c0").unwrap(), "a1");
        // exact tie breaks to the lowest index
        assert_eq!(argmax_action(&policy, "c1").unwrap(), "a0");
        assert_eq!(argmax_action(&policy, "c2").unwrap(), "a1");
        assert!(argmax_action(&policy, "zz").is_err());
    }

    #[test]
    fn closed_form_agrees_on_random_instances() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..200 {
            let n_actions = rng.gen_range(2..=32);
            let n_contexts = rng.gen_range(1..=3);
            let rewards: Vec<Vec<f64>> = (0..n_contexts)
                .map(|_| (0..n_actions).map(|_| rng.gen_range(-5.0..5.0)).collect())
                .collect();
            let rows: Vec<Vec<f64>> = (0..n_contexts)
                .map(|_| {
                    let w: Vec<f64> = (0..n_actions).map(|_| rng.gen_range(0.01..1.0)).collect();
                    let s: f64 = w.iter().sum();
                    w.iter().map(|x| x / s).collect()
                })
                .collect();
            let reference = {
                let actions = (0..n_actions).map(|i| format!("a{i}")).collect();
                let contexts: Vec<String> = (0..n_contexts).map(|i| format!("c{i}")).collect();
                Policy::from_probs(contexts.clone(), actions, rows).unwrap()
            };
            let table = {
                let actions = (0..n_actions).map(|i| format!("a{i}")).collect();
                let contexts = (0..n_contexts).map(|i| format!("c{i}")).collect();
                RewardTable::new(contexts, actions, rewards).unwrap()
            };
            let beta = Temperature::new(10f64.powf(rng.gen_range(-2.0..2.0))).unwrap();
            let a = aggregate_policy(&reference, &table, beta).unwrap();
            let b = closed_form_policy(&reference, &table, beta).unwrap();
            for (ra, rb) in a.rows().iter().zip(b.rows()) {
                for i in 0..n_actions {
                    assert!(
                        (ra.prob(i) - rb.prob(i)).abs() < 1e-10,
                        "β = {}, entry {i}: {} vs {}",
                        beta.beta(),
                        ra.prob(i),
                        rb.prob(i)
                    );
                }
            }
        }
    }

    proptest! {
        #[test]
        fn reward_shift_is_absorbed(
            rewards in proptest::collection::vec(-5.0..5.0f64, 2..8),
            shift in -50.0..50.0f64,
        ) {
            let n = rewards.len();
            let reference = simple_policy(vec![vec![1.0 / n as f64; n]]);
            let beta = Temperature::new(0.7).unwrap();
            let base = aggregate_policy(&reference, &simple_table(vec![rewards.clone()]), beta).unwrap();
            let shifted_rewards: Vec<f64> = rewards.iter().map(|r| r + shift).collect();
            let shifted = aggregate_policy(&reference, &simple_table(vec![shifted_rewards]), beta).unwrap();
            for i in 0..n {
                prop_assert!((base.rows()[0].prob(i) - shifted.rows()[0].prob(i)).abs() < 1e-12);
            }
        }
    }
}
