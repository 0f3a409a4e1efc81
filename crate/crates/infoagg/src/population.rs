//! Finite populations and probability distributions over them.
//!
//! All probability arithmetic happens in log space: a distribution stores one
//! log-weight per unit, with `-inf` standing for exactly zero probability.
//! Normalization subtracts a max-shifted log-sum-exp, so products of many
//! densities never underflow and zero mass stays exactly zero.

use std::collections::HashMap;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};

/// Absolute tolerance on the probability simplex: after construction,
/// `sum_u exp(log_weight[u])` must lie within this distance of 1.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// Renormalization is skipped when the computed log-correction is smaller
/// than this, which makes `normalize` exactly idempotent in log space.
const RENORM_SKIP: f64 = 1e-14;

/// An ordered, finite collection of distinct unit labels.
///
/// Two populations are compatible for aggregation iff their label sequences
/// are identical (same labels, same order). Index-aligned weight vectors
/// need that unambiguous order.
#[derive(Debug, Clone)]
pub struct FinitePopulation {
    inner: Arc<Inner>,
}

#[derive(Debug)]
struct Inner {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl FinitePopulation {
    /// Build a population from distinct labels. Errors on an empty list or a
    /// duplicate label.
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptyPopulation);
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(Self {
            inner: Arc::new(Inner { labels, index }),
        })
    }

    /// Population `{u0, u1, ..., u{n-1}}`.
    pub fn indexed(prefix: &str, n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| format!("{prefix}{i}")))
    }

    pub fn len(&self) -> usize {
        self.inner.labels.len()
    }

    /// Always false: populations hold at least one unit.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn labels(&self) -> &[String] {
        &self.inner.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.inner.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.inner.index.get(label).copied()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.inner.index.contains_key(label)
    }

    /// Label-sequence identity, with a pointer fast path for shared handles.
    pub fn same_as(&self, other: &FinitePopulation) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.labels == other.inner.labels
    }
}

impl PartialEq for FinitePopulation {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl Eq for FinitePopulation {}

/// A probability distribution over a [`FinitePopulation`], stored as
/// log-weights.
///
/// Invariants, enforced at construction:
/// - every entry is finite or `-inf` (never `+inf` or NaN),
/// - the exponentiated weights sum to 1 within [`SUM_TOLERANCE`],
/// - at least one entry is finite (non-empty support).
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    population: FinitePopulation,
    log_weights: Vec<f64>,
}

impl DiscreteDistribution {
    /// Normalize raw log-weights into a valid distribution.
    ///
    /// The normalization constant is computed by a max-shifted log-sum-exp,
    /// so the result is finite whenever any input entry is finite. Entries of
    /// `-inf` stay exactly `-inf`. A correction below float resolution is
    /// skipped, making already-normalized input a fixed point.
    pub fn normalize(raw_log_weights: &[f64], population: &FinitePopulation) -> Result<Self> {
        if raw_log_weights.len() != population.len() {
            return Err(Error::LengthMismatch {
                expected: population.len(),
                got: raw_log_weights.len(),
            });
        }
        for (index, &value) in raw_log_weights.iter().enumerate() {
            if value.is_nan() || value == f64::INFINITY {
                return Err(Error::NonFiniteLogWeight { index, value });
            }
        }
        let log_norm = log_sum_exp(raw_log_weights);
        if log_norm == f64::NEG_INFINITY {
            return Err(Error::EmptySupport);
        }
        let log_weights = if log_norm.abs() < RENORM_SKIP {
            raw_log_weights.to_vec()
        } else {
            raw_log_weights.iter().map(|w| w - log_norm).collect()
        };
        Ok(Self {
            population: population.clone(),
            log_weights,
        })
    }

    /// Build from linear-space probabilities (non-negative, summing to ~1).
    /// Zero entries become `-inf` log-weights; the vector is renormalized.
    pub fn from_probs(probs: &[f64], population: &FinitePopulation) -> Result<Self> {
        for &p in probs {
            if p.is_nan() || p < 0.0 || p == f64::INFINITY {
                return Err(Error::InvalidProbabilities(format!(
                    "entry {p} is not a finite non-negative number"
                )));
            }
        }
        let raw: Vec<f64> = probs.iter().map(|&p| p.ln()).collect();
        Self::normalize(&raw, population)
    }

    /// The uniform distribution: every unit gets probability `1/N`
    /// (identical log-weights by construction).
    pub fn uniform(population: &FinitePopulation) -> Self {
        let lw = -(population.len() as f64).ln();
        Self {
            population: population.clone(),
            log_weights: vec![lw; population.len()],
        }
    }

    /// All mass on a single unit.
    pub fn point_mass(population: &FinitePopulation, unit: &str) -> Result<Self> {
        let target = population
            .index_of(unit)
            .ok_or_else(|| Error::UnknownUnit(unit.to_string()))?;
        let log_weights = (0..population.len())
            .map(|i| if i == target { 0.0 } else { f64::NEG_INFINITY })
            .collect();
        Ok(Self {
            population: population.clone(),
            log_weights,
        })
    }

    pub fn population(&self) -> &FinitePopulation {
        &self.population
    }

    pub fn len(&self) -> usize {
        self.log_weights.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    /// Probability of the unit at `index`.
    pub fn prob(&self, index: usize) -> f64 {
        self.log_weights[index].exp()
    }

    /// Probability of a labelled unit.
    pub fn prob_of(&self, label: &str) -> Result<f64> {
        let i = self
            .population
            .index_of(label)
            .ok_or_else(|| Error::UnknownUnit(label.to_string()))?;
        Ok(self.prob(i))
    }

    /// Linear-space probability vector.
    pub fn probs(&self) -> Vec<f64> {
        self.log_weights.iter().map(|w| w.exp()).collect()
    }

    /// Indices of units with strictly positive probability.
    pub fn support(&self) -> Vec<usize> {
        self.log_weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > f64::NEG_INFINITY)
            .map(|(i, _)| i)
            .collect()
    }

    /// True when every unit has strictly positive probability.
    pub fn has_full_support(&self) -> bool {
        self.log_weights.iter().all(|&w| w > f64::NEG_INFINITY)
    }

    /// Shannon entropy in nats. Zero-probability units contribute nothing.
    pub fn entropy(&self) -> f64 {
        self.log_weights
            .iter()
            .filter(|&&w| w > f64::NEG_INFINITY)
            .map(|&w| -w.exp() * w)
            .sum()
    }

    /// Total variation distance, `0.5 * sum |p(u) - q(u)|`, in `[0, 1]`.
    pub fn total_variation(&self, other: &DiscreteDistribution) -> Result<f64> {
        if !self.population.same_as(&other.population) {
            return Err(Error::PopulationMismatch);
        }
        let sum: f64 = self
            .log_weights
            .iter()
            .zip(&other.log_weights)
            .map(|(a, b)| (a.exp() - b.exp()).abs())
            .sum();
        Ok(0.5 * sum)
    }

    /// Draw one unit by inverse-transform sampling.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &str {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (i, &w) in self.log_weights.iter().enumerate() {
            acc += w.exp();
            if u < acc {
                return self.population.label(i);
            }
        }
        // Accumulated rounding can leave acc just below 1; fall back to the
        // last supported unit.
        let last = *self.support().last().expect("support is non-empty");
        self.population.label(last)
    }
}

/// Max-shifted log-sum-exp with compensated summation. Returns `-inf` when
/// every entry is `-inf`.
pub(crate) fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    // Neumaier summation keeps the correction below float resolution even
    // for long vectors.
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for &v in values {
        let term = (v - max).exp();
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    max + (sum + comp).ln()
}
