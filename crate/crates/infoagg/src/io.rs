//! JSON file schemas: distributions, causal models, and policy/reward
//! tables.
//!
//! Distribution files carry linear-space probabilities for readability;
//! the library converts to log space on load. Serialization uses the
//! shortest round-trip float representation, so write→read preserves every
//! probability bit-for-bit.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::disco::{DiscoModel, DiscoModelBuilder};
use crate::dpo::{Policy, RewardTable};
use crate::error::{Error, Result};
use crate::population::{DiscreteDistribution, FinitePopulation};

/// Probabilities in a distribution file must sum to 1 within this tolerance;
/// anything further off is rejected rather than silently rescaled.
pub const FILE_SUM_TOLERANCE: f64 = 1e-6;

/// Sums closer to 1 than this are treated as exact (no renormalization
/// warning).
const WARN_THRESHOLD: f64 = 1e-12;

/// On-disk shape of a distribution: `{"population": [...], "probs": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistributionFile {
    pub population: Vec<String>,
    pub probs: Vec<f64>,
}

/// A parsed distribution plus whether loading had to renormalize it.
#[derive(Debug, Clone)]
pub struct LoadedDistribution {
    pub distribution: DiscreteDistribution,
    /// True when the stored probabilities deviated measurably from sum 1
    /// (still within [`FILE_SUM_TOLERANCE`]) and were rescaled on load.
    pub renormalized: bool,
    pub sum: f64,
}

/// Parse a distribution file, renormalizing small deviations and rejecting
/// sums outside [`FILE_SUM_TOLERANCE`].
pub fn parse_distribution(text: &str) -> Result<LoadedDistribution> {
    let file: DistributionFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let population = FinitePopulation::new(file.population)?;
    if file.probs.len() != population.len() {
        return Err(Error::LengthMismatch {
            expected: population.len(),
            got: file.probs.len(),
        });
    }
    for &p in &file.probs {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::InvalidProbabilities(format!(
                "entry {p} is not a finite non-negative number"
            )));
        }
    }
    let sum: f64 = file.probs.iter().sum();
    if (sum - 1.0).abs() > FILE_SUM_TOLERANCE {
        return Err(Error::SumOutOfTolerance { sum });
    }
    let distribution = DiscreteDistribution::from_probs(&file.probs, &population)?;
    Ok(LoadedDistribution {
        distribution,
        renormalized: (sum - 1.0).abs() > WARN_THRESHOLD,
        sum,
    })
}

/// Render a distribution to its JSON file form.
pub fn render_distribution(d: &DiscreteDistribution) -> String {
    let file = DistributionFile {
        population: d.population().labels().to_vec(),
        probs: d.probs(),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("schema serializes");
    text.push('\n');
    text
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoiseEntry {
    pub name: String,
    pub domain: Vec<String>,
    pub probs: Vec<f64>,
}

/// One endogenous variable with its explicit per-unit function tables.
///
/// A table lists the output value label for every input combination, in
/// mixed-radix order over parent values then noise values, with the first
/// declared input most significant and the last one varying fastest.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VariableEntry {
    pub name: String,
    pub domain: Vec<String>,
    pub parents: Vec<String>,
    pub noise: Vec<String>,
    pub mechanisms: BTreeMap<String, Vec<String>>,
}

/// On-disk shape of a causal model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub population: Vec<String>,
    pub noise: Vec<NoiseEntry>,
    pub variables: Vec<VariableEntry>,
}

/// Parse a model file. Variables may be listed in any order; they are wired
/// up in a topological order of the declared parent relation.
pub fn parse_model(text: &str) -> Result<DiscoModel> {
    let file: ModelFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let population = FinitePopulation::new(file.population)?;
    let mut builder = DiscoModelBuilder::new(population);
    for n in &file.noise {
        let domain: Vec<&str> = n.domain.iter().map(String::as_str).collect();
        builder.noise(&n.name, &domain, &n.probs);
    }
    for vi in topological_file_order(&file.variables)? {
        let v = &file.variables[vi];
        let domain: Vec<&str> = v.domain.iter().map(String::as_str).collect();
        let parents: Vec<&str> = v.parents.iter().map(String::as_str).collect();
        let noise: Vec<&str> = v.noise.iter().map(String::as_str).collect();
        builder.variable(&v.name, &domain, &parents, &noise);
        for (unit, labels) in &v.mechanisms {
            let table = labels
                .iter()
                .map(|label| {
                    v.domain
                        .iter()
                        .position(|d| d == label)
                        .ok_or_else(|| Error::UnknownValue {
                            variable: v.name.clone(),
                            value: label.clone(),
                        })
                })
                .collect::<Result<Vec<usize>>>()?;
            builder.mechanism_table(&v.name, unit, table);
        }
    }
    builder.build()
}

/// Render a model to its JSON file form.
pub fn render_model(model: &DiscoModel) -> String {
    let noise = model
        .noise_variables()
        .iter()
        .map(|n| NoiseEntry {
            name: n.name().to_string(),
            domain: n.domain().to_vec(),
            probs: n.probs().to_vec(),
        })
        .collect();
    let variables = model
        .variables()
        .iter()
        .enumerate()
        .map(|(vi, v)| {
            let mechanisms = model
                .population()
                .labels()
                .iter()
                .enumerate()
                .map(|(ui, unit)| {
                    let labels = model
                        .mechanism_table(vi, ui)
                        .iter()
                        .map(|&value| v.domain()[value].clone())
                        .collect();
                    (unit.clone(), labels)
                })
                .collect();
            VariableEntry {
                name: v.name().to_string(),
                domain: v.domain().to_vec(),
                parents: v
                    .parents()
                    .iter()
                    .map(|&p| model.variables()[p].name().to_string())
                    .collect(),
                noise: v
                    .noise_deps()
                    .iter()
                    .map(|&e| model.noise_variables()[e].name().to_string())
                    .collect(),
                mechanisms,
            }
        })
        .collect();
    let file = ModelFile {
        population: model.population().labels().to_vec(),
        noise,
        variables,
    };
    let mut text = serde_json::to_string_pretty(&file).expect("schema serializes");
    text.push('\n');
    text
}

fn topological_file_order(variables: &[VariableEntry]) -> Result<Vec<usize>> {
    let index_of = |name: &str| variables.iter().position(|v| v.name == name);
    let mut indegree = vec![0usize; variables.len()];
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); variables.len()];
    for (i, v) in variables.iter().enumerate() {
        for parent in &v.parents {
            let p = index_of(parent).ok_or_else(|| {
                Error::InvalidModel(format!(
                    "variable `{}` names unknown parent `{parent}`",
                    v.name
                ))
            })?;
            indegree[i] += 1;
            children[p].push(i);
        }
    }
    let mut queue: Vec<usize> = (0..variables.len()).filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(variables.len());
    while let Some(i) = queue.pop() {
        order.push(i);
        for &c in &children[i] {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                queue.push(c);
            }
        }
    }
    if order.len() != variables.len() {
        return Err(Error::InvalidModel(
            "parent relation contains a cycle".to_string(),
        ));
    }
    Ok(order)
}

/// On-disk shape of a fused-policy problem (and of its solution, which
/// reuses the schema with the aggregated policy in `ref_policy`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolicyFile {
    pub contexts: Vec<String>,
    pub actions: Vec<String>,
    pub rewards: Vec<Vec<f64>>,
    pub ref_policy: Vec<Vec<f64>>,
}

/// Parse a policy/reward file into its two typed halves.
pub fn parse_policy_file(text: &str) -> Result<(Policy, RewardTable)> {
    let file: PolicyFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    for (i, row) in file.ref_policy.iter().enumerate() {
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > FILE_SUM_TOLERANCE {
            return Err(Error::InvalidProbabilities(format!(
                "policy row {i} sums to {sum}"
            )));
        }
    }
    let policy = Policy::from_probs(file.contexts.clone(), file.actions.clone(), file.ref_policy)?;
    let table = RewardTable::new(file.contexts, file.actions, file.rewards)?;
    Ok((policy, table))
}

/// Render a policy (typically an aggregation result) beside the rewards it
/// was fused with.
pub fn render_policy_file(policy: &Policy, table: &RewardTable) -> String {
    let file = PolicyFile {
        contexts: policy.contexts().to_vec(),
        actions: policy.actions().labels().to_vec(),
        rewards: table.rewards().to_vec(),
        ref_policy: policy.rows().iter().map(|r| r.probs()).collect(),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("schema serializes");
    text.push('\n');
    text
}
