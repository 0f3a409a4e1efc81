//! Model structure: variables, noise, per-unit mechanism tables, and the
//! deterministic evaluation core.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::population::FinitePopulation;

use super::{Assignment, Intervention};

/// Hard cap on the number of weighted noise atoms a counterfactual query may
/// enumerate. Queries beyond it fail loudly instead of sampling.
pub const ENUMERATION_BUDGET: u128 = 100_000_000;

/// Probabilities of each noise variable must sum to 1 within this tolerance.
const NOISE_SUM_TOLERANCE: f64 = 1e-12;

/// An exogenous noise variable: a finite domain with a probability for each
/// value. Noise variables are mutually independent and independent of the
/// unit; a correlated block can always be encoded as a single variable over
/// tuples.
#[derive(Debug, Clone)]
pub struct NoiseVariable {
    name: String,
    domain: Vec<String>,
    probs: Vec<f64>,
}

impl NoiseVariable {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// An endogenous variable: finite domain, endogenous parents, and the noise
/// variables its mechanism reads. The structure is shared by all units; only
/// the mechanism tables differ per unit.
#[derive(Debug, Clone)]
pub struct EndogenousVariable {
    name: String,
    domain: Vec<String>,
    parents: Vec<usize>,
    noise_deps: Vec<usize>,
}

impl EndogenousVariable {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    /// Indices into the model's variable list.
    pub fn parents(&self) -> &[usize] {
        &self.parents
    }

    /// Indices into the model's noise list.
    pub fn noise_deps(&self) -> &[usize] {
        &self.noise_deps
    }
}

/// A finite-population causal model with per-unit deterministic mechanisms
/// over finite noise. Immutable once built; all queries are pure.
#[derive(Debug, Clone)]
pub struct DiscoModel {
    population: FinitePopulation,
    noise: Vec<NoiseVariable>,
    variables: Vec<EndogenousVariable>,
    // mechanisms[variable][unit][input_index] -> value index, where
    // input_index ranges over parent values then noise values in mixed
    // radix, first declared input most significant.
    mechanisms: Vec<Vec<Vec<usize>>>,
    topo_order: Vec<usize>,
}

impl DiscoModel {
    pub fn builder(population: FinitePopulation) -> DiscoModelBuilder {
        DiscoModelBuilder::new(population)
    }

    pub fn population(&self) -> &FinitePopulation {
        &self.population
    }

    pub fn noise_variables(&self) -> &[NoiseVariable] {
        &self.noise
    }

    pub fn variables(&self) -> &[EndogenousVariable] {
        &self.variables
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn variable(&self, name: &str) -> Result<&EndogenousVariable> {
        self.variable_index(name)
            .map(|i| &self.variables[i])
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// The raw mechanism table for `(variable, unit)`, as value indices.
    pub fn mechanism_table(&self, variable: usize, unit: usize) -> &[usize] {
        &self.mechanisms[variable][unit]
    }

    /// Number of joint instantiations of all noise variables.
    pub fn noise_space_size(&self) -> u128 {
        self.noise.iter().map(|n| n.domain.len() as u128).product()
    }

    pub(super) fn unit_index(&self, unit: &str) -> Result<usize> {
        self.population
            .index_of(unit)
            .ok_or_else(|| Error::UnknownUnit(unit.to_string()))
    }

    pub(super) fn value_index(&self, variable: usize, value: &str) -> Result<usize> {
        let var = &self.variables[variable];
        var.domain
            .iter()
            .position(|v| v == value)
            .ok_or_else(|| Error::UnknownValue {
                variable: var.name.clone(),
                value: value.to_string(),
            })
    }

    /// Resolve a labelled assignment to `(variable index, value index)`
    /// pairs, rejecting unknown names, unknown values, and duplicates.
    pub(super) fn resolve_assignment(
        &self,
        assignment: &Assignment,
    ) -> Result<Vec<(usize, usize)>> {
        let mut out = Vec::with_capacity(assignment.len());
        for (name, value) in assignment.pairs() {
            let var = self
                .variable_index(name)
                .ok_or_else(|| Error::UnknownVariable(name.clone()))?;
            if out.iter().any(|&(v, _)| v == var) {
                return Err(Error::InvalidQuery(format!(
                    "variable `{name}` assigned twice"
                )));
            }
            out.push((var, self.value_index(var, value)?));
        }
        Ok(out)
    }

    /// Resolve an intervention into a per-variable override vector.
    pub(super) fn resolve_intervention(&self, iv: &Intervention) -> Result<Vec<Option<usize>>> {
        let mut out = vec![None; self.variables.len()];
        for (var, value) in self.resolve_assignment(iv.assignments())? {
            out[var] = Some(value);
        }
        Ok(out)
    }

    /// Push one noise instantiation through the (possibly intervened)
    /// mechanisms in topological order; returns all endogenous values.
    pub(super) fn evaluate(
        &self,
        unit: usize,
        noise_values: &[usize],
        overrides: &[Option<usize>],
    ) -> Vec<usize> {
        let mut values = vec![0usize; self.variables.len()];
        for &vi in &self.topo_order {
            values[vi] = match overrides[vi] {
                Some(forced) => forced,
                None => {
                    let var = &self.variables[vi];
                    let mut idx = 0usize;
                    for &p in &var.parents {
                        idx = idx * self.variables[p].domain.len() + values[p];
                    }
                    for &e in &var.noise_deps {
                        idx = idx * self.noise[e].domain.len() + noise_values[e];
                    }
                    self.mechanisms[vi][unit][idx]
                }
            };
        }
        values
    }

    /// Iterate every joint noise instantiation with its probability.
    pub(super) fn noise_instantiations(&self) -> NoiseIter<'_> {
        NoiseIter {
            noise: &self.noise,
            current: vec![0; self.noise.len()],
            last: vec![0; self.noise.len()],
            done: self.noise.iter().any(|n| n.domain.is_empty()),
        }
    }

    /// Draw a unit uniformly and one noise instantiation from `P(e)`, then
    /// evaluate the mechanisms. Returns the unit index and all endogenous
    /// values.
    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> (usize, Vec<usize>) {
        let unit = rng.gen_range(0..self.population.len());
        let noise: Vec<usize> = self
            .noise
            .iter()
            .map(|n| {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                for (i, &p) in n.probs.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        return i;
                    }
                }
                n.probs.len() - 1
            })
            .collect();
        let overrides = vec![None; self.variables.len()];
        (unit, self.evaluate(unit, &noise, &overrides))
    }
}

/// Odometer over the joint noise space, yielding `(values, probability)`.
pub(super) struct NoiseIter<'a> {
    noise: &'a [NoiseVariable],
    current: Vec<usize>,
    last: Vec<usize>,
    done: bool,
}

impl NoiseIter<'_> {
    pub(super) fn next_instantiation(&mut self) -> Option<(&[usize], f64)> {
        if self.done {
            return None;
        }
        let weight: f64 = self
            .noise
            .iter()
            .zip(&self.current)
            .map(|(n, &v)| n.probs[v])
            .product();
        self.last.clone_from(&self.current);
        let mut advanced = false;
        for i in (0..self.current.len()).rev() {
            if self.current[i] + 1 < self.noise[i].domain.len() {
                self.current[i] += 1;
                for later in self.current[i + 1..].iter_mut() {
                    *later = 0;
                }
                advanced = true;
                break;
            }
        }
        if !advanced {
            self.done = true;
        }
        Some((self.last.as_slice(), weight))
    }
}

/// Incremental builder for [`DiscoModel`]. Structural mistakes are collected
/// and reported together by [`DiscoModelBuilder::build`].
pub struct DiscoModelBuilder {
    population: FinitePopulation,
    noise: Vec<NoiseVariable>,
    variables: Vec<EndogenousVariable>,
    mechanisms: Vec<HashMap<usize, Vec<usize>>>,
    errors: Vec<String>,
}

impl DiscoModelBuilder {
    pub fn new(population: FinitePopulation) -> Self {
        Self {
            population,
            noise: Vec::new(),
            variables: Vec::new(),
            mechanisms: Vec::new(),
            errors: Vec::new(),
        }
    }

    /// Declare a noise variable with its domain and probability table.
    pub fn noise(&mut self, name: &str, domain: &[&str], probs: &[f64]) -> &mut Self {
        if self.noise.iter().any(|n| n.name == name) {
            self.errors
                .push(format!("duplicate noise variable `{name}`"));
            return self;
        }
        if domain.is_empty() {
            self.errors
                .push(format!("noise `{name}` has an empty domain"));
            return self;
        }
        if domain.len() != probs.len() {
            self.errors.push(format!(
                "noise `{name}`: {} probabilities for {} values",
                probs.len(),
                domain.len()
            ));
            return self;
        }
        self.noise.push(NoiseVariable {
            name: name.to_string(),
            domain: domain.iter().map(|s| s.to_string()).collect(),
            probs: probs.to_vec(),
        });
        self
    }

    /// Declare an endogenous variable with its parents (previously declared
    /// endogenous variables) and the noise variables its mechanism reads.
    pub fn variable(
        &mut self,
        name: &str,
        domain: &[&str],
        parents: &[&str],
        noise_deps: &[&str],
    ) -> &mut Self {
        if self.variables.iter().any(|v| v.name == name)
            || self.noise.iter().any(|n| n.name == name)
        {
            self.errors
                .push(format!("duplicate variable name `{name}`"));
            return self;
        }
        if domain.is_empty() {
            self.errors
                .push(format!("variable `{name}` has an empty domain"));
            return self;
        }
        let mut parent_idx = Vec::with_capacity(parents.len());
        for p in parents {
            match self.variables.iter().position(|v| v.name == *p) {
                Some(i) => parent_idx.push(i),
                None => {
                    self.errors
                        .push(format!("variable `{name}`: unknown parent `{p}`"));
                    return self;
                }
            }
        }
        let mut noise_idx = Vec::with_capacity(noise_deps.len());
        for e in noise_deps {
            match self.noise.iter().position(|n| n.name == *e) {
                Some(i) => noise_idx.push(i),
                None => {
                    self.errors
                        .push(format!("variable `{name}`: unknown noise `{e}`"));
                    return self;
                }
            }
        }
        self.variables.push(EndogenousVariable {
            name: name.to_string(),
            domain: domain.iter().map(|s| s.to_string()).collect(),
            parents: parent_idx,
            noise_deps: noise_idx,
        });
        self.mechanisms.push(HashMap::new());
        self
    }

    /// Tabulate `variable`'s mechanism for one unit from a function of
    /// parent value indices and noise value indices.
    pub fn mechanism<F>(&mut self, variable: &str, unit: &str, f: F) -> &mut Self
    where
        F: Fn(&[usize], &[usize]) -> usize,
    {
        let Some(vi) = self.variables.iter().position(|v| v.name == variable) else {
            self.errors
                .push(format!("mechanism for unknown variable `{variable}`"));
            return self;
        };
        let Some(ui) = self.population.index_of(unit) else {
            self.errors
                .push(format!("mechanism for unknown unit `{unit}`"));
            return self;
        };
        let table = self.tabulate(vi, &f);
        self.mechanisms[vi].insert(ui, table);
        self
    }

    /// Tabulate the same mechanism function for every unit.
    pub fn shared_mechanism<F>(&mut self, variable: &str, f: F) -> &mut Self
    where
        F: Fn(&[usize], &[usize]) -> usize,
    {
        let Some(vi) = self.variables.iter().position(|v| v.name == variable) else {
            self.errors
                .push(format!("mechanism for unknown variable `{variable}`"));
            return self;
        };
        let table = self.tabulate(vi, &f);
        for ui in 0..self.population.len() {
            self.mechanisms[vi].insert(ui, table.clone());
        }
        self
    }

    /// Install an explicit table (value indices in mixed-radix input order)
    /// for one unit.
    pub fn mechanism_table(&mut self, variable: &str, unit: &str, table: Vec<usize>) -> &mut Self {
        let Some(vi) = self.variables.iter().position(|v| v.name == variable) else {
            self.errors
                .push(format!("mechanism for unknown variable `{variable}`"));
            return self;
        };
        let Some(ui) = self.population.index_of(unit) else {
            self.errors
                .push(format!("mechanism for unknown unit `{unit}`"));
            return self;
        };
        self.mechanisms[vi].insert(ui, table);
        self
    }

    fn tabulate<F>(&self, vi: usize, f: &F) -> Vec<usize>
    where
        F: Fn(&[usize], &[usize]) -> usize,
    {
        let var = &self.variables[vi];
        let parent_sizes: Vec<usize> = var
            .parents
            .iter()
            .map(|&p| self.variables[p].domain.len())
            .collect();
        let noise_sizes: Vec<usize> = var
            .noise_deps
            .iter()
            .map(|&e| self.noise[e].domain.len())
            .collect();
        let total: usize = parent_sizes.iter().chain(&noise_sizes).product();
        let mut table = Vec::with_capacity(total);
        let mut pa = vec![0usize; parent_sizes.len()];
        let mut ev = vec![0usize; noise_sizes.len()];
        for mut idx in 0..total {
            // decode the mixed-radix index, last declared input fastest
            for (slot, &size) in ev.iter_mut().zip(&noise_sizes).rev() {
                *slot = idx % size;
                idx /= size;
            }
            for (slot, &size) in pa.iter_mut().zip(&parent_sizes).rev() {
                *slot = idx % size;
                idx /= size;
            }
            table.push(f(&pa, &ev));
        }
        table
    }

    /// Validate everything and produce the immutable model.
    pub fn build(self) -> Result<DiscoModel> {
        let mut errors = self.errors;

        for n in &self.noise {
            let mut ok = true;
            for &p in &n.probs {
                if !p.is_finite() || p < 0.0 {
                    errors.push(format!("noise `{}` has an invalid probability {p}", n.name));
                    ok = false;
                }
            }
            if ok {
                let sum: f64 = n.probs.iter().sum();
                if (sum - 1.0).abs() > NOISE_SUM_TOLERANCE {
                    errors.push(format!(
                        "noise `{}` probabilities sum to {sum}, not 1",
                        n.name
                    ));
                }
            }
        }

        // Kahn's algorithm over the parent relation.
        let n_vars = self.variables.len();
        let mut indegree = vec![0usize; n_vars];
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n_vars];
        for (i, v) in self.variables.iter().enumerate() {
            indegree[i] = v.parents.len();
            for &p in &v.parents {
                children[p].push(i);
            }
        }
        let mut queue: Vec<usize> = (0..n_vars).filter(|&i| indegree[i] == 0).collect();
        let mut topo_order = Vec::with_capacity(n_vars);
        while let Some(i) = queue.pop() {
            topo_order.push(i);
            for &c in &children[i] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    queue.push(c);
                }
            }
        }
        if topo_order.len() != n_vars {
            errors.push("parent relation contains a cycle".to_string());
        }

        // Mechanism totality: present for every unit, right length, in range.
        let mut mechanisms = Vec::with_capacity(n_vars);
        for (vi, var) in self.variables.iter().enumerate() {
            let expected_len: usize = var
                .parents
                .iter()
                .map(|&p| self.variables[p].domain.len())
                .chain(var.noise_deps.iter().map(|&e| self.noise[e].domain.len()))
                .product();
            let mut per_unit = Vec::with_capacity(self.population.len());
            for ui in 0..self.population.len() {
                match self.mechanisms[vi].get(&ui) {
                    None => {
                        errors.push(format!(
                            "variable `{}` has no mechanism for unit `{}`",
                            var.name,
                            self.population.label(ui)
                        ));
                        per_unit.push(Vec::new());
                    }
                    Some(table) => {
                        if table.len() != expected_len {
                            errors.push(format!(
                                "variable `{}`, unit `{}`: table has {} entries, expected {expected_len}",
                                var.name,
                                self.population.label(ui),
                                table.len(),
                            ));
                        }
                        if let Some(&bad) = table.iter().find(|&&v| v >= var.domain.len()) {
                            errors.push(format!(
                                "variable `{}`, unit `{}`: output index {bad} outside the domain",
                                var.name,
                                self.population.label(ui),
                            ));
                        }
                        per_unit.push(table.clone());
                    }
                }
            }
            mechanisms.push(per_unit);
        }

        if !errors.is_empty() {
            return Err(Error::InvalidModel(errors.join("; ")));
        }

        Ok(DiscoModel {
            population: self.population,
            noise: self.noise,
            variables: self.variables,
            mechanisms,
            topo_order,
        })
    }
}
