//! Acceptance suite: one test per shipped guarantee, each printing a
//! pass line with its runtime. Run with `cargo test --test acceptance`
//! (add `-- --nocapture` to see the lines).

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use infoagg::disco::{
    allocate_treatment, build_incentive_model, build_reference_model, simulate_incentive_csv,
    Assignment, DiscoModel, Intervention,
};
use infoagg::dpo::{aggregate_policy, closed_form_policy, Policy, RewardTable, Temperature};
use infoagg::extensions::{forecast_aggregate_with_prior, PriorContext};
use infoagg::{
    aggregate, aggregate_many, gaussian_aggregate, grid_aggregate, inverse, DiscreteDistribution,
    FinitePopulation, GaussianDistribution, GridDensity,
};

fn random_full_support(
    rng: &mut ChaCha8Rng,
    population: &FinitePopulation,
) -> DiscreteDistribution {
    let raw: Vec<f64> = (0..population.len())
        .map(|_| rng.gen_range(-6.0..6.0))
        .collect();
    DiscreteDistribution::normalize(&raw, population).unwrap()
}

fn finish(criterion: usize, name: &str, started: Instant, budget_secs: f64) {
    let elapsed = started.elapsed().as_secs_f64();
    assert!(
        elapsed < budget_secs,
        "criterion {criterion} took {elapsed:.2}s, budget {budget_secs}s"
    );
    println!("acceptance {criterion} ({name}): PASS in {elapsed:.2}s");
}

#[test]
fn criterion_1_group_axioms() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let n = rng.gen_range(2..=64);
        let population = FinitePopulation::indexed("u", n).unwrap();
        let p = random_full_support(&mut rng, &population);
        let q = random_full_support(&mut rng, &population);
        let r = random_full_support(&mut rng, &population);
        let uniform = DiscreteDistribution::uniform(&population);

        // commutativity, entry-exact in log space
        let pq = aggregate(&p, &q).unwrap();
        let qp = aggregate(&q, &p).unwrap();
        assert_eq!(pq.log_weights(), qp.log_weights());

        // associativity within 1e-9 total variation
        let left = aggregate(&pq, &r).unwrap();
        let right = aggregate(&p, &aggregate(&q, &r).unwrap()).unwrap();
        assert!(left.total_variation(&right).unwrap() <= 1e-9);

        // identity within 1e-12 per entry
        let with_identity = aggregate(&p, &uniform).unwrap();
        for i in 0..n {
            assert!((with_identity.prob(i) - p.prob(i)).abs() <= 1e-12);
        }

        // inverse within 1e-9 total variation of uniform
        let cancelled = aggregate(&p, &inverse(&p).unwrap()).unwrap();
        assert!(cancelled.total_variation(&uniform).unwrap() <= 1e-9);
    }
    finish(1, "group axioms", started, 5.0);
}

#[test]
fn criterion_2_k_fold_gaussian() {
    let started = Instant::now();
    let standard = GaussianDistribution::standard();

    let mut folded = standard;
    assert_eq!(folded.mean(), 0.0);
    assert_eq!(folded.variance(), 1.0);
    for k in 2..=100u32 {
        folded = gaussian_aggregate(&folded, &standard);
        assert_eq!(folded.mean(), 0.0);
        let expected = 1.0 / f64::from(k);
        let rel = ((folded.variance() - expected) / expected).abs();
        assert!(rel <= 1e-12, "K = {k}: relative error {rel}");
    }

    let base = GridDensity::gaussian(&standard, -12.0, 12.0, 16001).unwrap();
    for k in [2usize, 5] {
        let mut grid = base.clone();
        for _ in 1..k {
            grid = grid_aggregate(&grid, &base).unwrap();
        }
        let expected = 1.0 / k as f64;
        assert!(grid.mean().abs() < 1e-3, "K = {k}: mean {}", grid.mean());
        let rel = ((grid.variance() - expected) / expected).abs();
        assert!(rel < 0.01, "K = {k}: relative variance error {rel}");
    }
    finish(2, "k-fold gaussian fusion", started, 5.0);
}

#[test]
fn criterion_3_policy_fusion_equivalence() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);

    let make_instance = |rng: &mut ChaCha8Rng| {
        let n_actions = rng.gen_range(2..=32usize);
        let n_contexts = rng.gen_range(1..=3usize);
        let contexts: Vec<String> = (0..n_contexts).map(|i| format!("c{i}")).collect();
        let actions: Vec<String> = (0..n_actions).map(|i| format!("a{i}")).collect();
        let rewards: Vec<Vec<f64>> = (0..n_contexts)
            .map(|_| (0..n_actions).map(|_| rng.gen_range(-5.0..5.0)).collect())
            .collect();
        let rows: Vec<Vec<f64>> = (0..n_contexts)
            .map(|_| {
                let w: Vec<f64> = (0..n_actions).map(|_| rng.gen_range(0.02..1.0)).collect();
                let s: f64 = w.iter().sum();
                w.into_iter().map(|x| x / s).collect()
            })
            .collect();
        let policy = Policy::from_probs(contexts.clone(), actions.clone(), rows).unwrap();
        let table = RewardTable::new(contexts, actions, rewards).unwrap();
        (policy, table)
    };

    // two independent routes agree entrywise
    for _ in 0..1000 {
        let (policy, table) = make_instance(&mut rng);
        let beta = Temperature::new(10f64.powf(rng.gen_range(-2.0..2.0))).unwrap();
        let via_group = aggregate_policy(&policy, &table, beta).unwrap();
        let via_closed_form = closed_form_policy(&policy, &table, beta).unwrap();
        for (a, b) in via_group.rows().iter().zip(via_closed_form.rows()) {
            for i in 0..a.len() {
                assert!((a.prob(i) - b.prob(i)).abs() <= 1e-10);
            }
        }
    }

    // constant rewards leave the reference policy untouched
    for _ in 0..100 {
        let (policy, table) = make_instance(&mut rng);
        let constant: Vec<Vec<f64>> = table
            .rewards()
            .iter()
            .map(|row| vec![rng.gen_range(-3.0..3.0); row.len()])
            .collect();
        let table = RewardTable::new(
            table.contexts().to_vec(),
            table.actions().labels().to_vec(),
            constant,
        )
        .unwrap();
        let beta = Temperature::new(10f64.powf(rng.gen_range(-2.0..2.0))).unwrap();
        let fused = aggregate_policy(&policy, &table, beta).unwrap();
        for (a, b) in fused.rows().iter().zip(policy.rows()) {
            for i in 0..a.len() {
                assert!((a.prob(i) - b.prob(i)).abs() <= 1e-12);
            }
        }
    }

    // β -> 0 proxy concentrates on the reward argmax
    for _ in 0..100 {
        let (policy, table) = make_instance(&mut rng);
        let sharp = closed_form_policy(&policy, &table, Temperature::new(1e-6).unwrap()).unwrap();
        for (ctx, row) in table.contexts().iter().zip(table.rewards()) {
            let argmax = row
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .map(|(i, _)| i)
                .unwrap();
            let runner_up = row
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != argmax)
                .map(|(_, &r)| r)
                .fold(f64::NEG_INFINITY, f64::max);
            if row[argmax] - runner_up < 1e-3 {
                continue; // criterion presumes a unique argmax
            }
            let fused_row = sharp.row(ctx).unwrap();
            assert!(
                fused_row.prob(argmax) >= 0.999,
                "mass on argmax = {}",
                fused_row.prob(argmax)
            );
        }
    }

    // β -> ∞ proxy reproduces the reference policy
    for _ in 0..100 {
        let (policy, table) = make_instance(&mut rng);
        let wide = aggregate_policy(&policy, &table, Temperature::new(1e6).unwrap()).unwrap();
        for (a, b) in wide.rows().iter().zip(policy.rows()) {
            assert!(a.total_variation(b).unwrap() <= 1e-3);
        }
    }
    finish(3, "policy fusion equivalence", started, 5.0);
}

#[test]
fn criterion_4_forecast_with_prior_laws() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..500 {
        let n = rng.gen_range(2..=32);
        let population = FinitePopulation::indexed("u", n).unwrap();
        let uniform = DiscreteDistribution::uniform(&population);
        let prior = random_full_support(&mut rng, &population);
        let f1 = random_full_support(&mut rng, &population);
        let f2 = random_full_support(&mut rng, &population);
        let ctx = PriorContext::new(prior.clone()).unwrap();
        let uniform_ctx = PriorContext::new(uniform).unwrap();

        // uniform prior reduces the pooling operator to plain aggregation
        let pooled_uniform =
            forecast_aggregate_with_prior(&[f1.clone(), f2.clone()], &uniform_ctx).unwrap();
        let plain = aggregate_many(&[f1.clone(), f2.clone()]).unwrap();
        for i in 0..n {
            assert!((pooled_uniform.prob(i) - plain.prob(i)).abs() <= 1e-12);
        }

        // the worked n-ary form equals the binary definition at n = 2
        let worked = aggregate_many(&[
            prior.clone(),
            aggregate(&f1, ctx.inverse()).unwrap(),
            aggregate(&f2, ctx.inverse()).unwrap(),
        ])
        .unwrap();
        let definition = aggregate_many(&[ctx.inverse().clone(), f1.clone(), f2.clone()]).unwrap();
        assert!(worked.total_variation(&definition).unwrap() <= 1e-9);

        // (X ⊎ S) ⊎ S* recovers X
        let x = random_full_support(&mut rng, &population);
        let total = aggregate(&x, &prior).unwrap();
        let recovered = aggregate(&total, ctx.inverse()).unwrap();
        assert!(recovered.total_variation(&x).unwrap() <= 1e-9);
    }
    finish(4, "forecast pooling laws", started, 2.0);
}

/// Independent oracle: evaluates a model's mechanism tables with its own
/// topological sort and its own enumeration over `(unit, factual noise,
/// counterfactual noise)`; shares only the model *data* with the library.
struct JointEnumerationOracle<'m> {
    model: &'m DiscoModel,
    topo: Vec<usize>,
    noise_sizes: Vec<usize>,
}

impl<'m> JointEnumerationOracle<'m> {
    fn new(model: &'m DiscoModel) -> Self {
        let n = model.variables().len();
        let mut indegree: Vec<usize> = model
            .variables()
            .iter()
            .map(|v| v.parents().len())
            .collect();
        let mut topo = Vec::with_capacity(n);
        let mut ready: Vec<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        while let Some(i) = ready.pop() {
            topo.push(i);
            for (j, v) in model.variables().iter().enumerate() {
                if v.parents().contains(&i) {
                    indegree[j] -= 1;
                    if indegree[j] == 0 {
                        ready.push(j);
                    }
                }
            }
        }
        assert_eq!(topo.len(), n);
        let noise_sizes = model
            .noise_variables()
            .iter()
            .map(|nv| nv.domain().len())
            .collect();
        Self {
            model,
            topo,
            noise_sizes,
        }
    }

    fn noise_atoms(&self) -> Vec<(Vec<usize>, f64)> {
        let mut atoms = vec![(Vec::new(), 1.0)];
        for (ni, nv) in self.model.noise_variables().iter().enumerate() {
            let mut next = Vec::with_capacity(atoms.len() * self.noise_sizes[ni]);
            for (prefix, w) in &atoms {
                for (vi, &p) in nv.probs().iter().enumerate() {
                    let mut longer = prefix.clone();
                    longer.push(vi);
                    next.push((longer, w * p));
                }
            }
            atoms = next;
        }
        atoms
    }

    fn eval(&self, unit: usize, noise: &[usize], forced: &[(usize, usize)]) -> Vec<usize> {
        let vars = self.model.variables();
        let mut out = vec![usize::MAX; vars.len()];
        for &vi in &self.topo {
            if let Some(&(_, val)) = forced.iter().find(|&&(v, _)| v == vi) {
                out[vi] = val;
                continue;
            }
            let v = &vars[vi];
            let mut idx = 0usize;
            for &p in v.parents() {
                idx = idx * vars[p].domain().len() + out[p];
            }
            for &e in v.noise_deps() {
                idx = idx * self.noise_sizes[e] + noise[e];
            }
            out[vi] = self.model.mechanism_table(vi, unit)[idx];
        }
        out
    }

    fn var(&self, name: &str) -> usize {
        self.model.variable_index(name).unwrap()
    }

    fn value(&self, var: usize, label: &str) -> usize {
        self.model.variables()[var]
            .domain()
            .iter()
            .position(|d| d == label)
            .unwrap()
    }

    fn resolve(&self, a: &Assignment) -> Vec<(usize, usize)> {
        a.pairs()
            .iter()
            .map(|(v, val)| {
                let vi = self.var(v);
                (vi, self.value(vi, val))
            })
            .collect()
    }

    /// `P(target_var(do) = target_val | evidence)` over the population, by
    /// enumerating the joint `(u, e_factual, e_counterfactual)` space.
    fn population_counterfactual(
        &self,
        intervention: &Assignment,
        target: (&str, &str),
        evidence: &Assignment,
    ) -> Option<f64> {
        let forced = self.resolve(intervention);
        let ev = self.resolve(evidence);
        let tv = self.var(target.0);
        let t_val = self.value(tv, target.1);
        let atoms = self.noise_atoms();
        let n_units = self.model.population().len();
        let p_u = 1.0 / n_units as f64;

        let mut joint = 0.0;
        let mut evidence_mass = 0.0;
        for unit in 0..n_units {
            for (factual_noise, w_f) in &atoms {
                let observed = self.eval(unit, factual_noise, &[]);
                if !ev.iter().all(|&(v, val)| observed[v] == val) {
                    continue;
                }
                evidence_mass += p_u * w_f;
                for (cf_noise, w_c) in &atoms {
                    let cf = self.eval(unit, cf_noise, &forced);
                    if cf[tv] == t_val {
                        joint += p_u * w_f * w_c;
                    }
                }
            }
        }
        (evidence_mass > 0.0).then(|| joint / evidence_mass)
    }

    /// `P(values; u)` with optional forcing, for the consistency checks.
    fn unit_probability(&self, unit: usize, forced: &Assignment, values: &Assignment) -> f64 {
        let forced = self.resolve(forced);
        let targets = self.resolve(values);
        self.noise_atoms()
            .iter()
            .filter(|(noise, _)| {
                let out = self.eval(unit, noise, &forced);
                targets.iter().all(|&(v, val)| out[v] == val)
            })
            .map(|(_, w)| w)
            .sum()
    }
}

#[test]
fn criterion_5_causal_theorems() {
    let started = Instant::now();
    let reference = build_reference_model();
    let incentive = build_incentive_model(6, 42).unwrap();

    for model in [&reference, &incentive] {
        let oracle = JointEnumerationOracle::new(model);
        let units: Vec<String> = model.population().labels().to_vec();

        // Individual-level triple equality for every (unit, t, y) with
        // positive evidence likelihood.
        for unit in &units {
            for t in ["0", "1"] {
                for y in ["0", "1"] {
                    let evidence = Assignment::empty().with("T", t).with("Y", y);
                    if model.layer1(unit, &evidence).unwrap() == 0.0 {
                        continue;
                    }
                    let iv = Intervention::empty().with("T", t);
                    let (conditioned, interventional, observational) = model
                        .individual_valuation_check(unit, &iv, ("Y", y), &evidence)
                        .unwrap();
                    assert!((conditioned - interventional).abs() <= 1e-12);
                    assert!((interventional - observational).abs() <= 1e-12);
                }
            }
        }

        // Population-level reduction against the independent oracle, for
        // every evidence/intervention/target combination in the grid.
        let mut evidences = vec![Assignment::empty()];
        for v in model.variables() {
            for value in v.domain() {
                evidences.push(Assignment::empty().with(v.name(), value.clone()));
            }
        }
        for t in ["0", "1"] {
            for y in ["0", "1"] {
                evidences.push(Assignment::empty().with("T", t).with("Y", y));
            }
        }
        for evidence in &evidences {
            for t in ["0", "1"] {
                for y in ["0", "1"] {
                    let iv_assignment = Assignment::empty().with("T", t);
                    let Some(expected) =
                        oracle.population_counterfactual(&iv_assignment, ("Y", y), evidence)
                    else {
                        continue; // evidence impossible in this model
                    };
                    let got = model
                        .population_valuation(
                            &Intervention::from_assignment(iv_assignment),
                            ("Y", y),
                            evidence,
                        )
                        .unwrap();
                    assert!(
                        (got - expected).abs() <= 1e-12,
                        "evidence {evidence:?}, do(T={t}), Y={y}: {got} vs {expected}"
                    );
                }
            }
        }

        // Distribution-consistency: Y under do(T=t) matches Y given T=t.
        for (ui, unit) in units.iter().enumerate() {
            for t in ["0", "1"] {
                let p_t = model
                    .layer1(unit, &Assignment::empty().with("T", t))
                    .unwrap();
                if p_t == 0.0 {
                    continue;
                }
                for y in ["0", "1"] {
                    let joint = oracle.unit_probability(
                        ui,
                        &Assignment::empty(),
                        &Assignment::empty().with("T", t).with("Y", y),
                    );
                    let conditional = joint / p_t;
                    let interventional = oracle.unit_probability(
                        ui,
                        &Assignment::empty().with("T", t),
                        &Assignment::empty().with("Y", y),
                    );
                    assert!((conditional - interventional).abs() <= 1e-12);
                }
            }
        }
    }
    finish(5, "causal valuation theorems", started, 30.0);
}

#[test]
fn criterion_6_incentive_simulation_statistics() {
    let started = Instant::now();
    let model = build_incentive_model(20, 7).unwrap();
    let csv = simulate_incentive_csv(&model, 100_000, 7).unwrap();

    let mut s0_rows = 0usize;
    let mut s0_t1 = 0usize;
    let mut pure_strategy: std::collections::HashMap<(String, String), String> =
        std::collections::HashMap::new();
    for line in csv.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        let (unit, s, x, t) = (fields[0], fields[1], fields[2], fields[3]);
        if s == "0" {
            s0_rows += 1;
            if t == "1" {
                s0_t1 += 1;
            }
        }
        if s == "1" {
            let key = (unit.to_string(), x.to_string());
            let entry = pure_strategy.entry(key).or_insert_with(|| t.to_string());
            assert_eq!(
                entry.as_str(),
                t,
                "T must be a function of (unit, X) at S=1"
            );
        }
    }
    let freq = s0_t1 as f64 / s0_rows as f64;
    assert!(
        (0.48..=0.52).contains(&freq),
        "empirical P(T=1|S=0) = {freq}"
    );

    // fusing a flat per-unit policy must leave the campaign prior intact
    let domain = FinitePopulation::new(["0", "1"]).unwrap();
    let prior = DiscreteDistribution::from_probs(&[0.3, 0.7], &domain).unwrap();
    let unit_policy = DiscreteDistribution::uniform(&domain);
    let draws = 100_000usize;
    let mut ones = 0usize;
    for i in 0..draws {
        if allocate_treatment(&prior, &unit_policy, i as u64).unwrap() == "1" {
            ones += 1;
        }
    }
    let empirical = [
        (draws - ones) as f64 / draws as f64,
        ones as f64 / draws as f64,
    ];
    let linf = (empirical[0] - 0.3).abs().max((empirical[1] - 0.7).abs());
    assert!(linf < 0.01, "L∞ gap = {linf}");
    finish(6, "incentive simulation statistics", started, 20.0);
}

#[test]
fn criterion_7_cli_contract() {
    let started = Instant::now();
    let bin = env!("CARGO_BIN_EXE_infoagg");
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name);
    let run = |args: &[&str]| {
        std::process::Command::new(bin)
            .args(args)
            .output()
            .expect("binary runs")
    };

    // byte-identical reruns for identical flags and seeds
    let csv_a = path("a.csv");
    let csv_b = path("b.csv");
    for (out, _) in [(&csv_a, 0), (&csv_b, 1)] {
        let output = run(&[
            "simulate-incentive",
            "--num-units",
            "8",
            "--samples",
            "5000",
            "--seed",
            "13",
            "--output",
            out.to_str().unwrap(),
        ]);
        assert!(output.status.success());
    }
    assert_eq!(
        std::fs::read(&csv_a).unwrap(),
        std::fs::read(&csv_b).unwrap()
    );

    // documented exit codes: malformed input -> 2 with machine-readable
    // error JSON; empty support -> 3
    let bad = path("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let good = path("good.json");
    std::fs::write(&good, r#"{"population": ["a", "b"], "probs": [0.5, 0.5]}"#).unwrap();
    let output = run(&["agg", bad.to_str().unwrap(), good.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("\"error\""), "stderr: {stderr}");

    let left = path("left.json");
    let right = path("right.json");
    std::fs::write(&left, r#"{"population": ["a", "b"], "probs": [1.0, 0.0]}"#).unwrap();
    std::fs::write(&right, r#"{"population": ["a", "b"], "probs": [0.0, 1.0]}"#).unwrap();
    let output = run(&["agg", left.to_str().unwrap(), right.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(3));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("empty_support"), "stderr: {stderr}");

    // JSON round trip through the CLI preserves entries to 1e-15
    let population = FinitePopulation::indexed("u", 7).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let original = random_full_support(&mut rng, &population);
    let src = path("dist.json");
    std::fs::write(&src, infoagg::io::render_distribution(&original)).unwrap();
    let dst = path("dist_back.json");
    let output = run(&[
        "power",
        src.to_str().unwrap(),
        "-k",
        "1",
        "--output",
        dst.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let reloaded = infoagg::io::parse_distribution(&std::fs::read_to_string(&dst).unwrap())
        .unwrap()
        .distribution;
    for i in 0..original.len() {
        assert!((reloaded.prob(i) - original.prob(i)).abs() <= 1e-15);
    }
    finish(7, "cli contract", started, 5.0);
}
