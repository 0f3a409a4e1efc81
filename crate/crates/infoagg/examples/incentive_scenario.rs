//! The personalized-incentive walkthrough: a seeded finite-population
//! causal model, observational data, abduction from an evidence trace,
//! population-level counterfactual valuation, and fused treatment
//! allocation.
//!
//! Run with: cargo run -p infoagg --example incentive_scenario

use infoagg::disco::{
    allocate_treatment, build_incentive_model, simulate_incentive_csv, Assignment, Intervention,
};
use infoagg::{aggregate, DiscreteDistribution, FinitePopulation};

fn main() -> infoagg::Result<()> {
    let model = build_incentive_model(6, 42)?;
    println!("six users; group S (0 random, 1 pure strategy, 2 mixed), feature X,");
    println!("incentive T, response Y\n");

    // A slice of observational data.
    let csv = simulate_incentive_csv(&model, 10, 7)?;
    println!("sampled observations:\n{csv}");

    // Per-unit causal facts by exact enumeration.
    println!("per-unit uplift P(Y=1 | do(T=1)) - P(Y=1 | do(T=0)):");
    let success = Assignment::parse("Y=1")?;
    for unit in model.population().labels() {
        let treated = model.layer2(unit, &Intervention::parse("T=1")?, &success)?;
        let withheld = model.layer2(unit, &Intervention::parse("T=0")?, &success)?;
        println!(
            "  {unit}: {treated:.3} - {withheld:.3} = {:+.3}",
            treated - withheld
        );
    }
    println!();

    // Observe one trace, infer who it was, and value a counterfactual.
    let trace = Assignment::parse("T=1,Y=1")?;
    let posterior = model.abduct(&trace)?;
    println!("posterior over units after observing {{T=1, Y=1}}:");
    for (unit, p) in model.population().labels().iter().zip(posterior.probs()) {
        println!("  P(u = {unit} | e) = {p:.4}");
    }
    let would_have =
        model.population_valuation(&Intervention::parse("T=0")?, ("Y", "1"), &trace)?;
    println!("P(Y(0) = 1 | e) = {would_have:.4}  — chance the success would have");
    println!("happened with the incentive withheld\n");

    // Campaign-level prior fused with a per-user policy picks the
    // treatment actually sent.
    let treatments = FinitePopulation::new(["0", "1"])?;
    let campaign_prior = DiscreteDistribution::from_probs(&[0.6, 0.4], &treatments)?;
    let eager_user = DiscreteDistribution::from_probs(&[0.1, 0.9], &treatments)?;
    let combined = aggregate(&campaign_prior, &eager_user)?;
    println!("campaign prior [0.6, 0.4] ⊎ per-user policy [0.1, 0.9] =");
    println!("  [{:.4}, {:.4}]", combined.prob(0), combined.prob(1));
    let sent: Vec<String> = (0..10)
        .map(|i| allocate_treatment(&campaign_prior, &eager_user, i))
        .collect::<infoagg::Result<_>>()?;
    println!("ten seeded draws: {}", sent.join(" "));
    Ok(())
}
