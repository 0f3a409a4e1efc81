//! Pooling analyst forecasts that all lean on the same baseline trend.
//!
//! Each analyst publishes a distribution over market outcomes. Naively
//! multiplying the forecasts double-counts the baseline every analyst
//! started from; pooling with a prior strips the shared baseline back out,
//! counting it exactly once.
//!
//! Run with: cargo run -p infoagg --example forecast_pooling

use infoagg::extensions::{forecast_aggregate_with_prior, remove_prior, PriorContext};
use infoagg::{aggregate, aggregate_many, DiscreteDistribution, FinitePopulation};

fn show(label: &str, d: &DiscreteDistribution) {
    let probs: Vec<String> = d.probs().iter().map(|p| format!("{p:.4}")).collect();
    println!("  {label:<28} [{}]", probs.join(", "));
}

fn main() -> infoagg::Result<()> {
    // A coarse outcome space for next quarter.
    let outcomes = FinitePopulation::new(["crash", "dip", "flat", "rally"])?;

    // The market baseline from historical data, and three analysts.
    let baseline = DiscreteDistribution::from_probs(&[0.05, 0.25, 0.50, 0.20], &outcomes)?;
    let analysts = [
        DiscreteDistribution::from_probs(&[0.02, 0.18, 0.50, 0.30], &outcomes)?,
        DiscreteDistribution::from_probs(&[0.10, 0.40, 0.40, 0.10], &outcomes)?,
        DiscreteDistribution::from_probs(&[0.04, 0.16, 0.55, 0.25], &outcomes)?,
    ];

    println!("baseline trend and analyst forecasts:");
    show("baseline S", &baseline);
    for (i, f) in analysts.iter().enumerate() {
        show(&format!("analyst F{}", i + 1), f);
    }
    println!();

    // What each analyst adds beyond the baseline.
    let ctx = PriorContext::new(baseline.clone())?;
    println!("incremental information F_i ⊎ S* (baseline removed):");
    for (i, f) in analysts.iter().enumerate() {
        show(&format!("F{} ⊎ S*", i + 1), &remove_prior(f, &ctx)?);
    }
    println!();

    // Naive fusion counts the baseline three times; the pooled version
    // once.
    let naive = aggregate_many(&analysts)?;
    let pooled = forecast_aggregate_with_prior(&analysts, &ctx)?;
    println!("fusing all three:");
    show("naive F1 ⊎ F2 ⊎ F3", &naive);
    show("pooled (baseline once)", &pooled);
    println!();

    // The pooled result is exactly S ⊎ (F1 ⊎ S*) ⊎ (F2 ⊎ S*) ⊎ (F3 ⊎ S*).
    let mut pieces = vec![baseline.clone()];
    for f in &analysts {
        pieces.push(remove_prior(f, &ctx)?);
    }
    let reconstructed = aggregate_many(&pieces)?;
    println!(
        "worked form agrees within total variation {:.2e}",
        pooled.total_variation(&reconstructed)?
    );

    // Round trip: adding the baseline back to a stripped forecast recovers
    // the original.
    let stripped = remove_prior(&analysts[0], &ctx)?;
    let recovered = aggregate(&stripped, &baseline)?;
    println!(
        "strip-then-restore round trip gap: {:.2e}",
        recovered.total_variation(&analysts[0])?
    );
    Ok(())
}
