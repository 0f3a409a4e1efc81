//! The aggregation operator and its group structure on a small population.
//!
//! Run with: cargo run -p infoagg --example group_laws

use infoagg::{aggregate, aggregate_many, inverse, power, DiscreteDistribution, FinitePopulation};

fn show(label: &str, d: &DiscreteDistribution) {
    let probs: Vec<String> = d.probs().iter().map(|p| format!("{p:.4}")).collect();
    println!("  {label:<24} [{}]", probs.join(", "));
}

fn main() -> infoagg::Result<()> {
    let population = FinitePopulation::new(["alice", "bob", "carol", "dan"])?;
    let uniform = DiscreteDistribution::uniform(&population);

    // Two sources of information about which unit we are looking at.
    let x = DiscreteDistribution::from_probs(&[0.50, 0.25, 0.15, 0.10], &population)?;
    let y = DiscreteDistribution::from_probs(&[0.10, 0.20, 0.30, 0.40], &population)?;

    println!("two opinions and their fusion (pointwise product, renormalized):");
    show("x", &x);
    show("y", &y);
    let fused = aggregate(&x, &y)?;
    show("x ⊎ y", &fused);
    println!();

    println!("group laws:");
    show("x ⊎ uniform  (= x)", &aggregate(&x, &uniform)?);
    let x_inv = inverse(&x)?;
    show("x*  (reciprocal weights)", &x_inv);
    show("x ⊎ x*  (= uniform)", &aggregate(&x, &x_inv)?);
    let assoc_left = aggregate(&aggregate(&x, &y)?, &x_inv)?;
    let assoc_right = aggregate(&x, &aggregate(&y, &x_inv)?)?;
    println!(
        "  associativity gap (total variation): {:.2e}",
        assoc_left.total_variation(&assoc_right)?
    );
    println!();

    println!("iterated aggregation sharpens an opinion:");
    for k in [1, 2, 4, 8] {
        show(&format!("x^{k}"), &power(&x, k)?);
    }
    show("x^0  (= uniform)", &power(&x, 0)?);
    show("x^-1 (= x*)", &power(&x, -1)?);
    println!();

    println!("n-ary fusion normalizes once at the end:");
    let many = aggregate_many(&[x.clone(), y.clone(), x.clone()])?;
    show("x ⊎ y ⊎ x", &many);

    // Supports intersect: a unit ruled out by any source stays ruled out.
    let partial = DiscreteDistribution::from_probs(&[0.5, 0.5, 0.0, 0.0], &population)?;
    let other = DiscreteDistribution::from_probs(&[0.0, 0.5, 0.5, 0.0], &population)?;
    println!();
    println!("support intersection:");
    show("p (alice or bob)", &partial);
    show("q (bob or carol)", &other);
    show("p ⊎ q (only bob)", &aggregate(&partial, &other)?);

    let disjoint = DiscreteDistribution::from_probs(&[0.0, 0.0, 0.5, 0.5], &population)?;
    match aggregate(&partial, &disjoint) {
        Err(e) => println!("  disjoint supports: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
