//! Evidence traces as distributions: abduction turns an observation into a
//! posterior over units, and fusing traces multiplies what they reveal.
//!
//! Run with: cargo run -p infoagg --example evidence_fusion

use infoagg::disco::{build_reference_model, Assignment};
use infoagg::extensions::{aggregate_evidence, aggregate_with_set, UnitSet};
use infoagg::DiscreteDistribution;

fn show(label: &str, d: &DiscreteDistribution) {
    let probs: Vec<String> = d.probs().iter().map(|p| format!("{p:.4}")).collect();
    println!("  {label:<22} [{}]", probs.join(", "));
}

fn main() -> infoagg::Result<()> {
    // Three units with distinct outcome mechanisms: who are we watching?
    let model = build_reference_model();
    println!(
        "population: {:?}, outcome mechanisms: a: T xor E, b: T and E, c: E",
        model.population().labels()
    );
    println!();

    let saw_treated_success = Assignment::parse("T=1,Y=1")?;
    let saw_success = Assignment::parse("Y=1")?;
    let saw_failure = Assignment::parse("Y=0")?;

    println!("abduction P(u | e) from single traces:");
    show("e = {}", &model.abduct(&Assignment::empty())?);
    show("e = {T=1, Y=1}", &model.abduct(&saw_treated_success)?);
    show("e = {Y=1}", &model.abduct(&saw_success)?);
    show("e = {Y=0}", &model.abduct(&saw_failure)?);
    println!();

    // Fusing two traces = fusing the posteriors they induce. Two sessions
    // with conflicting outcomes still single out units that can produce
    // both.
    println!("evidence fusion:");
    let fused = aggregate_evidence(&model, &saw_success, &saw_failure)?;
    show("{Y=1} ⊎ {Y=0}", &fused);
    let repeated = aggregate_evidence(&model, &saw_success, &saw_success)?;
    show("{Y=1} ⊎ {Y=1}", &repeated);
    println!();

    // Sets enter as uniform distributions on their members, so aggregating
    // with a set is conditioning.
    let suspects = UnitSet::new(model.population(), ["a", "b"])?;
    let posterior = model.abduct(&saw_treated_success)?;
    println!("conditioning on a set (suspects = {{a, b}}):");
    show("P(u | T=1, Y=1)", &posterior);
    show("... ⊎ U_{a,b}", &aggregate_with_set(&posterior, &suspects)?);
    Ok(())
}
