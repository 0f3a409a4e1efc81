//! Ready-made models: a tiny hand-enumerable reference model for oracles,
//! and the seeded personalized-incentive model.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::population::FinitePopulation;

use super::model::DiscoModel;

/// Three units, two binary endogenous variables, hand-enumerable.
///
/// - noise `ET` is a fair coin driving the treatment, `T = ET`;
/// - noise `E` has `P(E=1) = 0.6` and drives the outcome;
/// - outcome mechanisms: unit `a`: `Y = T xor E`; unit `b`: `Y = T and E`;
///   unit `c`: `Y = E`.
///
/// Keeping the treatment coin separate from the outcome noise makes the
/// observational conditional `P(y|t; u)` coincide with the interventional
/// `P(y_t; u)` at every unit, which the valuation tests rely on.
pub fn build_reference_model() -> DiscoModel {
    let population = FinitePopulation::new(["a", "b", "c"]).expect("static labels");
    let mut b = DiscoModel::builder(population);
    b.noise("ET", &["0", "1"], &[0.5, 0.5]);
    b.noise("E", &["0", "1"], &[0.4, 0.6]);
    b.variable("T", &["0", "1"], &[], &["ET"]);
    b.shared_mechanism("T", |_, e| e[0]);
    b.variable("Y", &["0", "1"], &["T"], &["E"]);
    b.mechanism("Y", "a", |pa, e| pa[0] ^ e[0]);
    b.mechanism("Y", "b", |pa, e| pa[0] & e[0]);
    b.mechanism("Y", "c", |_, e| e[0]);
    b.build().expect("reference model is well-formed")
}

/// The four-variable personalized-incentive model over `num_units` users,
/// with mechanisms drawn deterministically from `seed`.
///
/// Variables:
/// - `S` in `{0,1,2}`: experiment-group assignment, drawn uniformly by its
///   own noise and independent of the unit (no unit arrow into `S`);
/// - `X` in `{0,1,2}`: pre-treatment feature, a per-unit constant;
/// - `T` in `{0,1}`: the incentive. At `S=0` a fair coin; at `S=1` a
///   deterministic per-unit function of `X`; at `S=2` the per-unit strategy
///   for `X` followed with probability 0.8 and flipped otherwise;
/// - `Y` in `{0,1}`: the response, a per-unit function of `T` and outcome
///   noise.
pub fn build_incentive_model(num_units: usize, seed: u64) -> Result<DiscoModel> {
    if num_units == 0 {
        return Err(Error::InvalidModel(
            "incentive model needs at least one unit".to_string(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let population = FinitePopulation::indexed("u", num_units)?;
    let units: Vec<String> = population.labels().to_vec();

    let mut b = DiscoModel::builder(population);
    b.noise("ES", &["0", "1", "2"], &[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]);
    b.noise("ET", &["0", "1"], &[0.5, 0.5]);
    b.noise("EM", &["0", "1"], &[0.2, 0.8]);
    b.noise("EY", &["0", "1"], &[0.3, 0.7]);

    b.variable("S", &["0", "1", "2"], &[], &["ES"]);
    b.shared_mechanism("S", |_, e| e[0]);

    b.variable("X", &["0", "1", "2"], &[], &[]);
    b.variable("T", &["0", "1"], &["S", "X"], &["ET", "EM"]);
    b.variable("Y", &["0", "1"], &["T"], &["EY"]);

    for unit in &units {
        let x_u: usize = rng.gen_range(0..3);
        let pure: [usize; 3] = [
            rng.gen_range(0..2),
            rng.gen_range(0..2),
            rng.gen_range(0..2),
        ];
        let mixed: [usize; 3] = [
            rng.gen_range(0..2),
            rng.gen_range(0..2),
            rng.gen_range(0..2),
        ];
        // outcome table indexed by (t, ey)
        let outcome: [[usize; 2]; 2] = [
            [rng.gen_range(0..2), rng.gen_range(0..2)],
            [rng.gen_range(0..2), rng.gen_range(0..2)],
        ];

        b.mechanism("X", unit, move |_, _| x_u);
        b.mechanism("T", unit, move |pa, e| {
            let (s, x) = (pa[0], pa[1]);
            let (et, em) = (e[0], e[1]);
            match s {
                0 => et,
                1 => pure[x],
                _ => {
                    if em == 1 {
                        mixed[x]
                    } else {
                        1 - mixed[x]
                    }
                }
            }
        });
        b.mechanism("Y", unit, move |pa, e| outcome[pa[0]][e[0]]);
    }
    b.build()
}

/// Sample `samples` users from the model and emit an observation table with
/// header `unit,s,x,t,y`. Deterministic for a fixed `(model, samples, seed)`.
///
/// The model must expose endogenous variables named `S`, `X`, `T`, `Y`.
pub fn simulate_incentive_csv(model: &DiscoModel, samples: usize, seed: u64) -> Result<String> {
    let columns = ["S", "X", "T", "Y"]
        .iter()
        .map(|name| {
            model
                .variable_index(name)
                .ok_or_else(|| Error::UnknownVariable(name.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::with_capacity(samples * 16 + 16);
    out.push_str("unit,s,x,t,y\n");
    for _ in 0..samples {
        let (unit, values) = model.sample(&mut rng);
        out.push_str(model.population().label(unit));
        for &col in &columns {
            out.push(',');
            out.push_str(&model.variables()[col].domain()[values[col]]);
        }
        out.push('\n');
    }
    Ok(out)
}
