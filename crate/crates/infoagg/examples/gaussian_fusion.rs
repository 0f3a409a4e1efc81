//! Fusing Gaussian opinions: precision-weighted closed form, checked
//! against grid quadrature.
//!
//! Run with: cargo run -p infoagg --example gaussian_fusion

use infoagg::{gaussian_aggregate, grid_aggregate, GaussianDistribution, GridDensity};

fn main() -> infoagg::Result<()> {
    // K identical standard-normal opinions fuse to variance 1/K: the
    // consensus of K independent unit-variance voices is as tight as a
    // K-sample mean.
    println!("K-fold fusion of N(0, 1):");
    let standard = GaussianDistribution::standard();
    let mut consensus = standard;
    for k in 2..=10 {
        consensus = gaussian_aggregate(&consensus, &standard);
        println!(
            "  K = {k:>2}: variance = {:.6}  (1/K = {:.6})",
            consensus.variance(),
            1.0 / k as f64
        );
    }
    println!();

    // Unequal opinions: precisions add, means are precision-weighted.
    let optimist = GaussianDistribution::new(2.0, 1.0)?;
    let pessimist = GaussianDistribution::new(0.0, 1.0)?;
    let fused = gaussian_aggregate(&optimist, &pessimist);
    println!(
        "N(2, 1) ⊎ N(0, 1) = N({}, {})",
        fused.mean(),
        fused.variance()
    );

    let confident = GaussianDistribution::new(2.0, 0.25)?;
    let vague = GaussianDistribution::new(0.0, 4.0)?;
    let fused = gaussian_aggregate(&confident, &vague);
    println!(
        "N(2, 0.25) ⊎ N(0, 4) = N({:.4}, {:.4})  — the confident voice dominates",
        fused.mean(),
        fused.variance()
    );
    println!();

    // The same fusion on a sampled grid agrees with the closed form.
    println!("grid quadrature cross-check on [-12, 12], 16001 points:");
    let a = GaussianDistribution::new(1.0, 0.8)?;
    let b = GaussianDistribution::new(-0.5, 1.5)?;
    let grid_a = GridDensity::gaussian(&a, -12.0, 12.0, 16001)?;
    let grid_b = GridDensity::gaussian(&b, -12.0, 12.0, 16001)?;
    let grid_fused = grid_aggregate(&grid_a, &grid_b)?;
    let exact = gaussian_aggregate(&a, &b);
    println!(
        "  closed form: mean {:+.6}, variance {:.6}",
        exact.mean(),
        exact.variance()
    );
    println!(
        "  grid:        mean {:+.6}, variance {:.6}",
        grid_fused.mean(),
        grid_fused.variance()
    );

    // Grids also handle families with no closed form, e.g. the product of
    // a Laplace-like density with a Gaussian.
    let laplace = GridDensity::from_fn(-12.0, 12.0, 16001, |x| -(x - 0.5).abs())?;
    let fused = grid_aggregate(&laplace, &grid_a)?;
    println!();
    println!(
        "laplace(0.5) ⊎ N(1, 0.8) on the grid: mean {:+.4}, variance {:.4}",
        fused.mean(),
        fused.variance()
    );
    Ok(())
}
