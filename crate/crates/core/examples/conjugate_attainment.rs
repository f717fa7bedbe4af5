//! Attainment of the spread bound by the posterior mean in the normal-normal model.
//!
//! Run with `cargo run --example conjugate_attainment`.

use semieff::spread::{spread_bound_from_score, spread_equality_residual, NormalConjugate};
use semieff::RngStream;

fn main() -> semieff::Result<()> {
    let model = NormalConjugate::new(0.0, 1.0, 1.0, 1)?;
    let mut rng = RngStream::new(20261018, 1);
    let mut bayes = Vec::new();
    let mut naive = Vec::new();
    for _ in 0..10_000 {
        let (theta, xs) = model.draw_joint(&mut rng);
        let s = model.statistic(&xs, theta)?;
        bayes.push((s, model.posterior_mean(&xs) - theta));
        naive.push((s, xs[0] - theta));
    }
    println!("Var S = {:.4} (exact {})", model.score_variance(), model.score_variance());
    println!("equality residual, posterior mean: {:.4}", spread_equality_residual(&bayes));
    println!("equality residual, X itself:       {:.4}", spread_equality_residual(&naive));

    let k = spread_bound_from_score(&model.score_statistic(), 1e-10, &mut rng)?;
    println!("bound K^-1(0.75) - K^-1(0.25) = {:.4}", k.eval(0.75) - k.eval(0.25));
    Ok(())
}
