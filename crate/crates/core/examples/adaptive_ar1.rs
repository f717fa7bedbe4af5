//! AR(1): simulation, time-series LAN and the adaptive estimator of rho.
//!
//! Run with `cargo run --release --example adaptive_ar1`.

use semieff::diagnostics::replicate;
use semieff::estimators::{ScoreEstimator, SplitPlan};
use semieff::models::LocationFamily;
use semieff::numerics::stats;
use semieff::timeseries::{
    adaptive_ar1_estimate, lindeberg_statistic, martingale_normality, simulate_ar1, ts_fisher, ts_lan_remainder,
};
use semieff::RngStream;

fn main() -> semieff::Result<()> {
    let rho = 0.5;
    let g = LocationFamily::laplace_unit_variance();
    let path = simulate_ar1(rho, 4000, &g, &mut RngStream::new(20261018, 4))?;
    println!("I(rho) = {:.4}", ts_fisher(rho, &g)?);
    println!("LAN remainder at t = 1: {:.4}", ts_lan_remainder(&path, rho, 1.0, &g)?);
    println!("Lindeberg statistic (delta = 0.1): {:.2e}", lindeberg_statistic(&path, 0.1));
    println!("Jarque-Bera of block sums: {:.2}", martingale_normality(&path, rho, &g, 100)?);

    let a = adaptive_ar1_estimate(&path, &ScoreEstimator::symmetric_location(), &SplitPlan::default(), 1.0)?;
    println!("least squares {:.4}, adaptive {:.4}", a.preliminary, a.estimate);

    let n = 4000;
    let errs = replicate(20261018, "adaptive_ar1", 100, |rng| {
        let p = simulate_ar1(rho, n, &g, rng)?;
        let a = adaptive_ar1_estimate(&p, &ScoreEstimator::symmetric_location(), &SplitPlan::default(), 1.0)?;
        Ok(((n as f64).sqrt() * (a.estimate - rho), (n as f64).sqrt() * (a.preliminary - rho)))
    })?;
    let ad: Vec<f64> = errs.iter().map(|e| e.0).collect();
    let ls: Vec<f64> = errs.iter().map(|e| e.1).collect();
    println!(
        "n Var: adaptive {:.3}, least squares {:.3}, bound {:.3}",
        stats::variance(&ad),
        stats::variance(&ls),
        1.0 / ts_fisher(rho, &g)?
    );
    path.write_csv(std::io::sink(), 20261018)?;
    Ok(())
}
