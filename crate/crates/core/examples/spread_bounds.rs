//! Spread lower bounds from a score statistic and from its moments.
//!
//! Run with `cargo run --example spread_bounds`.

use semieff::numerics::quantile::default_grid;
use semieff::spread::{
    spread_bound_from_sample, spread_bound_from_score, trigonometric_bound, uniform_bound, van_zwet_bound,
    ScoreStatistic,
};
use semieff::RngStream;

fn main() -> semieff::Result<()> {
    let mut rng = RngStream::new(20261018, 0);

    // Exact bounds from the quantile function of the score.
    let normal = spread_bound_from_score(&ScoreStatistic::normal(1.0), 1e-10, &mut rng)?;
    let laplace = spread_bound_from_score(&ScoreStatistic::laplace(1.0), 1e-10, &mut rng)?;

    // Moment bounds need only E|S| or E S^2 (both 1 here, or sqrt(2/pi) for E|S| of N(0,1)).
    let uniform = uniform_bound((2.0 / std::f64::consts::PI).sqrt())?;
    let vz = van_zwet_bound(1.0)?;
    let trig = trigonometric_bound(1.0)?;

    // The bound can also be estimated from draws of S.
    let draws: Vec<f64> = (0..20_000).map(|_| rng.standard_normal()).collect();
    let empirical = spread_bound_from_sample(&draws)?;

    println!("{:>6} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}", "u", "normal", "laplace", "uniform", "vanzwet", "trig", "sample");
    for u in [0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95] {
        println!(
            "{u:>6.2} {:>10.4} {:>10.4} {:>10.4} {:>10.4} {:>10.4} {:>10.4}",
            normal.eval(u),
            laplace.eval(u),
            uniform.eval(u),
            vz.eval(u),
            trig.eval(u),
            empirical.eval(u)
        );
    }
    let grid = default_grid();
    println!("normal bound strongly unimodal: {}", normal.is_strongly_unimodal(&grid, 1e-6));

    // The table the CLI writes.
    normal.write_csv(&[0.1, 0.5, 0.9], std::io::stdout())?;
    Ok(())
}
