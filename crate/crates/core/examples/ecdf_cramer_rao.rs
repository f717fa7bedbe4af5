//! The empirical distribution function attains its Cramer-Rao bound.
//!
//! Run with `cargo run --release --example ecdf_cramer_rao`.

use semieff::diagnostics::{ecdf_cramer_rao_check, CheckSettings};
use semieff::models::Logistic;

fn main() -> semieff::Result<()> {
    let dist = Logistic { scale: 1.0 };
    let t_grid = [-2.0, -1.0, 0.0, 1.0, 2.0];
    let r = ecdf_cramer_rao_check(&dist, &t_grid, 100, 5000, 20261018, &CheckSettings::default())?;
    for c in r.cells.iter().filter(|c| c.label.starts_with("ecdf")) {
        println!("{:<12} Var = {:.5}, bound = {:.5}", c.label, c.value.unwrap_or(f64::NAN), c.reference.unwrap_or(f64::NAN));
    }
    println!("all verdicts passed: {}", r.all_passed());
    r.write_csv(std::io::stdout())?;
    Ok(())
}
