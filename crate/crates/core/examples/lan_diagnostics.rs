//! LAN remainder checks for a smooth, a kinked and a non-regular model.
//!
//! Run with `cargo run --release --example lan_diagnostics`.

use semieff::diagnostics::{lan_check, CheckSettings, LocalAlternative};
use semieff::models::{ExponentialShiftModel, LocationFamily, LocationModel, ParametricModel};

fn main() -> semieff::Result<()> {
    let alt = LocalAlternative::new(vec![0.0], vec![1.0])?;
    let models: Vec<Box<dyn ParametricModel>> = vec![
        Box::new(LocationModel::new(LocationFamily::normal())),
        Box::new(LocationModel::new(LocationFamily::laplace())),
        Box::new(ExponentialShiftModel),
    ];
    for m in &models {
        let r = lan_check(m.as_ref(), &alt, &[100, 1000, 10_000], 100, 20261018, &CheckSettings::default())?;
        let medians: Vec<String> = r
            .cells
            .iter()
            .filter(|c| c.label == "R_n")
            .map(|c| format!("{:.3e}", c.value.unwrap_or(f64::NAN)))
            .collect();
        println!("{:<18} median |R_n| = [{}] passed = {}", m.name(), medians.join(", "), r.all_passed());
    }
    Ok(())
}
