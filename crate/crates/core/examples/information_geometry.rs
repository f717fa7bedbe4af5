//! Restricted and full information bounds, efficient scores and influence functions.
//!
//! Run with `cargo run --example information_geometry`.

use std::sync::Arc;

use semieff::geometry::{compare_bounds, efficient_score, influence_full, optimal_direction_b, partition};
use semieff::models::{CoxModel, CovariateLaw, NormalModel, ParametricModel};
use semieff::numerics::linalg::{Matrix, Vector};
use semieff::RngStream;

fn main() -> semieff::Result<()> {
    let cox = CoxModel::new(CovariateLaw::scalar(1.0, 1.0)?)?;
    let theta = [0.0, 1.0];
    let cmp = compare_bounds(&cox, &theta, 1)?;
    println!("{}", serde_json::to_string_pretty(&cmp).expect("serializable"));

    let p = partition(&cox.fisher(&theta)?, 1)?;
    println!("I_11.2 = {:.4}, loss trace ratio = {:.4}", p.i11_2()[(0, 0)], p.loss_trace_ratio()?);

    // Efficient score and efficient influence at a few observations.
    let model: Arc<dyn ParametricModel> = Arc::new(cox);
    let eff = efficient_score(model.clone(), 1)?.at(&theta)?;
    let infl = influence_full(model.clone(), 1)?.at(&theta)?;
    let xs = model.sample(&theta, 3, &mut RngStream::new(20261018, 2))?;
    for x in &xs {
        println!(
            "y = {:.3}, z = {:.3}: l* = {:.4}, influence = {:.4}",
            x.y,
            x.z[0],
            eff.eval(x)?[0],
            infl.eval(x)?[0]
        );
    }

    // The normal model has orthogonal parameters: no information is lost.
    let normal = compare_bounds(&NormalModel, &[0.0, 2.0], 1)?;
    println!("normal: restricted {:?}, full {:?}", normal.restricted_bound, normal.full_bound);

    // Direction b maximizing the bound for q(theta) = theta_1 + theta_2 along a = 1.
    let info = NormalModel.fisher(&[0.0, 1.0])?;
    let q_grad = Matrix::from_row_slice(1, 2, &[1.0, 1.0]);
    let (b, value) = optimal_direction_b(&info, &q_grad, &Vector::from_vec(vec![1.0]))?;
    println!("optimal b = [{:.3}, {:.3}], bound = {value:.3}", b[0], b[1]);
    Ok(())
}
