//! Compare the sample mean, ratio, product, regression and difference
//! estimators of the Y mean on simulated subgroups.

use aibmon::estimators::{
    difference_estimate, mean_estimate, moments, product_estimate, ratio_estimate, regression_estimate,
};
use aibmon::{sample_subgroup, ProcessModel, StreamKey};

fn main() -> aibmon::Result<()> {
    let reps = 20_000u64;
    println!("{:>5} {:>10} {:>10} {:>10} {:>10} {:>10}", "rho", "mean", "ratio", "product", "regr", "diff");
    for rho in [-0.75, -0.25, 0.0, 0.25, 0.5, 0.75, 0.9] {
        // c_x = 0.1, c_y = 0.2 so the ratio estimator wins once rho > 0.25.
        let model = ProcessModel::new(10.0, 10.0, 2.0, 1.0, rho, 5)?;
        let mut sq = [0.0f64; 5];
        for i in 0..reps {
            let m = moments(&sample_subgroup(&model, model.mu_y0, model.mu_x0, StreamKey::new(1, i), 0)?);
            let est = [
                mean_estimate(&m),
                ratio_estimate(&m, model.mu_x0)?,
                product_estimate(&m, model.mu_x0)?,
                regression_estimate(&m, model.mu_x0)?,
                difference_estimate(&m, &model),
            ];
            for (acc, e) in sq.iter_mut().zip(est) {
                *acc += (e - model.mu_y0).powi(2);
            }
        }
        let mse: Vec<String> = sq.iter().map(|s| format!("{:>10.5}", s / reps as f64)).collect();
        println!("{rho:>5.2} {}", mse.join(" "));
    }
    println!("\nmean squared error per estimator; the difference estimator tracks (1 - rho^2) * 0.8");
    Ok(())
}
