mod common;

use aibmon::stochastics::{sample_subgroup, shifted_means, ProcessModel, ShiftScenario, StreamKey};
use proptest::prelude::*;

/// Draws `total` pairs from subgroups of size 100.
fn draws(model: &ProcessModel, total: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let m = ProcessModel { n: 100, ..*model };
    let (mut ys, mut xs) = (Vec::with_capacity(total), Vec::with_capacity(total));
    for i in 0..(total / 100) as u64 {
        let s = sample_subgroup(&m, m.mu_y0, m.mu_x0, StreamKey::new(seed, i / 64), i % 64).unwrap();
        ys.extend(s.y);
        xs.extend(s.x);
    }
    (ys, xs)
}

fn corr(y: &[f64], x: &[f64]) -> (f64, f64) {
    let n = y.len() as f64;
    let (my, mx) = (y.iter().sum::<f64>() / n, x.iter().sum::<f64>() / n);
    let (mut syx, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in y.iter().zip(x) {
        syx += (a - my) * (b - mx);
        sxx += (b - mx).powi(2);
        syy += (a - my).powi(2);
    }
    (syx / (sxx * syy).sqrt(), syx / sxx)
}

#[test]
fn correlation_recovered_from_a_million_pairs() {
    let model = ProcessModel::new(3.0, -1.0, 2.0, 0.5, 0.75, 1).unwrap();
    let (y, x) = draws(&model, 1_000_000, 1);
    let (r, slope) = corr(&y, &x);
    assert!((r - 0.75).abs() < 0.002, "r = {r}");
    // conditional-mean slope of Y on X is beta = 0.75 * 2 / 0.5 = 3
    assert!((slope - model.beta()).abs() < 0.01, "slope = {slope}");
}

#[test]
fn marginal_moments_within_four_standard_errors() {
    let model = ProcessModel::new(3.0, -1.0, 2.0, 0.5, -0.4, 1).unwrap();
    let n = 1_000_000;
    let (y, x) = draws(&model, n, 2);
    for (v, mu, sd) in [(&y, 3.0, 2.0), (&x, -1.0, 0.5)] {
        let (m, var) = common::mean_var(v);
        let se_mean = sd / (n as f64).sqrt();
        // SE of the sample SD of a normal is about sd / sqrt(2n)
        let se_sd = sd / (2.0 * n as f64).sqrt();
        assert!((m - mu).abs() < 4.0 * se_mean, "mean {m} vs {mu}");
        assert!((var.sqrt() - sd).abs() < 4.0 * se_sd, "sd {} vs {sd}", var.sqrt());
    }
}

#[test]
fn zero_correlation_streams_are_uncorrelated() {
    let model = ProcessModel::standard(0.0).unwrap();
    let n = 1_000_000;
    let (y, x) = draws(&model, n, 3);
    let (r, _) = corr(&y, &x);
    assert!(r.abs() < 4.0 / (n as f64).sqrt(), "r = {r}");
}

#[test]
fn subgroup_means_have_the_right_spread() {
    let model = ProcessModel::new(0.0, 0.0, 3.0, 1.0, 0.5, 9).unwrap();
    let reps = 40_000u64;
    let ybars: Vec<f64> = (0..reps)
        .map(|i| {
            let s = sample_subgroup(&model, 0.0, 0.0, StreamKey::new(4, i), 0).unwrap();
            s.y.iter().sum::<f64>() / 9.0
        })
        .collect();
    let (_, var) = common::mean_var(&ybars);
    // Var(y_bar) = 9 / 9 = 1
    assert!((var - 1.0).abs() < 0.03, "{var}");
}

proptest! {
    #[test]
    fn generation_is_a_pure_function_of_key_and_index(seed: u64, rep: u64, idx in 0u64..1_000_000, rho in -0.99f64..0.99, n in 1usize..20) {
        let m = ProcessModel::new(1.0, -2.0, 1.5, 0.7, rho, n).unwrap();
        let a = sample_subgroup(&m, 1.0, -2.0, StreamKey::new(seed, rep), idx).unwrap();
        let b = sample_subgroup(&m, 1.0, -2.0, StreamKey::new(seed, rep), idx).unwrap();
        prop_assert_eq!(a.y.len(), n);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn masking_shift_cancels_in_the_aib_statistic(rho in prop_oneof![-0.95f64..-0.05, 0.05f64..0.95], dy in -5.0f64..5.0, n in 1usize..50, sy in 0.1f64..10.0, sx in 0.1f64..10.0) {
        let m = ProcessModel::new(2.0, -3.0, sy, sx, rho, n).unwrap();
        let (my, mx) = shifted_means(&m, &ShiftScenario::masking(dy)).unwrap();
        let residual = (my - m.mu_y0) - m.beta() * (mx - m.mu_x0);
        prop_assert!(residual.abs() < 1e-9 * (1.0 + (my - m.mu_y0).abs()));
    }
}
