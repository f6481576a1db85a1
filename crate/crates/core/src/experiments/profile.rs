//! The AIB statistic as a linear-profile average deviation.
//!
//! For the in-control line `Y = A0 + B0 X + e` with `B0 = beta`,
//! `y_bar + beta (mu_x - x_bar) = (y_bar - A0 - B0 x_bar) + (A0 + B0 mu_x)`.

use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, StandardNormal};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::{difference_estimate, moments};
use crate::stochastics::{sample_subgroup, PairedSample, ProcessModel, StreamKey};

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileModel {
    pub a0: f64,
    pub b0: f64,
    pub sigma0: f64,
    pub x_design: Vec<f64>,
}

impl ProfileModel {
    pub fn new(a0: f64, b0: f64, sigma0: f64, x_design: Vec<f64>) -> Result<Self> {
        if !(sigma0.is_finite() && sigma0 > 0.0) {
            return Err(Error::InvalidModel(format!("profile error sd must be > 0, got {sigma0}")));
        }
        if x_design.is_empty() {
            return Err(Error::InvalidModel("profile design must be nonempty".into()));
        }
        Ok(Self { a0, b0, sigma0, x_design })
    }

    /// The in-control regression line of Y on X implied by a process model:
    /// slope `beta`, intercept `mu_y0 - beta mu_x0`, residual sd
    /// `sigma_y sqrt(1 - rho^2)`.
    pub fn from_process(model: &ProcessModel, x_design: Vec<f64>) -> Result<Self> {
        let beta = model.beta();
        Self::new(
            model.mu_y0 - beta * model.mu_x0,
            beta,
            model.sigma_y * (1.0 - model.rho * model.rho).sqrt(),
            x_design,
        )
    }

    /// Whether the design X-values average to zero.
    pub fn is_centered(&self) -> bool {
        let mean = self.x_design.iter().sum::<f64>() / self.x_design.len() as f64;
        let scale = self.x_design.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        mean.abs() <= 1e-12 * scale.max(1.0)
    }

    /// One profile at the fixed design, `y_i = A0 + B0 x_i + e_i`.
    pub fn sample(&self, key: StreamKey, index: u64) -> PairedSample {
        let mut rng = key.digest().subgroup_rng(index);
        let y = self
            .x_design
            .iter()
            .map(|&x| {
                let e: f64 = StandardNormal.sample(&mut rng);
                self.a0 + self.b0 * x + self.sigma0 * e
            })
            .collect();
        PairedSample { y, x: self.x_design.clone() }
    }
}

/// Average deviation from the in-control line, `y_bar - A0 - B0 x_bar`.
pub fn profile_deviation(sample: &PairedSample, profile: &ProfileModel) -> f64 {
    let m = moments(sample);
    m.y_bar - profile.a0 - profile.b0 * m.x_bar
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Equivalence {
    /// AIB statistic (difference estimator).
    pub aib: f64,
    /// Average profile deviation.
    pub dev: f64,
    /// `A0 + B0 mu_x`.
    pub constant: f64,
    /// `aib - (dev + constant)`.
    pub gap: f64,
    /// `|gap|` in units in the last place of the operand magnitude
    /// `|y_bar| + |A0| + |B0 x_bar| + |B0 mu_x|`.
    pub gap_ulps: f64,
}

fn ulp(x: f64) -> f64 {
    let x = x.abs();
    if x == 0.0 {
        f64::from_bits(1)
    } else {
        x.next_up() - x
    }
}

/// Checks that the AIB statistic equals the profile deviation plus a constant.
pub fn equivalence_check(sample: &PairedSample, model: &ProcessModel, profile: &ProfileModel) -> Result<Equivalence> {
    let beta = model.beta();
    if (profile.b0 - beta).abs() > 4.0 * f64::EPSILON * beta.abs() {
        return Err(Error::MismatchedSlope { b0: profile.b0, beta });
    }
    let m = moments(sample);
    let aib = difference_estimate(&m, model);
    let dev = profile_deviation(sample, profile);
    let constant = profile.a0 + profile.b0 * model.mu_x0;
    let gap = aib - (dev + constant);
    let magnitude = m.y_bar.abs() + profile.a0.abs() + (profile.b0 * m.x_bar).abs() + (profile.b0 * model.mu_x0).abs();
    Ok(Equivalence { aib, dev, constant, gap, gap_ulps: gap.abs() / ulp(magnitude) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub trials: u64,
    pub max_gap_ulps: f64,
    pub max_abs_gap: f64,
}

/// Runs [`equivalence_check`] over `trials` randomized models, intercepts
/// and samples (with `B0 = beta` throughout).
pub fn profile_equivalence_trials(trials: u64, master_seed: u64) -> Result<EquivalenceReport> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(StreamKey::new(master_seed, 0).child_seed());
    let mut report = EquivalenceReport { trials, max_gap_ulps: 0.0, max_abs_gap: 0.0 };
    for i in 0..trials {
        let model = ProcessModel::new(
            rng.random_range(-50.0..50.0),
            rng.random_range(-50.0..50.0),
            rng.random_range(0.1..10.0),
            rng.random_range(0.1..10.0),
            rng.random_range(-0.95..0.95),
            rng.random_range(1..=10),
        )?;
        let a0 = rng.random_range(-50.0..50.0);
        let profile = ProfileModel::new(a0, model.beta(), 1.0, vec![0.0])?;
        let mu_y = model.mu_y0 + rng.random_range(-3.0..3.0);
        let mu_x = model.mu_x0 + rng.random_range(-3.0..3.0);
        let sample = sample_subgroup(&model, mu_y, mu_x, StreamKey::new(master_seed, i + 1), 0)?;
        let eq = equivalence_check(&sample, &model, &profile)?;
        report.max_gap_ulps = report.max_gap_ulps.max(eq.gap_ulps);
        report.max_abs_gap = report.max_abs_gap.max(eq.gap.abs());
    }
    Ok(report)
}
