//! Non-simulation ARL computations used to cross-check the Monte Carlo
//! engine, plus limit calibration.
//!
//! All oracles work on the standardized chart statistic
//! `(Z - mu_y0) / (sqrt(1 - rho^2) sigma_y / sqrt(n))`, which is N(s, 1)
//! under a sustained shift with standardized residual mean `s`.

pub mod linalg;
pub mod normal;

use serde::Serialize;

use crate::charts::ChartKind;
use crate::error::{Error, Result};
use crate::stochastics::{ProcessModel, ShiftMode, ShiftScenario};
use linalg::{lu_solve, Matrix};

/// Default Markov chain resolution.
pub const DEFAULT_STATES: usize = 401;
/// Upper end of the bracket searched by [`calibrate_limit`].
pub const MAX_LIMIT_MULTIPLIER: f64 = 10.0;

/// Mean of the standardized AIB statistic under a scenario.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct StandardizedShift(pub f64);

impl StandardizedShift {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Closed-form residual shift: `(delta_y - rho delta_x) / sqrt(1 - rho^2)`
/// for independent shifts, zero under masking.
pub fn standardized_shift(model: &ProcessModel, scenario: &ShiftScenario) -> Result<StandardizedShift> {
    model.validate()?;
    scenario.validate(model)?;
    let s = match scenario.mode {
        ShiftMode::Masking => 0.0,
        ShiftMode::Independent => {
            (scenario.delta_y - model.rho * scenario.delta_x) / (1.0 - model.rho * model.rho).sqrt()
        }
    };
    Ok(StandardizedShift(s))
}

/// Exact zero-state ARL of a two-sided Shewhart chart with limits `+-L`
/// on a N(s, 1) statistic: `1 / (Phi(-L - s) + 1 - Phi(L - s))`.
pub fn shewhart_arl_exact(limit_multiplier: f64, s: StandardizedShift) -> f64 {
    let p = normal::cdf(-limit_multiplier - s.0) + normal::sf(limit_multiplier - s.0);
    1.0 / p
}

/// Zero-state ARL of a two-sided EWMA by the Brook-Evans Markov chain.
///
/// The in-control region `[-h, h]`, `h = L sqrt(lambda / (2 - lambda))`, is
/// split into `n_states` equal cells; the chain starts in the middle cell
/// (`w_0 = mu_y0`).
pub fn ewma_arl_markov(lambda: f64, limit_multiplier: f64, s: StandardizedShift, n_states: usize) -> Result<f64> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::InvalidLambda(lambda));
    }
    if !(limit_multiplier.is_finite() && limit_multiplier > 0.0) {
        return Err(Error::InvalidChart(format!("limit multiplier must be > 0, got {limit_multiplier}")));
    }
    if n_states < 51 || n_states.is_multiple_of(2) {
        return Err(Error::InvalidStateCount(n_states));
    }
    let h = limit_multiplier * (lambda / (2.0 - lambda)).sqrt();
    let width = 2.0 * h / n_states as f64;
    let center = |i: usize| -h + (i as f64 + 0.5) * width;
    let edge = |j: usize| -h + j as f64 * width;

    let mut a = Matrix::identity(n_states);
    let mut cdf_edges = vec![0.0; n_states + 1];
    for i in 0..n_states {
        let carry = (1.0 - lambda) * center(i);
        for (j, c) in cdf_edges.iter_mut().enumerate() {
            *c = normal::cdf((edge(j) - carry) / lambda - s.0);
        }
        for j in 0..n_states {
            a[(i, j)] -= cdf_edges[j + 1] - cdf_edges[j];
        }
    }
    let arl = lu_solve(a, vec![1.0; n_states]).ok_or(Error::SingularSystem)?;
    let start = arl[n_states / 2];
    if !start.is_finite() || start < 1.0 - 1e-9 {
        return Err(Error::SingularSystem);
    }
    Ok(start)
}

/// Which ARL in the calibration loop is solved for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CalibrationMethod {
    Analytic,
    Markov,
}

impl CalibrationMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            CalibrationMethod::Analytic => "analytic",
            CalibrationMethod::Markov => "markov",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Calibration {
    pub limit_multiplier: f64,
    pub method: CalibrationMethod,
    pub achieved_arl: f64,
}

/// Finds the limit multiplier giving in-control ARL `target_arl0`.
///
/// Shewhart limits are analytic; EWMA limits are found by bisection on the
/// Markov-chain ARL with [`DEFAULT_STATES`] states until the ARL is within
/// 0.01 of the target.
pub fn calibrate_limit(kind: ChartKind, lambda: f64, target_arl0: f64) -> Result<Calibration> {
    if !(target_arl0.is_finite() && target_arl0 > 1.0) {
        return Err(Error::InvalidConfig(format!("target in-control ARL must be > 1, got {target_arl0}")));
    }
    let zero = StandardizedShift(0.0);
    match kind {
        ChartKind::Shewhart => {
            let l = -normal::quantile(0.5 / target_arl0);
            if !(l > 0.0 && l <= MAX_LIMIT_MULTIPLIER) {
                return Err(Error::NoBracket(target_arl0));
            }
            Ok(Calibration {
                limit_multiplier: l,
                method: CalibrationMethod::Analytic,
                achieved_arl: shewhart_arl_exact(l, zero),
            })
        }
        ChartKind::Ewma => {
            if !(lambda > 0.0 && lambda <= 1.0) {
                return Err(Error::InvalidLambda(lambda));
            }
            // A singular chain means the ARL is beyond double precision,
            // i.e. above any reachable target.
            let arl = |l: f64| match ewma_arl_markov(lambda, l, zero, DEFAULT_STATES) {
                Ok(a) => Ok(a),
                Err(Error::SingularSystem) => Ok(f64::INFINITY),
                Err(e) => Err(e),
            };
            let (mut lo, mut hi) = (1e-3, MAX_LIMIT_MULTIPLIER);
            if arl(lo)? >= target_arl0 || arl(hi)? < target_arl0 {
                return Err(Error::NoBracket(target_arl0));
            }
            let mut best = (hi, f64::INFINITY);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let a = arl(mid)?;
                if (a - target_arl0).abs() < (best.1 - target_arl0).abs() {
                    best = (mid, a);
                }
                if (a - target_arl0).abs() < 0.01 || hi - lo < 1e-12 {
                    break;
                }
                if a < target_arl0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(Calibration { limit_multiplier: best.0, method: CalibrationMethod::Markov, achieved_arl: best.1 })
        }
    }
}
