//! AIB-Shewhart and AIB-EWMA charts.
//!
//! Both charts plot the difference estimator. The limit half-width is scaled
//! by the standard deviation of that statistic, `sqrt(1 - rho^2) sigma_y / sqrt(n)`;
//! the EWMA uses the asymptotic variance factor `lambda / (2 - lambda)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{difference_estimate, SampleMoments};
use crate::stochastics::ProcessModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChartKind {
    Shewhart,
    Ewma,
}

impl ChartKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ChartKind::Shewhart => "shewhart",
            ChartKind::Ewma => "ewma",
        }
    }
}

impl std::fmt::Display for ChartKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(self.as_str())
    }
}

impl std::str::FromStr for ChartKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "shewhart" => Ok(ChartKind::Shewhart),
            "ewma" => Ok(ChartKind::Ewma),
            other => Err(Error::InvalidChart(format!("unknown chart kind '{other}'"))),
        }
    }
}

/// A fully specified two-sided chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartSpec {
    pub kind: ChartKind,
    /// Smoothing constant; always 1 for Shewhart.
    pub lambda: f64,
    pub limit_multiplier: f64,
    /// In-control mean of Y; also the EWMA starting value.
    pub center: f64,
    pub half_width: f64,
}

impl ChartSpec {
    pub fn lcl(&self) -> f64 {
        self.center - self.half_width
    }

    pub fn ucl(&self) -> f64 {
        self.center + self.half_width
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return Err(Error::InvalidLambda(self.lambda));
        }
        if self.kind == ChartKind::Shewhart && self.lambda != 1.0 {
            return Err(Error::InvalidChart("Shewhart chart must have lambda = 1".into()));
        }
        if !(self.half_width >= 0.0 && self.center.is_finite()) {
            return Err(Error::InvalidChart(format!("bad limits: center {} half-width {}", self.center, self.half_width)));
        }
        Ok(())
    }
}

/// Builds the chart limits for `model`. `lambda` is ignored for Shewhart.
pub fn make_limits(kind: ChartKind, lambda: f64, limit_multiplier: f64, model: &ProcessModel) -> Result<ChartSpec> {
    model.validate()?;
    if !(limit_multiplier.is_finite() && limit_multiplier > 0.0) {
        return Err(Error::InvalidChart(format!("limit multiplier must be > 0, got {limit_multiplier}")));
    }
    let lambda = match kind {
        ChartKind::Shewhart => 1.0,
        ChartKind::Ewma => {
            if !(lambda > 0.0 && lambda <= 1.0) {
                return Err(Error::InvalidLambda(lambda));
            }
            lambda
        }
    };
    let half_width = limit_multiplier * (lambda / (2.0 - lambda)).sqrt() * model.se_aib();
    Ok(ChartSpec { kind, lambda, limit_multiplier, center: model.mu_y0, half_width })
}

/// The AIB statistic `Z_i`, i.e. the difference estimator evaluated with
/// the in-control auxiliary mean.
pub fn aib_statistic(m: &SampleMoments, model: &ProcessModel) -> f64 {
    difference_estimate(m, model)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartState {
    pub w: f64,
    pub t: u64,
}

impl ChartState {
    pub fn new(spec: &ChartSpec) -> Self {
        Self { w: spec.center, t: 0 }
    }
}

/// Feeds one statistic into the chart. Signals when the plotted value lies
/// strictly outside the limits.
#[inline]
pub fn update(state: ChartState, spec: &ChartSpec, z: f64) -> (ChartState, bool) {
    let w = match spec.kind {
        ChartKind::Shewhart => z,
        ChartKind::Ewma => spec.lambda * z + (1.0 - spec.lambda) * state.w,
    };
    let signal = (w - spec.center).abs() > spec.half_width;
    (ChartState { w, t: state.t + 1 }, signal)
}
