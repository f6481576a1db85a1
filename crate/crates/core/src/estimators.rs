//! Point estimators of the mean of Y that borrow strength from an auxiliary
//! variable X with a known population mean.

use crate::error::{Error, Result};
use crate::stochastics::{PairedSample, ProcessModel};

/// Sufficient statistics of one subgroup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleMoments {
    pub n: usize,
    pub y_bar: f64,
    pub x_bar: f64,
    /// `None` when `n < 2`.
    pub second: Option<SecondMoments>,
}

/// Unbiased (denominator `n - 1`) second moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondMoments {
    pub s_yx: f64,
    pub s_x2: f64,
    pub s_y2: f64,
}

impl SampleMoments {
    /// Moments from subgroup means only (second moments undefined).
    pub fn from_means(n: usize, y_bar: f64, x_bar: f64) -> Self {
        Self { n, y_bar, x_bar, second: None }
    }

    pub fn second(&self) -> Result<&SecondMoments> {
        self.second.as_ref().ok_or(Error::SubgroupTooSmall(self.n))
    }
}

/// Coefficients of variation and correlation, as population quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyInputs {
    pub rho: f64,
    pub c_x: f64,
    pub c_y: f64,
}

impl EfficiencyInputs {
    pub fn new(rho: f64, c_x: f64, c_y: f64) -> Result<Self> {
        let ok = |c: f64| c.is_finite() && c > 0.0;
        if !ok(c_x) || !ok(c_y) {
            return Err(Error::InvalidModel(format!(
                "coefficients of variation must be finite and positive (c_x={c_x}, c_y={c_y})"
            )));
        }
        Ok(Self { rho, c_x, c_y })
    }
}

pub fn moments(sample: &PairedSample) -> SampleMoments {
    let n = sample.len();
    let nf = n as f64;
    let y_bar = sample.y.iter().sum::<f64>() / nf;
    let x_bar = sample.x.iter().sum::<f64>() / nf;
    if n < 2 {
        return SampleMoments::from_means(n, y_bar, x_bar);
    }
    let (mut syx, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&y, &x) in sample.y.iter().zip(&sample.x) {
        let dy = y - y_bar;
        let dx = x - x_bar;
        syx += dy * dx;
        sxx += dx * dx;
        syy += dy * dy;
    }
    let d = nf - 1.0;
    SampleMoments {
        n,
        y_bar,
        x_bar,
        second: Some(SecondMoments { s_yx: syx / d, s_x2: sxx / d, s_y2: syy / d }),
    }
}

/// The conventional estimator, `y_bar`.
pub fn mean_estimate(m: &SampleMoments) -> f64 {
    m.y_bar
}

/// Classical ratio estimator `(y_bar / x_bar) * mu_x`.
pub fn ratio_estimate(m: &SampleMoments, mu_x: f64) -> Result<f64> {
    if m.x_bar == 0.0 {
        return Err(Error::DivisionByZeroMean);
    }
    Ok(m.y_bar / m.x_bar * mu_x)
}

/// Product estimator `y_bar * x_bar / mu_x`.
pub fn product_estimate(m: &SampleMoments, mu_x: f64) -> Result<f64> {
    if mu_x == 0.0 {
        return Err(Error::ZeroPopulationMean);
    }
    Ok(m.y_bar * m.x_bar / mu_x)
}

/// Difference estimator `y_bar + beta * (mu_x0 - x_bar)` with the known
/// population slope. This is the statistic plotted on the AIB charts.
pub fn difference_estimate(m: &SampleMoments, model: &ProcessModel) -> f64 {
    difference_with_slope(m.y_bar, m.x_bar, model.beta(), model.mu_x0)
}

#[inline]
pub(crate) fn difference_with_slope(y_bar: f64, x_bar: f64, beta: f64, mu_x: f64) -> f64 {
    y_bar + beta * (mu_x - x_bar)
}

/// Linear regression estimator using the sample slope `S_yx / S_x^2`.
pub fn regression_estimate(m: &SampleMoments, mu_x: f64) -> Result<f64> {
    let s = m.second()?;
    if s.s_x2 == 0.0 {
        return Err(Error::DegenerateDesign);
    }
    Ok(m.y_bar + s.s_yx / s.s_x2 * (mu_x - m.x_bar))
}

/// Ratio estimator beats the sample mean when `rho > c_x / (2 c_y)`.
pub fn ratio_preferred(e: &EfficiencyInputs) -> bool {
    e.rho > 0.5 * e.c_x / e.c_y
}

/// Product estimator beats the sample mean when `rho < -c_x / (2 c_y)`.
pub fn product_preferred(e: &EfficiencyInputs) -> bool {
    e.rho < -0.5 * e.c_x / e.c_y
}
