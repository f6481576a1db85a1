//! Bivariate-normal process model, shift scenarios and reproducible
//! subgroup generation.
//!
//! Every subgroup is a pure function of `(StreamKey, subgroup_index)`: the
//! replication key is hashed once with SHA-256 and each subgroup gets its own
//! xoshiro256++ generator seeded from that digest and the subgroup index. No
//! generator state is carried between subgroups, so replications can run on
//! any thread in any order and still reproduce bit for bit.

use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// In-control description of the pair `(Y, X)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessModel {
    pub mu_y0: f64,
    pub mu_x0: f64,
    pub sigma_y: f64,
    pub sigma_x: f64,
    pub rho: f64,
    /// Subgroup size.
    pub n: usize,
}

impl Default for ProcessModel {
    fn default() -> Self {
        Self {
            mu_y0: 0.0,
            mu_x0: 0.0,
            sigma_y: 1.0,
            sigma_x: 1.0,
            rho: 0.0,
            n: 1,
        }
    }
}

impl ProcessModel {
    pub fn new(mu_y0: f64, mu_x0: f64, sigma_y: f64, sigma_x: f64, rho: f64, n: usize) -> Result<Self> {
        let m = Self { mu_y0, mu_x0, sigma_y, sigma_x, rho, n };
        m.validate()?;
        Ok(m)
    }

    /// Unit-scale model (zero means, unit deviations, `n = 1`) with the given correlation.
    pub fn standard(rho: f64) -> Result<Self> {
        Self::new(0.0, 0.0, 1.0, 1.0, rho, 1)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu_y0.is_finite() && self.mu_x0.is_finite()) {
            return Err(Error::InvalidModel("means must be finite".into()));
        }
        if !(self.sigma_y.is_finite() && self.sigma_y > 0.0) {
            return Err(Error::InvalidModel(format!("sigma_y must be > 0, got {}", self.sigma_y)));
        }
        if !(self.sigma_x.is_finite() && self.sigma_x > 0.0) {
            return Err(Error::InvalidModel(format!("sigma_x must be > 0, got {}", self.sigma_x)));
        }
        if !(self.rho.abs() < 1.0) {
            return Err(Error::InvalidModel(format!("|rho| must be < 1, got {}", self.rho)));
        }
        if self.n == 0 {
            return Err(Error::InvalidModel("subgroup size n must be >= 1".into()));
        }
        if !self.beta().is_finite() {
            return Err(Error::InvalidModel("regression slope beta is not finite".into()));
        }
        Ok(())
    }

    /// Population regression slope of Y on X, `rho * sigma_y / sigma_x`.
    pub fn beta(&self) -> f64 {
        self.rho * self.sigma_y / self.sigma_x
    }

    /// Standard deviation of the conventional subgroup mean, `sigma_y / sqrt(n)`.
    pub fn se_y(&self) -> f64 {
        self.sigma_y / (self.n as f64).sqrt()
    }

    pub fn se_x(&self) -> f64 {
        self.sigma_x / (self.n as f64).sqrt()
    }

    /// Standard deviation of the AIB statistic, `sqrt(1 - rho^2) * sigma_y / sqrt(n)`.
    pub fn se_aib(&self) -> f64 {
        (1.0 - self.rho * self.rho).sqrt() * self.se_y()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShiftMode {
    /// `delta_y` and `delta_x` shift the two means independently.
    Independent,
    /// X moves by exactly the amount that cancels the Y shift inside the
    /// AIB statistic; `delta_x` is ignored.
    Masking,
}

impl std::str::FromStr for ShiftMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "independent" => Ok(ShiftMode::Independent),
            "masking" => Ok(ShiftMode::Masking),
            other => Err(Error::InvalidScenario(format!("unknown shift mode '{other}'"))),
        }
    }
}

/// Out-of-control description. Shifts are standardized: `delta_y` is in
/// units of `sigma_y / sqrt(n)` and `delta_x` in units of `sigma_x / sqrt(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftScenario {
    #[serde(default)]
    pub delta_y: f64,
    #[serde(default)]
    pub delta_x: f64,
    pub mode: ShiftMode,
    /// Number of in-control subgroups before the shift; 0 means zero-state.
    #[serde(default)]
    pub changepoint: u64,
}

impl Default for ShiftScenario {
    fn default() -> Self {
        Self::in_control()
    }
}

impl ShiftScenario {
    pub fn in_control() -> Self {
        Self::independent(0.0, 0.0)
    }

    pub fn independent(delta_y: f64, delta_x: f64) -> Self {
        Self { delta_y, delta_x, mode: ShiftMode::Independent, changepoint: 0 }
    }

    pub fn masking(delta_y: f64) -> Self {
        Self { delta_y, delta_x: 0.0, mode: ShiftMode::Masking, changepoint: 0 }
    }

    pub fn with_changepoint(mut self, changepoint: u64) -> Self {
        self.changepoint = changepoint;
        self
    }

    pub fn validate(&self, model: &ProcessModel) -> Result<()> {
        if !(self.delta_y.is_finite() && self.delta_x.is_finite()) {
            return Err(Error::InvalidScenario("shifts must be finite".into()));
        }
        if self.mode == ShiftMode::Masking && model.rho == 0.0 {
            return Err(Error::MaskingWithZeroCorrelation);
        }
        Ok(())
    }
}

/// Out-of-control means `(mu_y1, mu_x1)` in native units.
pub fn shifted_means(model: &ProcessModel, scenario: &ShiftScenario) -> Result<(f64, f64)> {
    model.validate()?;
    scenario.validate(model)?;
    let root_n = (model.n as f64).sqrt();
    let shift_y = scenario.delta_y * model.sigma_y / root_n;
    let mu_y1 = model.mu_y0 + shift_y;
    let mu_x1 = match scenario.mode {
        ShiftMode::Independent => model.mu_x0 + scenario.delta_x * model.sigma_x / root_n,
        ShiftMode::Masking => model.mu_x0 + shift_y / model.beta(),
    };
    Ok((mu_y1, mu_x1))
}

/// One subgroup of `n` observed `(x, y)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSample {
    pub y: Vec<f64>,
    pub x: Vec<f64>,
}

impl PairedSample {
    pub fn new(y: Vec<f64>, x: Vec<f64>) -> Result<Self> {
        if y.len() != x.len() {
            return Err(Error::LengthMismatch { y: y.len(), x: x.len() });
        }
        if y.is_empty() {
            return Err(Error::SubgroupTooSmall(0));
        }
        Ok(Self { y, x })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }
}

/// Identifies the random substream of one replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub master_seed: u64,
    pub replication_index: u64,
}

impl StreamKey {
    pub fn new(master_seed: u64, replication_index: u64) -> Self {
        Self { master_seed, replication_index }
    }

    /// Hashes the key into a 128-bit replication digest.
    pub fn digest(&self) -> ReplicationStream {
        let mut h = Sha256::new();
        h.update(self.master_seed.to_le_bytes());
        h.update(self.replication_index.to_le_bytes());
        let out = h.finalize();
        let lo = u64::from_le_bytes(out[0..8].try_into().expect("8 bytes"));
        let hi = u64::from_le_bytes(out[8..16].try_into().expect("8 bytes"));
        ReplicationStream { lo, hi }
    }

    /// A 64-bit seed derived from this key, for seeding nested experiments.
    pub fn child_seed(&self) -> u64 {
        self.digest().lo
    }
}

/// Pre-hashed replication key; cheap to copy and to derive subgroup
/// generators from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReplicationStream {
    lo: u64,
    hi: u64,
}

impl ReplicationStream {
    pub(crate) fn subgroup_rng(&self, subgroup_index: u64) -> Xoshiro256PlusPlus {
        let seed = mix64(self.lo ^ mix64(self.hi ^ subgroup_index));
        Xoshiro256PlusPlus::seed_from_u64(seed)
    }
}

/// SplitMix64 finalizer; a bijection on u64.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Draws `(x, y)` for one observation: X first, then Y from its conditional law.
#[inline]
fn draw_pair<R: rand::Rng>(rng: &mut R, model: &ProcessModel, mu_y: f64, mu_x: f64, resid_sd: f64) -> (f64, f64) {
    let z1: f64 = StandardNormal.sample(rng);
    let z2: f64 = StandardNormal.sample(rng);
    let x = mu_x + model.sigma_x * z1;
    let y = mu_y + model.beta() * (x - mu_x) + resid_sd * z2;
    (x, y)
}

/// Draws subgroup `subgroup_index` of the replication identified by `key`.
pub fn sample_subgroup(
    model: &ProcessModel,
    mu_y: f64,
    mu_x: f64,
    key: StreamKey,
    subgroup_index: u64,
) -> Result<PairedSample> {
    model.validate()?;
    let stream = key.digest();
    let mut rng = stream.subgroup_rng(subgroup_index);
    let resid_sd = model.sigma_y * (1.0 - model.rho * model.rho).sqrt();
    let mut y = Vec::with_capacity(model.n);
    let mut x = Vec::with_capacity(model.n);
    for _ in 0..model.n {
        let (xi, yi) = draw_pair(&mut rng, model, mu_y, mu_x, resid_sd);
        x.push(xi);
        y.push(yi);
    }
    Ok(PairedSample { y, x })
}

/// Subgroup means `(y_bar, x_bar)` without materializing the sample.
///
/// Bit-identical to the means of [`sample_subgroup`] for the same inputs.
/// The model is assumed to be validated by the caller.
pub(crate) fn subgroup_means(
    model: &ProcessModel,
    mu_y: f64,
    mu_x: f64,
    stream: &ReplicationStream,
    subgroup_index: u64,
) -> (f64, f64) {
    let mut rng = stream.subgroup_rng(subgroup_index);
    let resid_sd = model.sigma_y * (1.0 - model.rho * model.rho).sqrt();
    let (mut sy, mut sx) = (0.0, 0.0);
    for _ in 0..model.n {
        let (xi, yi) = draw_pair(&mut rng, model, mu_y, mu_x, resid_sd);
        sx += xi;
        sy += yi;
    }
    let n = model.n as f64;
    (sy / n, sx / n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(rho: f64) -> ProcessModel {
        ProcessModel::standard(rho).unwrap()
    }

    #[test]
    fn shifted_means_examples() {
        let m = model(0.5);
        assert_eq!(shifted_means(&m, &ShiftScenario::in_control()).unwrap(), (0.0, 0.0));
        assert_eq!(shifted_means(&m, &ShiftScenario::masking(2.0)).unwrap(), (2.0, 4.0));
        assert_eq!(shifted_means(&m, &ShiftScenario::masking(0.0)).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn shifted_means_scale_with_n_and_sigma() {
        let m = ProcessModel::new(10.0, 5.0, 2.0, 4.0, 0.5, 4).unwrap();
        let (my, mx) = shifted_means(&m, &ShiftScenario::independent(1.0, 0.5)).unwrap();
        assert_eq!(my, 10.0 + 1.0 * 2.0 / 2.0);
        assert_eq!(mx, 5.0 + 0.5 * 4.0 / 2.0);
        // beta = 0.25, raw Y shift 1.0 -> X shift 4.0
        let (_, mx) = shifted_means(&m, &ShiftScenario::masking(1.0)).unwrap();
        assert_eq!(mx, 9.0);
    }

    #[test]
    fn masking_without_correlation_is_rejected() {
        let m = model(0.0);
        assert_eq!(
            shifted_means(&m, &ShiftScenario::masking(1.0)),
            Err(Error::MaskingWithZeroCorrelation)
        );
    }

    #[test]
    fn model_validation() {
        assert!(ProcessModel::standard(1.0).is_err());
        assert!(ProcessModel::standard(-1.0).is_err());
        assert!(ProcessModel::standard(0.999).is_ok());
        assert!(ProcessModel::new(0.0, 0.0, 0.0, 1.0, 0.1, 1).is_err());
        assert!(ProcessModel::new(0.0, 0.0, 1.0, -1.0, 0.1, 1).is_err());
        assert!(ProcessModel::new(0.0, 0.0, 1.0, 1.0, 0.1, 0).is_err());
        assert!(ProcessModel::new(f64::NAN, 0.0, 1.0, 1.0, 0.1, 1).is_err());
        assert!(ProcessModel::standard(f64::NAN).is_err());
    }

    #[test]
    fn replay_is_bit_identical() {
        let m = ProcessModel::new(1.0, 2.0, 1.5, 0.5, 0.3, 7).unwrap();
        let key = StreamKey::new(42, 17);
        let a = sample_subgroup(&m, 1.0, 2.0, key, 3).unwrap();
        let b = sample_subgroup(&m, 1.0, 2.0, key, 3).unwrap();
        assert_eq!(a, b);
        let c = sample_subgroup(&m, 1.0, 2.0, key, 4).unwrap();
        assert_ne!(a, c);
        let d = sample_subgroup(&m, 1.0, 2.0, StreamKey::new(42, 18), 3).unwrap();
        assert_ne!(a, d);
    }

    #[test]
    fn means_path_matches_sample_path() {
        let m = ProcessModel::new(1.0, 2.0, 1.5, 0.5, -0.4, 5).unwrap();
        let key = StreamKey::new(9, 1);
        let stream = key.digest();
        for idx in 0..20 {
            let s = sample_subgroup(&m, 0.3, 2.2, key, idx).unwrap();
            let ybar = s.y.iter().sum::<f64>() / 5.0;
            let xbar = s.x.iter().sum::<f64>() / 5.0;
            assert_eq!(subgroup_means(&m, 0.3, 2.2, &stream, idx), (ybar, xbar));
        }
    }

    #[test]
    fn zero_correlation_y_does_not_depend_on_x() {
        // With rho = 0 the Y residual draw is untouched by the X draw, so
        // moving mu_x leaves Y unchanged.
        let m = ProcessModel::new(0.0, 0.0, 1.0, 1.0, 0.0, 3).unwrap();
        let key = StreamKey::new(1, 2);
        let a = sample_subgroup(&m, 0.0, 0.0, key, 0).unwrap();
        let b = sample_subgroup(&m, 0.0, 50.0, key, 0).unwrap();
        assert_eq!(a.y, b.y);
    }

    #[test]
    fn paired_sample_length_check() {
        assert!(PairedSample::new(vec![1.0], vec![1.0, 2.0]).is_err());
        assert!(PairedSample::new(vec![], vec![]).is_err());
    }
}
