//! Monte Carlo run-length engine.
//!
//! Replication `i` of a configuration always draws from
//! `StreamKey(master_seed, i)`, and summaries are computed from the full
//! ordered run-length vector with exact integer accumulators, so results do
//! not depend on the number of worker threads or how replications are
//! sharded.

use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charts::{update, ChartSpec, ChartState};
use crate::error::{Error, Result};
use crate::estimators::difference_with_slope;
use crate::stochastics::{shifted_means, subgroup_means, ProcessModel, ShiftScenario, StreamKey};

pub const DEFAULT_REPS: u64 = 50_000;
pub const DEFAULT_RL_CAP: u64 = 10_000_000;
/// Largest accepted fraction of censored runs.
pub const MAX_CENSORED_FRACTION: f64 = 0.001;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationConfig {
    pub model: ProcessModel,
    pub scenario: ShiftScenario,
    pub spec: ChartSpec,
    pub reps: u64,
    pub master_seed: u64,
    pub rl_cap: u64,
}

impl SimulationConfig {
    pub fn new(model: ProcessModel, scenario: ShiftScenario, spec: ChartSpec) -> Self {
        Self { model, scenario, spec, reps: DEFAULT_REPS, master_seed: 0, rl_cap: DEFAULT_RL_CAP }
    }

    pub fn reps(mut self, reps: u64) -> Self {
        self.reps = reps;
        self
    }

    pub fn seed(mut self, master_seed: u64) -> Self {
        self.master_seed = master_seed;
        self
    }

    pub fn rl_cap(mut self, rl_cap: u64) -> Self {
        self.rl_cap = rl_cap;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        self.scenario.validate(&self.model)?;
        self.spec.validate()?;
        if self.reps == 0 {
            return Err(Error::InvalidConfig("reps must be >= 1".into()));
        }
        if self.rl_cap == 0 {
            return Err(Error::InvalidConfig("rl_cap must be >= 1".into()));
        }
        Ok(())
    }
}

/// Outcome of one replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RunLength {
    pub length: u64,
    /// The chart had not signalled when the cap was reached.
    pub censored: bool,
}

/// Validated configuration with the shifted means resolved.
#[derive(Debug, Clone, Copy)]
struct Simulator {
    cfg: SimulationConfig,
    mu_y1: f64,
    mu_x1: f64,
    beta: f64,
}

impl Simulator {
    fn new(cfg: &SimulationConfig) -> Result<Self> {
        cfg.validate()?;
        let (mu_y1, mu_x1) = shifted_means(&cfg.model, &cfg.scenario)?;
        Ok(Self { cfg: *cfg, mu_y1, mu_x1, beta: cfg.model.beta() })
    }

    #[inline]
    fn means_at(&self, t: u64) -> (f64, f64) {
        if t < self.cfg.scenario.changepoint {
            (self.cfg.model.mu_y0, self.cfg.model.mu_x0)
        } else {
            (self.mu_y1, self.mu_x1)
        }
    }

    /// `t` is the 0-based absolute subgroup index. The chart always uses the
    /// in-control auxiliary mean, whatever the data were generated from.
    #[inline]
    fn observe(&self, stream: &crate::stochastics::ReplicationStream, t: u64) -> (f64, f64, f64) {
        let (mu_y, mu_x) = self.means_at(t);
        let (y_bar, x_bar) = subgroup_means(&self.cfg.model, mu_y, mu_x, stream, t);
        let z = difference_with_slope(y_bar, x_bar, self.beta, self.cfg.model.mu_x0);
        (y_bar, x_bar, z)
    }

    fn run(&self, key: StreamKey) -> RunLength {
        let stream = key.digest();
        let spec = &self.cfg.spec;
        let changepoint = self.cfg.scenario.changepoint;
        let mut state = ChartState::new(spec);
        let mut t = 0u64;
        // Signals before the changepoint are not counted; the chart keeps running.
        while t < changepoint {
            let (_, _, z) = self.observe(&stream, t);
            state = update(state, spec, z).0;
            t += 1;
        }
        for rl in 1..=self.cfg.rl_cap {
            let (_, _, z) = self.observe(&stream, t);
            let (next, signal) = update(state, spec, z);
            if signal {
                return RunLength { length: rl, censored: false };
            }
            state = next;
            t += 1;
        }
        RunLength { length: self.cfg.rl_cap, censored: true }
    }
}

/// Runs one replication until the first signal after the changepoint.
///
/// The run length counts post-changepoint subgroups, starting at 1.
pub fn run_to_signal(config: &SimulationConfig, key: StreamKey) -> Result<RunLength> {
    Ok(Simulator::new(config)?.run(key))
}

/// Run lengths for a contiguous block of replication indices, in index order.
pub fn run_lengths(config: &SimulationConfig, replications: Range<u64>) -> Result<Vec<RunLength>> {
    let sim = Simulator::new(config)?;
    let seed = config.master_seed;
    Ok(replications
        .into_par_iter()
        .map(|i| sim.run(StreamKey::new(seed, i)))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Percentiles {
    pub p5: f64,
    pub p25: f64,
    pub p50: f64,
    pub p75: f64,
    pub p95: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunLengthSummary {
    pub arl: f64,
    pub sdrl: f64,
    pub se_arl: f64,
    pub reps: u64,
    pub percentiles: Percentiles,
    pub censored: u64,
}

impl RunLengthSummary {
    pub fn censored_fraction(&self) -> f64 {
        self.censored as f64 / self.reps as f64
    }
}

/// Linear interpolation between order statistics (Hyndman-Fan type 7).
fn quantile(sorted: &[u64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    let (a, b) = (sorted[lo] as f64, sorted[hi] as f64);
    a + (h - lo as f64) * (b - a)
}

/// Summarizes a multiset of run lengths. The result does not depend on the
/// order of `runs`.
pub fn summarize(runs: &[RunLength]) -> RunLengthSummary {
    assert!(!runs.is_empty(), "cannot summarize zero runs");
    let reps = runs.len() as u64;
    let mut sum: u128 = 0;
    let mut sum_sq: u128 = 0;
    let mut censored = 0;
    let mut sorted = Vec::with_capacity(runs.len());
    for r in runs {
        let l = r.length as u128;
        sum += l;
        sum_sq += l * l;
        censored += r.censored as u64;
        sorted.push(r.length);
    }
    sorted.sort_unstable();
    let n = reps as f64;
    let arl = sum as f64 / n;
    let sdrl = if reps > 1 {
        // n * sum_sq - sum^2 is exact in u128 for any realistic run count.
        let num = (reps as u128 * sum_sq - sum * sum) as f64;
        (num / (n * (n - 1.0))).sqrt()
    } else {
        0.0
    };
    RunLengthSummary {
        arl,
        sdrl,
        se_arl: sdrl / n.sqrt(),
        reps,
        percentiles: Percentiles {
            p5: quantile(&sorted, 0.05),
            p25: quantile(&sorted, 0.25),
            p50: quantile(&sorted, 0.50),
            p75: quantile(&sorted, 0.75),
            p95: quantile(&sorted, 0.95),
        },
        censored,
    }
}

fn check_censoring(s: RunLengthSummary) -> Result<RunLengthSummary> {
    if s.censored_fraction() >= MAX_CENSORED_FRACTION {
        return Err(Error::ExcessCensoring { censored: s.censored, reps: s.reps });
    }
    Ok(s)
}

/// Estimates the run-length distribution from `config.reps` replications on
/// the current rayon pool.
pub fn estimate_runlength(config: &SimulationConfig) -> Result<RunLengthSummary> {
    let runs = run_lengths(config, 0..config.reps)?;
    check_censoring(summarize(&runs))
}

/// Same as [`estimate_runlength`] on a dedicated pool of `threads` workers.
pub fn estimate_runlength_with_threads(config: &SimulationConfig, threads: usize) -> Result<RunLengthSummary> {
    with_threads(Some(threads), || estimate_runlength(config))
}

/// Runs `f` inside a rayon pool with the requested worker count, or on the
/// global pool when `threads` is `None`.
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .expect("failed to build thread pool")
            .install(f),
        None => f(),
    }
}

/// One row of a chart path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    /// 1-based absolute subgroup index.
    pub t: u64,
    pub x_bar: f64,
    pub y_bar: f64,
    pub z: f64,
    pub w: f64,
    pub lcl: f64,
    pub ucl: f64,
    pub signal: bool,
    pub out_of_control: bool,
}

/// Emits the full chart path for `n_subgroups` subgroups without stopping
/// at signals.
pub fn trace(config: &SimulationConfig, key: StreamKey, n_subgroups: u64) -> Result<Vec<TraceRow>> {
    if n_subgroups == 0 {
        return Err(Error::InvalidConfig("n_subgroups must be >= 1".into()));
    }
    let sim = Simulator::new(config)?;
    let stream = key.digest();
    let spec = &config.spec;
    let mut state = ChartState::new(spec);
    let mut rows = Vec::with_capacity(n_subgroups as usize);
    for t in 0..n_subgroups {
        let (y_bar, x_bar, z) = sim.observe(&stream, t);
        let (next, signal) = update(state, spec, z);
        state = next;
        rows.push(TraceRow {
            t: t + 1,
            x_bar,
            y_bar,
            z,
            w: state.w,
            lcl: spec.lcl(),
            ucl: spec.ucl(),
            signal,
            out_of_control: t >= config.scenario.changepoint,
        });
    }
    Ok(rows)
}
