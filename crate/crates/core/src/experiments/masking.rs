//! Case II: a coupled shift in X that hides a shift in Y from the AIB chart.

use serde::Serialize;

use crate::charts::{make_limits, ChartKind};
use crate::error::{Error, Result};
use crate::oracles::{ewma_arl_markov, standardized_shift, DEFAULT_STATES};
use crate::runlength::{estimate_runlength, trace, RunLengthSummary, SimulationConfig, TraceRow};
use crate::stochastics::{ProcessModel, ShiftScenario, StreamKey};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskingDemo {
    pub rho: f64,
    pub delta_y: f64,
    pub lambda: f64,
    pub limit_multiplier: f64,
    pub n_subgroups: u64,
    pub changepoint: u64,
    pub master_seed: u64,
    /// Replications for the counterfactual ARL estimate.
    pub reps: u64,
}

impl Default for MaskingDemo {
    fn default() -> Self {
        Self {
            rho: 0.5,
            delta_y: 2.0,
            lambda: 0.1,
            limit_multiplier: 2.454,
            n_subgroups: 200,
            changepoint: 25,
            master_seed: 0,
            reps: 50_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaskingSummary {
    pub signals: usize,
    /// Signals after the changepoint.
    pub post_shift_signals: usize,
    pub first_signal: Option<u64>,
    /// Simulated ARL of the same Y shift with X left in control.
    pub counterfactual: RunLengthSummary,
    /// Markov-chain ARL of the same counterfactual.
    pub counterfactual_oracle: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaskingOutput {
    pub trace: Vec<TraceRow>,
    pub summary: MaskingSummary,
}

impl MaskingDemo {
    fn model(&self) -> Result<ProcessModel> {
        let model = ProcessModel::standard(self.rho)?;
        if model.rho == 0.0 {
            return Err(Error::MaskingWithZeroCorrelation);
        }
        Ok(model)
    }

    pub fn config(&self) -> Result<SimulationConfig> {
        let model = self.model()?;
        let spec = make_limits(ChartKind::Ewma, self.lambda, self.limit_multiplier, &model)?;
        let scenario = ShiftScenario::masking(self.delta_y).with_changepoint(self.changepoint);
        Ok(SimulationConfig::new(model, scenario, spec).seed(self.master_seed).reps(self.reps))
    }

    /// The same Y shift with X in control, measured from the shift onset.
    pub fn counterfactual_config(&self) -> Result<SimulationConfig> {
        let mut cfg = self.config()?;
        cfg.scenario = ShiftScenario::independent(self.delta_y, 0.0);
        cfg.master_seed = StreamKey::new(self.master_seed, u64::MAX).child_seed();
        Ok(cfg)
    }

    pub fn run(&self) -> Result<MaskingOutput> {
        let cfg = self.config()?;
        let rows = trace(&cfg, StreamKey::new(self.master_seed, 0), self.n_subgroups)?;
        let signals = rows.iter().filter(|r| r.signal).count();
        let post_shift_signals = rows.iter().filter(|r| r.signal && r.out_of_control).count();
        let first_signal = rows.iter().find(|r| r.signal).map(|r| r.t);

        let cf = self.counterfactual_config()?;
        let counterfactual = estimate_runlength(&cf)?;
        let s = standardized_shift(&cf.model, &cf.scenario)?;
        let counterfactual_oracle = ewma_arl_markov(self.lambda, self.limit_multiplier, s, DEFAULT_STATES)?;

        Ok(MaskingOutput {
            trace: rows,
            summary: MaskingSummary { signals, post_shift_signals, first_signal, counterfactual, counterfactual_oracle },
        })
    }
}
