//! Auxiliary-information-based (AIB) control charts and the tools to study
//! how they behave when the auxiliary variable does not stay put.
//!
//! * [`stochastics`]: bivariate-normal process model, shift scenarios and
//!   reproducible subgroup streams.
//! * [`estimators`]: ratio, product, difference and regression estimators.
//! * [`charts`]: AIB-Shewhart and AIB-EWMA statistics and limits.
//! * [`runlength`]: Monte Carlo run-length engine.
//! * [`oracles`]: closed-form and Markov-chain ARLs, limit calibration.
//! * [`experiments`]: Case I grid, Case II masking demo, profile identity.
//! * [`cli`]: the `aibmon` command-line front end.

pub mod charts;
pub mod cli;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod oracles;
pub mod runlength;
pub mod stochastics;

pub use charts::{aib_statistic, make_limits, update, ChartKind, ChartSpec, ChartState};
pub use error::{Error, Result};
pub use estimators::{moments, SampleMoments};
pub use runlength::{estimate_runlength, run_to_signal, RunLength, RunLengthSummary, SimulationConfig};
pub use stochastics::{shifted_means, sample_subgroup, PairedSample, ProcessModel, ShiftMode, ShiftScenario, StreamKey};
