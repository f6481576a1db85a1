//! The `aibmon` command line.
//!
//! Exit codes: 0 success, 1 runtime failure or failed `--check`, 2 invalid
//! arguments or configuration, 3 too many censored runs.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::charts::{make_limits, ChartKind};
use crate::error::{Error, Result};
use crate::experiments::output::{write_scatter, write_summary_csv, write_summary_jsonl, write_table1, write_trace};
use crate::experiments::{profile_equivalence_trials, reproduce_table1, MaskingDemo};
use crate::oracles::calibrate_limit;
use crate::runlength::{estimate_runlength, with_threads, SimulationConfig, DEFAULT_REPS, DEFAULT_RL_CAP};
use crate::stochastics::{ProcessModel, ShiftMode, ShiftScenario};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_CENSORED: i32 = 3;

/// Default design in-control ARL.
pub const DEFAULT_TARGET_ARL0: f64 = 200.0;

#[derive(Debug, Parser)]
#[command(
    name = "aibmon",
    version,
    about = "Simulate and calibrate auxiliary-information-based (AIB) control charts",
    long_about = "Simulate and calibrate auxiliary-information-based (AIB) control charts.\n\n\
        Shifts are standardized: --delta-y is in units of sigma_y/sqrt(n) and --delta-x in units of \
        sigma_x/sqrt(n). All randomness comes from --seed."
)]
pub struct Cli {
    /// Worker threads; results do not depend on this value.
    #[arg(long, global = true, env = "AIBMON_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the run-length distribution of one chart under one scenario.
    Simulate(SimulateArgs),
    /// Find the limit multiplier that gives a target in-control ARL.
    Calibrate(CalibrateArgs),
    /// Reproduce the Case I grid (Y in control, X mean shifted) as table1.csv.
    Table1(Table1Args),
    /// Trace an AIB-EWMA chart through a masked shift (trace.csv, scatter.csv).
    MaskDemo(MaskDemoArgs),
    /// Check that the AIB statistic equals the profile deviation plus a constant.
    ProfileEquiv(ProfileEquivArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// TOML run configuration; command-line flags take precedence over it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Chart type: shewhart or ewma [default: shewhart]
    #[arg(long)]
    pub chart: Option<ChartKind>,
    /// EWMA smoothing constant in (0, 1] [default: 0.1]
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Limit multiplier L; if omitted, calibrated to --target-arl0
    #[arg(long = "L")]
    pub limit: Option<f64>,
    /// Calibrate L to this in-control ARL [default: 200]
    #[arg(long)]
    pub target_arl0: Option<f64>,
    /// Correlation between Y and X, |rho| < 1 [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub rho: Option<f64>,
    /// Subgroup size [default: 1]
    #[arg(long)]
    pub n: Option<usize>,
    /// In-control mean of Y [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub mu_y: Option<f64>,
    /// In-control mean of X [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub mu_x: Option<f64>,
    /// Standard deviation of Y [default: 1]
    #[arg(long)]
    pub sigma_y: Option<f64>,
    /// Standard deviation of X [default: 1]
    #[arg(long)]
    pub sigma_x: Option<f64>,
    /// Shift in the mean of Y, in units of sigma_y/sqrt(n) [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub delta_y: Option<f64>,
    /// Shift in the mean of X, in units of sigma_x/sqrt(n); ignored for masking [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub delta_x: Option<f64>,
    /// independent, or masking (X shift chosen to cancel the Y shift) [default: independent]
    #[arg(long)]
    pub mode: Option<ShiftMode>,
    /// In-control subgroups before the shift; 0 is zero-state [default: 0]
    #[arg(long)]
    pub changepoint: Option<u64>,
    /// Replications [default: 50000]
    #[arg(long)]
    pub reps: Option<u64>,
    /// Master seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Run-length cap; capped runs count as censored [default: 10000000]
    #[arg(long)]
    pub rl_cap: Option<u64>,
    /// Output file; .jsonl/.json writes JSON lines, anything else CSV
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Chart type: shewhart or ewma
    #[arg(long)]
    pub chart: ChartKind,
    /// EWMA smoothing constant in (0, 1]
    #[arg(long, default_value_t = 0.1)]
    pub lambda: f64,
    /// Target in-control ARL
    #[arg(long, default_value_t = DEFAULT_TARGET_ARL0)]
    pub target_arl0: f64,
}

#[derive(Debug, Args)]
pub struct Table1Args {
    /// Replications per cell (at least 10000)
    #[arg(long, default_value_t = DEFAULT_REPS)]
    pub reps: u64,
    /// Master seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV
    #[arg(long, default_value = "table1.csv")]
    pub out: PathBuf,
    /// Exit nonzero unless every cell is within max(5% relative, 3 SE) of the reference ARL
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Args)]
pub struct MaskDemoArgs {
    /// Correlation between Y and X (nonzero)
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    pub rho: f64,
    /// Masked shift in Y, in units of sigma_y/sqrt(n)
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub delta_y: f64,
    /// EWMA smoothing constant
    #[arg(long, default_value_t = 0.1)]
    pub lambda: f64,
    /// EWMA limit multiplier
    #[arg(long = "L", default_value_t = 2.454)]
    pub limit: f64,
    /// Subgroups to trace
    #[arg(long, default_value_t = 200)]
    pub n_subgroups: u64,
    /// In-control subgroups before the shift
    #[arg(long, default_value_t = 25)]
    pub changepoint: u64,
    /// Master seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Replications for the counterfactual ARL (X left in control)
    #[arg(long, default_value_t = DEFAULT_REPS)]
    pub reps: u64,
    /// Chart path CSV
    #[arg(long, default_value = "trace.csv")]
    pub trace_out: PathBuf,
    /// Paired-means scatter CSV
    #[arg(long, default_value = "scatter.csv")]
    pub scatter_out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ProfileEquivArgs {
    /// Randomized trials
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    /// Master seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest accepted gap, in ulps
    #[arg(long, default_value_t = 8.0)]
    pub max_ulps: f64,
}


/// Declarative run configuration for `simulate --config`.
#[derive(Debug, Default, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    pub model: Option<ModelSection>,
    pub scenario: Option<ScenarioSection>,
    pub chart: Option<ChartSection>,
    pub reps: Option<u64>,
    pub master_seed: Option<u64>,
    pub rl_cap: Option<u64>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub mu_y0: Option<f64>,
    pub mu_x0: Option<f64>,
    pub sigma_y: Option<f64>,
    pub sigma_x: Option<f64>,
    pub rho: Option<f64>,
    pub n: Option<usize>,
}

#[derive(Debug, Default, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub delta_y: Option<f64>,
    pub delta_x: Option<f64>,
    pub mode: Option<ShiftMode>,
    pub changepoint: Option<u64>,
}

#[derive(Debug, Default, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSection {
    pub kind: Option<ChartKind>,
    pub lambda: Option<f64>,
    #[serde(rename = "L")]
    pub limit_multiplier: Option<f64>,
    pub target_arl0: Option<f64>,
}

impl RunConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// A resolved `simulate` request.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatePlan {
    pub config: SimulationConfig,
    /// Set when L was calibrated rather than given.
    pub calibrated: Option<crate::oracles::Calibration>,
    pub out: Option<PathBuf>,
}

/// Merges defaults, the optional config file and flags (in increasing precedence).
pub fn resolve_simulate(args: &SimulateArgs) -> Result<SimulatePlan> {
    let file = match &args.config {
        Some(p) => RunConfigFile::load(p)?,
        None => RunConfigFile::default(),
    };
    let m = file.model.unwrap_or_default();
    let sc = file.scenario.unwrap_or_default();
    let ch = file.chart.unwrap_or_default();

    let model = ProcessModel::new(
        args.mu_y.or(m.mu_y0).unwrap_or(0.0),
        args.mu_x.or(m.mu_x0).unwrap_or(0.0),
        args.sigma_y.or(m.sigma_y).unwrap_or(1.0),
        args.sigma_x.or(m.sigma_x).unwrap_or(1.0),
        args.rho.or(m.rho).unwrap_or(0.0),
        args.n.or(m.n).unwrap_or(1),
    )?;
    let scenario = ShiftScenario {
        delta_y: args.delta_y.or(sc.delta_y).unwrap_or(0.0),
        delta_x: args.delta_x.or(sc.delta_x).unwrap_or(0.0),
        mode: args.mode.or(sc.mode).unwrap_or(ShiftMode::Independent),
        changepoint: args.changepoint.or(sc.changepoint).unwrap_or(0),
    };
    scenario.validate(&model)?;

    let kind = args.chart.or(ch.kind).unwrap_or(ChartKind::Shewhart);
    let lambda = match kind {
        ChartKind::Shewhart => 1.0,
        ChartKind::Ewma => args.lambda.or(ch.lambda).unwrap_or(0.1),
    };
    // An explicit flag beats anything from the file; between L and a
    // target, L wins at equal precedence.
    let (limit, target) = match (args.limit, args.target_arl0) {
        (Some(l), _) => (Some(l), None),
        (None, Some(t)) => (None, Some(t)),
        (None, None) => (ch.limit_multiplier, ch.target_arl0),
    };
    let (limit, calibrated) = match limit {
        Some(l) => (l, None),
        None => {
            let c = calibrate_limit(kind, lambda, target.unwrap_or(DEFAULT_TARGET_ARL0))?;
            (c.limit_multiplier, Some(c))
        }
    };
    let spec = make_limits(kind, lambda, limit, &model)?;
    let config = SimulationConfig::new(model, scenario, spec)
        .reps(args.reps.or(file.reps).unwrap_or(DEFAULT_REPS))
        .seed(args.seed.or(file.master_seed).unwrap_or(0))
        .rl_cap(args.rl_cap.or(file.rl_cap).unwrap_or(DEFAULT_RL_CAP));
    config.validate()?;
    Ok(SimulatePlan { config, calibrated, out: args.out.clone().or(file.out) })
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ExcessCensoring { .. } => EXIT_CENSORED,
        Error::InvalidModel(_)
        | Error::InvalidScenario(_)
        | Error::MaskingWithZeroCorrelation
        | Error::InvalidLambda(_)
        | Error::InvalidChart(_)
        | Error::InvalidConfig(_)
        | Error::InvalidStateCount(_)
        | Error::NoBracket(_) => EXIT_INVALID,
        _ => EXIT_FAILURE,
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(format!("cannot create {}: {e}", path.display())))
}

fn is_jsonl(path: &Path) -> bool {
    matches!(path.extension().and_then(|e| e.to_str()), Some("jsonl" | "json"))
}

fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<i32> {
    let plan = resolve_simulate(args)?;
    let cfg = &plan.config;
    if let Some(c) = &plan.calibrated {
        writeln!(out, "calibrated L = {:.4} ({}, in-control ARL {:.3})", c.limit_multiplier, c.method.as_str(), c.achieved_arl)?;
    }
    let s = estimate_runlength(cfg)?;
    writeln!(
        out,
        "{} chart (lambda {}, L {:.4}): ARL = {:.3} ± {:.3}  SDRL = {:.3}  median = {}  reps = {}  censored = {}",
        cfg.spec.kind, cfg.spec.lambda, cfg.spec.limit_multiplier, s.arl, s.se_arl, s.sdrl, s.percentiles.p50, s.reps, s.censored
    )?;
    if let Some(path) = &plan.out {
        let mut w = create(path)?;
        if is_jsonl(path) {
            write_summary_jsonl(&mut w, &s)?;
        } else {
            write_summary_csv(&mut w, &s)?;
        }
        w.flush()?;
    }
    Ok(EXIT_OK)
}

fn cmd_calibrate(args: &CalibrateArgs, out: &mut dyn Write) -> Result<i32> {
    let c = calibrate_limit(args.chart, args.lambda, args.target_arl0)?;
    writeln!(out, "L = {:.4}  method = {}  in-control ARL = {:.4}", c.limit_multiplier, c.method.as_str(), c.achieved_arl)?;
    Ok(EXIT_OK)
}

fn cmd_table1(args: &Table1Args, out: &mut dyn Write) -> Result<i32> {
    let cells = reproduce_table1(args.reps, args.seed)?;
    let mut w = create(&args.out)?;
    write_table1(&mut w, &cells)?;
    w.flush()?;

    writeln!(out, "{:>5} {:>7} {:>9} {:>6} {:>6} {:>10} {:>8} {:>8} {:>6}", "rho", "delta_x", "chart", "lambda", "L", "arl", "se", "ref", "check")?;
    let mut failed = 0;
    for c in &cells {
        let ok = c.passes();
        failed += !ok as usize;
        writeln!(
            out,
            "{:>5.2} {:>7.2} {:>9} {:>6.2} {:>6.3} {:>10.3} {:>8.3} {:>8.1} {:>6}",
            c.rho,
            c.delta_x,
            c.column.kind,
            c.column.lambda,
            c.column.limit_multiplier,
            c.summary.arl,
            c.summary.se_arl,
            c.reference_arl,
            if ok { "pass" } else { "FAIL" }
        )?;
    }
    writeln!(out, "{} of {} cells within max(5% relative, 3 SE)", cells.len() - failed, cells.len())?;
    Ok(if args.check && failed > 0 { EXIT_FAILURE } else { EXIT_OK })
}

fn cmd_mask_demo(args: &MaskDemoArgs, out: &mut dyn Write) -> Result<i32> {
    let demo = MaskingDemo {
        rho: args.rho,
        delta_y: args.delta_y,
        lambda: args.lambda,
        limit_multiplier: args.limit,
        n_subgroups: args.n_subgroups,
        changepoint: args.changepoint,
        master_seed: args.seed,
        reps: args.reps,
    };
    let res = demo.run()?;
    let mut w = create(&args.trace_out)?;
    write_trace(&mut w, &res.trace)?;
    w.flush()?;
    let mut w = create(&args.scatter_out)?;
    write_scatter(&mut w, &res.trace)?;
    w.flush()?;
    let s = &res.summary;
    writeln!(
        out,
        "masked shift delta_y = {} (rho {}): {} signals in {} subgroups ({} after the shift at t = {})",
        args.delta_y,
        args.rho,
        s.signals,
        args.n_subgroups,
        s.post_shift_signals,
        args.changepoint + 1
    )?;
    writeln!(
        out,
        "with X in control the same shift gives ARL = {:.3} ± {:.3} (Markov chain {:.3})",
        s.counterfactual.arl, s.counterfactual.se_arl, s.counterfactual_oracle
    )?;
    Ok(EXIT_OK)
}

fn cmd_profile_equiv(args: &ProfileEquivArgs, out: &mut dyn Write) -> Result<i32> {
    let r = profile_equivalence_trials(args.trials, args.seed)?;
    let ok = r.max_gap_ulps < args.max_ulps;
    writeln!(
        out,
        "{} trials: max gap {:.3} ulp (max |gap| {:e}) -> {}",
        r.trials,
        r.max_gap_ulps,
        r.max_abs_gap,
        if ok { "pass" } else { "FAIL" }
    )?;
    Ok(if ok { EXIT_OK } else { EXIT_FAILURE })
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let result = with_threads(cli.threads, || -> Result<(i32, Vec<u8>)> {
        let mut buf = Vec::new();
        let code = match &cli.command {
            Command::Simulate(a) => cmd_simulate(a, &mut buf),
            Command::Calibrate(a) => cmd_calibrate(a, &mut buf),
            Command::Table1(a) => cmd_table1(a, &mut buf),
            Command::MaskDemo(a) => cmd_mask_demo(a, &mut buf),
            Command::ProfileEquiv(a) => cmd_profile_equiv(a, &mut buf),
        }?;
        Ok((code, buf))
    });
    match result {
        Ok((code, buf)) => {
            let _ = out.write_all(&buf);
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_sim(args: &[&str]) -> SimulateArgs {
        let mut full = vec!["aibmon", "simulate"];
        full.extend_from_slice(args);
        match Cli::try_parse_from(full).unwrap().command {
            Command::Simulate(a) => a,
            _ => unreachable!(),
        }
    }

    #[test]
    fn flags_resolve_to_config() {
        let plan = resolve_simulate(&parse_sim(&["--chart", "shewhart", "--L", "2.807", "--rho", "0.75", "--delta-x", "1", "--reps", "100", "--seed", "1"])).unwrap();
        assert_eq!(plan.config.spec.half_width, 2.807 * 0.4375f64.sqrt());
        assert_eq!(plan.config.scenario, ShiftScenario::independent(0.0, 1.0));
        assert_eq!((plan.config.reps, plan.config.master_seed), (100, 1));
        assert!(plan.calibrated.is_none());
    }

    #[test]
    fn missing_limit_triggers_calibration() {
        let plan = resolve_simulate(&parse_sim(&["--chart", "ewma", "--lambda", "0.1"])).unwrap();
        let c = plan.calibrated.unwrap();
        assert!((c.limit_multiplier - 2.454).abs() < 0.02);
        assert_eq!(plan.config.reps, DEFAULT_REPS);
    }

    #[test]
    fn config_file_and_flag_precedence() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(
            &path,
            r#"
reps = 123
master_seed = 9
[model]
rho = 0.5
n = 4
[scenario]
delta_y = 2.0
mode = "masking"
[chart]
kind = "ewma"
lambda = 0.2
L = 2.636
"#,
        )
        .unwrap();
        let p = path.to_str().unwrap();
        let plan = resolve_simulate(&parse_sim(&["--config", p])).unwrap();
        assert_eq!(plan.config.reps, 123);
        assert_eq!(plan.config.model.n, 4);
        assert_eq!(plan.config.scenario.mode, ShiftMode::Masking);
        assert_eq!(plan.config.spec.lambda, 0.2);
        assert_eq!(plan.config.spec.limit_multiplier, 2.636);

        let plan = resolve_simulate(&parse_sim(&["--config", p, "--reps", "7", "--L", "3.0", "--mode", "independent"])).unwrap();
        assert_eq!(plan.config.reps, 7);
        assert_eq!(plan.config.master_seed, 9);
        assert_eq!(plan.config.spec.limit_multiplier, 3.0);
        assert_eq!(plan.config.scenario.mode, ShiftMode::Independent);
    }

    #[test]
    fn unknown_config_keys_rejected() {
        assert!(matches!(RunConfigFile::parse("reps = 1\nbogus = 2\n"), Err(Error::InvalidConfig(_))));
        assert!(matches!(RunConfigFile::parse("[model]\nrho = 0.1\nsigma = 1.0\n"), Err(Error::InvalidConfig(_))));
        assert!(RunConfigFile::parse("[chart]\nkind = \"ewma\"\nL = 2.4\n").is_ok());
    }

    #[test]
    fn masking_with_zero_rho_is_invalid() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(["aibmon", "simulate", "--mode", "masking", "--rho", "0", "--delta-y", "1"], &mut out, &mut err);
        assert_eq!(code, EXIT_INVALID);
        assert!(String::from_utf8(err).unwrap().contains("nonzero correlation"));
    }

    #[test]
    fn bad_flags_exit_two() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        assert_eq!(run(["aibmon", "simulate", "--chart", "cusum"], &mut out, &mut err), EXIT_INVALID);
        assert_eq!(run(["aibmon", "calibrate", "--chart", "shewhart", "--target-arl0", "1"], &mut out, &mut err), EXIT_INVALID);
        assert_eq!(run(["aibmon", "simulate", "--rho", "1.0"], &mut out, &mut err), EXIT_INVALID);
    }

    #[test]
    fn help_mentions_units_and_defaults() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        assert_eq!(run(["aibmon", "simulate", "--help"], &mut out, &mut err), EXIT_OK);
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("sigma_y/sqrt(n)"));
        assert!(text.contains("50000"));
        assert!(text.contains("[default: 200]"));
    }
}
