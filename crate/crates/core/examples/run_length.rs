//! Simulate the run-length distribution of an AIB-EWMA chart after a
//! shift in the Y mean and compare with the Markov-chain ARL.

use aibmon::oracles::{ewma_arl_markov, standardized_shift, DEFAULT_STATES};
use aibmon::{estimate_runlength, make_limits, ChartKind, ProcessModel, ShiftScenario, SimulationConfig};

fn main() -> aibmon::Result<()> {
    let model = ProcessModel::standard(0.6)?;
    let spec = make_limits(ChartKind::Ewma, 0.1, 2.454, &model)?;
    println!("limits [{:.4}, {:.4}]", spec.lcl(), spec.ucl());
    for delta_y in [0.0, 0.5, 1.0, 2.0] {
        let scenario = ShiftScenario::independent(delta_y, 0.0);
        let cfg = SimulationConfig::new(model, scenario, spec).reps(20_000).seed(42);
        let s = estimate_runlength(&cfg)?;
        let oracle = ewma_arl_markov(0.1, 2.454, standardized_shift(&model, &scenario)?, DEFAULT_STATES)?;
        let p = s.percentiles;
        println!(
            "delta_y {delta_y:.1}: ARL {:>8.3} ± {:.3} (markov {:>8.3})  SDRL {:>8.3}  p5/p50/p95 {}/{}/{}",
            s.arl, s.se_arl, oracle, s.sdrl, p.p5, p.p50, p.p95
        );
    }
    Ok(())
}
