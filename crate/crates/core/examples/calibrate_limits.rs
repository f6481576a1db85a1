//! Calibrate control-limit multipliers for an in-control ARL of 200 and
//! cross-check them against the exact and Markov-chain ARL oracles.

use aibmon::charts::ChartKind;
use aibmon::oracles::{calibrate_limit, ewma_arl_markov, shewhart_arl_exact, StandardizedShift, DEFAULT_STATES};

fn main() -> aibmon::Result<()> {
    let sh = calibrate_limit(ChartKind::Shewhart, 1.0, 200.0)?;
    println!(
        "shewhart        L = {:.5}  ARL0 = {:.3}",
        sh.limit_multiplier,
        shewhart_arl_exact(sh.limit_multiplier, StandardizedShift(0.0))
    );
    for lambda in [0.05, 0.1, 0.2, 0.5] {
        let c = calibrate_limit(ChartKind::Ewma, lambda, 200.0)?;
        println!("ewma({lambda:<4})     L = {:.5}  ARL0 = {:.3}", c.limit_multiplier, c.achieved_arl);
    }

    println!("\nout-of-control ARL by standardized shift s");
    println!("{:>5} {:>10} {:>10} {:>10}", "s", "shewhart", "ewma(.05)", "ewma(.2)");
    for s in [0.25, 0.5, 1.0, 1.5, 2.0, 3.0] {
        let s = StandardizedShift(s);
        println!(
            "{:>5.2} {:>10.3} {:>10.3} {:>10.3}",
            s.0,
            shewhart_arl_exact(2.807, s),
            ewma_arl_markov(0.05, 2.216, s, DEFAULT_STATES)?,
            ewma_arl_markov(0.2, 2.636, s, DEFAULT_STATES)?
        );
    }
    Ok(())
}
