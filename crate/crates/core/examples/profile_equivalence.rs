//! The AIB statistic equals the average deviation from the in-control
//! regression line plus a constant.

use aibmon::experiments::{equivalence_check, profile_equivalence_trials, ProfileModel};
use aibmon::{ProcessModel, StreamKey};

fn main() -> aibmon::Result<()> {
    let model = ProcessModel::new(3.0, 1.5, 2.0, 0.5, 0.8, 6)?;
    let profile = ProfileModel::from_process(&model, vec![0.5, 1.0, 1.5, 1.5, 2.0, 2.5])?;
    println!("line: Y = {:.4} + {:.4} X, sigma {:.4}", profile.a0, profile.b0, profile.sigma0);
    for i in 0..5 {
        let sample = profile.sample(StreamKey::new(3, i), 0);
        let e = equivalence_check(&sample, &model, &profile)?;
        println!("aib {:>10.6}  deviation {:>10.6} + {:.6}  gap {:.1e}", e.aib, e.dev, e.constant, e.gap);
    }
    let report = profile_equivalence_trials(10_000, 3)?;
    println!("{} random trials: max gap {:.2} ulp ({:.2e})", report.trials, report.max_gap_ulps, report.max_abs_gap);
    Ok(())
}
