use aibmon::charts::{make_limits, ChartKind};
use aibmon::oracles::{calibrate_limit, ewma_arl_markov, shewhart_arl_exact, StandardizedShift, DEFAULT_STATES};
use aibmon::runlength::{estimate_runlength, SimulationConfig};
use aibmon::stochastics::{ProcessModel, ShiftScenario};
use proptest::prelude::*;

#[test]
fn calibration_round_trip_by_simulation() {
    let model = ProcessModel::standard(0.3).unwrap();
    for (i, &lam) in [0.1, 0.5].iter().enumerate() {
        let c = calibrate_limit(ChartKind::Ewma, lam, 200.0).unwrap();
        let spec = make_limits(ChartKind::Ewma, lam, c.limit_multiplier, &model).unwrap();
        let s = estimate_runlength(&SimulationConfig::new(model, ShiftScenario::in_control(), spec).reps(50_000).seed(i as u64)).unwrap();
        assert!((s.arl - 200.0).abs() / 200.0 < 0.02, "lambda {lam}: {}", s.arl);
    }
}

#[test]
fn markov_richardson_check() {
    for &(lam, l) in &[(0.05, 2.216), (0.1, 2.454), (0.2, 2.636), (0.5, 2.777)] {
        for &s in &[0.0, -0.3, -1.1339] {
            let a = ewma_arl_markov(lam, l, StandardizedShift(s), 201).unwrap();
            let b = ewma_arl_markov(lam, l, StandardizedShift(s), DEFAULT_STATES).unwrap();
            assert!((a - b).abs() / b < 0.005);
        }
    }
}

#[test]
fn calibration_monotone_in_target() {
    let a = calibrate_limit(ChartKind::Ewma, 0.2, 100.0).unwrap().limit_multiplier;
    let b = calibrate_limit(ChartKind::Ewma, 0.2, 370.0).unwrap().limit_multiplier;
    assert!(a < b);
    let s = calibrate_limit(ChartKind::Shewhart, 1.0, 370.4).unwrap().limit_multiplier;
    assert!((s - 3.0).abs() < 1e-3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn oracles_are_symmetric_in_shift(s in 0.0f64..3.0, lam in 0.05f64..1.0, l in 1.5f64..3.2) {
        let a = shewhart_arl_exact(l, StandardizedShift(s));
        let b = shewhart_arl_exact(l, StandardizedShift(-s));
        prop_assert!((a - b).abs() <= 1e-12 * a);
        let a = ewma_arl_markov(lam, l, StandardizedShift(s), 101).unwrap();
        let b = ewma_arl_markov(lam, l, StandardizedShift(-s), 101).unwrap();
        prop_assert!((a - b).abs() <= 1e-8 * a);
    }

    #[test]
    fn oracles_decrease_in_shift_size_and_increase_in_l(s in 0.0f64..2.5, ds in 0.05f64..0.5, lam in 0.05f64..1.0, l in 1.5f64..3.0) {
        prop_assert!(shewhart_arl_exact(l, StandardizedShift(s + ds)) < shewhart_arl_exact(l, StandardizedShift(s)));
        prop_assert!(shewhart_arl_exact(l + 0.1, StandardizedShift(s)) > shewhart_arl_exact(l, StandardizedShift(s)));
        let e0 = ewma_arl_markov(lam, l, StandardizedShift(s), 101).unwrap();
        prop_assert!(ewma_arl_markov(lam, l, StandardizedShift(s + ds), 101).unwrap() < e0);
        prop_assert!(ewma_arl_markov(lam, l + 0.1, StandardizedShift(s), 101).unwrap() > e0);
    }
}
