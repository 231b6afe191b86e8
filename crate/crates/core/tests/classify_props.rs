use fastescape_core::classify::q2_not_a_witness_for;
use fastescape_core::{
    classify_orbit, real_axis_orbit, threshold_sequence, ClassificationParams, GrowthModel,
    Magnitude, OrbitRecord, Step,
};
use proptest::prelude::*;

const EPS_GRID: [f64; 4] = [0.3, 0.5, 0.75, 0.9];

fn exp1() -> GrowthModel {
    GrowthModel::exp_order(1.0).unwrap()
}

fn params(r: Magnitude, max_lag: usize) -> ClassificationParams {
    ClassificationParams::new(r, max_lag, EPS_GRID.to_vec())
}

fn step() -> impl Strategy<Value = Step> {
    prop_oneof![
        Just(Step::Max),
        prop::sample::select(EPS_GRID.to_vec()).prop_map(|eps| Step::Mu { m: 1, eps }),
        prop::sample::select(EPS_GRID.to_vec()).prop_map(|eps| Step::Mu { m: 2, eps }),
    ]
}

// Large enough that every mu threshold on the grid escapes from it; from
// R = 10, mu_{2,0.3} decreases.
fn big_r() -> Magnitude {
    Magnitude::from_ln(20.0).unwrap()
}

/// A threshold sequence from `big_r` delayed by `lag` zero entries.
fn lagged_orbit(step: Step, lag: usize, depth: usize) -> OrbitRecord {
    let r = big_r();
    let thr = threshold_sequence(&exp1(), step, r, depth - lag).unwrap();
    OrbitRecord::synthetic(thr, format!("{step} from e^20"))
        .unwrap()
        .prepend(&vec![Magnitude::ZERO; lag])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn speed_classes_are_nested(step in step(), lag in 0usize..=3) {
        let orbit = lagged_orbit(step, lag, 9);
        let v = classify_orbit(&orbit, &exp1(), &params(big_r(), 4)).unwrap();
        if let Some(a) = v.a_compatible {
            let q = v.q_compatible.expect("A-compatible implies Q-compatible");
            prop_assert!(q.lag <= a && q.eps == EPS_GRID[0]);
        }
        if let Some(q) = v.q_compatible {
            let q2 = v.q2_compatible.expect("Q-compatible implies Q_2-compatible");
            prop_assert!(q2.eps <= q.eps);
        }
    }

    #[test]
    fn prepending_shifts_the_lag(j in 0usize..=4) {
        let orbit = lagged_orbit(Step::Max, 0, 6).prepend(&vec![Magnitude::ZERO; j]);
        let v = classify_orbit(&orbit, &exp1(), &params(big_r(), j + 1)).unwrap();
        prop_assert_eq!(v.a_compatible, Some(j));
    }
}

#[test]
fn exponential_real_orbit_is_its_own_threshold() {
    let orbit = real_axis_orbit(1.0, Magnitude::ONE, 5).unwrap();
    let v = classify_orbit(&orbit, &exp1(), &params(Magnitude::ONE, 2)).unwrap();
    assert_eq!(v.a_compatible, Some(0));
    assert!(v.escaping_at_depth);
    let thr = threshold_sequence(&exp1(), Step::Max, Magnitude::E, 4).unwrap();
    assert_eq!(&orbit.magnitudes()[1..], &thr[..]);
}

#[test]
fn q2_witness_survives_perturbation() {
    let base = GrowthModel::power(2.0).unwrap();
    let r = Magnitude::from_ln(2f64.exp()).unwrap();
    let cps = [10, 15, 20];
    for eps in [0.75, 0.9] {
        let plain = q2_not_a_witness_for(&base, eps, r, 20, &cps, 5).unwrap();
        assert!(
            plain.report.holds(),
            "eps {eps}: {:?}",
            plain.report.first_failure
        );
        for a in [0.1, 1.0] {
            let pert = GrowthModel::perturbed(base.clone(), a).unwrap();
            let w = q2_not_a_witness_for(&pert, eps, r, 20, &cps, 5).unwrap();
            assert_eq!(w.report.verdict, plain.report.verdict, "eps {eps}, A {a}");
            assert_eq!(w.verdict.a_compatible, plain.verdict.a_compatible);
            assert_eq!(w.verdict.q2_compatible, plain.verdict.q2_compatible);
        }
    }
}
