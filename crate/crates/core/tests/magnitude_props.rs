use fastescape_core::magnitude::MANTISSA_MAX;
use fastescape_core::Magnitude;
use proptest::prelude::*;

fn magnitude(max_level: u32) -> impl Strategy<Value = Magnitude> {
    (0..=max_level).prop_flat_map(|level| {
        let lo = if level == 0 { 0.0 } else { 1.0 };
        (Just(level), lo..MANTISSA_MAX).prop_map(|(l, m)| Magnitude::new(l, m).unwrap())
    })
}

fn real() -> impl Strategy<Value = f64> {
    prop_oneof![
        Just(0.0),
        (1.0..10.0f64, -300i32..300).prop_map(|(m, e)| m * 10f64.powi(e)),
        0.0..10.0f64,
    ]
}

proptest! {
    #[test]
    fn real_round_trip(v in real()) {
        let back = Magnitude::from_real(v).unwrap().to_f64();
        prop_assert!((back - v).abs() <= 1e-12 * v, "{v} -> {back}");
    }

    #[test]
    fn order_embedding(v in real(), w in real()) {
        let (a, b) = (Magnitude::from_real(v).unwrap(), Magnitude::from_real(w).unwrap());
        if v < w && (a.level(), a.mantissa()) != (b.level(), b.mantissa()) {
            prop_assert!(a < b, "{v} < {w} but {a} >= {b}");
        }
    }

    #[test]
    fn exp_inverts_ln(x in magnitude(6)) {
        prop_assume!(x >= Magnitude::ONE);
        let y = x.ln().unwrap().exp();
        if x.level() >= 1 {
            prop_assert_eq!((y.level(), y.mantissa()), (x.level(), x.mantissa()));
        } else {
            prop_assert!((y.mantissa() - x.mantissa()).abs() <= 1e-15 * x.mantissa());
        }
    }

    #[test]
    fn operations_are_monotone(
        x in magnitude(5),
        y in magnitude(5),
        k in 1.0..1e6f64,
        a in 1.0..50.0f64,
    ) {
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        prop_assert!(lo.exp() <= hi.exp());
        prop_assert!(lo.mul_scalar(k).unwrap() <= hi.mul_scalar(k).unwrap());
        prop_assert!(lo.pow_scalar(a).unwrap() <= hi.pow_scalar(a).unwrap());
        if lo >= Magnitude::ONE {
            prop_assert!(lo.ln().unwrap() <= hi.ln().unwrap());
        }
    }

    #[test]
    fn display_parses_back(x in magnitude(8)) {
        let back: Magnitude = x.to_string().parse().unwrap();
        prop_assert_eq!((back.level(), back.mantissa()), (x.level(), x.mantissa()));
    }
}
