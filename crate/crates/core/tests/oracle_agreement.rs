//! Kernel values checked against 256-bit reference arithmetic.

use std::cmp::Ordering;

use fastescape_core::acceptance::{criterion_1, mantissas_agree, ReferenceArithmetic};
use fastescape_core::classify::{real_axis_orbit, threshold_sequence};
use fastescape_core::construction::build_phi;
use fastescape_core::growth::{GrowthModel, Step};
use fastescape_core::Magnitude;
use fastescape_oracle::{Oracle, Pair};

struct Reference(Oracle);

impl ReferenceArithmetic for Reference {
    fn encode_real(&mut self, v: f64) -> Pair {
        self.0.encode_real(v)
    }
    fn ln(&mut self, x: Pair) -> Option<Pair> {
        self.0.ln(x)
    }
    fn exp(&mut self, x: Pair) -> Pair {
        self.0.exp(x)
    }
    fn mul_scalar(&mut self, x: Pair, k: f64) -> Pair {
        self.0.mul_scalar(x, k)
    }
    fn pow_scalar(&mut self, x: Pair, a: f64) -> Pair {
        self.0.pow_scalar(x, a)
    }
    fn cmp(&mut self, a: Pair, b: Pair) -> Ordering {
        self.0.cmp(a, b)
    }
}

fn pair(m: &Magnitude) -> Pair {
    (m.level(), m.mantissa())
}

fn agree(kernel: &Magnitude, reference: Pair, rel: f64) {
    assert!(
        mantissas_agree(pair(kernel), reference, rel),
        "kernel {kernel:?} vs reference {reference:?}"
    );
}

#[test]
fn random_operations_match_reference() {
    let mut r = Reference(Oracle::default());
    for seed in [1, 2, 3] {
        let out = criterion_1(&mut r, seed, 1000);
        assert!(out.passed, "{}", out.line());
    }
}

#[test]
fn profile_breakpoint_values() {
    let mut o = Oracle::default();
    let phi = build_phi(0.5, 5.0, 4.0, 6).unwrap();
    // 25 e^40 and 15625 e^80 built from the unnormalized pairs (1, 40), (1, 80).
    agree(&phi.a(2), o.mul_scalar((1, 40.0), 25.0), 1e-12);
    agree(&phi.a(3), o.mul_scalar((1, 80.0), 15625.0), 1e-12);
    agree(&phi.a(4), o.exp((0, 2500.0)), 1e-12);
    agree(&phi.a(5), o.mul_scalar((1, 5000.0), 25.0), 1e-12);
}

#[test]
fn orbit_and_threshold_values() {
    let mut o = Oracle::default();
    let orbit = real_axis_orbit(2.0, Magnitude::ZERO, 2).unwrap();
    let two_e2 = o.mul_scalar((1, 2.0), 2.0);
    agree(&orbit.magnitudes()[2], two_e2, 1e-12);

    // mu_{2,3/4} on psi(t) = t^2 maps t to t^{3/2}: from t = e^2 to e^3, e^4.5.
    let model = GrowthModel::power(2.0).unwrap();
    let r = Magnitude::from_ln(2f64.exp()).unwrap();
    let s = threshold_sequence(&model, Step::Mu { m: 2, eps: 0.75 }, r, 2).unwrap();
    agree(&s[1], o.exp((1, 3.0)), 1e-12);
    agree(&s[2], o.exp((1, 4.5)), 1e-12);
}

#[test]
fn from_real_known_value() {
    let mut o = Oracle::default();
    let m = Magnitude::from_real(1e10).unwrap();
    agree(&m, o.encode_real(1e10), 1e-14);
    assert_eq!(m.level(), 3);
}
