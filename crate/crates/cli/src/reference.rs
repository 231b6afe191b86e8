use std::cmp::Ordering;

use fastescape_core::acceptance::ReferenceArithmetic;
use fastescape_oracle::{Oracle, Pair};

/// The MPFR reference behind `selftest`.
#[derive(Default)]
pub struct Reference(Oracle);

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
