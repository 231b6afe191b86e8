//! Reference arithmetic for level-index magnitudes.
//!
//! Every operation materializes the full value `exp^level(mantissa)` as an
//! MPFR float with a few hundred bits of precision, applies the operation
//! there, and re-canonicalizes by repeated logarithms. Nothing is shared with
//! the `f64` kernel it checks. Results up to `exp^3(e)`, about
//! `e^{3.8 * 10^6}`, sit well inside MPFR's exponent range.
//!
//! Magnitudes cross this boundary as plain `(level, mantissa)` pairs.

use std::cmp::Ordering;

use rug::ops::Pow;
use rug::Float;

/// Default working precision in bits (about 77 decimal digits).
pub const DEFAULT_BITS: u32 = 256;

pub type Pair = (u32, f64);

pub struct Oracle {
    p: u32,
    e: Float,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle::new(DEFAULT_BITS)
    }
}

impl Oracle {
    pub fn new(bits: u32) -> Self {
        Oracle {
            p: bits,
            e: Float::with_val(bits, 1).exp(),
        }
    }

    /// Working precision in decimal digits.
    pub fn digits(&self) -> usize {
        (self.p as f64 * std::f64::consts::LOG10_2) as usize
    }

    pub fn big(&self, v: f64) -> Float {
        Float::with_val(self.p, v)
    }

    /// `exp^level(mantissa)` at working precision.
    pub fn value(&self, x: Pair) -> Float {
        let mut v = self.big(x.1);
        for _ in 0..x.0 {
            v = v.exp();
        }
        v
    }

    /// Canonical `(level, mantissa)` of a nonnegative value.
    pub fn canonical(&self, x: &Float) -> Pair {
        let mut v = x.clone();
        let mut level = 0;
        while v >= self.e {
            v = v.ln();
            level += 1;
        }
        (level, v.to_f64())
    }

    pub fn encode_real(&mut self, v: f64) -> Pair {
        self.canonical(&self.big(v))
    }

    /// `None` when the value is below 1, where the logarithm is negative.
    pub fn ln(&mut self, x: Pair) -> Option<Pair> {
        let v = self.value(x);
        if v < 1 {
            return None;
        }
        Some(self.canonical(&v.ln()))
    }

    pub fn exp(&mut self, x: Pair) -> Pair {
        self.canonical(&self.value(x).exp())
    }

    pub fn mul_scalar(&mut self, x: Pair, k: f64) -> Pair {
        self.canonical(&(self.value(x) * self.big(k)))
    }

    pub fn pow_scalar(&mut self, x: Pair, a: f64) -> Pair {
        let v = self.value(x);
        if v.is_zero() {
            return (0, 0.0);
        }
        self.canonical(&v.pow(self.big(a)))
    }

    pub fn cmp(&mut self, a: Pair, b: Pair) -> Ordering {
        self.value(a)
            .partial_cmp(&self.value(b))
            .expect("finite values")
    }
}
