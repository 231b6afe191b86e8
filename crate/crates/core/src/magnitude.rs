//! Level-index magnitudes.
//!
//! A [`Magnitude`] stores a nonnegative real as `exp^level(mantissa)` with the
//! mantissa held in a canonical window: `[0, e)` at level 0 and `[1, e)` at
//! every higher level. Each nonnegative real then has exactly one
//! representation, and the numeric order of represented values is the
//! lexicographic order of `(level, mantissa)`.
//!
//! Only the operations needed to evaluate maximum-modulus style growth are
//! provided: `ln`, `exp`, adding or multiplying by an ordinary real, and
//! raising to a real power. Scalars that fall below the mantissa resolution
//! of the tower are dropped and the result is marked *absorbed*, so callers
//! can refuse to decide an inequality that hinges on the lost digits.

use std::cmp::Ordering;
use std::f64::consts::E;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `x` with `x.exp()` finite.
const EXP_OVERFLOW: f64 = 709.782_712_893_384;

/// Largest `f64` strictly below `E`; upper clamp for canonical mantissas.
pub const MANTISSA_MAX: f64 = f64::from_bits(E.to_bits() - 1);

/// A nonnegative real `exp^level(mantissa)` in canonical level-index form.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawMagnitude")]
pub struct Magnitude {
    level: u32,
    mantissa: f64,
    #[serde(default, skip_serializing_if = "is_false")]
    absorbed: bool,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Deserialize)]
struct RawMagnitude {
    level: u32,
    mantissa: f64,
    #[serde(default)]
    absorbed: bool,
}

impl TryFrom<RawMagnitude> for Magnitude {
    type Error = Error;

    fn try_from(raw: RawMagnitude) -> Result<Self> {
        Ok(Magnitude::from_parts(raw.level, raw.mantissa)?.with_absorbed(raw.absorbed))
    }
}

/// Relative tolerance applied to mantissas when deciding ties.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel: f64,
}

impl Tolerance {
    pub const fn new(rel: f64) -> Self {
        Tolerance { rel }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rel: 1e-9 }
    }
}

/// Three-valued comparison: values within tolerance of each other are a `Tie`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    Less,
    Tie,
    Greater,
}

impl Comparison {
    pub fn reverse(self) -> Self {
        match self {
            Comparison::Less => Comparison::Greater,
            Comparison::Tie => Comparison::Tie,
            Comparison::Greater => Comparison::Less,
        }
    }
}

fn rel_cmp(a: f64, b: f64, rel: f64) -> Comparison {
    let scale = a.abs().max(b.abs());
    if (a - b).abs() <= rel * scale {
        Comparison::Tie
    } else if a < b {
        Comparison::Less
    } else {
        Comparison::Greater
    }
}

impl Magnitude {
    pub const ZERO: Magnitude = Magnitude {
        level: 0,
        mantissa: 0.0,
        absorbed: false,
    };
    pub const ONE: Magnitude = Magnitude {
        level: 0,
        mantissa: 1.0,
        absorbed: false,
    };
    /// Euler's number, `(1, 1.0)`.
    pub const E: Magnitude = Magnitude {
        level: 1,
        mantissa: 1.0,
        absorbed: false,
    };

    /// Builds a magnitude from parts that must already be canonical.
    pub fn new(level: u32, mantissa: f64) -> Result<Self> {
        let lo = if level == 0 { 0.0 } else { 1.0 };
        if !mantissa.is_finite() || mantissa < lo || mantissa >= E {
            return Err(Error::domain(format!(
                "mantissa {mantissa} outside the canonical window at level {level}"
            )));
        }
        Ok(Magnitude {
            level,
            mantissa,
            absorbed: false,
        })
    }

    /// Builds `exp^level(mantissa)` for any finite nonnegative mantissa,
    /// moving it into the canonical window.
    pub fn from_parts(mut level: u32, mut mantissa: f64) -> Result<Self> {
        if !mantissa.is_finite() || mantissa < 0.0 {
            return Err(Error::domain(format!(
                "mantissa must be finite and nonnegative, got {mantissa}"
            )));
        }
        while mantissa >= E {
            mantissa = mantissa.ln().max(1.0);
            level += 1;
        }
        if level > 0 && mantissa < 1.0 {
            mantissa = mantissa.exp().min(MANTISSA_MAX);
            level -= 1;
        }
        Ok(Magnitude {
            level,
            mantissa,
            absorbed: false,
        })
    }

    pub fn from_real(v: f64) -> Result<Self> {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::domain(format!(
                "magnitudes are finite and nonnegative, got {v}"
            )));
        }
        Magnitude::from_parts(0, v)
    }

    /// The magnitude `e^l`, for any real `l` (including negative ones).
    pub fn from_ln(l: f64) -> Result<Self> {
        if l.is_nan() || l == f64::INFINITY {
            return Err(Error::domain(format!("cannot exponentiate {l}")));
        }
        if l == f64::NEG_INFINITY {
            return Ok(Magnitude::ZERO);
        }
        if l < 1.0 {
            return Magnitude::from_parts(0, l.exp());
        }
        Ok(Magnitude::from_real(l)?.exp())
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn mantissa(&self) -> f64 {
        self.mantissa
    }

    /// Whether a scalar was dropped below mantissa resolution somewhere in the
    /// computation that produced this value.
    pub fn is_absorbed(&self) -> bool {
        self.absorbed
    }

    pub fn with_absorbed(mut self, absorbed: bool) -> Self {
        self.absorbed = absorbed;
        self
    }

    fn inherit(mut self, from: &Magnitude) -> Self {
        self.absorbed |= from.absorbed;
        self
    }

    fn mark_absorbed(mut self) -> Self {
        self.absorbed = true;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.level == 0 && self.mantissa == 0.0
    }

    /// The represented value, or `+inf` when it exceeds `f64::MAX`.
    pub fn to_f64(&self) -> f64 {
        let mut v = self.mantissa;
        for _ in 0..self.level {
            if v > EXP_OVERFLOW {
                return f64::INFINITY;
            }
            v = v.exp();
        }
        v
    }

    /// Natural logarithm. Values below 1 have negative logarithms, which are
    /// not representable, so they are rejected along with zero.
    pub fn ln(&self) -> Result<Self> {
        match self.level {
            0 if self.mantissa < 1.0 => Err(Error::domain(format!(
                "ln of {} is negative or undefined",
                self.mantissa
            ))),
            0 => Ok(Magnitude {
                level: 0,
                mantissa: self.mantissa.ln(),
                absorbed: self.absorbed,
            }),
            l => Ok(Magnitude {
                level: l - 1,
                mantissa: self.mantissa,
                absorbed: self.absorbed,
            }),
        }
    }

    /// `ln` of the represented value as an ordinary real; negative below 1,
    /// `-inf` at zero and `+inf` once the logarithm itself overflows.
    pub fn ln_f64(&self) -> f64 {
        match self.level {
            0 => self.mantissa.ln(),
            l => Magnitude {
                level: l - 1,
                mantissa: self.mantissa,
                absorbed: false,
            }
            .to_f64(),
        }
    }

    pub fn ln_n(&self, n: u32) -> Result<Self> {
        let mut x = *self;
        for _ in 0..n {
            x = x.ln()?;
        }
        Ok(x)
    }

    pub fn exp(&self) -> Self {
        if self.level == 0 && self.mantissa < 1.0 {
            return Magnitude {
                level: 0,
                mantissa: self.mantissa.exp().min(MANTISSA_MAX),
                absorbed: self.absorbed,
            };
        }
        Magnitude {
            level: self.level + 1,
            mantissa: self.mantissa,
            absorbed: self.absorbed,
        }
    }

    pub fn exp_n(&self, n: u32) -> Self {
        (0..n).fold(*self, |x, _| x.exp())
    }

    /// `value + s`. Past `f64` range the scalar cannot move the mantissa and
    /// the input is returned marked absorbed.
    pub fn add_scalar(&self, s: f64) -> Result<Self> {
        if !s.is_finite() {
            return Err(Error::domain(format!("cannot add {s}")));
        }
        if s == 0.0 {
            return Ok(*self);
        }
        let v = self.to_f64();
        if !v.is_finite() {
            return Ok(self.mark_absorbed());
        }
        let r = v + s;
        if r < 0.0 {
            return Err(Error::domain(format!("{v} + {s} is negative")));
        }
        let out = Magnitude::from_parts(0, r)?.inherit(self);
        Ok(if r == v { out.mark_absorbed() } else { out })
    }

    /// `value * e^s`, computed one level down as `exp(ln(value) + s)`.
    pub fn scale_by_exp(&self, s: f64) -> Result<Self> {
        if !s.is_finite() {
            return Err(Error::domain(format!("cannot scale by e^{s}")));
        }
        if s == 0.0 || self.is_zero() {
            return Ok(*self);
        }
        if self.level == 0 {
            let r = self.mantissa * s.exp();
            let out = if r.is_finite() && r > 0.0 {
                Magnitude::from_parts(0, r)?
            } else {
                Magnitude::from_ln(self.mantissa.ln() + s)?
            };
            return Ok(out.inherit(self));
        }
        let w = self.ln_f64();
        let l = w + s;
        if !w.is_finite() || l == w {
            return Ok(self.mark_absorbed());
        }
        Ok(Magnitude::from_ln(l)?.inherit(self))
    }

    pub fn mul_scalar(&self, k: f64) -> Result<Self> {
        if !k.is_finite() || k <= 0.0 {
            return Err(Error::domain(format!(
                "scalar factor must be positive, got {k}"
            )));
        }
        if k == 1.0 {
            return Ok(*self);
        }
        if self.level == 0 {
            let r = self.mantissa * k;
            if r.is_finite() {
                return Ok(Magnitude::from_parts(0, r)?.inherit(self));
            }
        }
        self.scale_by_exp(k.ln())
    }

    /// `value^a` for `a > 0`, as `exp(a * ln(value))` above level 0.
    pub fn pow_scalar(&self, a: f64) -> Result<Self> {
        if !a.is_finite() || a <= 0.0 {
            return Err(Error::domain(format!("exponent must be positive, got {a}")));
        }
        if a == 1.0 || self.is_zero() {
            return Ok(*self);
        }
        if self.level == 0 {
            let r = self.mantissa.powf(a);
            let out = if r.is_finite() {
                Magnitude::from_parts(0, r)?
            } else {
                Magnitude::from_ln(a * self.mantissa.ln())?
            };
            return Ok(out.inherit(self));
        }
        Ok(self.ln()?.mul_scalar(a)?.exp())
    }

    /// Compares represented values, reporting a tie when the mantissas agree
    /// to `tol` after bringing both to a common level.
    pub fn compare(&self, other: &Magnitude, tol: Tolerance) -> Comparison {
        let (lo, hi, flipped) = if self.level <= other.level {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let c = match hi.level - lo.level {
            0 => rel_cmp(lo.mantissa, hi.mantissa, tol.rel),
            // exp^(L+1)(m) = exp^L(e^m): compare at level L.
            1 => rel_cmp(lo.mantissa, hi.mantissa.exp(), tol.rel),
            _ => Comparison::Less,
        };
        if flipped {
            c.reverse()
        } else {
            c
        }
    }
}

impl PartialEq for Magnitude {
    fn eq(&self, other: &Self) -> bool {
        self.level == other.level && self.mantissa == other.mantissa
    }
}

impl Eq for Magnitude {}

impl PartialOrd for Magnitude {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Magnitude {
    fn cmp(&self, other: &Self) -> Ordering {
        self.level
            .cmp(&other.level)
            .then(self.mantissa.total_cmp(&other.mantissa))
    }
}

impl fmt::Display for Magnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => write!(f, "E^{}({:.*})", self.level, p, self.mantissa),
            None => write!(f, "E^{}({})", self.level, self.mantissa),
        }
    }
}

impl FromStr for Magnitude {
    type Err = Error;

    /// Accepts `E^level(mantissa)` or a plain nonnegative real.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("expected E^level(mantissa) or a real, got {s:?}"));
        if let Some(rest) = s.strip_prefix("E^").or_else(|| s.strip_prefix("e^")) {
            let (level, tail) = rest.split_once('(').ok_or_else(bad)?;
            let mantissa = tail.strip_suffix(')').ok_or_else(bad)?;
            let level: u32 = level.trim().parse().map_err(|_| bad())?;
            let mantissa: f64 = mantissa.trim().parse().map_err(|_| bad())?;
            return Magnitude::from_parts(level, mantissa);
        }
        let v: f64 = s.parse().map_err(|_| bad())?;
        Magnitude::from_real(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mag(level: u32, mantissa: f64) -> Magnitude {
        Magnitude::new(level, mantissa).unwrap()
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs())
    }

    #[test]
    fn from_real_examples() {
        assert_eq!(Magnitude::from_real(1.0).unwrap(), mag(0, 1.0));
        assert_eq!(Magnitude::from_real(E).unwrap(), mag(1, 1.0));
        let x = Magnitude::from_real(1e10).unwrap();
        assert_eq!(x.level(), 3);
        // ln ln ln 1e10 to 20 digits: 1.1431450021844147575
        assert!(close(x.mantissa(), 1.143_145_002_184_414_8, 1e-14));
        assert!(Magnitude::from_real(-1.0).is_err());
        assert!(Magnitude::from_real(f64::NAN).is_err());
        assert!(Magnitude::from_real(f64::INFINITY).is_err());
    }

    #[test]
    fn ln_examples() {
        assert_eq!(mag(3, 1.143).ln().unwrap(), mag(2, 1.143));
        assert!(close(
            mag(0, 2.0).ln().unwrap().mantissa(),
            2f64.ln(),
            1e-15
        ));
        assert_eq!(mag(1, 1.0).ln().unwrap(), mag(0, 1.0));
        assert!(Magnitude::ZERO.ln().is_err());
        assert!(mag(0, 0.5).ln().is_err());
    }

    #[test]
    fn exp_examples() {
        assert_eq!(mag(1, 2.0).exp(), mag(2, 2.0));
        assert!(close(mag(0, 0.5).exp().mantissa(), 0.5f64.exp(), 1e-15));
        assert_eq!(mag(0, 0.5).exp().level(), 0);
        assert_eq!(mag(0, 1.0).exp(), mag(1, 1.0));
    }

    #[test]
    fn mul_scalar_examples() {
        let six = mag(0, 2.0).mul_scalar(3.0).unwrap();
        assert_eq!(six.level(), 1);
        assert!(close(six.mantissa(), 6f64.ln(), 1e-15));
        assert_eq!(mag(1, 2.0).mul_scalar(1.0).unwrap(), mag(1, 2.0));
        let high = mag(5, 1.5).mul_scalar(2.0).unwrap();
        assert_eq!(high, mag(5, 1.5));
        assert!(high.is_absorbed());
        assert!(mag(1, 2.0).mul_scalar(0.0).is_err());
        assert!(mag(1, 2.0).mul_scalar(-2.0).is_err());
    }

    #[test]
    fn mul_scalar_at_level_three_is_not_absorbed() {
        // e^20 * 3: ln moves from 20 to 20 + ln 3, well inside f64 resolution.
        let x = Magnitude::from_ln(20.0).unwrap();
        let y = x.mul_scalar(3.0).unwrap();
        assert!(!y.is_absorbed());
        assert!(close(y.ln_f64(), 20.0 + 3f64.ln(), 1e-14));
    }

    #[test]
    fn pow_scalar_examples() {
        let y = mag(1, 2.0).pow_scalar(3.0).unwrap();
        assert_eq!(y.level(), 2);
        assert!(close(y.mantissa(), 6f64.ln(), 1e-15));
        let x = mag(2, 1.7);
        assert_eq!(x.pow_scalar(1.0).unwrap(), x);
        assert_eq!(mag(0, 1.0).pow_scalar(7.0).unwrap(), mag(0, 1.0));
        assert!(x.pow_scalar(0.0).is_err());
    }

    #[test]
    fn cmp_examples() {
        assert_eq!(mag(2, 1.0).cmp(&mag(1, 2.7)), Ordering::Greater);
        assert_eq!(mag(0, 1.0).cmp(&mag(0, 1.0)), Ordering::Equal);
        let a = mag(3, 1.143_145_002_184_414_8);
        let b = Magnitude::from_real(1e10 + 1.0).unwrap();
        assert_eq!(a.compare(&b, Tolerance::default()), Comparison::Tie);
    }

    #[test]
    fn compare_across_a_level_boundary() {
        let below = Magnitude::from_real(E * (1.0 - 1e-12)).unwrap();
        let above = Magnitude::from_real(E * (1.0 + 1e-12)).unwrap();
        assert_eq!(below.level(), 0);
        assert_eq!(above.level(), 1);
        assert_eq!(below.compare(&above, Tolerance::default()), Comparison::Tie);
        assert_eq!(below.compare(&above, Tolerance::new(0.0)), Comparison::Less);
        assert!(below < above);
    }

    #[test]
    fn from_ln_handles_every_sign() {
        assert_eq!(
            Magnitude::from_ln(f64::NEG_INFINITY).unwrap(),
            Magnitude::ZERO
        );
        assert!(close(
            Magnitude::from_ln(-2.0).unwrap().mantissa(),
            (-2f64).exp(),
            1e-15
        ));
        assert_eq!(Magnitude::from_ln(1.0).unwrap(), Magnitude::E);
        assert_eq!(Magnitude::from_ln(2500.0).unwrap().level(), 3);
        assert!(Magnitude::from_ln(f64::NAN).is_err());
    }

    #[test]
    fn add_scalar_rejects_negative_results() {
        assert!(mag(0, 1.0).add_scalar(-2.0).is_err());
        assert_eq!(mag(0, 1.0).add_scalar(-1.0).unwrap(), Magnitude::ZERO);
        let huge = mag(4, 2.0);
        let out = huge.add_scalar(1.0).unwrap();
        assert_eq!(out, huge);
        assert!(out.is_absorbed());
    }

    #[test]
    fn display_and_parse() {
        let x = mag(3, 1.143);
        assert_eq!(format!("{x:.4}"), "E^3(1.1430)");
        assert_eq!("E^3(1.1430)".parse::<Magnitude>().unwrap(), mag(3, 1.143));
        assert_eq!(x.to_string().parse::<Magnitude>().unwrap(), x);
        assert_eq!(
            "100".parse::<Magnitude>().unwrap(),
            Magnitude::from_real(100.0).unwrap()
        );
        let recanon: Magnitude = "E^1(6.0)".parse().unwrap();
        assert_eq!(recanon, Magnitude::from_parts(2, 6f64.ln()).unwrap());
        assert!("E^x(1)".parse::<Magnitude>().is_err());
        assert!("E^2(1.0".parse::<Magnitude>().is_err());
    }

    #[test]
    fn new_rejects_non_canonical() {
        assert!(Magnitude::new(1, 0.5).is_err());
        assert!(Magnitude::new(0, 3.0).is_err());
        assert!(Magnitude::new(0, -0.1).is_err());
    }
}
