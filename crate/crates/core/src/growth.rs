//! Growth models in log coordinates.
//!
//! A model is the function `psi(t) = log M(e^t)`. Raising `r` to a power
//! becomes scaling `t`, and raising `M(r)` to a power becomes scaling `psi`,
//! so every growth inequality here is evaluated one tower level lower than
//! its `r`-space form.

mod parse;

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::magnitude::{Comparison, Magnitude, Tolerance};
use crate::report::{self, geometric_grid, Condition, RegularityReport, ScanConfig};

pub use parse::parse_model;

/// Breakpoints `(t_n, ln a_n)` of a piecewise-linear `psi`.
///
/// Values are stored as logarithms so that breakpoints far beyond `f64`
/// range are exact; interpolation is carried out in log space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPwl")]
pub struct PiecewiseLinear {
    t: Vec<f64>,
    ln_a: Vec<f64>,
}

#[derive(Deserialize)]
struct RawPwl {
    t: Vec<f64>,
    ln_a: Vec<f64>,
}

impl TryFrom<RawPwl> for PiecewiseLinear {
    type Error = Error;

    fn try_from(raw: RawPwl) -> Result<Self> {
        PiecewiseLinear::new(raw.t, raw.ln_a)
    }
}

fn log_add_exp(x: f64, y: f64) -> f64 {
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

impl PiecewiseLinear {
    pub fn new(t: Vec<f64>, ln_a: Vec<f64>) -> Result<Self> {
        if t.len() != ln_a.len() || t.len() < 2 {
            return Err(Error::domain(
                "piecewise-linear model needs at least two (t, ln a) pairs",
            ));
        }
        if t.iter().chain(&ln_a).any(|v| !v.is_finite()) {
            return Err(Error::domain("breakpoints must be finite"));
        }
        if t.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain("breakpoint abscissae must increase strictly"));
        }
        Ok(PiecewiseLinear { t, ln_a })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.t
    }

    pub fn ln_values(&self) -> &[f64] {
        &self.ln_a
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn value(&self, n: usize) -> Magnitude {
        Magnitude::from_ln(self.ln_a[n]).expect("finite by construction")
    }

    pub fn t_range(&self) -> (f64, f64) {
        (self.t[0], self.t[self.t.len() - 1])
    }

    /// `ln psi(t)`. Exact at breakpoints; between them this is the logarithm
    /// of the linear interpolant, `ln((1-s) a_i + s a_{i+1})`.
    pub fn ln_eval(&self, t: f64) -> Result<f64> {
        let (lo, hi) = self.t_range();
        if !(lo..=hi).contains(&t) {
            return Err(Error::domain(format!(
                "t = {t} outside breakpoint range [{lo}, {hi}]"
            )));
        }
        let j = self.t.partition_point(|&x| x <= t);
        let i = j - 1;
        if self.t[i] == t {
            return Ok(self.ln_a[i]);
        }
        let s = (t - self.t[i]) / (self.t[i + 1] - self.t[i]);
        Ok(log_add_exp(
            (-s).ln_1p() + self.ln_a[i],
            s.ln() + self.ln_a[i + 1],
        ))
    }

    pub fn eval(&self, t: f64) -> Result<Magnitude> {
        Magnitude::from_ln(self.ln_eval(t)?)
    }
}

/// The function `psi(t) = log M(e^t)` of an entire function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GrowthModel {
    /// `psi(t) = e^{rho t}`, i.e. `M(r) = exp(r^rho)`.
    ExpOrder {
        rho: f64,
        t_min: f64,
    },
    /// `psi(t) = t^a`.
    Power {
        a: f64,
        t_min: f64,
    },
    PiecewiseLinear {
        phi: Arc<PiecewiseLinear>,
    },
    /// `psi = psi_outer . psi_inner`.
    Composite {
        outer: Box<GrowthModel>,
        inner: Box<GrowthModel>,
        t_min: f64,
    },
    /// `psi(t) = psi_base(t) (1 + amplitude / t)`.
    Perturbed {
        base: Box<GrowthModel>,
        amplitude: f64,
    },
}

impl GrowthModel {
    /// Valid for every `t >= 0`; [`GrowthModel::log_max_modulus`] also accepts
    /// `r < 1` for this model.
    pub fn exp_order(rho: f64) -> Result<Self> {
        if !rho.is_finite() || rho <= 0.0 {
            return Err(Error::domain(format!("order must be positive, got {rho}")));
        }
        Ok(GrowthModel::ExpOrder { rho, t_min: 0.0 })
    }

    pub fn power(a: f64) -> Result<Self> {
        if !a.is_finite() || a <= 1.0 {
            return Err(Error::domain(format!(
                "power exponent must exceed 1, got {a}"
            )));
        }
        Ok(GrowthModel::Power { a, t_min: 1.0 })
    }

    pub fn piecewise(phi: PiecewiseLinear) -> Self {
        GrowthModel::PiecewiseLinear { phi: Arc::new(phi) }
    }

    pub fn perturbed(base: GrowthModel, amplitude: f64) -> Result<Self> {
        let t_min = base.t_min().max(1.0);
        if !amplitude.is_finite() || amplitude <= -t_min {
            return Err(Error::domain(format!(
                "perturbation amplitude {amplitude} makes 1 + A/t vanish on [{t_min}, inf)"
            )));
        }
        Ok(GrowthModel::Perturbed {
            base: Box::new(base),
            amplitude,
        })
    }

    pub fn t_min(&self) -> f64 {
        match self {
            GrowthModel::ExpOrder { t_min, .. }
            | GrowthModel::Power { t_min, .. }
            | GrowthModel::Composite { t_min, .. } => *t_min,
            GrowthModel::PiecewiseLinear { phi } => phi.t_range().0,
            GrowthModel::Perturbed { base, .. } => base.t_min().max(1.0),
        }
    }

    /// Replaces the validity threshold. Piecewise-linear models take theirs
    /// from the first breakpoint and perturbed models from their base.
    pub fn with_t_min(self, t: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::domain(format!("t_min must be finite, got {t}")));
        }
        match self {
            GrowthModel::ExpOrder { rho, .. } => Ok(GrowthModel::ExpOrder { rho, t_min: t }),
            GrowthModel::Power { a, .. } => Ok(GrowthModel::Power { a, t_min: t }),
            GrowthModel::Composite { outer, inner, .. } => Ok(GrowthModel::Composite {
                outer,
                inner,
                t_min: t,
            }),
            GrowthModel::Perturbed { base, amplitude } => {
                GrowthModel::perturbed(base.with_t_min(t)?, amplitude)
            }
            GrowthModel::PiecewiseLinear { .. } => Err(Error::domain(
                "a piecewise-linear model starts at its first breakpoint",
            )),
        }
    }

    /// `psi(t)`.
    pub fn eval_psi(&self, t: &Magnitude) -> Result<Magnitude> {
        let tf = t.to_f64();
        if tf < self.t_min() {
            return Err(Error::domain(format!(
                "t = {tf} below the model threshold t_min = {}",
                self.t_min()
            )));
        }
        match self {
            GrowthModel::ExpOrder { rho, .. } => Ok(t.mul_scalar(*rho)?.exp()),
            GrowthModel::Power { a, .. } => t.pow_scalar(*a),
            GrowthModel::PiecewiseLinear { phi } => phi.eval(tf),
            GrowthModel::Composite { outer, inner, .. } => outer.eval_psi(&inner.eval_psi(t)?),
            GrowthModel::Perturbed { base, amplitude } => {
                let factor = 1.0 + amplitude / tf;
                base.eval_psi(t)?.mul_scalar(factor)
            }
        }
    }

    pub fn eval_psi_at(&self, t: f64) -> Result<Magnitude> {
        if t < self.t_min() {
            return Err(Error::domain(format!(
                "t = {t} below the model threshold t_min = {}",
                self.t_min()
            )));
        }
        match self {
            // A segment can rise by a factor e^46 or more; routing t through a
            // Magnitude moves it by an ulp, which is enough to move psi by
            // orders of magnitude.
            GrowthModel::PiecewiseLinear { phi } => phi.eval(t),
            GrowthModel::Perturbed { base, amplitude } => {
                base.eval_psi_at(t)?.mul_scalar(1.0 + amplitude / t)
            }
            _ => self.eval_psi(&Magnitude::from_real(t)?),
        }
    }

    /// `ln psi(t)` as a real, computed in closed form where the model allows.
    pub fn ln_psi(&self, t: f64) -> Result<f64> {
        if t < self.t_min() {
            return Err(Error::domain(format!(
                "t = {t} below the model threshold t_min = {}",
                self.t_min()
            )));
        }
        match self {
            GrowthModel::ExpOrder { rho, .. } => Ok(rho * t),
            GrowthModel::Power { a, .. } => Ok(a * t.ln()),
            GrowthModel::PiecewiseLinear { phi } => phi.ln_eval(t),
            _ => Ok(self.eval_psi_at(t)?.ln_f64()),
        }
    }

    /// `log M(r) = psi(ln r)`.
    pub fn log_max_modulus(&self, r: &Magnitude) -> Result<Magnitude> {
        if let GrowthModel::ExpOrder { rho, t_min } = self {
            if *t_min <= 0.0 && r.level() == 0 && r.mantissa() < 1.0 {
                return r.pow_scalar(*rho);
            }
        }
        self.eval_psi(&r.ln()?)
    }

    /// `M(r) = exp(psi(ln r))`.
    pub fn apply_m(&self, r: &Magnitude) -> Result<Magnitude> {
        Ok(self.log_max_modulus(r)?.exp())
    }

    /// `mu_{m,eps}(r) = exp^m(eps * log^{m-1} psi(ln r))`, so that
    /// `log^m mu = eps log^m M`. Level `m = 0` gives `eps M(r)`.
    pub fn apply_mu(&self, m: u32, eps: f64, r: &Magnitude) -> Result<Magnitude> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::domain(format!("eps must lie in (0, 1], got {eps}")));
        }
        if m == 0 {
            return self.apply_m(r)?.mul_scalar(eps);
        }
        let psi = self.log_max_modulus(r)?;
        let inner = psi.ln_n(m - 1).map_err(|_| {
            Error::domain(format!(
                "log^{} psi undefined at r = {r}: psi = {psi} is too small",
                m - 1
            ))
        })?;
        Ok(inner.mul_scalar(eps)?.exp_n(m))
    }

    /// Breakpoint abscissae that kink `psi`, if any.
    pub fn kinks(&self) -> Vec<f64> {
        match self {
            GrowthModel::PiecewiseLinear { phi } => phi.breakpoints().to_vec(),
            GrowthModel::Perturbed { base, .. } => base.kinks(),
            GrowthModel::Composite { inner, .. } => inner.kinks(),
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for GrowthModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthModel::ExpOrder { rho, t_min } => write!(f, "exp(rho={rho}, t_min={t_min})"),
            GrowthModel::Power { a, t_min } => write!(f, "power(a={a}, t_min={t_min})"),
            GrowthModel::PiecewiseLinear { phi } => {
                let (lo, hi) = phi.t_range();
                write!(f, "pwl(n={}, t=[{lo}, {hi}])", phi.len())
            }
            GrowthModel::Composite {
                outer,
                inner,
                t_min,
            } => write!(f, "compose({outer}, {inner}, t_min={t_min})"),
            GrowthModel::Perturbed { base, amplitude } => {
                write!(f, "perturbed({base}, delta={amplitude})")
            }
        }
    }
}

/// A map whose iterates are compared against orbits: `M` or `mu_{m,eps}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Step {
    Max,
    Mu { m: u32, eps: f64 },
}

impl Step {
    pub fn apply(&self, model: &GrowthModel, r: &Magnitude) -> Result<Magnitude> {
        match *self {
            Step::Max => model.apply_m(r),
            Step::Mu { m, eps } => model.apply_mu(m, eps, r),
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Max => write!(f, "M"),
            Step::Mu { m, eps } => write!(f, "mu({m}, {eps})"),
        }
    }
}

/// `[x_0, step(x_0), ..., step^n(x_0)]`, which must increase strictly.
pub fn iterate(
    step: Step,
    model: &GrowthModel,
    start: Magnitude,
    n: usize,
) -> Result<Vec<Magnitude>> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(start);
    for index in 0..n {
        let x = out[index];
        let y = step.apply(model, &x)?;
        if y <= x {
            return Err(Error::BelowThreshold { index, value: x });
        }
        out.push(y);
    }
    Ok(out)
}

/// Least grid point `R` such that `step(r) > r` at every grid point `r >= R`.
/// Ties within tolerance and points where the step is undefined count as
/// violations.
pub fn find_r(step: Step, model: &GrowthModel, grid: &[Magnitude]) -> Result<Magnitude> {
    if grid.is_empty() {
        return Err(Error::domain("search grid is empty"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("search grid must increase strictly"));
    }
    let tol = Tolerance::default();
    let ok: Vec<bool> = grid
        .par_iter()
        .map(|r| {
            step.apply(model, r)
                .map(|y| y.compare(r, tol) == Comparison::Greater)
                .unwrap_or(false)
        })
        .collect();
    match ok.iter().rposition(|&b| !b) {
        None => Ok(grid[0]),
        Some(v) if v + 1 == grid.len() => Err(Error::ThresholdNotFound { at: grid[v] }),
        Some(v) => Ok(grid[v + 1]),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderSample {
    pub t: f64,
    pub ratio: f64,
}

/// Finite-window estimates of order and lower order from `ln psi(t) / t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderEstimate {
    pub t_lo: f64,
    pub t_hi: f64,
    pub grid_count: usize,
    /// `(min, max)` of the ratio over the window.
    pub rho_window: (f64, f64),
    pub rho_argmin: f64,
    pub rho_argmax: f64,
    /// `(min, max)` of the ratio over its local minima.
    pub lambda_window: (f64, f64),
    pub local_minima: Vec<f64>,
    /// Exponents of a bound `exp(r^q) <= M(r) <= exp(r^p)`, when supplied.
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub samples: Vec<OrderSample>,
    pub caveat: String,
}

impl OrderEstimate {
    pub fn with_bounds(mut self, p: f64, q: f64) -> Self {
        self.p = Some(p);
        self.q = Some(q);
        self
    }

    /// Whether `q <= lambda` and `rho <= p` on the window.
    pub fn bounds_consistent(&self) -> Option<bool> {
        Some(self.q? <= self.lambda_window.0 && self.rho_window.1 <= self.p?)
    }

    pub fn ratio_at(&self, t: f64) -> Option<f64> {
        self.samples.iter().find(|s| s.t == t).map(|s| s.ratio)
    }
}

pub fn estimate_order(
    model: &GrowthModel,
    t_lo: f64,
    t_hi: f64,
    grid_count: usize,
) -> Result<OrderEstimate> {
    if t_lo < model.t_min().max(1.0) {
        return Err(Error::domain(format!(
            "order scan must start at max(t_min, 1) = {} or later, got {t_lo}",
            model.t_min().max(1.0)
        )));
    }
    if grid_count < 2 || t_hi <= t_lo {
        return Err(Error::domain(
            "order scan needs t_lo < t_hi and at least two points",
        ));
    }
    let mut ts: Vec<f64> = model
        .kinks()
        .into_iter()
        .filter(|t| (t_lo..=t_hi).contains(t))
        .collect();
    let kinks = ts.clone();
    for t in geometric_grid(t_lo, t_hi, grid_count)? {
        if !kinks.iter().any(|k| (k - t).abs() <= 1e-12 * t) {
            ts.push(t);
        }
    }
    ts.sort_by(f64::total_cmp);

    let ratios = ts
        .par_iter()
        .map(|&t| {
            let l = model.ln_psi(t)?;
            if l < 0.0 {
                return Err(Error::domain(format!("psi({t}) < 1")));
            }
            Ok(l / t)
        })
        .collect::<Result<Vec<f64>>>()?;

    let (mut imin, mut imax) = (0, 0);
    for (i, &r) in ratios.iter().enumerate() {
        if r < ratios[imin] {
            imin = i;
        }
        if r > ratios[imax] {
            imax = i;
        }
    }
    let last = ratios.len() - 1;
    let minima: Vec<usize> = (0..ratios.len())
        .filter(|&i| {
            (i == 0 || ratios[i] <= ratios[i - 1]) && (i == last || ratios[i] <= ratios[i + 1])
        })
        .collect();
    let lam_lo = minima
        .iter()
        .map(|&i| ratios[i])
        .fold(f64::INFINITY, f64::min);
    let lam_hi = minima
        .iter()
        .map(|&i| ratios[i])
        .fold(f64::NEG_INFINITY, f64::max);

    Ok(OrderEstimate {
        t_lo,
        t_hi,
        grid_count: ts.len(),
        rho_window: (ratios[imin], ratios[imax]),
        rho_argmin: ts[imin],
        rho_argmax: ts[imax],
        lambda_window: (lam_lo, lam_hi),
        local_minima: minima.iter().map(|&i| ts[i]).collect(),
        p: None,
        q: None,
        samples: ts
            .iter()
            .zip(&ratios)
            .map(|(&t, &ratio)| OrderSample { t, ratio })
            .collect(),
        caveat: "finite-window estimate: inf/sup over the scanned grid, not limits".into(),
    })
}

/// `psi(ct) >= c psi(t)` on the scan grid.
pub fn check_hadamard(model: &GrowthModel, c: f64, cfg: &ScanConfig) -> Result<RegularityReport> {
    if !c.is_finite() || c < 1.0 {
        return Err(Error::domain(format!(
            "Hadamard factor must be at least 1, got {c}"
        )));
    }
    report::scan(Condition::Hadamard, cfg, &[("c", c)], |t| {
        let lhs = model.eval_psi_at(c * t)?;
        let rhs = model.eval_psi_at(t)?.mul_scalar(c)?;
        Ok((lhs, rhs))
    })
}

/// `outer . inner`, valid from the inner threshold. If `psi_inner` has not yet
/// reached the outer threshold there, the error names the least `t` where it
/// does.
pub fn compose(outer: GrowthModel, inner: GrowthModel) -> Result<GrowthModel> {
    let need = outer.t_min();
    let start = inner.t_min();
    let reaches = |t: f64| -> bool {
        inner
            .eval_psi_at(t)
            .map(|v| v.to_f64() >= need)
            .unwrap_or(false)
    };
    if reaches(start) {
        return Ok(GrowthModel::Composite {
            outer: Box::new(outer),
            inner: Box::new(inner),
            t_min: start,
        });
    }
    let mut lo = start.max(0.0);
    let mut hi = lo.max(1.0);
    while !reaches(hi) {
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::domain(format!(
                "inner model never reaches the outer threshold t_min = {need}"
            )));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if reaches(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(Error::IncompatibleThresholds {
        outer_t_min: need,
        required_t_min: hi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: f64) -> Magnitude {
        Magnitude::from_real(v).unwrap()
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs())
    }

    fn exp1() -> GrowthModel {
        GrowthModel::exp_order(1.0).unwrap()
    }

    fn pow2() -> GrowthModel {
        GrowthModel::power(2.0).unwrap()
    }

    #[test]
    fn eval_psi_examples() {
        assert_eq!(exp1().eval_psi(&r(1.0)).unwrap(), Magnitude::E);
        assert!(close(
            pow2().eval_psi(&r(10.0)).unwrap().to_f64(),
            100.0,
            1e-14
        ));
        let comp = compose(exp1(), pow2()).unwrap();
        let v = comp.eval_psi(&r(3.0)).unwrap();
        assert_eq!(v.level(), 2);
        assert!(close(v.mantissa(), 9f64.ln(), 1e-14));
        assert!(pow2().eval_psi(&r(0.5)).is_err());
    }

    #[test]
    fn apply_m_examples() {
        assert_eq!(
            exp1().apply_m(&Magnitude::E).unwrap(),
            Magnitude::new(2, 1.0).unwrap()
        );
        let x = Magnitude::new(2, 1.0).unwrap();
        assert_eq!(exp1().apply_m(&x).unwrap(), Magnitude::new(3, 1.0).unwrap());
        // M(e^10) = e^100 for psi(t) = t^2.
        let y = pow2().apply_m(&Magnitude::from_ln(10.0).unwrap()).unwrap();
        assert_eq!(y.level(), 3);
        assert!(close(y.mantissa(), 100f64.ln().ln(), 1e-12));
    }

    #[test]
    fn apply_mu_examples() {
        let v = exp1().apply_mu(2, 0.5, &Magnitude::E).unwrap();
        assert!(close(v.to_f64(), (0.5f64).exp().exp(), 1e-13));
        let v = exp1().apply_mu(1, 0.5, &Magnitude::E).unwrap();
        assert!(close(v.to_f64(), (0.5 * 1f64.exp()).exp(), 1e-13));
        let x = r(20.0);
        for m in 1..=3 {
            let mu = pow2().apply_mu(m, 1.0 - 1e-12, &x).unwrap();
            let big = pow2().apply_m(&x).unwrap();
            assert_eq!(mu.compare(&big, Tolerance::default()), Comparison::Tie);
        }
        assert!(exp1().apply_mu(2, 0.0, &x).is_err());
        assert!(exp1().apply_mu(2, 1.5, &x).is_err());
    }

    #[test]
    fn apply_mu_level_zero_scales_m() {
        let x = r(3.0);
        let mu = pow2().apply_mu(0, 0.5, &x).unwrap();
        let big = pow2().apply_m(&x).unwrap();
        assert!(close(mu.to_f64(), 0.5 * big.to_f64(), 1e-13));
    }

    #[test]
    fn iterate_examples() {
        let seq = iterate(Step::Max, &exp1(), Magnitude::E, 3).unwrap();
        let want: Vec<_> = (1..=4).map(|l| Magnitude::new(l, 1.0).unwrap()).collect();
        assert_eq!(seq, want);
        let start = Magnitude::from_ln(1f64.exp().powi(2)).unwrap();
        let seq = iterate(Step::Mu { m: 2, eps: 0.75 }, &pow2(), start, 2).unwrap();
        let ts: Vec<f64> = seq.iter().map(|x| x.ln_f64()).collect();
        for (t, want) in ts.iter().zip([2.0f64, 3.0, 4.5]) {
            assert!(close(*t, want.exp(), 1e-12), "{t} vs e^{want}");
        }
        assert_eq!(
            iterate(Step::Max, &exp1(), r(2.0), 0).unwrap(),
            vec![r(2.0)]
        );
    }

    #[test]
    fn iterate_reports_stall() {
        let start = Magnitude::from_ln(3.0).unwrap();
        let err = iterate(Step::Mu { m: 2, eps: 0.4 }, &pow2(), start, 3).unwrap_err();
        assert!(matches!(err, Error::BelowThreshold { index: 0, .. }));
    }

    #[test]
    fn find_r_examples() {
        let grid: Vec<_> = (1..=100).map(|i| r(0.1 * i as f64)).collect();
        assert_eq!(find_r(Step::Max, &exp1(), &grid).unwrap(), grid[0]);

        let ts = geometric_grid(0.5, 20.0, 64).unwrap();
        let grid: Vec<_> = ts.iter().map(|&t| Magnitude::from_ln(t).unwrap()).collect();
        let found = find_r(Step::Mu { m: 2, eps: 0.75 }, &pow2(), &grid).unwrap();
        let first_above = ts.iter().position(|&t| t > 1.0).unwrap();
        assert_eq!(found, grid[first_above]);

        let grid: Vec<_> = ts[first_above..]
            .iter()
            .map(|&t| Magnitude::from_ln(t).unwrap())
            .collect();
        let err = find_r(Step::Mu { m: 2, eps: 0.5 }, &pow2(), &grid).unwrap_err();
        assert!(matches!(err, Error::ThresholdNotFound { .. }));
    }

    #[test]
    fn estimate_order_examples() {
        for rho in [0.5, 1.0, 2.0] {
            let m = GrowthModel::exp_order(rho).unwrap();
            let est = estimate_order(&m, 1.0, 50.0, 64).unwrap();
            assert_eq!(est.rho_window, (rho, rho));
            assert_eq!(est.lambda_window, (rho, rho));
        }
        let est = estimate_order(&pow2(), 10.0, 100.0, 64).unwrap();
        assert!(close(est.rho_window.1, 2.0 * 10f64.ln() / 10.0, 1e-14));
        assert!(close(est.rho_window.0, 2.0 * 100f64.ln() / 100.0, 1e-14));
        assert_eq!(est.rho_argmax, 10.0);
        assert_eq!(est.local_minima, vec![100.0]);
        assert!(estimate_order(&pow2(), 0.5, 10.0, 8).is_err());
    }

    #[test]
    fn hadamard_examples() {
        let cfg = ScanConfig::new(1.0, 50.0);
        assert!(check_hadamard(&exp1(), 2.0, &cfg).unwrap().holds());
        assert!(check_hadamard(&pow2(), 3.0, &cfg).unwrap().holds());
        let rep = check_hadamard(&pow2(), 1.0, &cfg).unwrap();
        assert!(rep.holds());
        assert_eq!(rep.ties, rep.points);
        let low = ScanConfig::new(0.1, 0.6);
        let rep = check_hadamard(&exp1(), 2.0, &low).unwrap();
        assert_eq!(rep.verdict, crate::report::Verdict::Fails);
    }

    #[test]
    fn compose_examples() {
        let c = compose(pow2(), exp1()).unwrap();
        let v = c.eval_psi(&r(2.0)).unwrap();
        assert!(close(v.ln_f64(), 4.0, 1e-14));
        let near_id = compose(exp1(), GrowthModel::power(1.0 + 1e-12).unwrap()).unwrap();
        for t in [1.5, 3.0, 7.0] {
            let a = near_id.eval_psi_at(t).unwrap();
            let b = exp1().eval_psi_at(t).unwrap();
            assert_eq!(a.compare(&b, Tolerance::new(1e-9)), Comparison::Tie);
        }
        let outer = pow2().with_t_min(10.0).unwrap();
        match compose(outer, exp1()).unwrap_err() {
            Error::IncompatibleThresholds { required_t_min, .. } => {
                assert!(close(required_t_min, 10f64.ln(), 1e-9));
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn pwl_interpolates_in_log_space() {
        let phi = PiecewiseLinear::new(vec![4.0, 20.0], vec![0.0, 20.0]).unwrap();
        assert_eq!(phi.ln_eval(4.0).unwrap(), 0.0);
        assert_eq!(phi.ln_eval(20.0).unwrap(), 20.0);
        let mid = phi.ln_eval(12.0).unwrap();
        let want = ((1.0 + 20f64.exp()) / 2.0).ln();
        assert!(close(mid, want, 1e-15));
        assert!(phi.ln_eval(3.0).is_err());
        assert!(phi.ln_eval(21.0).is_err());
        assert!(PiecewiseLinear::new(vec![1.0, 1.0], vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn steep_pwl_is_exact_at_breakpoints() {
        // Next segment rises by e^46; an ulp of error in t would show.
        let phi = PiecewiseLinear::new(
            vec![20.0, 100.0, 500.0],
            vec![20.0, 43.2188758248682, 89.6566274746046],
        )
        .unwrap();
        let m = GrowthModel::piecewise(phi);
        let v = m.eval_psi_at(100.0).unwrap();
        assert!(close(v.ln_f64(), 43.2188758248682, 1e-14));
    }

    #[test]
    fn model_json_round_trip() {
        let m = GrowthModel::perturbed(compose(exp1(), pow2()).unwrap(), 0.5).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        let back: GrowthModel = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}
