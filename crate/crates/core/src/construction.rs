//! Two explicit growth profiles and the checks that certify them.
//!
//! The first is a convex piecewise-linear `phi` with breakpoints
//! `t_n = k^n t0` whose values alternate between a power recurrence
//! `a_n = (k a_{n-1})^d` and resets `a_n = e^{t_n}` at scheduled indices
//! `N_1 < N_2 < ...`. It is strongly log-regular in the sense of
//! `phi(kt) >= (k phi(t))^{1/eps}` while `ln phi(t) / t` keeps returning to 0
//! and to 1. All breakpoint values are stored as `ln a_n`.
//!
//! The second is `psi(t) = t^2`, which is log-regular but whose
//! `mu_{2,eps}`-iterates fall behind its `M`-iterates by an unbounded number
//! of steps once `eps < 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::growth::{GrowthModel, PiecewiseLinear};
use crate::magnitude::{Magnitude, Tolerance};
use crate::report::{Condition, RegularityReport, ScanRow, Strictness, Verdict, Window};

/// Default number of breakpoints after `t0`.
pub const DEFAULT_N_MAX: usize = 12;

/// Interior spot points per segment in [`verify_growth_inequality`].
const SPOT_POINTS: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiConstruction {
    eps_tilde: f64,
    k_tilde: f64,
    d_tilde: f64,
    t0: f64,
    n_max: usize,
    t: Vec<f64>,
    ln_a: Vec<f64>,
    /// The reset indices `N_1 < N_2 < ...`.
    schedule: Vec<usize>,
}

/// Checks the parameter inequalities the construction relies on and names
/// the first one violated.
pub fn check_admissible(eps_tilde: f64, k_tilde: f64, t0: f64) -> Result<()> {
    let bad = |msg: String| Err(Error::Inadmissible(msg));
    if !(eps_tilde > 0.0 && eps_tilde < 1.0) {
        return bad(format!("eps_tilde = {eps_tilde} must lie in (0, 1)"));
    }
    if !(k_tilde.is_finite() && k_tilde > 1.0) {
        return bad(format!("k_tilde = {k_tilde} must exceed 1"));
    }
    if !(t0.is_finite() && t0 > 0.0) {
        return bad(format!("t0 = {t0} must be positive"));
    }
    let d = 1.0 / eps_tilde;
    if k_tilde <= 2.0 * d {
        return bad(format!(
            "k_tilde > 2/eps_tilde fails: {k_tilde} <= {}",
            2.0 * d
        ));
    }
    let need = 2.0 * (k_tilde + 1.0).ln() / k_tilde.ln();
    if 2.0 * d < need {
        return bad(format!(
            "2/eps_tilde >= 2 log(k_tilde + 1) / log k_tilde fails: {} < {need}",
            2.0 * d
        ));
    }
    if k_tilde.ln() / t0 >= 0.5 {
        return bad(format!(
            "log k_tilde / t0 < 1/2 fails: {} >= 0.5",
            k_tilde.ln() / t0
        ));
    }
    // k^d e^{dt} <= e^{kt} for all t >= t0 reduces to t = t0 because k > d.
    if (k_tilde - d) * t0 < d * k_tilde.ln() {
        return bad(format!(
            "k_tilde^d e^(d t) <= e^(k_tilde t) fails at t0: {} < {}",
            (k_tilde - d) * t0,
            d * k_tilde.ln()
        ));
    }
    Ok(())
}

impl PhiConstruction {
    pub fn eps_tilde(&self) -> f64 {
        self.eps_tilde
    }

    pub fn k_tilde(&self) -> f64 {
        self.k_tilde
    }

    pub fn d_tilde(&self) -> f64 {
        self.d_tilde
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn ln_a(&self) -> &[f64] {
        &self.ln_a
    }

    pub fn schedule(&self) -> &[usize] {
        &self.schedule
    }

    pub fn a(&self, n: usize) -> Magnitude {
        Magnitude::from_ln(self.ln_a[n]).expect("finite by construction")
    }

    pub fn is_designated(&self, n: usize) -> bool {
        self.schedule.contains(&n)
    }

    /// `ln a_n / t_n`.
    pub fn ratio(&self, n: usize) -> f64 {
        self.ln_a[n] / self.t[n]
    }

    pub fn pwl(&self) -> PiecewiseLinear {
        PiecewiseLinear::new(self.t.clone(), self.ln_a.clone()).expect("valid by construction")
    }

    pub fn to_model(&self) -> GrowthModel {
        GrowthModel::piecewise(self.pwl())
    }

    /// Overwrites `ln a_n`, for fault-injection experiments.
    pub fn corrupt_ln_a(&mut self, n: usize, ln_a: f64) {
        self.ln_a[n] = ln_a;
    }
}

/// Builds `phi` with the greedy schedule: `n` becomes the next `N_m` as soon
/// as `ln a_{n-1} / t_{n-1} < 2^{-m}`.
pub fn build_phi(eps_tilde: f64, k_tilde: f64, t0: f64, n_max: usize) -> Result<PhiConstruction> {
    build(eps_tilde, k_tilde, t0, n_max, None)
}

/// Builds `phi` with resets exactly at `schedule`, bypassing the greedy rule.
pub fn build_phi_with_schedule(
    eps_tilde: f64,
    k_tilde: f64,
    t0: f64,
    n_max: usize,
    schedule: &[usize],
) -> Result<PhiConstruction> {
    build(eps_tilde, k_tilde, t0, n_max, Some(schedule))
}

fn build(
    eps_tilde: f64,
    k_tilde: f64,
    t0: f64,
    n_max: usize,
    fixed: Option<&[usize]>,
) -> Result<PhiConstruction> {
    check_admissible(eps_tilde, k_tilde, t0)?;
    if n_max == 0 {
        return Err(Error::domain("n_max must be at least 1"));
    }
    let d = 1.0 / eps_tilde;
    let ln_k = k_tilde.ln();
    let t: Vec<f64> = (0..=n_max).map(|n| t0 * k_tilde.powi(n as i32)).collect();
    if !t.iter().all(|v| v.is_finite()) {
        return Err(Error::domain(format!("t_{n_max} overflows")));
    }
    let mut ln_a = vec![0.0; n_max + 1];
    let mut schedule = Vec::new();
    for n in 1..=n_max {
        let designate = match fixed {
            Some(s) => s.contains(&n),
            None => {
                let m = schedule.len() as i32 + 1;
                ln_a[n - 1] / t[n - 1] < 2f64.powi(-m)
            }
        };
        let recurrence = d * (ln_k + ln_a[n - 1]);
        if designate {
            if t[n] < recurrence {
                return Err(Error::Consistency(format!(
                    "e^(t_{n}) >= (k a_{})^d fails at a reset: {} < {recurrence}",
                    n - 1,
                    t[n]
                )));
            }
            ln_a[n] = t[n];
            schedule.push(n);
        } else {
            ln_a[n] = recurrence;
        }
    }
    Ok(PhiConstruction {
        eps_tilde,
        k_tilde,
        d_tilde: d,
        t0,
        n_max,
        t,
        ln_a,
        schedule,
    })
}

pub fn phi_eval(phi: &PhiConstruction, t: f64) -> Result<Magnitude> {
    phi.pwl().eval(t)
}

fn from_ln(l: f64) -> Result<Magnitude> {
    Magnitude::from_ln(l)
}

fn window_of(phi: &PhiConstruction) -> Window {
    Window {
        t_lo: phi.t0,
        t_hi: phi.t[phi.n_max],
    }
}

/// Nondecreasing gradients at every interior breakpoint, together with the
/// sufficient bound `a_{n+1} >= k^d a_n`. Row `j` compares the gradient
/// ending at `t_j` with the one before it, so a bad `a_j` is reported at `j`.
pub fn verify_convexity(phi: &PhiConstruction) -> Result<RegularityReport> {
    let tol = Tolerance::default();
    let ns = Strictness::NonStrict;
    let (t, l) = (&phi.t, &phi.ln_a);
    let lk_d = phi.d_tilde * phi.k_tilde.ln();
    let mut rows = Vec::new();
    for j in 2..=phi.n_max {
        let n = j - 1;
        let (dn, dn1) = (t[n] - t[n - 1], t[n + 1] - t[n]);
        // dn a_{n+1} + dn1 a_{n-1} >= (dn + dn1) a_n, in logs.
        let hi = dn.ln() + l[n + 1];
        let lo = dn1.ln() + l[n - 1];
        let lhs = hi.max(lo) + (hi.min(lo) - hi.max(lo)).exp().ln_1p();
        let rhs = (dn + dn1).ln() + l[n];
        let grad = ScanRow::decide(j, t[j], from_ln(lhs)?, from_ln(rhs)?, tol, ns);
        let bound = ScanRow::decide(j, t[j], from_ln(l[j])?, from_ln(lk_d + l[j - 1])?, tol, ns);
        rows.push(grad.worse(bound));
    }
    let mut rep = RegularityReport::from_rows(
        Condition::Convexity,
        window_of(phi),
        rows,
        &[("k_tilde", phi.k_tilde), ("d_tilde", phi.d_tilde)],
        tol,
        ns,
    );
    let kd = phi.k_tilde.powf(phi.d_tilde);
    if kd < phi.k_tilde + 1.0 {
        rep.demote(
            Verdict::Fails,
            format!("k^d = {kd} < k + 1, so the sufficient bound does not imply convexity"),
        );
    }
    Ok(rep)
}

/// `phi(kt) >= (k phi(t))^{1/eps}` for `t` in `[t0, t_max / k]`, at every
/// breakpoint `t_j`, every `t_j / k`, and 16 interior points per segment
/// between consecutive such abscissae.
pub fn verify_growth_inequality(
    phi: &PhiConstruction,
    eps: f64,
    k: f64,
) -> Result<RegularityReport> {
    if !(eps > 0.0 && eps < 1.0) || !(k > 1.0 && k.is_finite()) {
        return Err(Error::domain(format!(
            "need eps in (0, 1) and k > 1, got {eps}, {k}"
        )));
    }
    let pwl = phi.pwl();
    let hi = phi.t[phi.n_max] / k;
    if hi < phi.t0 {
        return Err(Error::domain(format!(
            "breakpoints end at {} < k t0 = {}; build more breakpoints",
            phi.t[phi.n_max],
            k * phi.t0
        )));
    }
    let mut anchors: Vec<f64> = phi
        .t
        .iter()
        .flat_map(|&tj| [tj, tj / k])
        .filter(|&x| x >= phi.t0 && x <= hi)
        .collect();
    anchors.push(phi.t0);
    anchors.push(hi);
    anchors.sort_by(f64::total_cmp);
    anchors.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());

    let mut ts = Vec::new();
    for w in anchors.windows(2) {
        ts.push(w[0]);
        for i in 1..=SPOT_POINTS {
            ts.push(w[0] + (w[1] - w[0]) * i as f64 / (SPOT_POINTS + 1) as f64);
        }
    }
    ts.push(*anchors.last().unwrap());

    let tol = Tolerance::default();
    let ln_k = k.ln();
    let rows = ts
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            // Rounding in t_j / k * k can leave the top of the range.
            let kt = (k * t).min(phi.t[phi.n_max]);
            let lhs = pwl.ln_eval(kt)?;
            let rhs = (ln_k + pwl.ln_eval(t)?) / eps;
            Ok(ScanRow::decide(
                i,
                t,
                from_ln(lhs)?,
                from_ln(rhs)?,
                tol,
                Strictness::NonStrict,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RegularityReport::from_rows(
        Condition::GrowthInequality,
        Window {
            t_lo: phi.t0,
            t_hi: hi,
        },
        rows,
        &[("eps", eps), ("k", k)],
        tol,
        Strictness::NonStrict,
    ))
}

/// Audits the breakpoint table: the greedy reset rule, the reset inequality
/// `e^{t_N} >= (k a_{N-1})^d`, the recurrence between resets, the ratio
/// witnesses `ln a_N / t_N = 1` and `ln a_{N-1} / t_{N-1} < 2^{-m}`, and
/// `a_n <= e^{t_n}` from `N_1` on.
pub fn verify_schedule(phi: &PhiConstruction) -> Result<RegularityReport> {
    let tol = Tolerance::default();
    let ns = Strictness::NonStrict;
    let st = Strictness::Strict;
    let real = |v: f64| Magnitude::from_real(v);
    let (t, l) = (&phi.t, &phi.ln_a);
    let ln_k = phi.k_tilde.ln();
    let mut rows = Vec::new();
    let mut m = 1i32;
    for n in 1..=phi.n_max {
        let threshold = 2f64.powi(-m);
        let prev_ratio = phi.ratio(n - 1);
        let recurrence = phi.d_tilde * (ln_k + l[n - 1]);
        let mut row;
        if phi.is_designated(n) {
            row = ScanRow::decide(n, t[n], real(threshold)?, real(prev_ratio)?, tol, st);
            row = row.worse(ScanRow::decide(
                n,
                t[n],
                from_ln(t[n])?,
                from_ln(recurrence)?,
                tol,
                ns,
            ));
            let exact = ScanRow::decide(n, t[n], real(phi.ratio(n))?, Magnitude::ONE, tol, ns);
            let exact_back = ScanRow::decide(n, t[n], Magnitude::ONE, real(phi.ratio(n))?, tol, ns);
            row = row.worse(exact).worse(exact_back);
            m += 1;
        } else {
            row = ScanRow::decide(n, t[n], real(prev_ratio)?, real(threshold)?, tol, ns);
            let up = ScanRow::decide(n, t[n], from_ln(l[n])?, from_ln(recurrence)?, tol, ns);
            let down = ScanRow::decide(n, t[n], from_ln(recurrence)?, from_ln(l[n])?, tol, ns);
            row = row.worse(up).worse(down);
        }
        if phi.schedule.first().is_some_and(|&n1| n >= n1) {
            row = row.worse(ScanRow::decide(
                n,
                t[n],
                from_ln(t[n])?,
                from_ln(l[n])?,
                tol,
                ns,
            ));
        }
        rows.push(row);
    }
    Ok(RegularityReport::from_rows(
        Condition::Schedule,
        window_of(phi),
        rows,
        &[
            ("eps_tilde", phi.eps_tilde),
            ("k_tilde", phi.k_tilde),
            ("t0", phi.t0),
        ],
        tol,
        ns,
    )
    .with_note("reset rule checked strictly; all other comparisons non-strict"))
}

/// Outcome of pushing strong log-regularity of `phi` down to a smaller `eps`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonExtension {
    pub eps: f64,
    pub d: f64,
    pub p: f64,
    pub n: u32,
    pub k: f64,
    /// `d + d^2 + ... + d^{2n+2}` for `d = d_tilde`.
    pub sum: f64,
    /// `(2n + 2) d^{n+1}`.
    pub sum_bound: f64,
    pub report: RegularityReport,
}

/// With `d = 1/eps = d_tilde^p`, `n = floor(p)` and `k = k_tilde^{2n+2}`,
/// checks the power-sum bound and the growth inequality at `(eps, k)`.
pub fn extend_epsilon(phi: &PhiConstruction, eps: f64) -> Result<EpsilonExtension> {
    if !(eps > 0.0 && eps < phi.eps_tilde) {
        return Err(Error::domain(format!(
            "eps must lie in (0, eps_tilde = {}), got {eps}",
            phi.eps_tilde
        )));
    }
    let dt = phi.d_tilde;
    let d = 1.0 / eps;
    let p = d.ln() / dt.ln();
    let n = p.floor() as u32;
    let k = phi.k_tilde.powi(2 * n as i32 + 2);
    let sum: f64 = (1..=2 * n as i32 + 2).map(|i| dt.powi(i)).sum();
    let sum_bound = (2 * n + 2) as f64 * dt.powi(n as i32 + 1);
    let mut report = verify_growth_inequality(phi, eps, k)?;
    report.condition = Condition::EpsilonExtension;
    report.params.insert("p".into(), p);
    report.params.insert("n".into(), n as f64);
    report.params.insert("power_sum".into(), sum);
    report.params.insert("power_sum_bound".into(), sum_bound);
    if sum < sum_bound {
        report.demote(
            Verdict::Fails,
            format!("power sum {sum} < (2n+2) d^(n+1) = {sum_bound}"),
        );
    }
    Ok(EpsilonExtension {
        eps,
        d,
        p,
        n,
        k,
        sum,
        sum_bound,
        report,
    })
}

/// `psi(t) = t^2` from `t = 1`.
pub fn example2_model() -> GrowthModel {
    GrowthModel::Power { a: 2.0, t_min: 1.0 }
}

/// Envelope exponents and starting radius for the separation argument.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationParams {
    pub eps: f64,
    pub c_tilde: f64,
    pub c: f64,
    pub r0: Magnitude,
}

impl SeparationParams {
    /// `ln ln R0`, the starting double-log coordinate.
    pub fn u0(&self) -> f64 {
        self.r0
            .ln()
            .and_then(|t| t.ln())
            .map(|u| u.to_f64())
            .unwrap_or(f64::NAN)
    }
}

/// Double-log grid searched for `R0`: `u = 2^{j/4 - 4}`, `j = 0..=52`, so
/// that `t = e^u` stays finite.
fn u_grid() -> impl Iterator<Item = f64> {
    (0..=52).map(|j| 2f64.powf(j as f64 / 4.0 - 4.0))
}

pub fn separation_bounds(eps: f64) -> Result<SeparationParams> {
    separation_bounds_for(&example2_model(), eps)
}

/// Places `c_tilde < c` at the thirds of `(2 eps, 2)` and takes `R0` as the
/// first grid radius from which both envelopes `log M(r) >= (log r)^c` and
/// `log mu_{2,eps}(r) <= (log r)^{c_tilde}` hold at every later grid point.
pub fn separation_bounds_for(model: &GrowthModel, eps: f64) -> Result<SeparationParams> {
    if !(eps > 0.5 && eps < 1.0) {
        return Err(Error::domain(format!(
            "eps must lie in (1/2, 1), got {eps}"
        )));
    }
    let gap = 2.0 - 2.0 * eps;
    let c_tilde = 2.0 * eps + gap / 3.0;
    let c = 2.0 * eps + 2.0 * gap / 3.0;
    let tol = Tolerance::default();
    let mut start = None;
    for u in u_grid() {
        let t = u.exp();
        let ok = (|| -> Result<bool> {
            if t < model.t_min() {
                return Ok(false);
            }
            let psi = model.eval_psi_at(t)?;
            let tm = Magnitude::from_real(t)?;
            let upper = ScanRow::decide(0, t, psi, tm.pow_scalar(c)?, tol, Strictness::NonStrict);
            let lower = ScanRow::decide(
                0,
                t,
                tm.pow_scalar(c_tilde)?,
                psi.pow_scalar(eps)?,
                tol,
                Strictness::NonStrict,
            );
            Ok(upper.verdict.holds() && lower.verdict.holds())
        })()
        .unwrap_or(false);
        match (ok, start) {
            (true, None) => start = Some(u),
            (false, Some(_)) => start = None,
            _ => {}
        }
    }
    let u = start.ok_or_else(|| {
        Error::domain(format!(
            "envelopes never hold together on the search grid for eps = {eps}"
        ))
    })?;
    Ok(SeparationParams {
        eps,
        c_tilde,
        c,
        r0: Magnitude::from_ln(u.exp())?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationRow {
    pub n: usize,
    /// `(2 eps)^{n+m}`.
    pub exponent_lhs: f64,
    /// `2^n`.
    pub exponent_rhs: f64,
    /// `(2 eps)^{n+m} < 2^n`.
    pub separated: bool,
    /// The same inequality from iterating `u -> 2 eps u` and `u -> 2u`.
    pub iterated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationOutcome {
    pub params: SeparationParams,
    pub m: usize,
    /// Largest `n` in range where separation fails, or 0.
    pub onset: usize,
    /// The same onset for the envelope exponents, `c_tilde^{n+m} < c^n`.
    pub envelope_onset: usize,
    pub rows: Vec<SeparationRow>,
    /// Separation for every `n` in `(onset, n_max]`.
    pub report: RegularityReport,
}

/// Whether `mu_{2,eps}^{n+m}(R0) < M^n(R0)` for `n = 1..=n_max`.
///
/// In double-log coordinates `u = ln ln r` the two maps are `u -> 2 eps u`
/// and `u -> 2u`, so the inequality is `(2 eps)^{n+m} < 2^n`. It is decided
/// from the exponents and again by iterating `u` from `u0`; the two must
/// agree at every `n`.
pub fn verify_separation(
    params: &SeparationParams,
    m: usize,
    n_max: usize,
) -> Result<SeparationOutcome> {
    let eps = params.eps;
    if !(eps > 0.5 && eps < 1.0) {
        return Err(Error::domain(format!(
            "eps must lie in (1/2, 1), got {eps}"
        )));
    }
    let u0 = params.u0();
    if !(u0 > 0.0 && u0.is_finite()) {
        return Err(Error::domain(format!("need ln ln R0 > 0, got {u0}")));
    }
    let (ln_mu, ln_m) = ((2.0 * eps).ln(), 2f64.ln());
    let mut u_mu = vec![u0];
    for _ in 0..n_max + m {
        let last = *u_mu.last().unwrap();
        u_mu.push(2.0 * eps * last);
    }
    let mut u_big = vec![u0];
    for _ in 0..n_max {
        let last = *u_big.last().unwrap();
        u_big.push(2.0 * last);
    }

    let mut rows = Vec::with_capacity(n_max);
    let (mut onset, mut envelope_onset) = (0, 0);
    for n in 1..=n_max {
        let separated = (n + m) as f64 * ln_mu < n as f64 * ln_m;
        let iterated = u_mu[n + m] < u_big[n];
        if separated != iterated {
            return Err(Error::Consistency(format!(
                "exponent test and double-log iteration disagree at n = {n}"
            )));
        }
        if !separated {
            onset = n;
        }
        if (n + m) as f64 * params.c_tilde.ln() >= n as f64 * params.c.ln() {
            envelope_onset = n;
        }
        rows.push(SeparationRow {
            n,
            exponent_lhs: (2.0 * eps).powi((n + m) as i32),
            exponent_rhs: 2f64.powi(n as i32),
            separated,
            iterated,
        });
    }

    let tol = Tolerance::default();
    let tail = rows
        .iter()
        .filter(|r| r.n > onset)
        .map(|r| {
            Ok(ScanRow::decide(
                r.n,
                r.n as f64,
                Magnitude::from_real(u_big[r.n])?,
                Magnitude::from_real(u_mu[r.n + m])?,
                tol,
                Strictness::Strict,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let empty = tail.is_empty();
    let mut report = RegularityReport::from_rows(
        Condition::Separation,
        Window {
            t_lo: (onset + 1) as f64,
            t_hi: n_max as f64,
        },
        tail,
        &[
            ("eps", eps),
            ("m", m as f64),
            ("onset", onset as f64),
            ("envelope_onset", envelope_onset as f64),
            ("c_tilde", params.c_tilde),
            ("c", params.c),
            ("u0", u0),
        ],
        tol,
        Strictness::Strict,
    );
    if empty {
        report.demote(
            Verdict::Fails,
            format!("no separated n up to n_max = {n_max}"),
        );
    }
    Ok(SeparationOutcome {
        params: *params,
        m,
        onset,
        envelope_onset,
        rows,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs())
    }

    fn example1(n_max: usize) -> PhiConstruction {
        build_phi(0.5, 5.0, 4.0, n_max).unwrap()
    }

    #[test]
    fn example1_values() {
        let phi = example1(6);
        assert_eq!(phi.schedule(), &[1, 4]);
        assert_eq!(
            phi.t(),
            &[4.0, 20.0, 100.0, 500.0, 2500.0, 12500.0, 62500.0]
        );
        let l = phi.ln_a();
        let ln5 = 5f64.ln();
        assert_eq!(l[0], 0.0);
        assert_eq!(l[1], 20.0);
        assert!(close(l[2], 40.0 + 2.0 * ln5, 1e-15));
        assert!(close(l[3], 80.0 + 6.0 * ln5, 1e-15));
        assert_eq!(l[4], 2500.0);
        assert!(close(l[5], 5000.0 + 2.0 * ln5, 1e-15));
        assert!(close(l[6], 10000.0 + 6.0 * ln5, 1e-15));
        assert_eq!(example1(12).schedule(), &[1, 4, 8]);
    }

    #[test]
    fn inadmissible_parameters() {
        let e = build_phi(0.5, 3.0, 4.0, 6).unwrap_err();
        assert!(
            matches!(e, Error::Inadmissible(ref s) if s.contains("2/eps_tilde")),
            "{e}"
        );
        let e = build_phi(0.5, 5.0, 1.0, 6).unwrap_err();
        assert!(
            matches!(e, Error::Inadmissible(ref s) if s.contains("t0")),
            "{e}"
        );
    }

    #[test]
    fn phi_eval_examples() {
        let phi = example1(6);
        assert_eq!(phi_eval(&phi, 20.0).unwrap(), phi.a(1));
        let mid = phi_eval(&phi, 12.0).unwrap();
        assert!(close(mid.ln_f64(), ((1.0 + 20f64.exp()) / 2.0).ln(), 1e-15));
        assert!(phi_eval(&phi, 3.9).is_err());
    }

    #[test]
    fn convexity() {
        assert!(verify_convexity(&example1(6)).unwrap().holds());
        let rep = verify_convexity(&example1(1)).unwrap();
        assert!(rep.holds());
        assert_eq!(rep.points, 0);
        let mut bad = example1(6);
        bad.corrupt_ln_a(2, bad.ln_a()[2] - 100.0 * 10f64.ln());
        let rep = verify_convexity(&bad).unwrap();
        assert_eq!(rep.verdict, Verdict::Fails);
        assert_eq!(rep.first_failure.unwrap().index, 2);
    }

    #[test]
    fn growth_inequality() {
        let phi = example1(6);
        let rep = verify_growth_inequality(&phi, 0.5, 5.0).unwrap();
        assert!(rep.holds());
        assert!(rep.ties >= 1);
        let at_t1 = rep.rows.iter().find(|r| r.t == 20.0).unwrap();
        assert!(at_t1.tie);
    }

    #[test]
    fn skipped_reset_is_caught_by_the_schedule_audit() {
        let phi = build_phi_with_schedule(0.5, 5.0, 4.0, 12, &[1]).unwrap();
        assert!(verify_growth_inequality(&phi, 0.5, 5.0).unwrap().holds());
        let rep = verify_schedule(&phi).unwrap();
        assert_eq!(rep.verdict, Verdict::Fails);
        assert_eq!(rep.first_failure.unwrap().index, 4);
        assert!(verify_schedule(&example1(12)).unwrap().holds());
    }

    #[test]
    fn epsilon_extension() {
        let phi = example1(DEFAULT_N_MAX);
        let ext = extend_epsilon(&phi, 0.2).unwrap();
        assert_eq!(ext.n, 2);
        assert_eq!(ext.k, 15625.0);
        assert!(close(ext.p, 5f64.log2(), 1e-15));
        assert_eq!((ext.sum, ext.sum_bound), (126.0, 48.0));
        assert!(ext.report.holds());
        assert!(extend_epsilon(&phi, 0.5).is_err());
    }

    #[test]
    fn separation_examples() {
        let p = separation_bounds(0.75).unwrap();
        assert!(close(p.c_tilde, 5.0 / 3.0, 1e-15));
        assert!(close(p.c, 11.0 / 6.0, 1e-15));
        assert!(separation_bounds(0.5).is_err());
        assert_eq!(verify_separation(&p, 1, 60).unwrap().onset, 1);
        assert_eq!(verify_separation(&p, 3, 60).unwrap().onset, 4);
        let zero = verify_separation(&p, 0, 60).unwrap();
        assert_eq!(zero.onset, 0);
        assert!(zero.report.holds());
        // At r = e^10 the mu envelope is exp(10^1.5) <= exp(10^(5/3)).
        assert!(10f64.powf(1.5) <= 10f64.powf(p.c_tilde));
    }
}
