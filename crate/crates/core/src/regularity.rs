//! Regularity conditions on growth models, checked over finite scan windows.
//!
//! Every condition is evaluated in `t = ln r` coordinates:
//!
//! | condition | `r`-space | checked as |
//! |---|---|---|
//! | strong log-regular | `log M(r^k) >= (k log M(r))^{1/eps}` | `psi(kt) >= (k psi(t))^{1/eps}` |
//! | log-regular | `M(r^k) >= M(r)^{kd}` | `psi(kt) >= k d psi(t)` |
//! | generalized | `mu_{m,eps}(r^k) >= M(r)^k` | `mu_m(e^{kt}) >= exp(k psi(t))` |
//! | doubling | `A log M(r) <= log M(Cr) <= B log M(r)` | `A psi(t) <= psi(t + ln C) <= B psi(t)` |
//!
//! A verdict of [`Verdict::HoldsOnWindow`] never claims anything beyond the
//! scanned window.

use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::growth::{compose, iterate, GrowthModel, Step};
use crate::magnitude::Magnitude;
use crate::report::{self, Condition, RegularityReport, ScanConfig, ScanRow, Verdict};

/// Default witness search grid `1.1 * 2^j`, `j = 0..=40`.
pub fn default_k_grid() -> Vec<f64> {
    (0..=40).map(|j| 1.1 * 2f64.powi(j)).collect()
}

/// Log-regularity exponents tried by [`find_log_regular_d`], largest first.
pub fn default_d_grid() -> Vec<f64> {
    (0..=40).map(|j| 1.0 + 2f64.powi(-j)).collect()
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("eps must lie in (0, 1), got {eps}")))
    }
}

fn check_gt1(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must exceed 1, got {v}")))
    }
}

/// Parameters shared by the grid checkers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityParams {
    pub eps: f64,
    pub k: f64,
    pub d: f64,
    pub m: u32,
    pub scan: ScanConfig,
}

impl RegularityParams {
    pub fn validate(&self) -> Result<()> {
        check_eps(self.eps)?;
        check_gt1("k", self.k)?;
        check_gt1("d", self.d)?;
        if self.m == 0 {
            return Err(Error::domain("mu level m must be positive"));
        }
        if self.scan.t_lo >= self.scan.t_hi {
            return Err(Error::domain("scan window needs t_lo < t_hi"));
        }
        if self.scan.grid_count == 0 {
            return Err(Error::domain("scan grid needs at least one point"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoublingParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl DoublingParams {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        check_gt1("A", a)?;
        check_gt1("B", b)?;
        check_gt1("C", c)?;
        if a > b {
            return Err(Error::domain(format!("need A <= B, got A = {a}, B = {b}")));
        }
        Ok(DoublingParams { a, b, c })
    }
}

/// `psi(kt)` against `(k psi(t))^{1/eps}`.
fn strong_sides(model: &GrowthModel, eps: f64, k: f64, t: f64) -> Result<(Magnitude, Magnitude)> {
    let lhs = model.eval_psi_at(k * t)?;
    let rhs = model.eval_psi_at(t)?.mul_scalar(k)?.pow_scalar(1.0 / eps)?;
    Ok((lhs, rhs))
}

/// `mu_{m,eps}(r^k)` against `M(r)^k` at `r = e^t`.
fn generalized_sides(
    model: &GrowthModel,
    m: u32,
    eps: f64,
    k: f64,
    t: f64,
) -> Result<(Magnitude, Magnitude)> {
    let lhs = model.apply_mu(m, eps, &Magnitude::from_ln(k * t)?)?;
    let rhs = model.eval_psi_at(t)?.mul_scalar(k)?.exp();
    Ok((lhs, rhs))
}

/// Both forms decided with opposite outcomes, neither within tolerance.
fn contradicts(a: &ScanRow, b: &ScanRow) -> bool {
    let strict_hold = |r: &ScanRow| r.verdict == Verdict::HoldsOnWindow && !r.tie;
    (strict_hold(a) && b.verdict == Verdict::Fails)
        || (strict_hold(b) && a.verdict == Verdict::Fails)
}

/// Strong log-regularity at `(eps, k)`. Each point is also decided in the
/// equivalent form `mu_{2,eps}(r^k) >= M(r)^k`; where the two forms decide
/// opposite ways the point is reported inconclusive.
pub fn check_strong_log_regular(
    model: &GrowthModel,
    eps: f64,
    k: f64,
    cfg: &ScanConfig,
) -> Result<RegularityReport> {
    check_eps(eps)?;
    check_gt1("k", k)?;
    let clashes = AtomicUsize::new(0);
    let mut rep = report::scan_rows(
        Condition::StrongLogRegular,
        cfg,
        &[("eps", eps), ("k", k)],
        |i, t| {
            let (lhs, rhs) = strong_sides(model, eps, k, t)?;
            let mut row = ScanRow::decide(i, t, lhs, rhs, cfg.tolerance, cfg.strictness);
            if let Ok((mu, mk)) = generalized_sides(model, 2, eps, k, t) {
                let other = ScanRow::decide(i, t, mu, mk, cfg.tolerance, cfg.strictness);
                if contradicts(&row, &other) {
                    clashes.fetch_add(1, Ordering::Relaxed);
                    row.verdict = Verdict::Inconclusive;
                    row.tie = true;
                }
            }
            Ok(row)
        },
    )?;
    let clashes = clashes.into_inner();
    if clashes > 0 {
        rep = RegularityReport::from_rows(
            rep.condition,
            rep.window,
            std::mem::take(&mut rep.rows),
            &[("eps", eps), ("k", k)],
            cfg.tolerance,
            cfg.strictness,
        )
        .with_note(format!(
            "{clashes} point(s) decided differently in the mu_2 form; marked inconclusive"
        ));
    }
    Ok(rep)
}

/// `psi(kt) >= k d psi(t)`.
pub fn check_log_regular(
    model: &GrowthModel,
    k: f64,
    d: f64,
    cfg: &ScanConfig,
) -> Result<RegularityReport> {
    check_gt1("k", k)?;
    check_gt1("d", d)?;
    report::scan(Condition::LogRegular, cfg, &[("k", k), ("d", d)], |t| {
        Ok((
            model.eval_psi_at(k * t)?,
            model.eval_psi_at(t)?.mul_scalar(k * d)?,
        ))
    })
}

/// `mu_{m,eps}(r^k) >= M(r)^k`. At `m = 2` every point must agree with the
/// strong log-regularity form, and a contradiction is an error.
pub fn check_generalized(
    model: &GrowthModel,
    m: u32,
    eps: f64,
    k: f64,
    cfg: &ScanConfig,
) -> Result<RegularityReport> {
    check_eps(eps)?;
    check_gt1("k", k)?;
    if m == 0 {
        return Err(Error::domain("mu level m must be positive"));
    }
    report::scan_rows(
        Condition::Generalized,
        cfg,
        &[("m", m as f64), ("eps", eps), ("k", k)],
        |i, t| {
            let (lhs, rhs) = generalized_sides(model, m, eps, k, t)?;
            let row = ScanRow::decide(i, t, lhs, rhs, cfg.tolerance, cfg.strictness);
            if m == 2 {
                let (a, b) = strong_sides(model, eps, k, t)?;
                let other = ScanRow::decide(i, t, a, b, cfg.tolerance, cfg.strictness);
                if contradicts(&row, &other) {
                    return Err(Error::Consistency(format!(
                        "mu_2 form and strong form disagree at t = {t}"
                    )));
                }
            }
            Ok(row)
        },
    )
}

/// `A psi(t) <= psi(t + ln C) <= B psi(t)`; each point reports the worse of
/// the two comparisons.
pub fn check_doubling(
    model: &GrowthModel,
    p: DoublingParams,
    cfg: &ScanConfig,
) -> Result<RegularityReport> {
    let p = DoublingParams::new(p.a, p.b, p.c)?;
    let shift = p.c.ln();
    report::scan_rows(
        Condition::Doubling,
        cfg,
        &[("A", p.a), ("B", p.b), ("C", p.c)],
        |i, t| {
            let psi = model.eval_psi_at(t)?;
            let shifted = model.eval_psi_at(t + shift)?;
            let low = ScanRow::decide(
                i,
                t,
                shifted,
                psi.mul_scalar(p.a)?,
                cfg.tolerance,
                cfg.strictness,
            );
            let high = ScanRow::decide(
                i,
                t,
                psi.mul_scalar(p.b)?,
                shifted,
                cfg.tolerance,
                cfg.strictness,
            );
            Ok(low.worse(high))
        },
    )
}

/// `k = p / (q eps) * (1 + margin)`, which exceeds the threshold above which
/// a model with `exp(r^q) <= M(r) <= exp(r^p)` is strongly log-regular.
pub fn witness_k_from_order_with_margin(p: f64, q: f64, eps: f64, margin: f64) -> Result<f64> {
    check_eps(eps)?;
    if !(q > 0.0 && q < p && p.is_finite()) {
        return Err(Error::domain(format!(
            "need 0 < q < p, got p = {p}, q = {q}"
        )));
    }
    if !(margin > 0.0 && margin.is_finite()) {
        return Err(Error::domain(format!(
            "margin must be positive, got {margin}"
        )));
    }
    Ok(p / (q * eps) * (1.0 + margin))
}

pub fn witness_k_from_order(p: f64, q: f64, eps: f64) -> Result<f64> {
    witness_k_from_order_with_margin(p, q, eps, 0.1)
}

/// Largest `d` on [`default_d_grid`] for which log-regularity at `k` holds
/// on the window.
pub fn find_log_regular_d(
    model: &GrowthModel,
    k: f64,
    cfg: &ScanConfig,
) -> Result<Option<(f64, RegularityReport)>> {
    for d in default_d_grid() {
        let rep = check_log_regular(model, k, d, cfg)?;
        if rep.holds() {
            return Ok(Some((d, rep)));
        }
    }
    Ok(None)
}

/// First `k` (default grid [`default_k_grid`]) for which strong
/// log-regularity at `eps` holds on the whole window.
pub fn find_strong_witness(
    model: &GrowthModel,
    eps: f64,
    cfg: &ScanConfig,
    ks: Option<&[f64]>,
) -> Result<Option<(f64, RegularityReport)>> {
    let grid = ks.map(<[f64]>::to_vec).unwrap_or_else(default_k_grid);
    for k in grid {
        let rep = check_strong_log_regular(model, eps, k, cfg)?;
        if rep.holds() {
            return Ok(Some((k, rep)));
        }
    }
    Ok(None)
}

/// Whether a report supports "holds for all large t" on its window: the
/// points from some abscissa onward all hold, and they make up at least half
/// of the grid.
pub fn holds_eventually(rep: &RegularityReport) -> Option<f64> {
    let (t, n) = rep.holding_tail()?;
    (2 * n >= rep.rows.len()).then_some(t)
}

/// First `k` for which strong log-regularity at `eps` holds eventually on
/// the window, in the sense of [`holds_eventually`].
pub fn find_eventual_strong_witness(
    model: &GrowthModel,
    eps: f64,
    cfg: &ScanConfig,
    ks: Option<&[f64]>,
) -> Result<Option<(f64, f64, RegularityReport)>> {
    let grid = ks.map(<[f64]>::to_vec).unwrap_or_else(default_k_grid);
    for k in grid {
        let rep = check_strong_log_regular(model, eps, k, cfg)?;
        if let Some(t) = holds_eventually(&rep) {
            return Ok(Some((k, t, rep)));
        }
    }
    Ok(None)
}

/// Runs the iterated chain `mu_{2,eps}^n(r0^k) >= (M^n(r0))^k >= M^n(r0)`
/// for `n = 1..=n_max`.
///
/// The model must first pass strong log-regularity at `(eps, k)` on
/// `[ln r0, max(1e6, 10 ln r0)]`. Row `n` reports the worse of the two links.
/// The second link is a power `x^k` against `x` with `x >= 1`; once `x` is so
/// large that the power is absorbed, the numeric tie is settled by `k > 1`
/// and a note is added.
pub fn verify_iterated_chain(
    model: &GrowthModel,
    eps: f64,
    k: f64,
    r0: Magnitude,
    n_max: usize,
) -> Result<RegularityReport> {
    check_eps(eps)?;
    check_gt1("k", k)?;
    let t0 = r0.ln_f64();
    if !(t0 > 0.0 && t0.is_finite()) {
        return Err(Error::domain(format!(
            "r0 = {r0} must exceed 1 with ln r0 finite"
        )));
    }
    let pre = ScanConfig::new(t0, (10.0 * t0).max(1e6));
    let pre_rep = check_strong_log_regular(model, eps, k, &pre)?;
    if !pre_rep.holds() {
        let at = pre_rep
            .first_failure
            .as_ref()
            .or(pre_rep.first_inconclusive.as_ref())
            .map(|w| w.t)
            .unwrap_or(t0);
        return Err(Error::HypothesisUnmet(format!(
            "not strongly log-regular at eps = {eps}, k = {k} on t in [{}, {}] (first bad t = {at})",
            pre.t_lo, pre.t_hi
        )));
    }

    let tol = pre.tolerance;
    let strictness = pre.strictness;
    let mu = iterate(Step::Mu { m: 2, eps }, model, r0.pow_scalar(k)?, n_max)?;
    let big = iterate(Step::Max, model, r0, n_max)?;
    let mut settled = Vec::new();
    let mut rows = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let powered = big[n].pow_scalar(k)?;
        let first = ScanRow::decide(n, n as f64, mu[n], powered, tol, strictness);
        let mut second = ScanRow::decide(n, n as f64, powered, big[n], tol, strictness);
        if second.verdict == Verdict::Inconclusive && big[n] >= Magnitude::ONE {
            second.verdict = Verdict::HoldsOnWindow;
            settled.push(n);
        }
        rows.push(first.worse(second));
    }
    let mut rep = RegularityReport::from_rows(
        Condition::IteratedChain,
        pre.window(),
        rows,
        &[
            ("eps", eps),
            ("k", k),
            ("ln_r0", t0),
            ("n_max", n_max as f64),
        ],
        tol,
        strictness,
    )
    .with_note(format!(
        "precondition: strongly log-regular on t in [{}, {}]",
        pre.t_lo, pre.t_hi
    ));
    if !settled.is_empty() {
        rep.notes.push(format!(
            "(M^n r0)^k >= M^n r0 at n = {settled:?} settled by k > 1 and M^n r0 >= 1; the power is absorbed"
        ));
    }
    Ok(rep)
}

/// How the outer witness `k` is obtained in [`verify_composition_transfer`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferSetup {
    /// Use this `k` instead of searching [`default_k_grid`].
    pub outer_k: Option<f64>,
    /// Window on which the outer witness must hold eventually.
    pub outer_scan: ScanConfig,
}

impl Default for TransferSetup {
    fn default() -> Self {
        TransferSetup {
            outer_k: None,
            outer_scan: ScanConfig::new(1.0, 50.0),
        }
    }
}

/// Transfers strong log-regularity from `outer` to `outer . inner`.
///
/// With `eps = (2/3) eps'` and a witness `k` for the outer model, the
/// composite is checked at `(eps', k' = k^{3/2})` on `cfg`.
pub fn verify_composition_transfer(
    outer: &GrowthModel,
    inner: &GrowthModel,
    eps_prime: f64,
    cfg: &ScanConfig,
    setup: &TransferSetup,
) -> Result<RegularityReport> {
    check_eps(eps_prime)?;
    let eps = 2.0 * eps_prime / 3.0;
    let composite = compose(outer.clone(), inner.clone())?;
    let scan = &setup.outer_scan;

    let (k, tail) = match setup.outer_k {
        Some(k) => {
            let rep = check_strong_log_regular(outer, eps, k, scan)?;
            let tail = holds_eventually(&rep).ok_or_else(|| {
                Error::HypothesisUnmet(format!(
                    "outer model is not strongly log-regular at eps = {eps}, k = {k} on t in [{}, {}]",
                    scan.t_lo, scan.t_hi
                ))
            })?;
            (k, tail)
        }
        None => match find_eventual_strong_witness(outer, eps, scan, None)? {
            Some((k, tail, _)) => (k, tail),
            None => {
                return Err(Error::HypothesisUnmet(format!(
                    "no k on the default grid makes the outer model strongly log-regular at eps = {eps} on t in [{}, {}]",
                    scan.t_lo, scan.t_hi
                )))
            }
        },
    };
    let k_prime = k.powf(1.5);
    let rep = check_strong_log_regular(&composite, eps_prime, k_prime, cfg)?;
    let mut out = RegularityReport::from_rows(
        Condition::CompositionTransfer,
        cfg.window(),
        rep.rows,
        &[
            ("eps_prime", eps_prime),
            ("eps", eps),
            ("k", k),
            ("k_prime", k_prime),
            ("outer_tail_t", tail),
        ],
        cfg.tolerance,
        cfg.strictness,
    )
    .with_note(format!(
        "outer witness k = {k} holds at eps = {eps} for t >= {tail} on [{}, {}]",
        scan.t_lo, scan.t_hi
    ));
    out.notes.extend(rep.notes);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp1() -> GrowthModel {
        GrowthModel::exp_order(1.0).unwrap()
    }

    fn pow2() -> GrowthModel {
        GrowthModel::power(2.0).unwrap()
    }

    #[test]
    fn strong_examples() {
        let rep = check_strong_log_regular(&exp1(), 0.5, 3.0, &ScanConfig::new(2.3, 50.0)).unwrap();
        assert_eq!(rep.verdict, Verdict::HoldsOnWindow);
        let rep = check_strong_log_regular(&exp1(), 0.5, 3.0, &ScanConfig::new(2.0, 50.0)).unwrap();
        assert_eq!(rep.verdict, Verdict::Fails);
        assert_eq!(rep.first_failure.unwrap().t, 2.0);
        let rep = check_strong_log_regular(&pow2(), 0.9, 10.0, &ScanConfig::new(1e5, 1e6)).unwrap();
        assert_eq!(rep.verdict, Verdict::Fails);
    }

    #[test]
    fn log_regular_examples() {
        let cfg = ScanConfig::new(1.0, 1e6);
        assert!(check_log_regular(&pow2(), 2.0, 1.5, &cfg).unwrap().holds());
        let cfg2 = ScanConfig::new(4f64.ln(), 50.0);
        assert!(check_log_regular(&exp1(), 2.0, 2.0, &cfg2).unwrap().holds());
        let low = ScanConfig::new(0.5, 1.2);
        assert_eq!(
            check_log_regular(&exp1(), 2.0, 2.0, &low).unwrap().verdict,
            Verdict::Fails
        );
        assert_eq!(
            check_log_regular(&pow2(), 2.0, 2.5, &cfg).unwrap().verdict,
            Verdict::Fails
        );
        assert!(check_log_regular(&pow2(), 2.0, 1.0, &cfg).is_err());
    }

    #[test]
    fn generalized_examples() {
        let cfg = ScanConfig::new(2.0, 50.0);
        assert!(check_generalized(&exp1(), 1, 0.5, 3.0, &cfg)
            .unwrap()
            .holds());
        let strong = check_strong_log_regular(&exp1(), 0.5, 3.0, &cfg).unwrap();
        let gen = check_generalized(&exp1(), 2, 0.5, 3.0, &cfg).unwrap();
        let v = |r: &RegularityReport| r.rows.iter().map(|x| x.verdict).collect::<Vec<_>>();
        assert_eq!(v(&strong), v(&gen));
        let wide = ScanConfig::new(2.0, 1e100);
        for k in default_k_grid() {
            let rep = check_generalized(&exp1(), 3, 0.5, k, &wide).unwrap();
            assert_eq!(rep.verdict, Verdict::Fails, "k = {k}");
        }
    }

    #[test]
    fn doubling_examples() {
        let e = std::f64::consts::E;
        let p = DoublingParams::new(2.0, 3.0, e).unwrap();
        let cfg = ScanConfig::new(1.0, 50.0);
        assert!(check_doubling(&exp1(), p, &cfg).unwrap().holds());
        assert_eq!(
            check_doubling(&pow2(), p, &cfg).unwrap().verdict,
            Verdict::Fails
        );
        assert!(DoublingParams::new(1.0, 1.0, 1.0).is_err());
        assert!(DoublingParams::new(3.0, 2.0, 2.0).is_err());
    }

    #[test]
    fn witness_k_examples() {
        let k = witness_k_from_order(1.001, 0.999, 0.5).unwrap();
        assert!((k - 2.2044).abs() < 1e-3, "{k}");
        assert!((witness_k_from_order(2.0, 1.0, 0.5).unwrap() - 4.4).abs() < 1e-12);
        assert!((witness_k_from_order(1.0, 0.5, 0.25).unwrap() - 8.8).abs() < 1e-12);
        assert!(witness_k_from_order(1.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn chain_examples() {
        let r0 = Magnitude::from_ln(3.0).unwrap();
        let rep = verify_iterated_chain(&exp1(), 0.5, 3.0, r0, 4).unwrap();
        assert_eq!(rep.verdict, Verdict::HoldsOnWindow, "{:?}", rep.rows);
        assert_eq!(rep.points, 4);
        // n = 1 in closed form: mu(r0^3) = exp(e^{4.5}), M(r0)^3 = exp(3 e^3).
        let row = &rep.rows[0];
        assert!((row.lhs.ln_f64() - 4.5f64.exp()).abs() < 1e-9 * 4.5f64.exp());
        let empty = verify_iterated_chain(&exp1(), 0.5, 3.0, r0, 0).unwrap();
        assert!(empty.holds());
        assert_eq!(empty.points, 0);
        let err = verify_iterated_chain(&pow2(), 0.9, 10.0, r0, 4).unwrap_err();
        assert!(matches!(err, Error::HypothesisUnmet(_)));
    }

    #[test]
    fn transfer_examples() {
        let setup = TransferSetup {
            outer_k: Some(3.0),
            ..Default::default()
        };
        let rep = verify_composition_transfer(
            &exp1(),
            &pow2(),
            0.75,
            &ScanConfig::new(1.0, 20.0),
            &setup,
        )
        .unwrap();
        assert!(rep.holds());
        assert!((rep.params["k_prime"] - 3f64.powf(1.5)).abs() < 1e-12);
        let rep = verify_composition_transfer(
            &exp1(),
            &exp1(),
            0.75,
            &ScanConfig::new(2.0, 20.0),
            &TransferSetup::default(),
        )
        .unwrap();
        assert!(rep.holds());
        let err = verify_composition_transfer(
            &pow2(),
            &exp1(),
            0.75,
            &ScanConfig::new(1.0, 20.0),
            &TransferSetup::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::HypothesisUnmet(_)));
    }
}
