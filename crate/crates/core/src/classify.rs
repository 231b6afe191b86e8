//! Escape-speed verdicts for finite orbits.
//!
//! A point is fast escaping when some lag `l` gives `|f^{n+l}(z)| >= M^n(R)`
//! for every `n`, quite fast escaping when the same holds against
//! `mu_{1,eps}^n(R)` for some `eps`, and lies in `Q_2` against
//! `mu_{2,eps}^n(R)`. None of these is decidable from finitely many iterates,
//! so everything here answers the truncated question "compatible at depth `d`
//! with lag at most `L`" and says so in the verdict.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construction::{example2_model, separation_bounds, verify_separation};
use crate::error::{Error, Result};
use crate::growth::{iterate, GrowthModel, Step};
use crate::magnitude::{Magnitude, Tolerance};
use crate::report::{Condition, RegularityReport, ScanRow, Strictness, Verdict, Window};

pub const FINITE_DEPTH_CAVEAT: &str = "finite-depth verdict";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrbitSource {
    /// Iterates of `x -> lambda e^x` from `x0`.
    RealAxis { lambda: f64, x0: Magnitude },
    Synthetic {
        description: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        floor: Option<Floor>,
    },
}

/// A lower bound that holds by construction: entry `n` is at least
/// `step^n(r)`. Comparisons against exactly that threshold at lag 0 are
/// identities, so an absorbed tie there still counts as holding.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Floor {
    pub step: Step,
    pub r: Magnitude,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    magnitudes: Vec<Magnitude>,
    source: OrbitSource,
}

impl OrbitRecord {
    pub fn new(magnitudes: Vec<Magnitude>, source: OrbitSource) -> Result<Self> {
        if magnitudes.is_empty() {
            return Err(Error::domain("an orbit needs at least its starting point"));
        }
        Ok(OrbitRecord { magnitudes, source })
    }

    pub fn synthetic(magnitudes: Vec<Magnitude>, description: impl Into<String>) -> Result<Self> {
        OrbitRecord::new(
            magnitudes,
            OrbitSource::Synthetic {
                description: description.into(),
                floor: None,
            },
        )
    }

    pub fn with_floor(mut self, floor: Floor) -> Self {
        if let OrbitSource::Synthetic { floor: f, .. } = &mut self.source {
            *f = Some(floor);
        }
        self
    }

    fn floor(&self) -> Option<Floor> {
        match &self.source {
            OrbitSource::Synthetic { floor, .. } => *floor,
            OrbitSource::RealAxis { .. } => None,
        }
    }

    pub fn magnitudes(&self) -> &[Magnitude] {
        &self.magnitudes
    }

    pub fn source(&self) -> &OrbitSource {
        &self.source
    }

    pub fn depth(&self) -> usize {
        self.magnitudes.len() - 1
    }

    /// The orbit with `prefix` inserted before its first entry. Any floor is
    /// dropped since the indices shift.
    pub fn prepend(&self, prefix: &[Magnitude]) -> OrbitRecord {
        let mut magnitudes = prefix.to_vec();
        magnitudes.extend_from_slice(&self.magnitudes);
        let mut source = self.source.clone();
        if let OrbitSource::Synthetic { floor, .. } = &mut source {
            *floor = None;
        }
        OrbitRecord { magnitudes, source }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationParams {
    pub r: Magnitude,
    pub max_lag: usize,
    pub eps_grid: Vec<f64>,
    /// Level of the `mu` used for the `Q_2` test.
    pub m: u32,
}

impl ClassificationParams {
    pub fn new(r: Magnitude, max_lag: usize, eps_grid: Vec<f64>) -> Self {
        ClassificationParams {
            r,
            max_lag,
            eps_grid,
            m: 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.eps_grid.is_empty() {
            return Err(Error::domain("eps grid is empty"));
        }
        if let Some(e) = self.eps_grid.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
            return Err(Error::domain(format!("eps grid entry {e} outside (0, 1)")));
        }
        if self.m == 0 {
            return Err(Error::domain("mu level must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsLag {
    pub eps: f64,
    pub lag: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeedVerdict {
    pub r: Magnitude,
    pub depth: usize,
    pub max_lag: usize,
    /// Least lag against `M^n(R)`.
    pub a_compatible: Option<usize>,
    /// Least `(eps, lag)` against `mu_{1,eps}^n(R)`, smallest `eps` first.
    pub q_compatible: Option<EpsLag>,
    /// Least `(eps, lag)` against `mu_{m,eps}^n(R)`.
    pub q2_compatible: Option<EpsLag>,
    /// The last entry exceeds both `R` and the first entry.
    pub escaping_at_depth: bool,
    pub caveat: String,
    pub notes: Vec<String>,
}

/// `[R, step(R), ..., step^n(R)]`.
pub fn threshold_sequence(
    model: &GrowthModel,
    step: Step,
    r: Magnitude,
    n: usize,
) -> Result<Vec<Magnitude>> {
    iterate(step, model, r, n)
}

/// `lhs >= rhs`, where `by_floor` says the inequality holds by construction
/// and only an absorbed tie is left to settle.
fn at_least(n: usize, lhs: Magnitude, rhs: Magnitude, by_floor: bool) -> ScanRow {
    let mut row = ScanRow::decide(
        n,
        n as f64,
        lhs,
        rhs,
        Tolerance::default(),
        Strictness::NonStrict,
    );
    if by_floor && row.tie && row.verdict == Verdict::Inconclusive {
        row.verdict = Verdict::HoldsOnWindow;
    }
    row
}

/// Least `l <= max_lag` with `orbit[n + l] >= thr[n]` for all `n <= depth - l`.
/// A tie counts unless a scalar was absorbed on either side and no floor
/// covers it.
fn least_lag(
    orbit: &[Magnitude],
    thr: &[Magnitude],
    max_lag: usize,
    floored: bool,
) -> Option<usize> {
    let depth = orbit.len() - 1;
    (0..=max_lag.min(depth)).find(|&lag| {
        (0..=depth - lag).all(|n| {
            at_least(n, orbit[n + lag], thr[n], floored && lag == 0)
                .verdict
                .holds()
        })
    })
}

/// Tests the orbit against `M`, `mu_{1,eps}` and `mu_{m,eps}` thresholds from
/// `R` for every lag up to `max_lag` and every `eps` in the grid.
pub fn classify_orbit(
    orbit: &OrbitRecord,
    model: &GrowthModel,
    params: &ClassificationParams,
) -> Result<SpeedVerdict> {
    params.validate()?;
    let depth = orbit.depth();
    if depth < params.max_lag + 2 {
        return Err(Error::domain(format!(
            "orbit depth {depth} is below max_lag + 2 = {}",
            params.max_lag + 2
        )));
    }
    let mags = orbit.magnitudes();
    let m_thr = threshold_sequence(model, Step::Max, params.r, depth)?;
    let floored = |step: Step| {
        orbit
            .floor()
            .is_some_and(|f| f.step == step && f.r == params.r)
    };
    let a_compatible = least_lag(mags, &m_thr, params.max_lag, floored(Step::Max));

    let mut eps_grid = params.eps_grid.clone();
    eps_grid.sort_by(f64::total_cmp);
    eps_grid.dedup();
    let mu_search = |level: u32| -> (Option<EpsLag>, Vec<String>) {
        let found: Vec<std::result::Result<Option<EpsLag>, String>> = eps_grid
            .par_iter()
            .map(|&eps| {
                let step = Step::Mu { m: level, eps };
                match threshold_sequence(model, step, params.r, depth) {
                    Ok(thr) => Ok(least_lag(mags, &thr, params.max_lag, floored(step))
                        .map(|lag| EpsLag { eps, lag })),
                    Err(e) => Err(format!("{step} skipped: {e}")),
                }
            })
            .collect();
        let mut notes = Vec::new();
        let mut best = None;
        for f in found {
            match f {
                Ok(Some(hit)) if best.is_none() => best = Some(hit),
                Ok(_) => {}
                Err(note) => notes.push(note),
            }
        }
        (best, notes)
    };
    let (q_compatible, mut notes) = mu_search(1);
    let (q2_compatible, q2_notes) = mu_search(params.m);
    notes.extend(q2_notes);

    let last = mags[depth];
    Ok(SpeedVerdict {
        r: params.r,
        depth,
        max_lag: params.max_lag,
        a_compatible,
        q_compatible,
        q2_compatible,
        escaping_at_depth: last > params.r && last > mags[0],
        caveat: FINITE_DEPTH_CAVEAT.to_string(),
        notes,
    })
}

/// The real orbit of `x -> lambda e^x` from `x0`. Positive Taylor
/// coefficients make `|f^n(x)| = M^n(x)` along the positive axis.
pub fn real_axis_orbit(lambda: f64, x0: Magnitude, depth: usize) -> Result<OrbitRecord> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::domain(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    let mut xs = Vec::with_capacity(depth + 1);
    xs.push(x0);
    for j in 0..depth {
        xs.push(xs[j].exp().mul_scalar(lambda)?);
    }
    OrbitRecord::new(xs, OrbitSource::RealAxis { lambda, x0 })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Q2Witness {
    pub orbit: OrbitRecord,
    pub verdict: SpeedVerdict,
    pub report: RegularityReport,
}

/// [`q2_not_a_witness_for`] on `psi(t) = t^2`.
pub fn q2_not_a_witness(
    eps: f64,
    r: Magnitude,
    depth: usize,
    checkpoints: &[usize],
    max_lag: usize,
) -> Result<Q2Witness> {
    q2_not_a_witness_for(&example2_model(), eps, r, depth, checkpoints, max_lag)
}

/// Builds the extremal orbit `a_n = mu_{2,eps}^n(R)`, raised to
/// `M^2(mu_{2,eps}^n(R))` at the checkpoints, and checks that it lies in
/// `Q_2` but not in `A`.
///
/// The report holds the rows `a_n >= mu^n(R)` followed by, for each
/// checkpoint `n_j` and each `m` in `2..=max_lag + 2`, the strict inequality
/// `M^{n_j - m + 2}(R) > a_{n_j}`, which rules out lag `m - 2` at
/// `n = n_j - m + 2`. A pair is skipped with a note unless `n_j - m`
/// exceeds the separation onset `N(m)` of the `t^2` exponents.
pub fn q2_not_a_witness_for(
    model: &GrowthModel,
    eps: f64,
    r: Magnitude,
    depth: usize,
    checkpoints: &[usize],
    max_lag: usize,
) -> Result<Q2Witness> {
    if !(eps > 0.5 && eps < 1.0) {
        return Err(Error::domain(format!(
            "eps must lie in (1/2, 1), got {eps}"
        )));
    }
    if depth == 0 {
        return Err(Error::domain("depth must be at least 1"));
    }
    if let Some(c) = checkpoints.iter().find(|&&c| c == 0 || c > depth) {
        return Err(Error::domain(format!(
            "checkpoint {c} outside [1, {depth}]"
        )));
    }
    let mu = Step::Mu { m: 2, eps };
    let mu_thr = threshold_sequence(model, mu, r, depth)?;
    let m_thr = threshold_sequence(model, Step::Max, r, depth + 2)?;
    let mags = mu_thr
        .iter()
        .enumerate()
        .map(|(n, x)| {
            if checkpoints.contains(&n) {
                model.apply_m(&model.apply_m(x)?)
            } else {
                Ok(*x)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let orbit = OrbitRecord::synthetic(
        mags.clone(),
        format!("mu_(2,{eps})^n(R), lifted by M^2 at checkpoints {checkpoints:?}"),
    )?
    .with_floor(Floor { step: mu, r });

    let tol = Tolerance::default();
    let mut rows: Vec<ScanRow> = (0..=depth)
        .map(|n| at_least(n, mags[n], mu_thr[n], true))
        .collect();
    let settled = rows.iter().filter(|r| r.tie && r.absorbed).count();
    let sep = separation_bounds(eps)?;
    let mut notes = Vec::new();
    let mut checked = 0;
    for m in 2..=max_lag + 2 {
        let onset = verify_separation(&sep, m, depth)?.onset;
        for &nj in checkpoints {
            if nj <= m + onset {
                notes.push(format!(
                    "checkpoint {nj} skipped for m = {m}: n_j - m must exceed onset N(m) = {onset}"
                ));
                continue;
            }
            let n = nj - m + 2;
            let row = ScanRow::decide(
                rows.len(),
                nj as f64,
                m_thr[n],
                mags[nj],
                tol,
                Strictness::Strict,
            );
            rows.push(row);
            checked += 1;
        }
    }
    let mut report = RegularityReport::from_rows(
        Condition::Q2Witness,
        Window {
            t_lo: 0.0,
            t_hi: depth as f64,
        },
        rows,
        &[
            ("eps", eps),
            ("depth", depth as f64),
            ("max_lag", max_lag as f64),
            ("checked_pairs", checked as f64),
        ],
        tol,
        Strictness::NonStrict,
    );
    if settled > 0 {
        report.notes.push(format!(
            "{settled} absorbed ties a_n = mu^n(R) hold by construction of the orbit"
        ));
    }
    report.notes.extend(notes);
    if checked == 0 {
        report.demote(
            Verdict::Inconclusive,
            "every checkpoint precedes the separation onset",
        );
    }

    let params = ClassificationParams::new(r, max_lag, vec![eps]);
    let verdict = classify_orbit(&orbit, model, &params)?;
    Ok(Q2Witness {
        orbit,
        verdict,
        report,
    })
}
