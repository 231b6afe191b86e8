//! Verdicts, scan windows and the report every checker returns.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::magnitude::{Comparison, Magnitude, Tolerance};

/// Default number of points in a scan grid.
pub const DEFAULT_GRID: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    HoldsOnWindow,
    Fails,
    Inconclusive,
}

impl Verdict {
    /// Conjunction: any failure fails, otherwise any doubt is inconclusive.
    pub fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fails, _) | (_, Fails) => Fails,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => HoldsOnWindow,
        }
    }

    pub fn holds(self) -> bool {
        self == Verdict::HoldsOnWindow
    }
}

/// Whether `lhs >= rhs` (non-strict) or `lhs > rhs` (strict) is being checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strictness {
    #[default]
    NonStrict,
    Strict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    StrongLogRegular,
    LogRegular,
    Generalized,
    Doubling,
    Hadamard,
    IteratedChain,
    CompositionTransfer,
    Convexity,
    GrowthInequality,
    Schedule,
    EpsilonExtension,
    Separation,
    Q2Witness,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub t_lo: f64,
    pub t_hi: f64,
}

/// A scan window with its grid and comparison settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub t_lo: f64,
    pub t_hi: f64,
    pub grid_count: usize,
    pub tolerance: Tolerance,
    pub strictness: Strictness,
}

impl ScanConfig {
    pub fn new(t_lo: f64, t_hi: f64) -> Self {
        ScanConfig {
            t_lo,
            t_hi,
            grid_count: DEFAULT_GRID,
            tolerance: Tolerance::default(),
            strictness: Strictness::NonStrict,
        }
    }

    pub fn with_grid(mut self, grid_count: usize) -> Self {
        self.grid_count = grid_count;
        self
    }

    pub fn with_tolerance(mut self, tolerance: Tolerance) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn strict(mut self) -> Self {
        self.strictness = Strictness::Strict;
        self
    }

    pub fn window(&self) -> Window {
        Window {
            t_lo: self.t_lo,
            t_hi: self.t_hi,
        }
    }

    /// Geometric grid from `t_lo` to `t_hi`, both endpoints exact.
    pub fn grid(&self) -> Result<Vec<f64>> {
        geometric_grid(self.t_lo, self.t_hi, self.grid_count)
    }
}

pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite()) || lo <= 0.0 || hi < lo {
        return Err(Error::domain(format!(
            "geometric grid needs 0 < lo <= hi, got [{lo}, {hi}]"
        )));
    }
    if count == 0 {
        return Err(Error::domain("grid needs at least one point"));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let ratio = (hi / lo).ln();
    let last = count - 1;
    Ok((0..count)
        .map(|i| match i {
            0 => lo,
            i if i == last => hi,
            i => lo * (ratio * i as f64 / last as f64).exp(),
        })
        .collect())
}

/// One evaluated comparison `lhs >= rhs` (or `>`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub index: usize,
    pub t: f64,
    pub lhs: Magnitude,
    pub rhs: Magnitude,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub index: usize,
    pub t: f64,
    pub lhs: Magnitude,
    pub rhs: Magnitude,
    pub verdict: Verdict,
    pub tie: bool,
    pub absorbed: bool,
}

impl ScanRow {
    /// Decides `lhs >= rhs` (or `lhs > rhs`). A tie holds for a non-strict
    /// inequality unless a scalar was absorbed into either side, in which case
    /// the lost digits could flip it.
    pub fn decide(
        index: usize,
        t: f64,
        lhs: Magnitude,
        rhs: Magnitude,
        tol: Tolerance,
        strictness: Strictness,
    ) -> ScanRow {
        let absorbed = lhs.is_absorbed() || rhs.is_absorbed();
        let c = lhs.compare(&rhs, tol);
        let verdict = match c {
            Comparison::Greater => Verdict::HoldsOnWindow,
            Comparison::Less => Verdict::Fails,
            Comparison::Tie if absorbed => Verdict::Inconclusive,
            Comparison::Tie if strictness == Strictness::NonStrict => Verdict::HoldsOnWindow,
            Comparison::Tie => Verdict::Inconclusive,
        };
        ScanRow {
            index,
            t,
            lhs,
            rhs,
            verdict,
            tie: c == Comparison::Tie,
            absorbed,
        }
    }

    /// The less favourable of two comparisons made at the same point.
    pub fn worse(self, other: ScanRow) -> ScanRow {
        let rank = |v: Verdict| match v {
            Verdict::HoldsOnWindow => 0,
            Verdict::Inconclusive => 1,
            Verdict::Fails => 2,
        };
        let (tie, absorbed) = (self.tie || other.tie, self.absorbed || other.absorbed);
        let mut out = if rank(other.verdict) > rank(self.verdict) {
            other
        } else {
            self
        };
        out.tie = tie;
        out.absorbed = absorbed;
        out
    }

    fn witness(&self) -> Witness {
        Witness {
            index: self.index,
            t: self.t,
            lhs: self.lhs,
            rhs: self.rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub condition: Condition,
    pub verdict: Verdict,
    pub first_failure: Option<Witness>,
    pub first_inconclusive: Option<Witness>,
    pub window: Window,
    pub grid_count: usize,
    pub tolerance: f64,
    pub strictness: Strictness,
    pub params: BTreeMap<String, f64>,
    pub points: usize,
    pub ties: usize,
    pub absorbed: usize,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub rows: Vec<ScanRow>,
}

impl RegularityReport {
    /// Assembles a report from rows already ordered by index.
    pub fn from_rows(
        condition: Condition,
        window: Window,
        rows: Vec<ScanRow>,
        params: &[(&str, f64)],
        tol: Tolerance,
        strictness: Strictness,
    ) -> Self {
        let verdict = rows
            .iter()
            .fold(Verdict::HoldsOnWindow, |v, r| v.and(r.verdict));
        let first = |v: Verdict| rows.iter().find(|r| r.verdict == v).map(ScanRow::witness);
        RegularityReport {
            condition,
            verdict,
            first_failure: first(Verdict::Fails),
            first_inconclusive: first(Verdict::Inconclusive),
            window,
            grid_count: rows.len(),
            tolerance: tol.rel,
            strictness,
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            points: rows.len(),
            ties: rows.iter().filter(|r| r.tie).count(),
            absorbed: rows.iter().filter(|r| r.absorbed).count(),
            notes: Vec::new(),
            rows,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// Downgrades the verdict, never upgrades it.
    pub fn demote(&mut self, verdict: Verdict, note: impl Into<String>) {
        self.verdict = self.verdict.and(verdict);
        self.notes.push(note.into());
    }

    pub fn holds(&self) -> bool {
        self.verdict.holds()
    }

    /// First grid abscissa from which every remaining point holds, with the
    /// number of points in that tail.
    pub fn holding_tail(&self) -> Option<(f64, usize)> {
        let start = match self.rows.iter().rposition(|r| !r.verdict.holds()) {
            None => 0,
            Some(i) => i + 1,
        };
        let row = self.rows.get(start)?;
        Some((row.t, self.rows.len() - start))
    }
}

/// Evaluates `f` at every grid point of `cfg` in parallel and decides each
/// `(lhs, rhs)` pair. The first evaluation error by grid index is returned.
pub(crate) fn scan<F>(
    condition: Condition,
    cfg: &ScanConfig,
    params: &[(&str, f64)],
    f: F,
) -> Result<RegularityReport>
where
    F: Fn(f64) -> Result<(Magnitude, Magnitude)> + Sync,
{
    scan_rows(condition, cfg, params, |i, t| {
        let (lhs, rhs) = f(t)?;
        Ok(ScanRow::decide(
            i,
            t,
            lhs,
            rhs,
            cfg.tolerance,
            cfg.strictness,
        ))
    })
}

/// Like [`scan`], for checks that decide each grid point themselves.
pub(crate) fn scan_rows<F>(
    condition: Condition,
    cfg: &ScanConfig,
    params: &[(&str, f64)],
    f: F,
) -> Result<RegularityReport>
where
    F: Fn(usize, f64) -> Result<ScanRow> + Sync,
{
    let grid = cfg.grid()?;
    let rows = grid
        .par_iter()
        .enumerate()
        .map(|(i, &t)| f(i, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(RegularityReport::from_rows(
        condition,
        cfg.window(),
        rows,
        params,
        cfg.tolerance,
        cfg.strictness,
    ))
}
