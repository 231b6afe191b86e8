//! End-to-end checks of the library's headline claims, one function per
//! criterion. Each returns a [`CriterionOutcome`] whose `details` are
//! deterministic so that repeated runs can be compared byte for byte.
//!
//! The kernel-versus-reference criterion takes the reference arithmetic as a
//! parameter; the high-precision implementation lives outside this crate.

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classify::{q2_not_a_witness, q2_not_a_witness_for};
use crate::construction::{
    build_phi, extend_epsilon, separation_bounds, verify_convexity, verify_growth_inequality,
    verify_separation, DEFAULT_N_MAX,
};
use crate::error::Result;
use crate::growth::{estimate_order, GrowthModel};
use crate::magnitude::Magnitude;
use crate::regularity::{
    check_generalized, check_log_regular, check_strong_log_regular, default_k_grid,
    find_log_regular_d, verify_composition_transfer, verify_iterated_chain, TransferSetup,
};
use crate::report::{ScanConfig, Verdict};

pub const DEFAULT_SEED: u64 = 20_240_601;
pub const ORACLE_SAMPLES: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub details: String,
}

impl CriterionOutcome {
    fn new(id: u8, name: &str, passed: bool, details: String) -> Self {
        CriterionOutcome {
            id,
            name: name.to_string(),
            passed,
            details,
        }
    }

    fn from_result(id: u8, name: &str, r: Result<(bool, String)>) -> Self {
        match r {
            Ok((passed, details)) => CriterionOutcome::new(id, name, passed, details),
            Err(e) => CriterionOutcome::new(id, name, false, format!("error: {e}")),
        }
    }

    /// `[PASS] 5 name: details`.
    pub fn line(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        format!("[{tag}] {:>2} {}: {}", self.id, self.name, self.details)
    }
}

/// Independent arithmetic on `(level, mantissa)` pairs.
pub trait ReferenceArithmetic {
    fn encode_real(&mut self, v: f64) -> (u32, f64);
    /// `None` below 1.
    fn ln(&mut self, x: (u32, f64)) -> Option<(u32, f64)>;
    fn exp(&mut self, x: (u32, f64)) -> (u32, f64);
    fn mul_scalar(&mut self, x: (u32, f64), k: f64) -> (u32, f64);
    fn pow_scalar(&mut self, x: (u32, f64), a: f64) -> (u32, f64);
    fn cmp(&mut self, a: (u32, f64), b: (u32, f64)) -> Ordering;
}

fn pair(m: &Magnitude) -> (u32, f64) {
    (m.level(), m.mantissa())
}

/// Same value to relative `rel` in the mantissa. Values sitting on a level
/// boundary may canonicalize one level apart; the lower one is lifted.
pub fn mantissas_agree(a: (u32, f64), b: (u32, f64), rel: f64) -> bool {
    let close = |x: f64, y: f64| x == y || (x - y).abs() <= rel * x.abs().max(y.abs());
    match a.0.cmp(&b.0) {
        Ordering::Equal => close(a.1, b.1),
        Ordering::Less if b.0 == a.0 + 1 && a.1 > 0.0 => close(a.1.ln(), b.1),
        Ordering::Greater if a.0 == b.0 + 1 && b.1 > 0.0 => close(a.1, b.1.ln()),
        _ => false,
    }
}

fn sample(rng: &mut ChaCha8Rng) -> Magnitude {
    let level = rng.gen_range(0..=2u32);
    let lo = if level == 0 { 0.0 } else { 1.0 };
    let m = rng.gen_range(lo..crate::magnitude::MANTISSA_MAX);
    Magnitude::new(level, m).expect("sampled in the canonical window")
}

/// Kernel against reference on `samples` seeded random magnitudes of level at
/// most 2: `from_real`, `ln`, `exp`, `mul_scalar`, `pow_scalar` to relative
/// `1e-9` in the mantissa, and ordering exactly. Must finish in 10 s.
pub fn criterion_1(
    reference: &mut dyn ReferenceArithmetic,
    seed: u64,
    samples: usize,
) -> CriterionOutcome {
    const NAME: &str = "magnitude kernel agrees with high-precision reference";
    const REL: f64 = 1e-9;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures: Vec<String> = Vec::new();
    let mut checks = 0usize;
    let mut fail = |what: String| {
        if failures.len() < 5 {
            failures.push(what);
        }
    };
    let mut prev = sample(&mut rng);
    for _ in 0..samples {
        let x = sample(&mut rng);
        let px = pair(&x);

        let v = 10f64.powf(rng.gen_range(-3.0..300.0));
        match Magnitude::from_real(v) {
            Ok(k) if mantissas_agree(pair(&k), reference.encode_real(v), REL) => {}
            other => fail(format!("from_real({v:e}): {other:?}")),
        }
        match (x.ln().ok(), reference.ln(px)) {
            (None, None) => {}
            (Some(k), Some(r)) if mantissas_agree(pair(&k), r, REL) => {}
            (k, r) => fail(format!("ln{px:?}: {k:?} vs {r:?}")),
        }
        let (k, r) = (x.exp(), reference.exp(px));
        if !mantissas_agree(pair(&k), r, REL) {
            fail(format!("exp{px:?}: {k:?} vs {r:?}"));
        }
        let s = rng.gen_range(0.01..100.0);
        match x.mul_scalar(s) {
            Ok(k) if mantissas_agree(pair(&k), reference.mul_scalar(px, s), REL) => {}
            other => fail(format!("mul_scalar{px:?} by {s}: {other:?}")),
        }
        let a = rng.gen_range(0.25..3.0);
        match x.pow_scalar(a) {
            Ok(k) if mantissas_agree(pair(&k), reference.pow_scalar(px, a), REL) => {}
            other => fail(format!("pow_scalar{px:?} to {a}: {other:?}")),
        }
        let (ko, ro) = (x.cmp(&prev), reference.cmp(px, pair(&prev)));
        if ko != ro {
            fail(format!(
                "order {px:?} vs {:?}: {ko:?} vs {ro:?}",
                pair(&prev)
            ));
        }
        checks += 6;
        prev = x;
    }
    let elapsed = start.elapsed();
    let in_time = elapsed < Duration::from_secs(10);
    let passed = failures.is_empty() && in_time;
    let mut details = format!("{checks} checks on {samples} samples (seed {seed}), rel {REL:e}");
    if !failures.is_empty() {
        details.push_str(&format!("; first mismatches: {}", failures.join("; ")));
    }
    if !in_time {
        details.push_str("; exceeded 10 s");
    }
    CriterionOutcome::new(1, NAME, passed, details)
}

fn exp1() -> GrowthModel {
    GrowthModel::exp_order(1.0).expect("valid")
}

fn pow2() -> GrowthModel {
    GrowthModel::power(2.0).expect("valid")
}

/// ExpOrder(1), eps = 0.5, k = 3: strong log-regularity holds strictly on
/// `[2.3, 50]` (256 points) and fails at `t = 2`.
pub fn criterion_2() -> CriterionOutcome {
    CriterionOutcome::from_result(
        2,
        "strong log-regularity of exp(r) at eps 0.5, k 3",
        (|| {
            let start = Instant::now();
            let on =
                check_strong_log_regular(&exp1(), 0.5, 3.0, &ScanConfig::new(2.3, 50.0).strict())?;
            let at2 = check_strong_log_regular(
                &exp1(),
                0.5,
                3.0,
                &ScanConfig::new(2.0, 2.0).with_grid(1),
            )?;
            let fast = start.elapsed() < Duration::from_secs(1);
            Ok((
                on.holds() && on.points == 256 && at2.verdict == Verdict::Fails && fast,
                format!(
                    "[2.3, 50] x {}: {:?} (strict); t = 2: {:?}",
                    on.points, on.verdict, at2.verdict
                ),
            ))
        })(),
    )
}

/// Strong log-regularity implies the generalized `m = 1` form and
/// log-regularity, on ExpOrder(rho) x eps with `k` from the order bounds.
pub fn criterion_3() -> CriterionOutcome {
    CriterionOutcome::from_result(
        3,
        "strong => generalized(m=1) => log-regular",
        (|| {
            let mut tuples = 0;
            let mut strong_held = 0;
            let mut exceptions = Vec::new();
            for rho in [0.5, 1.0, 2.0] {
                let model = GrowthModel::exp_order(rho)?;
                for eps in [0.25, 0.5, 0.75, 0.9] {
                    tuples += 1;
                    let (p, q) = (1.001 * rho, 0.999 * rho);
                    let k = 1.1 * p / (q * eps);
                    // Where exp(eps rho k t) first reaches k exp(rho t).
                    let t_lo = k.ln() / (eps * rho * (k - 1.0 / eps));
                    let cfg = ScanConfig::new(t_lo, t_lo + 50.0);
                    if !check_strong_log_regular(&model, eps, k, &cfg)?.holds() {
                        continue;
                    }
                    strong_held += 1;
                    let gen = check_generalized(&model, 1, eps, k, &cfg)?.holds();
                    let d = find_log_regular_d(&model, k, &cfg)?.map(|(d, _)| d);
                    if !gen || d.is_none() {
                        exceptions
                            .push(format!("rho {rho}, eps {eps}: generalized {gen}, d {d:?}"));
                    }
                }
            }
            Ok((
                strong_held == tuples && exceptions.is_empty(),
                format!(
                    "strong held on {strong_held}/{tuples} tuples, {} exceptions{}",
                    exceptions.len(),
                    if exceptions.is_empty() {
                        String::new()
                    } else {
                        format!(": {}", exceptions.join("; "))
                    }
                ),
            ))
        })(),
    )
}

/// Power(2) is not strongly log-regular at any grid `k` on `[1e3, 1e6]` for
/// eps in {0.6, 0.75, 0.9}, yet is log-regular at `(k, d) = (2, 1.5)`.
pub fn criterion_4() -> CriterionOutcome {
    CriterionOutcome::from_result(
        4,
        "t^2 is log-regular but not strongly log-regular",
        (|| {
            let model = pow2();
            let cfg = ScanConfig::new(1e3, 1e6);
            let mut held = Vec::new();
            let mut pairs = 0;
            for eps in [0.6, 0.75, 0.9] {
                let mut first: Option<f64> = None;
                for k in default_k_grid() {
                    pairs += 1;
                    if check_strong_log_regular(&model, eps, k, &cfg)?.verdict != Verdict::Fails
                        && first.is_none()
                    {
                        first = Some(k);
                    }
                }
                if let Some(k) = first {
                    held.push(format!("eps {eps} does not fail from k = {k:.4e}"));
                }
            }
            let log_reg = check_log_regular(&model, 2.0, 1.5, &ScanConfig::new(1.0, 1e6))?;
            Ok((
            held.is_empty() && log_reg.holds(),
            format!(
                "{} of {pairs} (eps, k) pairs fail to fail{}; log-regular(2, 1.5) on [1, 1e6]: {:?}",
                held.len(),
                if held.is_empty() { String::new() } else { format!(" [{}]", held.join("; ")) },
                log_reg.verdict
            ),
        ))
        })(),
    )
}

/// The convex profile at (0.5, 5, 4) with six breakpoints.
pub fn criterion_5() -> CriterionOutcome {
    CriterionOutcome::from_result(
        5,
        "convex profile build (0.5, 5, 4, n_max 6)",
        (|| {
            let start = Instant::now();
            let phi = build_phi(0.5, 5.0, 4.0, 6)?;
            // Level-index form of e^L for L = ln a_n, taken straight from L.
            let expect = |l: f64| -> (u32, f64) {
                let (mut level, mut m) = (1u32, l);
                while m >= std::f64::consts::E {
                    m = m.ln();
                    level += 1;
                }
                (level, m)
            };
            let ok_a = |n: usize, l: f64| mantissas_agree(pair(&phi.a(n)), expect(l), 1e-6);
            let a2 = ok_a(2, 40.0 + 25f64.ln());
            let a4 = ok_a(4, 2500.0);
            let convex = verify_convexity(&phi)?;
            let growth = verify_growth_inequality(&phi, 0.5, 5.0)?;
            let order = estimate_order(&phi.to_model(), phi.t0(), phi.t()[6], 64)?;
            let mut ratios_ok = true;
            for (i, &nm) in phi.schedule().iter().enumerate() {
                let at = order.ratio_at(phi.t()[nm]);
                let before = order.ratio_at(phi.t()[nm - 1]);
                let bound = 2f64.powi(-(i as i32 + 1));
                ratios_ok &= at.is_some_and(|r| (r - 1.0).abs() <= 1e-12);
                ratios_ok &= before.is_some_and(|r| r < bound);
            }
            let fast = start.elapsed() < Duration::from_secs(1);
            Ok((
                phi.schedule() == [1, 4]
                    && a2
                    && a4
                    && convex.holds()
                    && growth.holds()
                    && ratios_ok
                    && fast,
                format!(
                    "N = {:?}, a_2 = {}, a_4 = {}, convexity {:?}, growth {:?}, ratios {}",
                    phi.schedule(),
                    phi.a(2),
                    phi.a(4),
                    convex.verdict,
                    growth.verdict,
                    if ratios_ok { "ok" } else { "wrong" }
                ),
            ))
        })(),
    )
}

/// Extending the profile's regularity to eps = 0.2.
pub fn criterion_6() -> CriterionOutcome {
    CriterionOutcome::from_result(
        6,
        "eps extension to 0.2",
        (|| {
            let phi = build_phi(0.5, 5.0, 4.0, DEFAULT_N_MAX)?;
            let ext = extend_epsilon(&phi, 0.2)?;
            let direct = verify_growth_inequality(&phi, 0.2, ext.k)?;
            let at_breakpoints = direct
                .rows
                .iter()
                .filter(|r| phi.t().contains(&r.t))
                .all(|r| r.verdict.holds());
            Ok((
                ext.k == 15625.0
                    && ext.sum >= ext.sum_bound
                    && ext.report.holds()
                    && at_breakpoints,
                format!(
                    "k = {}, power sum {} >= {}, growth inequality {:?}",
                    ext.k, ext.sum, ext.sum_bound, ext.report.verdict
                ),
            ))
        })(),
    )
}

/// Separation onsets for eps = 0.75.
pub fn criterion_7() -> CriterionOutcome {
    CriterionOutcome::from_result(
        7,
        "separation onsets at eps 0.75",
        (|| {
            let p = separation_bounds(0.75)?;
            let m1 = verify_separation(&p, 1, 60)?;
            let m3 = verify_separation(&p, 3, 60)?;
            let agree = m1
                .rows
                .iter()
                .chain(&m3.rows)
                .all(|r| r.separated == r.iterated);
            Ok((
                m1.onset == 1 && m3.onset == 4 && agree,
                format!(
                    "N(1) = {}, N(3) = {}, exponent and iteration agree for n <= 60: {agree}",
                    m1.onset, m3.onset
                ),
            ))
        })(),
    )
}

/// The synthetic `Q_2` orbit is not fast escaping, also under the `1/t`
/// perturbation of `t^2`.
pub fn criterion_8() -> CriterionOutcome {
    CriterionOutcome::from_result(
        8,
        "Q_2 orbit outside A",
        (|| {
            let r = Magnitude::from_ln(2f64.exp())?;
            let cps = [10, 15, 20];
            let base = q2_not_a_witness(0.75, r, 20, &cps, 5)?;
            let perturbed_model = GrowthModel::perturbed(pow2(), 1.0)?;
            let pert = q2_not_a_witness_for(&perturbed_model, 0.75, r, 20, &cps, 5)?;
            let ok = |w: &crate::classify::Q2Witness| {
                w.report.holds()
                    && w.verdict.q2_compatible.is_some()
                    && w.verdict.a_compatible.is_none()
            };
            let same = base.verdict.a_compatible == pert.verdict.a_compatible
                && base.verdict.q2_compatible == pert.verdict.q2_compatible
                && base.report.verdict == pert.report.verdict;
            Ok((
                ok(&base) && ok(&pert) && same,
                format!(
                    "t^2: q2 {:?}, a {:?}, report {:?}; perturbed: q2 {:?}, a {:?}, report {:?}",
                    base.verdict.q2_compatible,
                    base.verdict.a_compatible,
                    base.report.verdict,
                    pert.verdict.q2_compatible,
                    pert.verdict.a_compatible,
                    pert.report.verdict
                ),
            ))
        })(),
    )
}

/// Transfer from exp(r) to its composition with `t^2`.
pub fn criterion_9() -> CriterionOutcome {
    CriterionOutcome::from_result(
        9,
        "composition transfer",
        (|| {
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
            )?;
            Ok((
                rep.holds(),
                format!(
                    "eps' 0.75, k' = {:.6} on [1, 20]: {:?}",
                    rep.params["k_prime"], rep.verdict
                ),
            ))
        })(),
    )
}

/// The iterated chain for exp(r) at eps 0.5, k 3 from `r0 = e^3`.
pub fn criterion_10() -> CriterionOutcome {
    CriterionOutcome::from_result(
        10,
        "iterated mu chain",
        (|| {
            let rep = verify_iterated_chain(&exp1(), 0.5, 3.0, Magnitude::from_ln(3.0)?, 4)?;
            let inconclusive: Vec<usize> = rep
                .rows
                .iter()
                .filter(|r| r.verdict == Verdict::Inconclusive)
                .map(|r| r.index)
                .collect();
            Ok((
                rep.holds() && rep.points == 4 && inconclusive.is_empty(),
                format!(
                    "n <= 4: {:?}, {} absorbed rows, notes: {}",
                    rep.verdict,
                    rep.absorbed,
                    rep.notes.len()
                ),
            ))
        })(),
    )
}

/// Criteria 1 to 10 in order; `samples` is the criterion 1 sample count
/// ([`ORACLE_SAMPLES`] in the acceptance run).
pub fn run_all(
    reference: &mut dyn ReferenceArithmetic,
    seed: u64,
    samples: usize,
) -> Vec<CriterionOutcome> {
    let mut out = vec![criterion_1(reference, seed, samples)];
    out.extend([
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
    ]);
    out
}
