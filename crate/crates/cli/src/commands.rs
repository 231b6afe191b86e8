use std::path::Path;

use fastescape_core::acceptance::run_all;
use fastescape_core::classify::OrbitRecord;
use fastescape_core::construction::{
    extend_epsilon, separation_bounds, verify_convexity, verify_growth_inequality, verify_schedule,
    verify_separation,
};
use fastescape_core::growth::{estimate_order, find_r, iterate};
use fastescape_core::regularity::{
    check_doubling, check_generalized, check_log_regular, check_strong_log_regular,
    verify_composition_transfer, verify_iterated_chain, DoublingParams, TransferSetup,
};
use fastescape_core::report::geometric_grid;
use fastescape_core::{
    build_phi, classify_orbit, real_axis_orbit, threshold_sequence, ClassificationParams, Error,
    GrowthModel, Magnitude, PhiConstruction, RegularityReport, Result, ScanConfig, Step, Tolerance,
    Verdict,
};
use serde_json::{json, Value};

use crate::args::{
    ClassifyArgs, Cli, Command, ConstructCmd, GrowthCmd, PhiArgs, RegularityCmd, ScanArgs,
    SelftestArgs,
};
use crate::io;
use crate::output::{mag, scan_table, verdict_name, Outcome, Table};
use crate::reference::Reference;

const WINDOW_CAVEAT: &str = "verdicts cover the scanned window only; nothing is claimed beyond it";

pub fn run(cli: &Cli) -> Result<Outcome> {
    let mut out = Outcome::default();
    match &cli.command {
        Command::Growth(g) => growth(g, &mut out)?,
        Command::Regularity(r) => regularity(r, &mut out)?,
        Command::Construct(c) => construct(c, &mut out)?,
        Command::Classify(a) => classify(a, &mut out)?,
        Command::Selftest(a) => selftest(a, cli.global.seed, &mut out),
    }
    Ok(out)
}

fn echo_model(out: &mut Outcome, name: &str, model: &GrowthModel) {
    out.verdict(
        name,
        None,
        json!({ "text": model.to_string(), "parsed": model }),
    );
}

fn scan_config(s: &ScanArgs) -> Result<ScanConfig> {
    if !(s.tol >= 0.0 && s.tol < 1.0) {
        return Err(Error::Domain(format!(
            "tolerance must lie in [0, 1), got {}",
            s.tol
        )));
    }
    let cfg = ScanConfig::new(s.t_lo, s.t_hi)
        .with_grid(s.grid)
        .with_tolerance(Tolerance::new(s.tol));
    Ok(if s.strict { cfg.strict() } else { cfg })
}

fn growth(cmd: &GrowthCmd, out: &mut Outcome) -> Result<()> {
    match cmd {
        GrowthCmd::Eval(a) => {
            let model = io::model(&a.model)?;
            echo_model(out, "model", &model);
            let mut cols = vec![
                "t",
                "psi_level",
                "psi_mantissa",
                "max_level",
                "max_mantissa",
            ];
            if a.eps.is_some() {
                cols.extend(["mu_level", "mu_mantissa"]);
            }
            let mut table = Table::new("values", &cols);
            for &t in &a.t {
                let r = Magnitude::from_ln(t)?;
                let mut row = vec![json!(t)];
                row.extend(mag(&model.eval_psi_at(t)?));
                row.extend(mag(&model.apply_m(&r)?));
                if let Some(eps) = a.eps {
                    row.extend(mag(&model.apply_mu(a.m, eps, &r)?));
                }
                table.push(row);
            }
            out.tables.push(table);
        }
        GrowthCmd::Order(a) => {
            let model = io::model(&a.model)?;
            echo_model(out, "model", &model);
            let mut est = estimate_order(&model, a.t_lo, a.t_hi, a.grid)?;
            if let (Some(p), Some(q)) = (a.p, a.q) {
                est = est.with_bounds(p, q);
            }
            let verdict = est.bounds_consistent().map(|ok| {
                if ok {
                    Verdict::HoldsOnWindow
                } else {
                    Verdict::Fails
                }
            });
            let mut table = Table::new("ratio", &["t", "ln_psi_over_t"]);
            for s in &est.samples {
                table.push(vec![json!(s.t), json!(s.ratio)]);
            }
            out.caveat(est.caveat.clone());
            out.verdict("order", verdict, &est);
            out.tables.push(table);
        }
        GrowthCmd::FindR(a) => {
            let model = io::model(&a.model)?;
            echo_model(out, "model", &model);
            let step = match a.eps {
                Some(eps) => Step::Mu { m: a.m, eps },
                None => Step::Max,
            };
            let grid = geometric_grid(a.t_lo, a.t_hi, a.grid)?
                .into_iter()
                .map(Magnitude::from_ln)
                .collect::<Result<Vec<_>>>()?;
            let r = find_r(step, &model, &grid)?;
            let xs = iterate(step, &model, r, a.iterates)?;
            let mut table = Table::new("iterates", &["n", "level", "mantissa"]);
            for (n, x) in xs.iter().enumerate() {
                let mut row = vec![json!(n)];
                row.extend(mag(x));
                table.push(row);
            }
            out.verdict(
                "threshold",
                None,
                json!({ "step": step, "r": r, "search_t": [a.t_lo, a.t_hi], "grid": a.grid }),
            );
            out.caveat("R is the least radius on the search grid, not the least real R");
            out.tables.push(table);
        }
    }
    Ok(())
}

fn regularity(cmd: &RegularityCmd, out: &mut Outcome) -> Result<()> {
    let (name, rep): (&str, RegularityReport) = match cmd {
        RegularityCmd::Strong {
            model,
            eps,
            k,
            scan,
        } => {
            let model = io::model(model)?;
            echo_model(out, "model", &model);
            let rep = check_strong_log_regular(&model, *eps, *k, &scan_config(scan)?)?;
            ("strong_log_regular", rep)
        }
        RegularityCmd::Log { model, k, d, scan } => {
            let model = io::model(model)?;
            echo_model(out, "model", &model);
            (
                "log_regular",
                check_log_regular(&model, *k, *d, &scan_config(scan)?)?,
            )
        }
        RegularityCmd::General {
            model,
            m,
            eps,
            k,
            scan,
        } => {
            let model = io::model(model)?;
            echo_model(out, "model", &model);
            let rep = check_generalized(&model, *m, *eps, *k, &scan_config(scan)?)?;
            ("generalized", rep)
        }
        RegularityCmd::Doubling {
            model,
            a,
            b,
            c,
            scan,
        } => {
            let model = io::model(model)?;
            echo_model(out, "model", &model);
            let p = DoublingParams::new(*a, *b, *c)?;
            ("doubling", check_doubling(&model, p, &scan_config(scan)?)?)
        }
        RegularityCmd::Compose {
            outer,
            inner,
            eps_prime,
            outer_k,
            outer_t_lo,
            outer_t_hi,
            scan,
        } => {
            let (outer, inner) = (io::model(outer)?, io::model(inner)?);
            echo_model(out, "outer", &outer);
            echo_model(out, "inner", &inner);
            let setup = TransferSetup {
                outer_k: *outer_k,
                outer_scan: ScanConfig::new(*outer_t_lo, *outer_t_hi),
            };
            let rep = verify_composition_transfer(
                &outer,
                &inner,
                *eps_prime,
                &scan_config(scan)?,
                &setup,
            )?;
            ("composition_transfer", rep)
        }
        RegularityCmd::Chain {
            model,
            eps,
            k,
            r0,
            n_max,
        } => {
            let model = io::model(model)?;
            echo_model(out, "model", &model);
            let r0: Magnitude = r0.parse()?;
            (
                "iterated_chain",
                verify_iterated_chain(&model, *eps, *k, r0, *n_max)?,
            )
        }
    };
    out.report(name, &rep);
    out.caveat(WINDOW_CAVEAT);
    out.tables.push(scan_table("rows", &rep.rows));
    Ok(())
}

fn phi(a: &PhiArgs) -> Result<PhiConstruction> {
    build_phi(a.eps_tilde, a.k_tilde, a.t0, a.n_max)
}

/// `ln a_n` appears as a level/mantissa pair and, last, as a plain real so
/// that reloading the table reproduces the profile exactly.
fn breakpoint_table(phi: &PhiConstruction) -> Result<Table> {
    let mut table = Table::new(
        "breakpoints",
        &[
            "n",
            "t_n",
            "ln_a_n_level",
            "ln_a_n_mantissa",
            "designated",
            "ln_a_n",
        ],
    );
    for n in 0..=phi.n_max() {
        let mut row = vec![json!(n), json!(phi.t()[n])];
        row.extend(mag(&Magnitude::from_real(phi.ln_a()[n])?));
        row.extend([json!(phi.is_designated(n)), json!(phi.ln_a()[n])]);
        table.push(row);
    }
    Ok(table)
}

/// `ln a_n / t_n` is 1 at every reset `N_m` and below `2^-m` just before it.
fn ratio_witnesses(phi: &PhiConstruction) -> (Verdict, Vec<Value>) {
    let mut ok = true;
    let rows = phi
        .schedule()
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let bound = 0.5f64.powi(i as i32 + 1);
            let (at, before) = (phi.ratio(n), phi.ratio(n - 1));
            ok &= at == 1.0 && before < bound;
            json!({ "m": i + 1, "n": n, "ratio": at, "ratio_before": before, "bound": bound })
        })
        .collect();
    (
        if ok {
            Verdict::HoldsOnWindow
        } else {
            Verdict::Fails
        },
        rows,
    )
}

fn construct(cmd: &ConstructCmd, out: &mut Outcome) -> Result<()> {
    match cmd {
        ConstructCmd::Example1(a) => {
            let phi = phi(a)?;
            out.verdict("profile", None, &phi);
            out.report("convexity", &verify_convexity(&phi)?);
            out.report("schedule", &verify_schedule(&phi)?);
            out.report(
                "growth_inequality",
                &verify_growth_inequality(&phi, phi.eps_tilde(), phi.k_tilde())?,
            );
            let (v, rows) = ratio_witnesses(&phi);
            out.verdict("ratio_witnesses", Some(v), rows);
            out.caveat(
                "the profile is certified on its breakpoints and spot points up to t_n_max only",
            );
            out.tables.push(breakpoint_table(&phi)?);
        }
        ConstructCmd::Example2 { eps, m, n_max } => {
            let params = separation_bounds(*eps)?;
            let sep = verify_separation(&params, *m, *n_max)?;
            let mut table = Table::new(
                "separation",
                &["n", "exponent_lhs", "exponent_rhs", "verdict"],
            );
            for r in &sep.rows {
                let v = if r.separated {
                    Verdict::HoldsOnWindow
                } else {
                    Verdict::Fails
                };
                table.push(vec![
                    json!(r.n),
                    json!(r.exponent_lhs),
                    json!(r.exponent_rhs),
                    json!(verdict_name(v)),
                ]);
            }
            out.verdict("separation", Some(sep.report.verdict), &sep);
            out.caveat("rows with n at or below the onset are expected to fail and are not part of the verdict");
            out.tables.push(table);
        }
        ConstructCmd::ExtendEps { phi: a, eps } => {
            let phi = phi(a)?;
            let ext = extend_epsilon(&phi, *eps)?;
            out.verdict("epsilon_extension", Some(ext.report.verdict), &ext);
            out.caveat(WINDOW_CAVEAT);
            out.tables.push(scan_table("rows", &ext.report.rows));
        }
    }
    Ok(())
}

fn orbit(a: &ClassifyArgs) -> Result<OrbitRecord> {
    if let Some(spec) = a.orbit.strip_prefix("real:") {
        let (lambda, x0) = spec
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("expected real:LAMBDA,X0, got {:?}", a.orbit)))?;
        let lambda: f64 = lambda
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad lambda {lambda:?}")))?;
        let depth = a
            .depth
            .ok_or_else(|| Error::Domain("real orbits need --depth".into()))?;
        return real_axis_orbit(lambda, x0.parse()?, depth);
    }
    if let Some(file) = a.orbit.strip_prefix("synthetic:") {
        let mut xs = io::load_orbit(Path::new(file))?;
        if let Some(d) = a.depth {
            xs.truncate(d + 1);
        }
        return OrbitRecord::synthetic(xs, file);
    }
    Err(Error::Parse(format!(
        "--orbit must be real:LAMBDA,X0 or synthetic:FILE, got {:?}",
        a.orbit
    )))
}

fn classify(a: &ClassifyArgs, out: &mut Outcome) -> Result<()> {
    let model = io::model(&a.model)?;
    echo_model(out, "model", &model);
    let orbit = orbit(a)?;
    let mut params = ClassificationParams::new(a.r.parse()?, a.max_lag, a.eps.clone());
    params.m = a.m;
    let v = classify_orbit(&orbit, &model, &params)?;
    out.caveat(v.caveat.clone());

    let depth = orbit.depth();
    let max_thr = threshold_sequence(&model, Step::Max, params.r, depth)?;
    let eps = a.eps.iter().copied().fold(f64::INFINITY, f64::min);
    let mu_step = Step::Mu { m: a.m, eps };
    let mu_thr = match threshold_sequence(&model, mu_step, params.r, depth) {
        Ok(thr) => Some(thr),
        Err(e) => {
            out.caveat(format!("{mu_step} threshold column left empty: {e}"));
            None
        }
    };
    let mut table = Table::new(
        "orbit",
        &[
            "n",
            "orbit_level",
            "orbit_mantissa",
            "max_threshold_level",
            "max_threshold_mantissa",
            "mu_threshold_level",
            "mu_threshold_mantissa",
        ],
    );
    for (n, x) in orbit.magnitudes().iter().enumerate() {
        let mut row = vec![json!(n)];
        row.extend(mag(x));
        row.extend(mag(&max_thr[n]));
        match &mu_thr {
            Some(thr) => row.extend(mag(&thr[n])),
            None => row.extend([Value::Null, Value::Null]),
        }
        table.push(row);
    }
    out.verdict(
        "speed",
        None,
        json!({ "orbit": orbit.source(), "mu_column": mu_step, "verdict": v }),
    );
    out.tables.push(table);
    Ok(())
}

fn selftest(a: &SelftestArgs, seed: u64, out: &mut Outcome) {
    let mut reference = Reference::default();
    let mut table = Table::new("criteria", &["id", "name", "passed", "details"]);
    for c in run_all(&mut reference, seed, a.samples) {
        eprintln!("{}", c.line());
        let v = if c.passed {
            Verdict::HoldsOnWindow
        } else {
            Verdict::Fails
        };
        table.push(vec![
            json!(c.id),
            json!(c.name),
            json!(c.passed),
            json!(c.details),
        ]);
        out.verdict(&format!("criterion_{}", c.id), Some(v), &c);
    }
    out.tables.push(table);
}
