//! Text syntax for growth models.
//!
//! ```text
//! exp(rho=1)  power(a=2, t_min=1)  compose(exp(rho=1), power(a=2))
//! pwl(file=phi.csv)  perturbed(power(a=2), delta=1/t)
//! ```

use super::{compose, GrowthModel, PiecewiseLinear};
use crate::error::{Error, Result};

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// Splits on commas that are not nested inside parentheses.
fn split_top(body: &str) -> Result<Vec<&str>> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in body.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(perr(format!("unbalanced ')' in {body:?}")));
                }
            }
            ',' if depth == 0 => {
                parts.push(body[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(perr(format!("unbalanced '(' in {body:?}")));
    }
    let last = body[start..].trim();
    if !last.is_empty() || !parts.is_empty() {
        parts.push(last);
    }
    Ok(parts)
}

enum Arg<'a> {
    Model(&'a str),
    Key(&'a str, &'a str),
}

fn classify(arg: &str) -> Arg<'_> {
    let eq = arg.find('=');
    let paren = arg.find('(');
    match (eq, paren) {
        (Some(e), Some(p)) if e < p => Arg::Key(arg[..e].trim(), arg[e + 1..].trim()),
        (Some(e), None) => Arg::Key(arg[..e].trim(), arg[e + 1..].trim()),
        _ => Arg::Model(arg),
    }
}

fn number(key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .map_err(|_| perr(format!("{key} expects a number, got {v:?}")))
}

pub fn parse_model(
    src: &str,
    load_pwl: &dyn Fn(&str) -> Result<PiecewiseLinear>,
) -> Result<GrowthModel> {
    let s = src.trim();
    let open = s
        .find('(')
        .ok_or_else(|| perr(format!("expected name(args), got {s:?}")))?;
    let body = s[open + 1..]
        .strip_suffix(')')
        .ok_or_else(|| perr(format!("missing closing ')' in {s:?}")))?;
    let name = s[..open].trim();

    let mut models = Vec::new();
    let mut keys = Vec::new();
    for arg in split_top(body)? {
        match classify(arg) {
            Arg::Model(m) => models.push(parse_model(m, load_pwl)?),
            Arg::Key(k, v) => keys.push((k, v)),
        }
    }
    let mut t_min = None;
    let mut take = |allowed: &[&str]| -> Result<Vec<Option<&str>>> {
        let mut out = vec![None; allowed.len()];
        for &(k, v) in &keys {
            if k == "t_min" {
                t_min = Some(number(k, v)?);
            } else if let Some(i) = allowed.iter().position(|a| *a == k) {
                out[i] = Some(v);
            } else {
                return Err(perr(format!("{name}() has no parameter {k:?}")));
            }
        }
        Ok(out)
    };
    let want_models = |n: usize| -> Result<()> {
        if models.len() != n {
            return Err(perr(format!(
                "{name}() takes {n} model argument(s), got {}",
                models.len()
            )));
        }
        Ok(())
    };

    let model = match name {
        "exp" => {
            let v = take(&["rho"])?;
            want_models(0)?;
            let rho = v[0].map(|x| number("rho", x)).transpose()?.unwrap_or(1.0);
            GrowthModel::exp_order(rho)?
        }
        "power" => {
            let v = take(&["a"])?;
            want_models(0)?;
            let a = v[0].ok_or_else(|| perr("power() needs a="))?;
            GrowthModel::power(number("a", a)?)?
        }
        "compose" => {
            take(&[])?;
            want_models(2)?;
            let inner = models.pop().unwrap();
            let outer = models.pop().unwrap();
            compose(outer, inner)?
        }
        "pwl" => {
            let v = take(&["file"])?;
            want_models(0)?;
            let file = v[0].ok_or_else(|| perr("pwl() needs file="))?;
            GrowthModel::piecewise(load_pwl(file)?)
        }
        "perturbed" => {
            let v = take(&["delta"])?;
            want_models(1)?;
            let d = v[0].ok_or_else(|| perr("perturbed() needs delta="))?;
            let amp = d.strip_suffix("/t").map(str::trim).unwrap_or(d);
            GrowthModel::perturbed(models.pop().unwrap(), number("delta", amp)?)?
        }
        other => return Err(perr(format!("unknown model {other:?}"))),
    };
    match t_min {
        Some(t) => model.with_t_min(t),
        None => Ok(model),
    }
}

impl std::str::FromStr for GrowthModel {
    type Err = Error;

    /// Parses the model syntax; `pwl(...)` needs a loader and is rejected here.
    fn from_str(s: &str) -> Result<Self> {
        parse_model(s, &|f| {
            Err(perr(format!(
                "cannot load breakpoints from {f:?} without a loader"
            )))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_builtins() {
        assert_eq!(
            "exp(rho=2)".parse::<GrowthModel>().unwrap(),
            GrowthModel::exp_order(2.0).unwrap()
        );
        assert_eq!(
            " power( a = 2 ) ".parse::<GrowthModel>().unwrap(),
            GrowthModel::power(2.0).unwrap()
        );
        let m: GrowthModel = "compose(exp(rho=1), power(a=2))".parse().unwrap();
        assert!(matches!(m, GrowthModel::Composite { .. }));
        let p: GrowthModel = "perturbed(power(a=2), delta=1/t)".parse().unwrap();
        assert_eq!(
            p,
            GrowthModel::perturbed(GrowthModel::power(2.0).unwrap(), 1.0).unwrap()
        );
        let t: GrowthModel = "power(a=2, t_min=3)".parse().unwrap();
        assert_eq!(t.t_min(), 3.0);
    }

    #[test]
    fn pwl_uses_the_loader() {
        let m = parse_model("pwl(file=x.csv)", &|f| {
            assert_eq!(f, "x.csv");
            PiecewiseLinear::new(vec![1.0, 2.0], vec![0.0, 1.0])
        })
        .unwrap();
        assert_eq!(m.t_min(), 1.0);
        assert!("pwl(file=x.csv)".parse::<GrowthModel>().is_err());
    }

    #[test]
    fn rejects_malformed() {
        for bad in [
            "exp",
            "exp(rho=1",
            "power()",
            "power(b=2)",
            "compose(exp(rho=1))",
            "cosh(x=1)",
            "power(a=two)",
            "exp(rho=1))",
        ] {
            assert!(bad.parse::<GrowthModel>().is_err(), "{bad}");
        }
    }
}
