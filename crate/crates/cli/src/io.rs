//! Loaders for breakpoint tables and synthetic orbits.

use std::path::Path;

use fastescape_core::{Error, GrowthModel, Magnitude, PiecewiseLinear, Result};
use serde::Deserialize;

/// One row of the `construct example1` table.
#[derive(Deserialize)]
struct Breakpoint {
    t_n: f64,
    ln_a_n_level: u32,
    ln_a_n_mantissa: f64,
    /// Exact value, preferred over the pair when present.
    ln_a_n: Option<f64>,
}

#[derive(Deserialize)]
struct OrbitPoint {
    level: u32,
    mantissa: f64,
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut rdr = csv::Reader::from_path(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    rdr.deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn load_pwl(path: &Path) -> Result<PiecewiseLinear> {
    let rows: Vec<Breakpoint> = read_rows(path)?;
    let mut t = Vec::with_capacity(rows.len());
    let mut ln_a = Vec::with_capacity(rows.len());
    for r in rows {
        t.push(r.t_n);
        ln_a.push(match r.ln_a_n {
            Some(v) => v,
            None => Magnitude::from_parts(r.ln_a_n_level, r.ln_a_n_mantissa)?.to_f64(),
        });
    }
    PiecewiseLinear::new(t, ln_a)
}

pub fn load_orbit(path: &Path) -> Result<Vec<Magnitude>> {
    read_rows::<OrbitPoint>(path)?
        .into_iter()
        .map(|p| Magnitude::from_parts(p.level, p.mantissa))
        .collect()
}

/// Parses the model syntax, reading `pwl(file=...)` tables from disk.
pub fn model(src: &str) -> Result<GrowthModel> {
    fastescape_core::growth::parse_model(src, &|f| load_pwl(Path::new(f)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, body: &str) -> std::path::PathBuf {
        let p = dir.join("phi.csv");
        std::fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn reads_breakpoints_by_header() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            dir.path(),
            "n,t_n,ln_a_n_level,ln_a_n_mantissa,designated\n0,4,1,1.3862943611198906,false\n1,20,2,1.0971887003649488,true\n",
        );
        let m = model(&format!("pwl(file={})", p.display())).unwrap();
        assert_eq!(m.t_min(), 4.0);
        // Two exponentials of a rounded mantissa: about 1e-13 relative.
        let v = m.ln_psi(20.0).unwrap();
        assert!((v - 20.0).abs() < 1e-11, "{v}");
    }

    #[test]
    fn exact_column_wins() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            dir.path(),
            "n,t_n,ln_a_n_level,ln_a_n_mantissa,designated,ln_a_n\n0,4,0,0.0,false,0.0\n1,20,2,1.0971887003649488,true,20.0\n",
        );
        assert_eq!(load_pwl(&p).unwrap().ln_values(), &[0.0, 20.0]);
    }

    #[test]
    fn missing_file_is_a_parse_error() {
        assert!(matches!(
            model("pwl(file=/nonexistent.csv)"),
            Err(Error::Parse(_))
        ));
    }
}
