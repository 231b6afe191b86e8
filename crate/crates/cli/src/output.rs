use std::io::Write;
use std::path::Path;

use fastescape_core::report::ScanRow;
use fastescape_core::{Magnitude, RegularityReport, Verdict};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::Cli;

pub const SCHEMA: u32 = 1;

#[derive(Serialize, Debug)]
pub struct Entry {
    pub name: String,
    /// `None` for purely informational results.
    pub verdict: Option<Verdict>,
    pub detail: Value,
}

#[derive(Serialize, Debug)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, w: impl Write) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.columns)?;
        for row in &self.rows {
            out.write_record(row.iter().map(cell))?;
        }
        out.flush()?;
        Ok(())
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// A magnitude as its `level, mantissa` column pair.
pub fn mag(m: &Magnitude) -> [Value; 2] {
    [json!(m.level()), json!(m.mantissa())]
}

pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::HoldsOnWindow => "holds_on_window",
        Verdict::Fails => "fails",
        Verdict::Inconclusive => "inconclusive",
    }
}

#[derive(Default, Debug)]
pub struct Outcome {
    pub verdicts: Vec<Entry>,
    /// The first table is the one written by `--csv`.
    pub tables: Vec<Table>,
    pub caveats: Vec<String>,
}

impl Outcome {
    pub fn verdict(&mut self, name: &str, verdict: Option<Verdict>, detail: impl Serialize) {
        self.verdicts.push(Entry {
            name: name.into(),
            verdict,
            detail: serde_json::to_value(detail).expect("report types serialize"),
        });
    }

    pub fn report(&mut self, name: &str, rep: &RegularityReport) {
        self.verdict(name, Some(rep.verdict), rep);
    }

    pub fn caveat(&mut self, c: impl Into<String>) {
        let c = c.into();
        if !self.caveats.contains(&c) {
            self.caveats.push(c);
        }
    }

    /// Conjunction of every decided verdict; `None` if nothing was decided.
    pub fn overall(&self) -> Option<Verdict> {
        self.verdicts
            .iter()
            .filter_map(|e| e.verdict)
            .reduce(Verdict::and)
    }
}

pub fn scan_table(name: &str, rows: &[ScanRow]) -> Table {
    let mut t = Table::new(
        name,
        &[
            "index",
            "t",
            "lhs_level",
            "lhs_mantissa",
            "rhs_level",
            "rhs_mantissa",
            "verdict",
            "tie",
            "absorbed",
        ],
    );
    for r in rows {
        let mut row = vec![json!(r.index), json!(r.t)];
        row.extend(mag(&r.lhs));
        row.extend(mag(&r.rhs));
        row.extend([
            json!(verdict_name(r.verdict)),
            json!(r.tie),
            json!(r.absorbed),
        ]);
        t.push(row);
    }
    t
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema: u32,
    version: &'static str,
    timestamp: String,
    config: &'a Cli,
    verdicts: &'a [Entry],
    tables: &'a [Table],
    caveats: &'a [String],
}

pub fn render_json(cli: &Cli, out: &Outcome) -> String {
    let env = Envelope {
        schema: SCHEMA,
        version: env!("CARGO_PKG_VERSION"),
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        config: cli,
        verdicts: &out.verdicts,
        tables: &out.tables,
        caveats: &out.caveats,
    };
    serde_json::to_string_pretty(&env).expect("report serializes")
}

pub fn write(cli: &Cli, out: &Outcome) -> std::io::Result<()> {
    let text = render_json(cli, out);
    match &cli.global.json {
        Some(p) => std::fs::write(p, text + "\n")?,
        None => println!("{text}"),
    }
    if let Some(p) = &cli.global.csv {
        write_csv(p, out)?;
    }
    Ok(())
}

fn write_csv(path: &Path, out: &Outcome) -> std::io::Result<()> {
    let Some(table) = out.tables.first() else {
        return Err(std::io::Error::other(
            "this command produces no table for --csv",
        ));
    };
    let f = std::fs::File::create(path)?;
    table.write_csv(f).map_err(std::io::Error::other)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overall_is_the_conjunction() {
        let mut o = Outcome::default();
        assert_eq!(o.overall(), None);
        o.verdict("a", None, 1);
        assert_eq!(o.overall(), None);
        o.verdict("b", Some(Verdict::HoldsOnWindow), 1);
        o.verdict("c", Some(Verdict::Inconclusive), 1);
        assert_eq!(o.overall(), Some(Verdict::Inconclusive));
        o.verdict("d", Some(Verdict::Fails), 1);
        assert_eq!(o.overall(), Some(Verdict::Fails));
    }

    #[test]
    fn csv_pairs_magnitudes() {
        let mut t = Table::new("x", &["n", "level", "mantissa", "note"]);
        let mut row = vec![json!(1)];
        row.extend(mag(&Magnitude::from_real(1e10).unwrap()));
        row.push(Value::Null);
        t.push(row);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("n,level,mantissa,note\n1,3,1.1"), "{s}");
        assert!(s.ends_with(",\n"));
    }
}
