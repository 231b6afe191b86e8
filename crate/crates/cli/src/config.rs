//! Argument parsing with an optional TOML file of flag values.
//!
//! The file is a flat table keyed by long flag names (`t_lo` or `t-lo`).
//! Its values become defaults of the selected subcommand, so anything given
//! on the command line wins.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Command, CommandFactory, FromArgMatches, Parser};

use crate::args::Cli;

pub enum ParseFailure {
    Clap(clap::Error),
    Config(String),
}

impl From<clap::Error> for ParseFailure {
    fn from(e: clap::Error) -> Self {
        ParseFailure::Clap(e)
    }
}

fn config_path(argv: &[OsString]) -> Option<PathBuf> {
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

/// Names of the subcommands selected on the command line, outermost first.
fn subcommand_path(argv: &[OsString]) -> Vec<String> {
    let matches = Cli::command()
        .ignore_errors(true)
        .try_get_matches_from(argv);
    let mut path = Vec::new();
    let Ok(mut m) = matches else { return path };
    while let Some((name, sub)) = m.subcommand() {
        path.push(name.to_string());
        m = sub.clone();
    }
    path
}

fn values(key: &str, v: &toml::Value) -> Result<Vec<String>, String> {
    Ok(match v {
        toml::Value::String(s) => vec![s.clone()],
        toml::Value::Integer(i) => vec![i.to_string()],
        toml::Value::Float(f) => vec![f.to_string()],
        toml::Value::Boolean(b) => vec![b.to_string()],
        toml::Value::Array(items) => items
            .iter()
            .map(|x| match values(key, x)?.as_slice() {
                [one] => Ok(one.clone()),
                _ => Err(format!(
                    "config key {key:?}: nested arrays are not supported"
                )),
            })
            .collect::<Result<_, _>>()?,
        _ => return Err(format!("config key {key:?}: unsupported value {v}")),
    })
}

fn has_long(cmd: &Command, long: &str) -> bool {
    cmd.get_arguments().any(|a| a.get_long() == Some(long))
}

fn with_defaults(cmd: Command, defaults: &[(String, Vec<String>)]) -> Command {
    let mut cmd = cmd;
    for (long, vals) in defaults {
        let id = cmd
            .get_arguments()
            .find(|a| a.get_long() == Some(long.as_str()))
            .map(|a| a.get_id().clone())
            .expect("checked by the caller");
        let vals = vals.clone();
        cmd = cmd.mut_arg(id, move |a| a.required(false).default_values(vals));
    }
    cmd
}

fn descend(cmd: Command, path: &[String], defaults: &[(String, Vec<String>)]) -> Command {
    match path.split_first() {
        None => with_defaults(cmd, defaults),
        Some((head, rest)) => cmd.mut_subcommand(head, |sub| descend(sub, rest, defaults)),
    }
}

pub fn parse(argv: Vec<OsString>) -> Result<Cli, ParseFailure> {
    let Some(path) = config_path(&argv) else {
        return Ok(Cli::try_parse_from(argv)?);
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| ParseFailure::Config(format!("cannot read config {}: {e}", path.display())))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e| ParseFailure::Config(format!("config {}: {e}", path.display())))?;

    let subs = subcommand_path(&argv);
    let root = Cli::command();
    let mut leaf = &root;
    for name in &subs {
        leaf = leaf
            .find_subcommand(name)
            .expect("parsed from the same definition");
    }

    let (mut at_root, mut at_leaf) = (Vec::new(), Vec::new());
    for (key, v) in &table {
        let long = key.replace('_', "-");
        if long == "config" {
            return Err(ParseFailure::Config(
                "config files cannot name another config".into(),
            ));
        }
        let vals = values(key, v).map_err(ParseFailure::Config)?;
        if has_long(leaf, &long) && !subs.is_empty() {
            at_leaf.push((long, vals));
        } else if has_long(&root, &long) {
            at_root.push((long, vals));
        } else {
            return Err(ParseFailure::Config(format!(
                "config key {key:?} is not a flag of `{}`",
                subs.join(" ")
            )));
        }
    }

    let cmd = descend(with_defaults(root, &at_root), &subs, &at_leaf);
    let matches = cmd.try_get_matches_from(argv)?;
    Ok(Cli::from_arg_matches(&matches)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::args::{Command as Cmd, RegularityCmd};

    fn argv(s: &[&str]) -> Vec<OsString> {
        std::iter::once("fastescape")
            .chain(s.iter().copied())
            .map(OsString::from)
            .collect()
    }

    #[test]
    fn finds_the_subcommand_path_despite_missing_flags() {
        assert_eq!(
            subcommand_path(&argv(&["regularity", "strong"])),
            ["regularity", "strong"]
        );
        assert_eq!(
            subcommand_path(&argv(&["--seed", "3", "selftest"])),
            ["selftest"]
        );
    }

    #[test]
    fn config_fills_gaps_and_flags_win() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.toml");
        std::fs::write(
            &p,
            "model = \"exp(rho=1)\"\neps = 0.5\nk = 3\nt_lo = 2.3\nt-hi = 50\nseed = 9\n",
        )
        .unwrap();
        let cli = match parse(argv(&[
            "regularity",
            "strong",
            "--config",
            p.to_str().unwrap(),
            "--k",
            "4",
        ])) {
            Ok(c) => c,
            Err(_) => panic!("parse failed"),
        };
        assert_eq!(cli.global.seed, 9);
        let Cmd::Regularity(RegularityCmd::Strong {
            model,
            eps,
            k,
            scan,
        }) = cli.command
        else {
            panic!("wrong command")
        };
        assert_eq!((model.as_str(), eps, k), ("exp(rho=1)", 0.5, 4.0));
        assert_eq!((scan.t_lo, scan.t_hi), (2.3, 50.0));
    }

    #[test]
    fn unknown_config_key_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.toml");
        std::fs::write(&p, "bogus = 1\n").unwrap();
        let r = parse(argv(&["selftest", "--config", p.to_str().unwrap()]));
        assert!(matches!(r, Err(ParseFailure::Config(_))));
    }
}
