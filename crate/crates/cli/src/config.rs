//! `--config FILE` support: each `key=value` line becomes `--key value`,
//! inserted ahead of the command-line flags so that explicit flags win.

use std::fs;

use apfourier_core::{Error, Result};

pub fn merge_config(argv: Vec<String>) -> Result<Vec<String>> {
    let mut rest = Vec::with_capacity(argv.len());
    let mut path = None;
    let mut iter = argv.into_iter();
    while let Some(arg) = iter.next() {
        if arg == "--config" {
            path = Some(iter.next().ok_or_else(|| {
                Error::Argument("--config needs a file path".into())
            })?);
        } else if let Some(p) = arg.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(arg);
        }
    }
    let Some(path) = path else { return Ok(rest) };
    let flags = parse_config(&fs::read_to_string(&path)?)?;
    // flags go right after the subcommand name
    let at = rest
        .iter()
        .skip(1)
        .position(|a| !a.starts_with('-'))
        .map(|p| p + 2)
        .unwrap_or(rest.len());
    rest.splice(at..at, flags);
    Ok(rest)
}

fn parse_config(text: &str) -> Result<Vec<String>> {
    let mut flags = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Parse(format!("config line {}: expected key=value", i + 1))
        })?;
        let key = key.trim().trim_start_matches("--");
        let value = value.trim();
        if key.is_empty() {
            return Err(Error::Parse(format!("config line {}: empty key", i + 1)));
        }
        match value {
            "true" => flags.push(format!("--{key}")),
            "false" => {}
            v => {
                flags.push(format!("--{key}"));
                flags.push(v.to_string());
            }
        }
    }
    Ok(flags)
}
