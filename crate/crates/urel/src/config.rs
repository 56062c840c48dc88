//! `key = value` config files. Keys are long flag names with `-` or `_`.

use std::path::Path;

use crate::error::{BenchError, Result};

/// Parses a config file into `(key, value)` pairs in file order.
pub fn parse_config(text: &str, path: &Path) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(BenchError::Config {
                path: path.to_path_buf(),
                line: i + 1,
                message: format!("expected 'key = value', got '{line}'"),
            });
        };
        let key = k.trim().replace('_', "-");
        if key.is_empty() {
            return Err(BenchError::Config {
                path: path.to_path_buf(),
                line: i + 1,
                message: "empty key".into(),
            });
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

pub fn load_config(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
    parse_config(&text, path)
}

/// Splices config entries in front of the command-line flags so that later
/// (command-line) occurrences win. `argv[1]` must be the subcommand.
/// A `--config FILE` or `--config=FILE` flag anywhere after it is honored.
pub fn merge_config_args(argv: Vec<String>) -> Result<Vec<String>> {
    let mut config = None;
    let mut rest = Vec::with_capacity(argv.len());
    let mut it = argv.into_iter();
    rest.extend(it.by_ref().take(2));
    while let Some(arg) = it.next() {
        if arg == "--config" {
            config = Some(it.next().ok_or_else(|| BenchError::Invalid("--config needs a path".into()))?);
        } else if let Some(p) = arg.strip_prefix("--config=") {
            config = Some(p.to_string());
        } else {
            rest.push(arg);
        }
    }
    let Some(path) = config else {
        return Ok(rest);
    };
    let mut merged: Vec<String> = rest.drain(..rest.len().min(2)).collect();
    for (k, v) in load_config(Path::new(&path))? {
        merged.push(format!("--{k}"));
        merged.push(v);
    }
    merged.extend(rest);
    Ok(merged)
}
