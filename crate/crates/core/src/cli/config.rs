//! Flat `key = value` job files. Blank lines and lines starting with `#`
//! are ignored; keys are the long flag names.

use std::path::Path;

use crate::error::{Error, Result};

pub const KNOWN_KEYS: &[&str] = &[
    "group",
    "kernel",
    "inclusion",
    "n",
    "N",
    "lambda",
    "t",
    "radius",
    "max-radius",
    "tolerance",
    "depth",
    "probe-radius",
    "horizons",
    "format",
    "output",
];

/// Parses the file body into `(key, value)` pairs in file order.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut entries: Vec<(String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("config line {}: expected key = value", i + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        if !KNOWN_KEYS.contains(&key) {
            return Err(Error::Parse(format!("config line {}: unknown key {key:?}", i + 1)));
        }
        if entries.iter().any(|(k, _)| k == key) {
            return Err(Error::Parse(format!("config line {}: duplicate key {key:?}", i + 1)));
        }
        entries.push((key.to_string(), value.to_string()));
    }
    Ok(entries)
}

pub fn read_config(path: &Path) -> Result<Vec<(String, String)>> {
    parse_config(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_rejects() {
        let e = parse_config("# job\ngroup = free(2)\n\nN=10\n").unwrap();
        assert_eq!(e, vec![("group".into(), "free(2)".into()), ("N".into(), "10".into())]);
        assert!(parse_config("colour = red").is_err());
        assert!(parse_config("group free(2)").is_err());
        assert!(parse_config("n = 1\nn = 2").is_err());
    }
}
