//! Flat `key = value` configuration files.
//!
//! Each key is a long command-line flag without the leading dashes; blank
//! lines and `#` comments are ignored. Flags given on the command line take
//! precedence over the file.

use std::path::Path;

use crate::HarnessError;

pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, HarnessError> {
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| HarnessError::Config(format!("line {}: expected `key = value`", k + 1)))?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() {
            return Err(HarnessError::Config(format!("line {}: empty key", k + 1)));
        }
        out.push((key, value.trim().to_string()));
    }
    Ok(out)
}

/// Command-line arguments equivalent to a config file. Boolean `true`
/// becomes a bare flag and `false` drops it.
pub fn config_args(path: impl AsRef<Path>) -> Result<Vec<String>, HarnessError> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| HarnessError::Config(format!("{}: {e}", path.as_ref().display())))?;
    let mut args = Vec::new();
    for (key, value) in parse_config(&text)? {
        match value.as_str() {
            "true" => args.push(format!("--{key}")),
            "false" => {}
            _ => args.push(format!("--{key}={value}")),
        }
    }
    Ok(args)
}
