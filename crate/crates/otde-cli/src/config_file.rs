//! Flat `key=value` config files mapped onto long flags.
//!
//! Keys match long flag names (`n-evals=100` becomes `--n-evals 100`).
//! Config-derived flags are inserted before the first explicit flag, and
//! keys already given on the command line are skipped, so flags win.

use std::ffi::OsString;
use std::path::Path;

/// Reads a config file into `(key, value)` pairs. `#` lines and blank
/// lines are ignored.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!("config line {}: expected key=value", lineno + 1));
        };
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

fn config_path(args: &[OsString]) -> Option<OsString> {
    for (i, arg) in args.iter().enumerate() {
        let Some(text) = arg.to_str() else { continue };
        if text == "--config" {
            return args.get(i + 1).cloned();
        }
        if let Some(rest) = text.strip_prefix("--config=") {
            return Some(OsString::from(rest));
        }
    }
    None
}

fn flag_given(args: &[OsString], key: &str) -> bool {
    let long = format!("--{key}");
    let with_eq = format!("--{key}=");
    args.iter().any(|arg| {
        arg.to_str()
            .map(|t| t == long || t.starts_with(&with_eq))
            .unwrap_or(false)
    })
}

/// Expands `--config <file>` into long flags. On a read or parse failure
/// the args come back unchanged together with the error message.
pub fn expand(args: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(Path::new(&path))
        .map_err(|e| format!("cannot read config {}: {e}", path.to_string_lossy()))?;
    let pairs = parse_config(&text)?;

    let insert_at = args
        .iter()
        .position(|a| a.to_str().map(|t| t.starts_with('-')).unwrap_or(false))
        .unwrap_or(args.len());

    let mut injected: Vec<OsString> = Vec::new();
    for (key, value) in pairs {
        if flag_given(&args, &key) {
            continue;
        }
        injected.push(OsString::from(format!("--{key}")));
        injected.push(OsString::from(value));
    }

    let mut expanded = args;
    expanded.splice(insert_at..insert_at, injected);
    Ok(expanded)
}
