//! `key = value` config files, spliced into the argument list ahead of the
//! command-line flags so that flags given explicitly win.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

/// Parses `key = value` lines; `#` starts a comment. Keys are flag names
/// without the leading dashes (`max-iters`, with `_` accepted for `-`).
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("config line {}: expected `key = value`, got `{line}`", i + 1);
        };
        let key = key.trim().replace('_', "-");
        if key.is_empty() || key == "config" {
            bail!("config line {}: invalid key `{}`", i + 1, key);
        }
        entries.push((key, value.trim().to_string()));
    }
    Ok(entries)
}

/// Turns entries into flags: `true` becomes a bare switch, `false` is
/// dropped, anything else becomes `--key value`.
fn to_flags(entries: &[(String, String)]) -> Vec<OsString> {
    let mut out = Vec::new();
    for (key, value) in entries {
        match value.as_str() {
            "true" => out.push(format!("--{key}").into()),
            "false" => {}
            _ => {
                out.push(format!("--{key}").into());
                out.push(value.into());
            }
        }
    }
    out
}

/// If `--config FILE` (or `--config=FILE`) appears, inserts the file's flags
/// right after the subcommand name.
pub fn expand_config(args: Vec<OsString>, subcommands: &[&str]) -> Result<Vec<OsString>> {
    let mut path = None;
    for (i, a) in args.iter().enumerate() {
        let Some(s) = a.to_str() else { continue };
        if s == "--config" {
            path = args.get(i + 1).cloned();
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(p.into());
        }
    }
    let Some(path) = path else {
        return Ok(args);
    };
    let path = Path::new(&path);
    let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let flags = to_flags(&parse_config(&text)?);
    let Some(at) = args
        .iter()
        .position(|a| a.to_str().is_some_and(|s| subcommands.contains(&s)))
    else {
        return Ok(args);
    };
    let mut out = args[..=at].to_vec();
    out.extend(flags);
    out.extend_from_slice(&args[at + 1..]);
    Ok(out)
}
