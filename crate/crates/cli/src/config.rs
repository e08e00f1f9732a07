//! `--config` files: flat `key = value` lines, `#` comments. A key names a
//! long flag of the chosen subcommand (dashes or underscores). Values fill
//! in flags absent from the command line; setting a flag in both places is
//! an error rather than a silent override.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::Path;

use clap::parser::ValueSource;
use clap::{ArgAction, ArgMatches, Command};

pub fn parse(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut entries = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key=value, got `{line}`", i + 1))?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        let value = value.trim().trim_matches('"').to_string();
        if key.is_empty() {
            return Err(format!("line {}: empty key", i + 1));
        }
        if entries.insert(key.clone(), value).is_some() {
            return Err(format!("line {}: duplicate key `{key}`", i + 1));
        }
    }
    Ok(entries)
}

/// Returns `argv` extended with the config entries as flags, after checking
/// every key against the subcommand and the already-parsed matches.
pub fn merge(
    argv: &[OsString],
    root: &Command,
    matches: &ArgMatches,
    path: &Path,
) -> Result<Vec<OsString>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let entries = parse(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let (name, sub_matches) = matches.subcommand().ok_or("no subcommand given")?;
    let sub = root.find_subcommand(name).ok_or("unknown subcommand")?;
    let mut extra: Vec<OsString> = Vec::new();
    for (key, value) in entries {
        if key == "config" {
            return Err("config files cannot include other config files".into());
        }
        let (arg, source) = if let Some(arg) = sub.get_arguments().find(|a| a.get_long() == Some(key.as_str())) {
            (arg, sub_matches.value_source(arg.get_id().as_str()))
        } else if let Some(arg) = root.get_arguments().find(|a| a.get_long() == Some(key.as_str())) {
            (arg, matches.value_source(arg.get_id().as_str()))
        } else {
            return Err(format!("config key `{key}` is not a flag of `{name}`"));
        };
        if source == Some(ValueSource::CommandLine) {
            return Err(format!("--{key} is set both on the command line and in {}", path.display()));
        }
        match arg.get_action() {
            ArgAction::SetTrue => match value.as_str() {
                "true" => extra.push(format!("--{key}").into()),
                "false" => {}
                _ => return Err(format!("config key `{key}` expects true or false")),
            },
            _ => {
                extra.push(format!("--{key}").into());
                extra.push(value.into());
            }
        }
    }
    let mut merged = argv.to_vec();
    merged.extend(extra);
    Ok(merged)
}
