//! Plain `key=value` configuration files. Keys are long flag names without dashes; flags given on
//! the command line win.

use crate::CliError;
use std::path::Path;

pub fn parse(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected key=value", n + 1)))?;
        let k = k.trim();
        if k.is_empty() {
            return Err(CliError::Config(format!("line {}: empty key", n + 1)));
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

pub fn read(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse(&text)
}

/// Appends config entries to `args` for the subcommand's flags that were not given explicitly.
/// `known` lists the subcommand's long flags and whether each takes a value.
pub fn merge(args: &mut Vec<String>, entries: &[(String, String)], known: &[(String, bool)]) -> Result<(), CliError> {
    for (k, v) in entries {
        let Some(&(_, takes_value)) = known.iter().find(|(name, _)| name == k) else {
            continue;
        };
        let flag = format!("--{k}");
        let given = args.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if given {
            continue;
        }
        if takes_value {
            args.push(flag);
            args.push(v.clone());
        } else {
            match v.as_str() {
                "true" => args.push(flag),
                "false" => {}
                _ => return Err(CliError::Config(format!("{k}: expected true or false"))),
            }
        }
    }
    Ok(())
}
