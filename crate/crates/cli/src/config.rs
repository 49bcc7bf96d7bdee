//! `--config` support: values from a JSON file fill in any flag not given on
//! the command line.
//!
//! The file is an object whose keys are long flag names (`degree_cap` and
//! `degree-cap` both work). An optional nested object named after the
//! subcommand overrides top-level keys for that subcommand.

use std::ffi::OsString;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::parser::ValueSource;
use clap::{ArgAction, ArgMatches, Command};
use serde_json::{Map, Value};

fn scalar(v: &Value) -> Result<String> {
    Ok(match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        Value::Bool(b) => b.to_string(),
        Value::Array(items) => items
            .iter()
            .map(scalar)
            .collect::<Result<Vec<_>>>()?
            .join(","),
        other => bail!("unsupported config value {other}"),
    })
}

fn merged_keys(doc: Value, sub: &str) -> Result<Map<String, Value>> {
    let Value::Object(mut top) = doc else {
        bail!("config file must hold a JSON object");
    };
    let section = top.remove(sub);
    top.retain(|_, v| !v.is_object());
    if let Some(section) = section {
        let Value::Object(section) = section else {
            bail!("config section `{sub}` must be an object");
        };
        top.extend(section);
    }
    Ok(top)
}

fn given_on_command_line(m: &ArgMatches, id: &str) -> bool {
    m.try_get_raw(id).is_ok() && m.value_source(id) == Some(ValueSource::CommandLine)
}

/// Returns `argv` extended with flags taken from the config file, if any.
pub fn apply(cmd: Command, argv: Vec<OsString>) -> Result<Vec<OsString>> {
    // Required flags may come from the config, so this pass tolerates gaps.
    let matches = cmd
        .clone()
        .ignore_errors(true)
        .try_get_matches_from(&argv)
        .unwrap_or_else(|e| e.exit());
    let Some(path) = matches.get_one::<PathBuf>("config") else {
        return Ok(argv);
    };
    let Some((sub_name, sub_matches)) = matches.subcommand() else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let doc: Value = serde_json::from_str(&text)
        .with_context(|| format!("parsing config {}", path.display()))?;
    let sub_cmd = cmd
        .find_subcommand(sub_name)
        .expect("matched subcommand exists")
        .clone();

    let mut extra: Vec<OsString> = Vec::new();
    for (key, value) in merged_keys(doc, sub_name)? {
        let long = key.replace('_', "-");
        if long == "config" {
            continue;
        }
        let arg = sub_cmd
            .get_arguments()
            .chain(cmd.get_arguments())
            .find(|a| a.get_long() == Some(long.as_str()));
        let Some(arg) = arg else {
            bail!("unknown config key `{key}` for `{sub_name}`");
        };
        let id = arg.get_id().as_str();
        if given_on_command_line(sub_matches, id) || given_on_command_line(&matches, id) {
            continue;
        }
        let flag = OsString::from(format!("--{long}"));
        match arg.get_action() {
            ArgAction::SetTrue => {
                if value
                    .as_bool()
                    .with_context(|| format!("`{key}` must be a boolean"))?
                {
                    extra.push(flag);
                }
            }
            ArgAction::Append => {
                let items = match value {
                    Value::Array(items) => items,
                    single => vec![single],
                };
                for item in &items {
                    extra.push(flag.clone());
                    extra.push(scalar(item)?.into());
                }
            }
            _ => {
                extra.push(flag);
                extra.push(scalar(&value)?.into());
            }
        }
    }
    let mut argv = argv;
    argv.extend(extra);
    Ok(argv)
}
