//! `--config PATH`: a JSON object of option values merged into argv.

use std::ffi::OsString;

use serde_json::Value;

use crate::CliError;

fn option_name(arg: &str) -> Option<&str> {
    let rest = arg.strip_prefix("--")?;
    Some(rest.split('=').next().unwrap_or(rest))
}

fn scalar(key: &str, v: &Value) -> Result<String, CliError> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        Value::Array(items) => items
            .iter()
            .map(|i| scalar(key, i))
            .collect::<Result<Vec<_>, _>>()
            .map(|v| v.join(",")),
        _ => Err(CliError::Usage(format!("config key `{key}` has an unsupported value"))),
    }
}

/// Appends `--key value` for every config key not already present.
pub fn inject(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let strs: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let mut path = None;
    for (i, a) in strs.iter().enumerate() {
        if a == "--config" {
            path = Some(
                strs.get(i + 1)
                    .cloned()
                    .ok_or_else(|| CliError::Usage("--config needs a path".into()))?,
            );
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::Usage(format!("cannot read config {path}: {e}")))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("config {path} is not valid JSON: {e}")))?;
    let Value::Object(map) = value else {
        return Err(CliError::Usage(format!("config {path} must be a JSON object")));
    };
    let present: Vec<&str> = strs.iter().filter_map(|a| option_name(a)).collect();
    let mut out = args;
    for (key, v) in &map {
        let flag = key.replace('_', "-");
        if flag == "config" || present.contains(&flag.as_str()) {
            continue;
        }
        match v {
            Value::Bool(true) => out.push(format!("--{flag}").into()),
            Value::Bool(false) | Value::Null => {}
            other => {
                out.push(format!("--{flag}").into());
                out.push(scalar(key, other)?.into());
            }
        }
    }
    Ok(out)
}
