//! Merging a JSON config file into the argument list.
//!
//! Every key of the config object becomes a `--key value` pair placed right
//! after the subcommand, ahead of the user's own flags. Later occurrences win,
//! so flags given on the command line override the file.

use std::fs;

use serde_json::Value;

pub const SUBCOMMANDS: &[&str] =
    &["orbit", "rds-check", "stability", "factor", "newton", "ramify", "galois-sim", "density", "witness"];

/// Finds `--config PATH` or `--config=PATH`.
fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

fn value_to_arg(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Array(items) => Some(items.iter().filter_map(value_to_arg).collect::<Vec<_>>().join(",")),
        Value::Bool(_) | Value::Null | Value::Object(_) => None,
    }
}

/// Returns the argument list with the config file's entries spliced in.
pub fn merge(args: Vec<String>) -> Result<Vec<String>, String> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let json: Value = serde_json::from_str(&text).map_err(|e| format!("config {path} is not valid JSON: {e}"))?;
    let Value::Object(map) = json else {
        return Err(format!("config {path} must hold a JSON object"));
    };
    let mut extra = Vec::new();
    for (key, v) in map {
        let flag = format!("--{key}");
        match v {
            Value::Bool(true) => extra.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::Object(_) => return Err(format!("config key {key:?} must not be an object")),
            other => {
                extra.push(flag);
                extra.push(value_to_arg(&other).unwrap_or_default());
            }
        }
    }
    let Some(pos) = args.iter().position(|a| SUBCOMMANDS.contains(&a.as_str())) else {
        return Ok(args);
    };
    let mut out = args[..=pos].to_vec();
    out.extend(extra);
    out.extend_from_slice(&args[pos + 1..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splices_after_subcommand() {
        let dir = std::env::temp_dir().join(format!("critorbit-cfg-{}", std::process::id()));
        fs::write(&dir, r#"{"d": 3, "classes": ["1%3", "2%3"], "exact": true}"#).unwrap();
        let args: Vec<String> = ["critorbit", "--config", dir.to_str().unwrap(), "density", "--d", "2"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let merged = merge(args).unwrap();
        let tail: Vec<&str> = merged[4..].iter().map(String::as_str).collect();
        assert_eq!(tail, ["--classes", "1%3,2%3", "--d", "3", "--exact", "--d", "2"]);
        fs::remove_file(dir).unwrap();
    }
}
