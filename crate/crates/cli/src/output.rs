//! Rendering results with the run metadata attached.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// A command's result, plus a dedicated table when one makes sense.
pub struct Rendered {
    pub result: Value,
    pub csv: Option<String>,
}

impl Rendered {
    pub fn json(result: impl Serialize) -> Self {
        Rendered { result: serde_json::to_value(result).expect("results serialize"), csv: None }
    }

    pub fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }
}

pub struct Meta<'a> {
    pub command: &'a str,
    pub seed: u64,
    pub config: Value,
}

/// `path = value` lines for every leaf of a JSON tree.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&p, x, out);
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render(meta: &Meta, r: &Rendered, format: Format) -> String {
    let version = env!("CARGO_PKG_VERSION");
    match format {
        Format::Json => {
            let doc = json!({
                "tool": "critorbit",
                "version": version,
                "command": meta.command,
                "seed": meta.seed,
                "config": meta.config,
                "result": r.result,
            });
            let mut s = serde_json::to_string_pretty(&doc).expect("json");
            s.push('\n');
            s
        }
        Format::Csv | Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "# critorbit {version}");
            let _ = writeln!(s, "# command: {}", meta.command);
            let _ = writeln!(s, "# seed: {}", meta.seed);
            let _ = writeln!(s, "# config: {}", meta.config);
            let mut leaves = Vec::new();
            flatten("", &r.result, &mut leaves);
            match (format, &r.csv) {
                (Format::Csv, Some(table)) => s.push_str(table),
                (Format::Csv, None) => {
                    s.push_str("key,value\n");
                    for (k, v) in leaves {
                        let _ = writeln!(s, "{},{}", csv_field(&k), csv_field(&v));
                    }
                }
                _ => {
                    for (k, v) in leaves {
                        let _ = writeln!(s, "{k} = {v}");
                    }
                }
            }
            s
        }
    }
}
