//! Deterministic file output: CSV with a config-echo header and JSON lines.

use std::fs;
use std::path::Path;

use crate::CliError;

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_opt_f64(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Jsonl,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "jsonl" => Ok(Format::Jsonl),
            other => Err(format!("unknown format '{other}' (expected csv or jsonl)")),
        }
    }
}

/// Self-describing header lines echoed into every output file.
pub fn csv_header(command: &str, fields: &[(&str, String)]) -> String {
    let mut out = format!(
        "# qtel v{} {command}\n",
        env!("CARGO_PKG_VERSION")
    );
    let body: Vec<String> = fields.iter().map(|(k, v)| format!("{k}={v}")).collect();
    out.push_str("# ");
    out.push_str(&body.join(" "));
    out.push('\n');
    out
}

pub fn jsonl_config(command: &str, fields: &[(&str, String)]) -> String {
    let mut map = serde_json::Map::new();
    map.insert("tool".into(), format!("qtel v{}", env!("CARGO_PKG_VERSION")).into());
    map.insert("command".into(), command.into());
    for (k, v) in fields {
        map.insert((*k).into(), (*v).clone().into());
    }
    let mut line = serde_json::Value::Object(map).to_string();
    line.push('\n');
    line
}

/// Write through a temporary file and rename, so a failed run leaves no
/// partial output behind.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp.partial");
    let cleanup_and_err = |e: std::io::Error, tmp: &Path| {
        let _ = fs::remove_file(tmp);
        CliError::Io(format!("cannot write {}: {e}", path.display()))
    };
    fs::write(&tmp, contents).map_err(|e| cleanup_and_err(e, &tmp))?;
    fs::rename(&tmp, path).map_err(|e| cleanup_and_err(e, &tmp))?;
    Ok(())
}
