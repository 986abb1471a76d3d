use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Map, Value};

pub const SCHEMA_VERSION: u32 = 1;
pub const OUTPUT_DIR_ENV: &str = "MIXSUM_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

/// What a subcommand hands back: a structured body, long-format rows for
/// CSV, and the assertions that failed.
#[derive(Debug, Default)]
pub struct Report {
    pub results: Value,
    pub rows: Vec<Map<String, Value>>,
    pub failures: Vec<String>,
}

impl Report {
    pub fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }
}

pub fn row(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("value".into(), other);
            m
        }
    }
}

/// `--out` if given, else `$MIXSUM_OUTPUT_DIR/<command>.<ext>`, else stdout.
pub fn destination(out: Option<&Path>, command: &str, format: Format) -> Option<PathBuf> {
    if let Some(p) = out {
        return Some(p.to_path_buf());
    }
    std::env::var_os(OUTPUT_DIR_ENV)
        .filter(|d| !d.is_empty())
        .map(|d| PathBuf::from(d).join(format!("{command}.{}", format.ext())))
}

pub fn emit(report: &Report, command: &str, config: &Value, format: Format, dest: Option<&Path>) -> Result<()> {
    let mut sink: Box<dyn Write> = match dest {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)
        }
        None => Box::new(io::stdout().lock()),
    };
    match format {
        Format::Json => {
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": command,
                "config": config,
                "passed": report.failures.is_empty(),
                "failures": report.failures,
                "results": report.results,
            });
            serde_json::to_writer_pretty(&mut sink, &doc)?;
            writeln!(sink)?;
        }
        Format::Csv => write_csv(&mut sink, &report.rows)?,
    }
    sink.flush()?;
    Ok(())
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn write_csv(sink: &mut dyn Write, rows: &[Map<String, Value>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    let Some(first) = rows.first() else {
        w.write_record(["schema_version"])?;
        w.flush()?;
        return Ok(());
    };
    let keys: Vec<&String> = first.keys().collect();
    for r in rows {
        if r.len() != keys.len() || !keys.iter().all(|k| r.contains_key(*k)) {
            bail!("rows do not share one set of columns");
        }
    }
    let mut header = vec!["schema_version".to_string()];
    header.extend(keys.iter().map(|k| k.to_string()));
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![SCHEMA_VERSION.to_string()];
        rec.extend(keys.iter().map(|k| cell(&r[*k])));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let rows = vec![row(json!({"x": 1, "name": "a,b"})), row(json!({"x": 2.5, "name": null}))];
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "schema_version,x,name\n1,1,\"a,b\"\n1,2.5,\n");
        let ragged = vec![row(json!({"x": 1})), row(json!({"y": 1}))];
        assert!(write_csv(&mut Vec::new(), &ragged).is_err());
    }
}
