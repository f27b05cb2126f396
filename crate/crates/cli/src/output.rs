//! File emission helpers. All numeric text output carries 15 significant
//! digits; JSON goes through serde with exact f64 round-tripping.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

/// 15 significant digits in scientific notation.
pub fn sig15(x: f64) -> String {
    format!("{x:.14e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutFormat {
    Json,
    Csv,
}

pub struct Emitter {
    dir: PathBuf,
    pub format: OutFormat,
    written: Vec<PathBuf>,
}

impl Emitter {
    pub fn new(dir: &Path, format: OutFormat) -> Result<Self> {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("cannot create output directory {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            format,
            written: Vec::new(),
        })
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let path = self.path(name);
        let mut text =
            serde_json::to_string_pretty(value).context("serialization failed")?;
        text.push('\n');
        std::fs::write(&path, text)
            .with_context(|| format!("cannot write {}", path.display()))?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn write_csv(
        &mut self,
        name: &str,
        header: &[&str],
        rows: &[Vec<String>],
    ) -> Result<PathBuf> {
        let path = self.path(name);
        let mut text = String::new();
        text.push_str(&header.join(","));
        text.push('\n');
        for row in rows {
            text.push_str(&row.join(","));
            text.push('\n');
        }
        std::fs::write(&path, text)
            .with_context(|| format!("cannot write {}", path.display()))?;
        self.written.push(path.clone());
        Ok(path)
    }

    /// Primary report: JSON object or flat `key,value` CSV depending on the
    /// selected format.
    pub fn write_report<T: Serialize>(&mut self, stem: &str, value: &T) -> Result<PathBuf> {
        match self.format {
            OutFormat::Json => self.write_json(&format!("{stem}.json"), value),
            OutFormat::Csv => {
                let flat = flatten(serde_json::to_value(value)?);
                let rows: Vec<Vec<String>> =
                    flat.into_iter().map(|(k, v)| vec![k, v]).collect();
                self.write_csv(&format!("{stem}.csv"), &["key", "value"], &rows)
            }
        }
    }
}

/// Flatten nested JSON into dotted `key,value` pairs, numbers at 15
/// significant digits.
fn flatten(value: serde_json::Value) -> Vec<(String, String)> {
    let mut out = Vec::new();
    walk(&mut out, String::new(), &value);
    out
}

fn walk(out: &mut Vec<(String, String)>, prefix: String, value: &serde_json::Value) {
    match value {
        serde_json::Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                walk(out, key, v);
            }
        }
        serde_json::Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                walk(out, format!("{prefix}[{i}]"), v);
            }
        }
        serde_json::Value::Number(n) => {
            let text = match n.as_f64() {
                Some(f) if n.is_f64() => sig15(f),
                _ => n.to_string(),
            };
            out.push((prefix, text));
        }
        serde_json::Value::String(s) => out.push((prefix, s.replace(',', ";"))),
        serde_json::Value::Bool(b) => out.push((prefix, b.to_string())),
        serde_json::Value::Null => out.push((prefix, String::new())),
    }
}
