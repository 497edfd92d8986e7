//! Deterministic file output: 9-significant-digit floats, `\n` line
//! endings, embedded reproducibility manifest, atomic writes.

use crate::error::CliError;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// A float with 9 significant digits, locale-independent.
pub fn sig9(x: f64) -> String {
    format!("{x:.8e}")
}

/// Ordered key=value pairs recorded in every output file; contains no
/// timestamps or host information, so outputs are byte-reproducible.
#[derive(Debug, Clone, Default)]
pub struct Manifest {
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn push_sig9(&mut self, key: &str, value: f64) {
        self.push(key, sig9(value));
    }

    fn csv_comment_block(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "# {k}={v}");
        }
        out
    }

    fn json_object(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (k, v) in &self.entries {
            map.insert(k.clone(), serde_json::Value::String(v.clone()));
        }
        serde_json::Value::Object(map)
    }
}

/// Write bytes atomically: temp file in the same directory, then rename.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let tmp = path.with_extension(match path.extension() {
        Some(ext) => format!("{}.tmp", ext.to_string_lossy()),
        None => "tmp".to_string(),
    });
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// One tabular dataset: fixed column names, float rows, optional named
/// footer scalars (used by the Schmidt output).
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub footer: Vec<(String, f64)>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            footer: Vec::new(),
        }
    }

    fn to_csv(&self, manifest: &Manifest) -> String {
        let mut out = manifest.csv_comment_block();
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            debug_assert_eq!(row.len(), self.columns.len());
            let cells: Vec<String> = row.iter().map(|&v| sig9(v)).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        for (key, value) in &self.footer {
            let _ = writeln!(out, "{key},{}", sig9(*value));
        }
        out
    }

    fn to_json(&self, manifest: &Manifest) -> String {
        let mut root = serde_json::Map::new();
        root.insert("manifest".into(), manifest.json_object());
        root.insert(
            "columns".into(),
            serde_json::Value::Array(
                self.columns
                    .iter()
                    .map(|c| serde_json::Value::String(c.clone()))
                    .collect(),
            ),
        );
        root.insert(
            "rows".into(),
            serde_json::Value::Array(
                self.rows
                    .iter()
                    .map(|row| {
                        serde_json::Value::Array(
                            row.iter()
                                .map(|&v| serde_json::Value::String(sig9(v)))
                                .collect(),
                        )
                    })
                    .collect(),
            ),
        );
        for (key, value) in &self.footer {
            root.insert(key.clone(), serde_json::Value::String(sig9(*value)));
        }
        let mut text = serde_json::to_string_pretty(&serde_json::Value::Object(root))
            .expect("table serialization cannot fail");
        text.push('\n');
        text
    }

    /// Write as CSV or JSON next to the given stem, returning the path.
    pub fn write(
        &self,
        out_dir: &Path,
        stem: &str,
        format: crate::config::OutputFormat,
        manifest: &Manifest,
    ) -> Result<PathBuf, CliError> {
        let (name, body) = match format {
            crate::config::OutputFormat::Csv => (format!("{stem}.csv"), self.to_csv(manifest)),
            crate::config::OutputFormat::Json => (format!("{stem}.json"), self.to_json(manifest)),
        };
        let path = out_dir.join(name);
        atomic_write(&path, body.as_bytes())?;
        Ok(path)
    }
}

/// Serialize a JSON document with an embedded manifest object.
pub fn write_json_document(
    path: &Path,
    manifest: &Manifest,
    body_key: &str,
    body: serde_json::Value,
    extra: Vec<(String, serde_json::Value)>,
) -> Result<(), CliError> {
    let mut root = serde_json::Map::new();
    root.insert("manifest".into(), manifest.json_object());
    root.insert(body_key.into(), body);
    for (k, v) in extra {
        root.insert(k, v);
    }
    let mut text = serde_json::to_string_pretty(&serde_json::Value::Object(root))
        .map_err(|e| CliError::Numerical(format!("serialization: {e}")))?;
    text.push('\n');
    atomic_write(path, text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig9_has_nine_significant_digits() {
        assert_eq!(sig9(0.95), "9.50000000e-1");
        assert_eq!(sig9(0.0013), "1.30000000e-3");
        assert_eq!(sig9(-123.456), "-1.23456000e2");
        assert_eq!(sig9(0.0), "0.00000000e0");
    }

    #[test]
    fn csv_layout() {
        let mut m = Manifest::default();
        m.push("tool", "heraldsim");
        let mut t = Table::new(&["kappa_L", "R_sigma_units", "H"]);
        t.rows.push(vec![0.02, 1e-4, 0.99]);
        let text = t.to_csv(&m);
        assert_eq!(
            text,
            "# tool=heraldsim\nkappa_L,R_sigma_units,H\n2.00000000e-2,1.00000000e-4,9.90000000e-1\n"
        );
    }
}
