use std::io::Write;

use nodal::Complex64;
use serde::Serialize;

use crate::config::{Format, RunConfig};

/// A rendered result: JSON document plus the same content as CSV rows.
pub struct Output {
    pub json: serde_json::Value,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Output {
    pub fn new<T: Serialize>(value: &T, header: Vec<String>, rows: Vec<Vec<String>>) -> Result<Self, String> {
        Ok(Output { json: serde_json::to_value(value).map_err(|e| e.to_string())?, header, rows })
    }

    pub fn render(&self, format: Format) -> Result<String, String> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).map_err(|e| e.to_string())?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.header).map_err(|e| e.to_string())?;
                for r in &self.rows {
                    w.write_record(r).map_err(|e| e.to_string())?;
                }
                String::from_utf8(w.into_inner().map_err(|e| e.to_string())?).map_err(|e| e.to_string())
            }
        }
    }

    pub fn emit(&self, cfg: &RunConfig) -> Result<(), String> {
        let text = self.render(cfg.format)?;
        match &cfg.out {
            Some(path) => std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
            None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
        }
    }
}

pub fn num(x: f64) -> String {
    format!("{x}")
}

/// Paired columns for a complex value.
pub fn pair(z: Complex64) -> [String; 2] {
    [num(z.re), num(z.im)]
}

pub fn header(labels: &[&str]) -> Vec<String> {
    labels.iter().map(|s| s.to_string()).collect()
}

/// Column names `name_re`, `name_im` for each label.
pub fn paired_header(labels: &[&str]) -> Vec<String> {
    labels.iter().flat_map(|l| [format!("{l}_re"), format!("{l}_im")]).collect()
}
