//! Output assembly: fixed-precision floats, plain and CSV renderings, and
//! the provenance comment that makes every emitted file reproducible.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::Context;
use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Csv,
}

/// 12 significant digits: below the accumulated rounding of the library,
/// above every test tolerance, and stable across runs.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn provenance(params: &str) -> String {
    format!(
        "# beamsplit {} | {} | floats: 12 significant digits",
        env!("CARGO_PKG_VERSION"),
        params
    )
}

/// A list of labeled quantities with one rendering per output format.
pub struct Report {
    provenance: String,
    rows: Vec<(String, String)>,
}

impl Report {
    pub fn new(params: &str) -> Self {
        Self {
            provenance: provenance(params),
            rows: Vec::new(),
        }
    }

    pub fn value(&mut self, key: &str, x: f64) -> &mut Self {
        self.rows.push((key.to_string(), fmt_float(x)));
        self
    }

    pub fn text(&mut self, key: &str, s: impl Into<String>) -> &mut Self {
        self.rows.push((key.to_string(), s.into()));
        self
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        out.push_str(&self.provenance);
        out.push('\n');
        match format {
            Format::Plain => {
                for (k, v) in &self.rows {
                    out.push_str(&format!("{k} = {v}\n"));
                }
            }
            Format::Csv => {
                out.push_str("quantity,value\n");
                for (k, v) in &self.rows {
                    out.push_str(&format!("{k},{v}\n"));
                }
            }
        }
        out
    }
}

/// Write to the given path, or stdout when no path is set.
pub fn emit(text: &str, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("cannot write output to {}", path.display())),
        None => {
            std::io::stdout()
                .write_all(text.as_bytes())
                .context("cannot write to stdout")
        }
    }
}
