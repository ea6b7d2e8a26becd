//! Line-oriented output in either plain text or JSON lines.

use std::io::{self, Write};

use clap::ValueEnum;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    JsonLines,
}

/// Collects report lines; each line has a plain and a JSON rendering.
pub struct Report {
    format: Format,
    lines: Vec<String>,
}

impl Report {
    pub fn new(format: Format) -> Self {
        Report {
            format,
            lines: Vec::new(),
        }
    }

    pub fn line(&mut self, plain: impl Into<String>, json: Value) {
        match self.format {
            Format::Plain => self.lines.push(plain.into()),
            // serde_json maps are sorted by key, so output order is fixed
            Format::JsonLines => self.lines.push(json.to_string()),
        }
    }

    /// Raw text that is emitted the same way in both formats (model files).
    pub fn raw(&mut self, text: &str) {
        match self.format {
            Format::Plain => self.lines.extend(text.lines().map(str::to_string)),
            Format::JsonLines => self
                .lines
                .push(serde_json::json!({ "model": text }).to_string()),
        }
    }

    pub fn write_to(&self, out: &mut impl Write) -> io::Result<()> {
        for l in &self.lines {
            writeln!(out, "{l}")?;
        }
        Ok(())
    }
}
