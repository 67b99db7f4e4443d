//! Whitespace-delimited data tables with `#` comment headers.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};

const COLUMNS_PREFIX: &str = "# columns:";

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            comments: Vec::new(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn comment(mut self, line: impl Into<String>) -> Self {
        self.comments.push(line.into());
        self
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        crate::error::check_len(self.columns.len(), row.len())?;
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    /// Values use Rust's shortest round-trip formatting, so parsing the
    /// file back reproduces every `f64` exactly.
    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        for c in &self.comments {
            writeln!(w, "# {c}")?;
        }
        writeln!(w, "{COLUMNS_PREFIX} {}", self.columns.join(" "))?;
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        Ok(())
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(f);
        self.write(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn read<R: BufRead>(r: R) -> Result<Self> {
        let mut t = Table::new(Vec::new());
        for line in r.lines() {
            let line = line?;
            if let Some(cols) = line.strip_prefix(COLUMNS_PREFIX) {
                t.columns = cols.split_whitespace().map(str::to_owned).collect();
            } else if let Some(c) = line.strip_prefix('#') {
                t.comments.push(c.strip_prefix(' ').unwrap_or(c).to_owned());
            } else if !line.trim().is_empty() {
                let row = line
                    .split_whitespace()
                    .map(|tok| tok.parse::<f64>().map_err(|e| Error::Parse(format!("{tok:?}: {e}"))))
                    .collect::<Result<Vec<_>>>()?;
                if row.len() != t.columns.len() {
                    return Err(Error::Parse(format!(
                        "row has {} values for {} columns",
                        row.len(),
                        t.columns.len()
                    )));
                }
                t.rows.push(row);
            }
        }
        Ok(t)
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        Self::read(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}
