//! Plain-text problem files.
//!
//! ```text
//! # comments start with '#'
//! m n
//! a_11 ... a_1n      (m rows)
//! y_1 ... y_m
//! x_1 ... x_n        (optional ground truth)
//! ```
//!
//! Values are whitespace separated.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use super::LinearProblem;
use crate::error::{Error, Result};

fn parse_row(line: &str, lineno: usize) -> Result<Vec<f64>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|e| Error::Parse(format!("line {lineno}: {tok:?}: {e}")))
        })
        .collect()
}

pub fn read_problem<R: BufRead>(r: R) -> Result<LinearProblem> {
    let mut rows = Vec::new();
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        rows.push((idx + 1, parse_row(body, idx + 1)?));
    }
    let mut it = rows.into_iter();
    let (hline, header) = it
        .next()
        .ok_or_else(|| Error::Parse("empty problem file".into()))?;
    if header.len() != 2 || header.iter().any(|v| v.fract() != 0.0 || *v < 1.0) {
        return Err(Error::Parse(format!("line {hline}: expected header 'm n'")));
    }
    let (m, n) = (header[0] as usize, header[1] as usize);

    let mut a = Vec::with_capacity(m * n);
    for _ in 0..m {
        let (ln, row) = it
            .next()
            .ok_or_else(|| Error::Parse(format!("expected {m} matrix rows")))?;
        if row.len() != n {
            return Err(Error::Parse(format!("line {ln}: expected {n} values, got {}", row.len())));
        }
        a.extend(row);
    }
    let (ln, y) = it
        .next()
        .ok_or_else(|| Error::Parse("missing measurement row".into()))?;
    if y.len() != m {
        return Err(Error::Parse(format!("line {ln}: expected {m} measurements, got {}", y.len())));
    }
    let mut p = LinearProblem::new(m, n, a, y)?;
    if let Some((ln, x)) = it.next() {
        if x.len() != n {
            return Err(Error::Parse(format!("line {ln}: expected {n} truth values, got {}", x.len())));
        }
        p = p.with_truth(x)?;
    }
    if let Some((ln, _)) = it.next() {
        return Err(Error::Parse(format!("line {ln}: unexpected trailing data")));
    }
    Ok(p)
}

fn join(values: &[f64]) -> String {
    let mut s = String::new();
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        write!(s, "{v:e}").unwrap();
    }
    s
}

pub fn write_problem<W: Write>(mut w: W, p: &LinearProblem) -> Result<()> {
    writeln!(w, "# m n, then A row by row, then y, then optional x")?;
    writeln!(w, "{} {}", p.rows(), p.cols())?;
    for i in 0..p.rows() {
        writeln!(w, "{}", join(p.row(i)))?;
    }
    writeln!(w, "{}", join(p.y()))?;
    if let Some(x) = p.x_true() {
        writeln!(w, "{}", join(x))?;
    }
    Ok(())
}

/// One estimate component per line, index first.
pub fn write_estimate<W: Write>(mut w: W, x_hat: &[f64]) -> Result<()> {
    writeln!(w, "# j x_hat_j")?;
    for (j, v) in x_hat.iter().enumerate() {
        writeln!(w, "{j} {v:e}")?;
    }
    Ok(())
}
