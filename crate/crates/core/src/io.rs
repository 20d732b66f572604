//! Plain-text formats for generator matrices and arrays.
//!
//! Code file: `CODE q n k`, then n lines of k symbols (generator rows).
//! Array file: `OA N n q t lambda`, then n lines of N symbols, optionally
//! followed by `EULER t lambda_edge`. Headers are claims only; callers are
//! expected to re-verify what they load.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use crate::code::LinearCode;
use crate::error::{Error, Result};
use crate::field::{gf_new, FieldTable, Symbol};
use crate::group::prime_power;
use crate::oa::SymbolMatrix;

/// The field of order `q`, or an error for non prime powers.
pub fn field_of_order(q: usize) -> Result<FieldTable> {
    match prime_power(q) {
        Some((p, m)) => gf_new(p, m),
        None => Err(Error::InvalidParameter(format!("{q} is not a prime power"))),
    }
}

pub fn write_code(code: &LinearCode) -> String {
    let mut out = format!("CODE {} {} {}\n", code.q(), code.len(), code.dim());
    for row in code.generator_rows() {
        out.push_str(&join(&row));
        out.push('\n');
    }
    out
}

pub fn parse_code(text: &str) -> Result<LinearCode> {
    let mut lines = content_lines(text);
    let (lineno, header) = lines.next().ok_or_else(|| Error::parse(1, "empty code file"))?;
    let fields = header_fields(lineno, header, "CODE", 3)?;
    let (q, n, k) = (fields[0], fields[1], fields[2]);
    let field = Arc::new(field_of_order(q)?);
    let rows = read_rows(&mut lines, n, k, q)?;
    expect_end(&mut lines)?;
    LinearCode::new(field, rows)
}

/// Header claims of an array file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArrayHeader {
    pub runs: usize,
    pub factors: usize,
    pub levels: usize,
    pub strength: usize,
    pub lambda: usize,
    /// `(t, lambda_edge)` from an `EULER` trailer.
    pub euler: Option<(usize, usize)>,
}

pub fn write_array(entries: &SymbolMatrix, header: &ArrayHeader) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "OA {} {} {} {} {}", entries.cols(), entries.rows(), header.levels, header.strength, header.lambda);
    for k in 0..entries.rows() {
        out.push_str(&join(entries.row(k)));
        out.push('\n');
    }
    if let Some((t, lambda_edge)) = header.euler {
        let _ = writeln!(out, "EULER {t} {lambda_edge}");
    }
    out
}

pub fn parse_array(text: &str) -> Result<(SymbolMatrix, ArrayHeader)> {
    let mut lines = content_lines(text);
    let (lineno, header) = lines.next().ok_or_else(|| Error::parse(1, "empty array file"))?;
    let f = header_fields(lineno, header, "OA", 5)?;
    let (runs, factors, levels) = (f[0], f[1], f[2]);
    let rows = read_rows(&mut lines, factors, runs, levels)?;
    let euler = match lines.next() {
        None => None,
        Some((lineno, line)) => {
            let e = header_fields(lineno, line, "EULER", 2)?;
            expect_end(&mut lines)?;
            Some((e[0], e[1]))
        }
    };
    let entries = SymbolMatrix::from_rows(rows)?;
    Ok((entries, ArrayHeader { runs, factors, levels, strength: f[3], lambda: f[4], euler }))
}

pub fn read_file(path: impl AsRef<Path>) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

pub fn write_file(path: impl AsRef<Path>, text: &str) -> Result<()> {
    Ok(std::fs::write(path, text)?)
}

fn join(symbols: &[Symbol]) -> String {
    symbols.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn header_fields(lineno: usize, line: &str, tag: &str, count: usize) -> Result<Vec<usize>> {
    let mut words = line.split_whitespace();
    if words.next() != Some(tag) {
        return Err(Error::parse(lineno, format!("expected `{tag}` header")));
    }
    let values = words
        .map(|w| w.parse::<usize>().map_err(|_| Error::parse(lineno, format!("`{w}` is not a non-negative integer"))))
        .collect::<Result<Vec<_>>>()?;
    if values.len() != count {
        return Err(Error::parse(lineno, format!("`{tag}` header takes {count} numbers, found {}", values.len())));
    }
    Ok(values)
}

fn read_rows<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>, rows: usize, cols: usize, q: usize) -> Result<Vec<Vec<Symbol>>> {
    let mut out = Vec::with_capacity(rows);
    for r in 0..rows {
        let (lineno, line) = lines.next().ok_or_else(|| Error::parse(0, format!("expected {rows} rows, found {r}")))?;
        let row = line
            .split_whitespace()
            .map(|w| match w.parse::<usize>() {
                Ok(v) if v < q => Ok(v as Symbol),
                Ok(v) => Err(Error::parse(lineno, format!("symbol {v} out of range for q = {q}"))),
                Err(_) => Err(Error::parse(lineno, format!("`{w}` is not a symbol"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if row.len() != cols {
            return Err(Error::parse(lineno, format!("expected {cols} symbols, found {}", row.len())));
        }
        out.push(row);
    }
    Ok(out)
}

fn expect_end<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>) -> Result<()> {
    match lines.next() {
        None => Ok(()),
        Some((lineno, _)) => Err(Error::parse(lineno, "unexpected trailing content")),
    }
}
