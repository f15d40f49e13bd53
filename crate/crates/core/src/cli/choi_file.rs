//! Text format for Choi matrices.
//!
//! ```text
//! CHOI 2
//! 1,0 0,0 0,0 1,0
//! 0,0 0,0 0,0 0,0
//! 0,0 0,0 0,0 0,0
//! 1,0 0,0 0,0 1,0
//! ```
//!
//! One header line, then `n²` rows of `n²` entries `re,im` separated by
//! single spaces. Writes use the shortest representation that parses back
//! to the same bits.

use std::fmt::Write as _;
use std::path::Path;

use crate::channel::Choi;
use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_real(tok: &str, line: usize) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| parse_err(line, format!("invalid number {tok:?}")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("non-finite number {tok:?}")));
    }
    Ok(v)
}

fn parse_entry(tok: &str, line: usize) -> Result<C64> {
    let (re, im) = tok
        .split_once(',')
        .ok_or_else(|| parse_err(line, format!("entry {tok:?} is not of the form re,im")))?;
    Ok(C64::new(parse_real(re, line)?, parse_real(im, line)?))
}

pub fn parse_choi(text: &str) -> Result<Choi> {
    let mut lines = text
        .lines()
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .enumerate()
        .map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let mut toks = header.split(' ');
    if toks.next() != Some("CHOI") {
        return Err(parse_err(1, "expected header \"CHOI <n>\""));
    }
    let n: usize = toks
        .next()
        .and_then(|t| t.parse().ok())
        .filter(|&n| n > 0)
        .ok_or_else(|| parse_err(1, "header must give a positive dimension"))?;
    if toks.next().is_some() {
        return Err(parse_err(1, "trailing tokens in header"));
    }
    let nn = n * n;
    let mut data = Vec::with_capacity(nn * nn);
    let mut rows = 0;
    for (lineno, line) in lines {
        if rows == nn {
            if line.trim().is_empty() {
                continue;
            }
            return Err(parse_err(lineno, format!("expected {nn} rows, found more")));
        }
        let before = data.len();
        for tok in line.split(' ') {
            data.push(parse_entry(tok, lineno)?);
        }
        if data.len() - before != nn {
            return Err(parse_err(
                lineno,
                format!("expected {nn} entries, found {}", data.len() - before),
            ));
        }
        rows += 1;
    }
    if rows != nn {
        return Err(parse_err(
            rows + 2,
            format!("expected {nn} rows, found {rows}"),
        ));
    }
    Choi::new(n, CMat::from_vec(nn, nn, data)?)
}

/// Shortest round-trip decimal, switching to exponent form for very large or
/// small magnitudes.
pub fn format_real(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn format_choi(c: &Choi) -> String {
    let nn = c.n() * c.n();
    let m = c.mat();
    let mut s = format!("CHOI {}\n", c.n());
    for i in 0..nn {
        for j in 0..nn {
            if j > 0 {
                s.push(' ');
            }
            let z = m[(i, j)];
            let _ = write!(s, "{},{}", format_real(z.re), format_real(z.im));
        }
        s.push('\n');
    }
    s
}

pub fn read_choi(path: impl AsRef<Path>) -> Result<Choi> {
    parse_choi(&std::fs::read_to_string(path)?)
}

pub fn write_choi(path: impl AsRef<Path>, c: &Choi) -> Result<()> {
    std::fs::write(path, format_choi(c))?;
    Ok(())
}
