//! Text formats: `cf-v1` colouring functions and one-per-line permutations.
//!
//! ```text
//! cf-v1 n=3 k=2 c=2
//! 1 2 -> 1
//! 1 3 -> 1
//! 2 3 -> 2
//! ```

use std::fmt::Write as _;

use crate::colouring::{check_table_size, ColouringFunction};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::tuple::next_increasing;

pub const CF_MAGIC: &str = "cf-v1";

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Parses `key=value` header fields in the given order.
pub(crate) fn parse_header<'a>(line: &'a str, magic: &str, keys: &[&str]) -> Result<Vec<&'a str>> {
    let mut tokens = line.split_whitespace();
    if tokens.next() != Some(magic) {
        return Err(parse_err(
            1,
            format!("expected header starting with `{magic}`"),
        ));
    }
    let mut values = Vec::with_capacity(keys.len());
    for key in keys {
        let tok = tokens
            .next()
            .ok_or_else(|| parse_err(1, format!("missing `{key}=` in header")))?;
        let value = tok
            .strip_prefix(key)
            .and_then(|rest| rest.strip_prefix('='))
            .ok_or_else(|| parse_err(1, format!("expected `{key}=<value>`, got `{tok}`")))?;
        values.push(value);
    }
    if let Some(extra) = tokens.next() {
        return Err(parse_err(1, format!("unexpected header token `{extra}`")));
    }
    Ok(values)
}

pub(crate) fn parse_num<T: std::str::FromStr>(s: &str, line: usize, what: &str) -> Result<T> {
    s.parse::<T>()
        .map_err(|_| parse_err(line, format!("invalid {what} `{s}`")))
}

/// Splits `x_1 ... x_k -> colour`.
pub(crate) fn parse_entry(text: &str, line: usize, arity: usize) -> Result<(Vec<u32>, u32)> {
    let (lhs, rhs) = text
        .split_once("->")
        .ok_or_else(|| parse_err(line, "expected `<ids> -> <colour>`"))?;
    let ids = lhs
        .split_whitespace()
        .map(|t| parse_num::<u32>(t, line, "identifier"))
        .collect::<Result<Vec<_>>>()?;
    if ids.len() != arity {
        return Err(parse_err(
            line,
            format!("expected {arity} identifiers, got {}", ids.len()),
        ));
    }
    let colour = parse_num::<u32>(rhs.trim(), line, "colour")?;
    Ok((ids, colour))
}

pub fn parse_cf(text: &str) -> Result<ColouringFunction> {
    parse_cf_with_limits(text, &Limits::default())
}

pub fn parse_cf_with_limits(text: &str, limits: &Limits) -> Result<ColouringFunction> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let header = lines
        .by_ref()
        .find(|(_, l)| !l.is_empty())
        .ok_or_else(|| parse_err(1, "empty input"))?;
    let fields = parse_header(header.1, CF_MAGIC, &["n", "k", "c"]).map_err(|e| match e {
        Error::Parse { message, .. } => parse_err(header.0, message),
        other => other,
    })?;
    let n: u32 = parse_num(fields[0], header.0, "n")?;
    let k: usize = parse_num(fields[1], header.0, "k")?;
    let c: u32 = parse_num(fields[2], header.0, "c")?;
    let indexer = check_table_size(n, k, limits)?;

    let expected_len = indexer.len() as usize;
    let mut table = Vec::with_capacity(expected_len);
    let mut expected: Vec<u32> = (1..=k as u32).collect();
    for (line_no, line) in lines {
        if line.is_empty() {
            continue;
        }
        if table.len() == expected_len {
            return Err(parse_err(line_no, "extra entry after a complete table"));
        }
        let (ids, colour) = parse_entry(line, line_no, k)?;
        if ids != expected {
            let msg = if !crate::tuple::is_increasing_over(&ids, n) {
                format!("{ids:?} is not a strictly increasing tuple over 1..={n}")
            } else if ids < expected {
                format!("{ids:?} is out of order or duplicated (expected {expected:?})")
            } else {
                format!("gap: expected {expected:?} before {ids:?}")
            };
            return Err(parse_err(line_no, msg));
        }
        if colour == 0 || colour > c {
            return Err(parse_err(
                line_no,
                format!("colour {colour} outside 1..={c}"),
            ));
        }
        table.push(colour);
        next_increasing(&mut expected, n);
    }
    if table.len() != expected_len {
        return Err(parse_err(
            text.lines().count(),
            format!("table ends after {} of {expected_len} entries", table.len()),
        ));
    }
    ColouringFunction::from_parts(indexer, c, table)
}

pub fn write_cf(f: &ColouringFunction) -> String {
    let mut out = String::with_capacity(16 + f.len() * (4 * f.arity() + 6));
    let _ = writeln!(
        out,
        "{CF_MAGIC} n={} k={} c={}",
        f.n(),
        f.arity(),
        f.colour_count()
    );
    for (tuple, colour) in f.entries() {
        for x in &tuple {
            let _ = write!(out, "{x} ");
        }
        let _ = writeln!(out, "-> {colour}");
    }
    out
}

/// One identifier per line; blank lines ignored. Must be a permutation of `1..=n`.
pub fn parse_permutation(text: &str) -> Result<Vec<u32>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_num::<u32>(l.trim(), i + 1, "identifier"))
        .collect()
}
