//! Ordered tuples of distinct identifiers and explicit rule tables over them.
//!
//! `rule-v1` format: a header `rule-v1 n=<n> T=<T>` followed by one line
//! `x_1 ... x_{2T+1} -> colour` for every sequence of `2T+1` distinct
//! identifiers from `1..=n`, in lexicographic order.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::format::{parse_entry, parse_header, parse_num};
use crate::limits::Limits;

pub const RULE_MAGIC: &str = "rule-v1";

/// `n! / (n-k)!`, or `None` on overflow.
pub fn falling_factorial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    (0..k).try_fold(1u64, |acc, i| acc.checked_mul(n - i))
}

/// Lexicographic bijection between length-`k` sequences of distinct
/// identifiers from `1..=n` and `0..n!/(n-k)!`.
#[derive(Debug, Clone)]
pub struct ArrangementIndexer {
    n: u32,
    k: usize,
    // weights[i] = (n-i-1)! / (n-k)!
    weights: Vec<u64>,
    size: u64,
}

impl ArrangementIndexer {
    pub fn new(n: u32, k: usize, limits: &Limits) -> Result<Self> {
        let size = limits.check_entries(falling_factorial(n as u64, k as u64))?;
        let weights = (0..k)
            .map(|i| falling_factorial(n as u64 - i as u64 - 1, (k - i - 1) as u64).unwrap_or(0))
            .collect();
        Ok(ArrangementIndexer {
            n,
            k,
            weights,
            size,
        })
    }

    pub fn len(&self) -> u64 {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn arity(&self) -> usize {
        self.k
    }

    pub fn rank(&self, seq: &[u32]) -> Result<u64> {
        if seq.len() != self.k
            || seq.iter().any(|&x| x == 0 || x > self.n)
            || (1..seq.len()).any(|i| seq[..i].contains(&seq[i]))
        {
            return Err(Error::InvalidTuple {
                tuple: seq.to_vec(),
                n: self.n,
            });
        }
        let mut rank = 0u64;
        for (i, &x) in seq.iter().enumerate() {
            let smaller_used = seq[..i].iter().filter(|&&y| y < x).count() as u64;
            rank += (x as u64 - 1 - smaller_used) * self.weights[i];
        }
        Ok(rank)
    }

    pub fn unrank(&self, mut rank: u64) -> Result<Vec<u32>> {
        if rank >= self.size {
            return Err(Error::RankOutOfRange {
                rank,
                size: self.size,
            });
        }
        let mut unused: Vec<u32> = (1..=self.n).collect();
        let mut out = Vec::with_capacity(self.k);
        for w in &self.weights {
            let idx = (rank / w) as usize;
            rank %= w;
            out.push(unused.remove(idx));
        }
        Ok(out)
    }
}

/// Colours for every ordered window of a radius-`T` algorithm on ids `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleTable {
    radius: usize,
    n: u32,
    table: Vec<u8>,
}

impl RuleTable {
    pub fn new(n: u32, radius: usize, table: Vec<u8>, limits: &Limits) -> Result<Self> {
        let ix = ArrangementIndexer::new(n, 2 * radius + 1, limits)?;
        if table.len() as u64 != ix.len() {
            return Err(Error::NotTotal {
                n,
                k: 2 * radius + 1,
                expected: ix.len(),
                got: table.len() as u64,
            });
        }
        if let Some((rank, &colour)) = table
            .iter()
            .enumerate()
            .find(|(_, &c)| !(1..=3).contains(&c))
        {
            return Err(Error::ColourOutOfRange {
                rank: rank as u64,
                colour: colour as u32,
                colour_count: 3,
            });
        }
        Ok(RuleTable { radius, n, table })
    }

    pub fn from_fn<F: Fn(&[u32]) -> u8>(
        n: u32,
        radius: usize,
        limits: &Limits,
        rule: F,
    ) -> Result<Self> {
        let ix = ArrangementIndexer::new(n, 2 * radius + 1, limits)?;
        let table = (0..ix.len())
            .map(|r| rule(&ix.unrank(r).expect("in range")))
            .collect();
        Self::new(n, radius, table, limits)
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn table(&self) -> &[u8] {
        &self.table
    }

    pub fn indexer(&self) -> ArrangementIndexer {
        ArrangementIndexer::new(self.n, 2 * self.radius + 1, &Limits::new(u64::MAX))
            .expect("validated")
    }

    pub fn get(&self, window: &[u32]) -> Result<u32> {
        let r = self.indexer().rank(window)?;
        Ok(self.table[r as usize] as u32)
    }
}

pub fn write_rule(rule: &RuleTable) -> String {
    let ix = rule.indexer();
    let mut out = String::new();
    let _ = writeln!(out, "{RULE_MAGIC} n={} T={}", rule.n, rule.radius);
    for (r, colour) in rule.table.iter().enumerate() {
        for x in ix.unrank(r as u64).expect("in range") {
            let _ = write!(out, "{x} ");
        }
        let _ = writeln!(out, "-> {colour}");
    }
    out
}

pub fn parse_rule(text: &str, limits: &Limits) -> Result<RuleTable> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "empty input".into(),
    })?;
    let fields = parse_header(header, RULE_MAGIC, &["n", "T"])?;
    let n: u32 = parse_num(fields[0], hline, "n")?;
    let radius: usize = parse_num(fields[1], hline, "T")?;
    let ix = ArrangementIndexer::new(n, 2 * radius + 1, limits)?;
    let mut table = Vec::with_capacity(ix.len() as usize);
    for (line_no, line) in lines {
        let (ids, colour) = parse_entry(line, line_no, 2 * radius + 1)?;
        let expected_rank = table.len() as u64;
        match ix.rank(&ids) {
            Ok(r) if r == expected_rank => {}
            _ => {
                let expected = ix.unrank(expected_rank).ok();
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected window {expected:?}, got {ids:?}"),
                });
            }
        }
        if !(1..=3).contains(&colour) {
            return Err(Error::Parse {
                line: line_no,
                message: format!("colour {colour} outside 1..=3"),
            });
        }
        table.push(colour as u8);
    }
    if table.len() as u64 != ix.len() {
        return Err(Error::Parse {
            line: text.lines().count(),
            message: format!("table ends after {} of {} entries", table.len(), ix.len()),
        });
    }
    RuleTable::new(n, radius, table, limits)
}
