//! Colouring-function tables and the shift-constraint verifier.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::limits::{Limits, DEFAULT_MAX_VIOLATIONS};
use crate::tuple::{next_increasing, IdSpace, TupleIndexer};

/// A total table from increasing `k`-tuples over `{1..n}` to colours `{1..c}`,
/// stored densely by lexicographic tuple rank.
///
/// Colours are range-checked on construction. The shift constraint is not:
/// invalid tables are representable so that [`ColouringFunction::verify`]
/// has something to reject.
#[derive(Debug, Clone)]
pub struct ColouringFunction {
    space: IdSpace,
    colour_count: u32,
    indexer: TupleIndexer,
    table: Vec<u32>,
}

impl PartialEq for ColouringFunction {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space
            && self.arity() == other.arity()
            && self.colour_count == other.colour_count
            && self.table == other.table
    }
}

impl Eq for ColouringFunction {}

/// Size check shared by everything that allocates a `k`-ary table over `{1..n}`.
pub fn check_table_size(n: u32, k: usize, limits: &Limits) -> Result<TupleIndexer> {
    if k == 0 {
        return Err(Error::ZeroArity);
    }
    IdSpace::new(n)?;
    let entries = crate::tuple::binomial(n as u64, k as u64);
    limits.check_entries(entries)?;
    TupleIndexer::new(n, k)
}

impl ColouringFunction {
    pub fn new(n: u32, k: usize, colour_count: u32, table: Vec<u32>) -> Result<Self> {
        Self::with_limits(n, k, colour_count, table, &Limits::default())
    }

    pub fn with_limits(
        n: u32,
        k: usize,
        colour_count: u32,
        table: Vec<u32>,
        limits: &Limits,
    ) -> Result<Self> {
        let indexer = check_table_size(n, k, limits)?;
        Self::from_parts(indexer, colour_count, table)
    }

    pub(crate) fn from_parts(
        indexer: TupleIndexer,
        colour_count: u32,
        table: Vec<u32>,
    ) -> Result<Self> {
        if colour_count == 0 {
            return Err(Error::ZeroColours);
        }
        if table.len() as u64 != indexer.len() {
            return Err(Error::NotTotal {
                n: indexer.n(),
                k: indexer.arity(),
                expected: indexer.len(),
                got: table.len() as u64,
            });
        }
        if let Some((rank, &colour)) = table
            .iter()
            .enumerate()
            .find(|(_, &c)| c == 0 || c > colour_count)
        {
            return Err(Error::ColourOutOfRange {
                rank: rank as u64,
                colour,
                colour_count,
            });
        }
        Ok(ColouringFunction {
            space: IdSpace::new(indexer.n())?,
            colour_count,
            indexer,
            table,
        })
    }

    /// Tabulates `rule` over every increasing `k`-tuple.
    pub fn from_fn<F>(n: u32, k: usize, colour_count: u32, limits: &Limits, rule: F) -> Result<Self>
    where
        F: Fn(&[u32]) -> u32,
    {
        let indexer = check_table_size(n, k, limits)?;
        let table = indexer.iter().map(|t| rule(&t)).collect();
        Self::from_parts(indexer, colour_count, table)
    }

    pub fn id_space(&self) -> IdSpace {
        self.space
    }

    pub fn n(&self) -> u32 {
        self.space.n()
    }

    pub fn arity(&self) -> usize {
        self.indexer.arity()
    }

    pub fn colour_count(&self) -> u32 {
        self.colour_count
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    pub fn indexer(&self) -> &TupleIndexer {
        &self.indexer
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn get(&self, tuple: &[u32]) -> Result<u32> {
        Ok(self.table[self.indexer.rank(tuple)? as usize])
    }

    /// `(tuple, colour)` pairs in rank order.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<u32>, u32)> + '_ {
        self.indexer.iter().zip(self.table.iter().copied())
    }

    /// Relabels the colours that actually occur to `1..=c'`, preserving their order.
    pub fn normalize(&self) -> ColouringFunction {
        let mut used: Vec<u32> = self.table.clone();
        used.sort_unstable();
        used.dedup();
        let table = self
            .table
            .iter()
            .map(|c| used.binary_search(c).expect("colour present") as u32 + 1)
            .collect();
        ColouringFunction {
            space: self.space,
            colour_count: (used.len() as u32).max(1),
            indexer: self.indexer.clone(),
            table,
        }
    }

    pub fn verify(&self) -> ValidityReport {
        self.verify_with_cap(DEFAULT_MAX_VIOLATIONS)
    }

    /// Checks `f(x_1..x_k) != f(x_2..x_{k+1})` for every increasing
    /// `(k+1)`-tuple. At most `max_violations` witnesses are kept, in
    /// lexicographic order; the total count is always exact.
    pub fn verify_with_cap(&self, max_violations: usize) -> ValidityReport {
        let n = self.n();
        let k = self.arity();
        let wide = match TupleIndexer::new(n, k + 1) {
            Ok(ix) => ix,
            // C(n, k+1) overflowing u64 cannot happen under the table guard
            Err(_) => unreachable!("constraint space exceeds u64"),
        };
        let total = wide.len();
        const CHUNK: u64 = 1 << 14;
        let chunks = total.div_ceil(CHUNK);
        let partials: Vec<(u64, Vec<Vec<u32>>)> = (0..chunks)
            .into_par_iter()
            .map(|ci| {
                let start = ci * CHUNK;
                let end = (start + CHUNK).min(total);
                let mut t = wide.unrank(start).expect("in range");
                let mut count = 0u64;
                let mut kept = Vec::new();
                for r in start..end {
                    let left = self.table[self.indexer.rank_unchecked(&t[..k]) as usize];
                    let right = self.table[self.indexer.rank_unchecked(&t[1..]) as usize];
                    if left == right {
                        count += 1;
                        if kept.len() < max_violations {
                            kept.push(t.clone());
                        }
                    }
                    if r + 1 < end {
                        next_increasing(&mut t, n);
                    }
                }
                (count, kept)
            })
            .collect();

        let mut total_violations = 0u64;
        let mut violations = Vec::new();
        for (count, kept) in partials {
            total_violations += count;
            for v in kept {
                if violations.len() < max_violations {
                    violations.push(v);
                }
            }
        }
        ValidityReport {
            is_valid: total_violations == 0,
            violation_count_exact: total_violations as usize == violations.len(),
            total_violations,
            violations,
        }
    }
}

/// Outcome of [`ColouringFunction::verify`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidityReport {
    pub is_valid: bool,
    /// Violating `(k+1)`-tuples in lexicographic order, possibly truncated.
    pub violations: Vec<Vec<u32>>,
    /// `false` when `violations` was truncated.
    pub violation_count_exact: bool,
    pub total_violations: u64,
}

pub fn verify(f: &ColouringFunction) -> ValidityReport {
    f.verify()
}
