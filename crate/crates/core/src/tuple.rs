//! Identifier spaces and strictly increasing tuples with lexicographic ranking.

use std::fmt;

use crate::error::{Error, Result};

/// The identifier set `{1, ..., n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IdSpace(u32);

impl IdSpace {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyIdSpace);
        }
        Ok(IdSpace(n))
    }

    pub fn n(self) -> u32 {
        self.0
    }

    pub fn contains(self, id: u32) -> bool {
        (1..=self.0).contains(&id)
    }
}

/// A strictly increasing sequence of identifiers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IncreasingTuple(Vec<u32>);

impl IncreasingTuple {
    pub fn new(elements: Vec<u32>, space: IdSpace) -> Result<Self> {
        if !is_increasing_over(&elements, space.n()) || elements.is_empty() {
            return Err(Error::InvalidTuple {
                tuple: elements,
                n: space.n(),
            });
        }
        Ok(IncreasingTuple(elements))
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.0
    }
}

impl fmt::Display for IncreasingTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

pub(crate) fn is_increasing_over(elements: &[u32], n: u32) -> bool {
    let mut prev = 0;
    for &x in elements {
        if x <= prev || x > n {
            return false;
        }
        prev = x;
    }
    true
}

/// `C(n, k)`, or `None` when it does not fit in a `u64`.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

const BINOMIAL_CACHE_LIMIT: u64 = 1 << 22;

/// Bijection between increasing `k`-tuples over `{1..n}` and `0..C(n, k)`,
/// ordered lexicographically.
#[derive(Debug, Clone)]
pub struct TupleIndexer {
    n: u32,
    k: usize,
    size: u64,
    // binom[j][m] = C(m, j) for j <= k, m <= n; absent for very wide spaces
    cache: Option<Vec<Vec<u64>>>,
}

impl TupleIndexer {
    /// Fails only when `C(n, k)` overflows `u64`; callers apply their own size guard.
    pub fn new(n: u32, k: usize) -> Result<Self> {
        let size = binomial(n as u64, k as u64).ok_or_else(|| Error::TableTooLarge {
            entries: format!("C({n},{k})"),
            limit: u64::MAX,
        })?;
        let cells = (n as u64 + 1) * (k as u64 + 1);
        let cache = (cells <= BINOMIAL_CACHE_LIMIT).then(|| {
            (0..=k)
                .map(|j| {
                    (0..=n as u64)
                        .map(|m| binomial(m, j as u64).unwrap_or(u64::MAX))
                        .collect()
                })
                .collect()
        });
        Ok(TupleIndexer { n, k, size, cache })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn arity(&self) -> usize {
        self.k
    }

    /// Number of tuples, `C(n, k)`.
    pub fn len(&self) -> u64 {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    #[inline]
    fn binom(&self, m: u32, j: usize) -> u64 {
        match &self.cache {
            Some(t) if j <= self.k => t[j][m as usize],
            _ => binomial(m as u64, j as u64).unwrap_or(u64::MAX),
        }
    }

    /// Rank of an already-validated tuple.
    #[inline]
    pub fn rank_unchecked(&self, tuple: &[u32]) -> u64 {
        let k = self.k;
        let n = self.n;
        let mut rank = 0u64;
        let mut prev = 0u32;
        for (i, &x) in tuple.iter().enumerate() {
            let j = k - i - 1;
            // sum_{v = prev+1}^{x-1} C(n - v, j) = C(n - prev, j + 1) - C(n - x + 1, j + 1)
            if x > prev + 1 {
                rank += self.binom(n - prev, j + 1) - self.binom(n - x + 1, j + 1);
            }
            prev = x;
        }
        rank
    }

    pub fn rank(&self, tuple: &[u32]) -> Result<u64> {
        if tuple.len() != self.k {
            return Err(Error::ArityMismatch {
                tuple: tuple.to_vec(),
                expected: self.k,
            });
        }
        if !is_increasing_over(tuple, self.n) {
            return Err(Error::InvalidTuple {
                tuple: tuple.to_vec(),
                n: self.n,
            });
        }
        Ok(self.rank_unchecked(tuple))
    }

    pub fn unrank_into(&self, mut rank: u64, out: &mut Vec<u32>) -> Result<()> {
        if rank >= self.size {
            return Err(Error::RankOutOfRange {
                rank,
                size: self.size,
            });
        }
        out.clear();
        let mut prev = 0u32;
        for i in 0..self.k {
            let j = self.k - i - 1;
            let mut x = prev + 1;
            if j == 0 {
                x += rank as u32;
                rank = 0;
            } else {
                loop {
                    let block = self.binom(self.n - x, j);
                    if rank < block {
                        break;
                    }
                    rank -= block;
                    x += 1;
                }
            }
            out.push(x);
            prev = x;
        }
        Ok(())
    }

    pub fn unrank(&self, rank: u64) -> Result<Vec<u32>> {
        let mut out = Vec::with_capacity(self.k);
        self.unrank_into(rank, &mut out)?;
        Ok(out)
    }

    /// All tuples in rank order.
    pub fn iter(&self) -> IncreasingTuples {
        IncreasingTuples::new(self.n, self.k)
    }
}

pub fn tuple_rank(tuple: &IncreasingTuple, n: u32) -> Result<u64> {
    TupleIndexer::new(n, tuple.arity())?.rank(tuple.as_slice())
}

pub fn tuple_unrank(rank: u64, n: u32, k: usize) -> Result<IncreasingTuple> {
    if k == 0 {
        return Err(Error::ZeroArity);
    }
    let space = IdSpace::new(n)?;
    let elements = TupleIndexer::new(n, k)?.unrank(rank)?;
    IncreasingTuple::new(elements, space)
}

/// Advances `tuple` to its lexicographic successor among increasing tuples
/// over `{1..n}`. Returns `false` (leaving the tuple untouched) at the last one.
pub fn next_increasing(tuple: &mut [u32], n: u32) -> bool {
    let k = tuple.len();
    for i in (0..k).rev() {
        let ceiling = n - (k - 1 - i) as u32;
        if tuple[i] < ceiling {
            tuple[i] += 1;
            for j in i + 1..k {
                tuple[j] = tuple[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Iterator over increasing `k`-tuples of `{1..n}` in lexicographic order.
#[derive(Debug, Clone)]
pub struct IncreasingTuples {
    n: u32,
    current: Option<Vec<u32>>,
}

impl IncreasingTuples {
    pub fn new(n: u32, k: usize) -> Self {
        let current = (k as u64 <= n as u64).then(|| (1..=k as u32).collect());
        IncreasingTuples { n, current }
    }

    /// Starts at an arbitrary tuple (inclusive).
    pub fn starting_at(n: u32, first: Vec<u32>) -> Self {
        IncreasingTuples {
            n,
            current: Some(first),
        }
    }
}

impl Iterator for IncreasingTuples {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let out = self.current.take()?;
        let mut succ = out.clone();
        if next_increasing(&mut succ, self.n) {
            self.current = Some(succ);
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), Some(10));
        assert_eq!(binomial(4, 5), Some(0));
        assert_eq!(binomial(0, 0), Some(1));
        assert_eq!(binomial(62, 31), Some(465428353255261088));
        assert_eq!(binomial(200, 100), None);
    }

    #[test]
    fn rank_examples() {
        let space = IdSpace::new(3).unwrap();
        let t = IncreasingTuple::new(vec![1, 2], space).unwrap();
        assert_eq!(tuple_rank(&t, 3).unwrap(), 0);
        let t = IncreasingTuple::new(vec![2, 3], space).unwrap();
        assert_eq!(tuple_rank(&t, 3).unwrap(), 2);
    }

    #[test]
    fn rank_matches_lex_enumeration() {
        // enumerate C(5,3) by nested loops; (1,3,4) is the 4th tuple
        let mut all = Vec::new();
        for a in 1..=5u32 {
            for b in a + 1..=5 {
                for c in b + 1..=5 {
                    all.push(vec![a, b, c]);
                }
            }
        }
        assert_eq!(all.len(), 10);
        let idx = TupleIndexer::new(5, 3).unwrap();
        for (r, t) in all.iter().enumerate() {
            assert_eq!(idx.rank(t).unwrap(), r as u64);
        }
        assert_eq!(idx.rank(&[1, 3, 4]).unwrap(), 3);
        assert_eq!(tuple_unrank(3, 5, 3).unwrap().as_slice(), &[1, 3, 4]);
    }

    #[test]
    fn unrank_examples() {
        assert_eq!(tuple_unrank(0, 4, 2).unwrap().as_slice(), &[1, 2]);
        assert_eq!(tuple_unrank(5, 4, 2).unwrap().as_slice(), &[3, 4]);
        assert!(matches!(
            tuple_unrank(6, 4, 2),
            Err(Error::RankOutOfRange { .. })
        ));
    }

    #[test]
    fn round_trip_six_choose_three() {
        let idx = TupleIndexer::new(6, 3).unwrap();
        for r in 0..idx.len() {
            assert_eq!(idx.rank(&idx.unrank(r).unwrap()).unwrap(), r);
        }
    }

    #[test]
    fn rejects_bad_tuples() {
        let idx = TupleIndexer::new(5, 2).unwrap();
        assert!(matches!(idx.rank(&[2, 2]), Err(Error::InvalidTuple { .. })));
        assert!(matches!(idx.rank(&[3, 1]), Err(Error::InvalidTuple { .. })));
        assert!(matches!(idx.rank(&[1, 6]), Err(Error::InvalidTuple { .. })));
        assert!(matches!(idx.rank(&[1]), Err(Error::ArityMismatch { .. })));
        assert!(IdSpace::new(0).is_err());
    }

    #[test]
    fn iterator_counts() {
        assert_eq!(IncreasingTuples::new(7, 3).count(), 35);
        assert_eq!(IncreasingTuples::new(2, 3).count(), 0);
        assert_eq!(IncreasingTuples::new(3, 3).count(), 1);
    }

    #[test]
    fn uncached_indexer_agrees() {
        // k = 1 over a wide space skips the binomial cache
        let idx = TupleIndexer::new(5_000_000, 1).unwrap();
        assert!(idx.cache.is_none());
        assert_eq!(idx.rank(&[4_999_999]).unwrap(), 4_999_998);
        assert_eq!(idx.unrank(17).unwrap(), vec![18]);
        let idx = TupleIndexer::new(2_000_000, 2).unwrap();
        assert!(idx.cache.is_none());
        let r = idx.rank(&[1234, 1_999_999]).unwrap();
        assert_eq!(idx.unrank(r).unwrap(), vec![1234, 1_999_999]);
    }
}
