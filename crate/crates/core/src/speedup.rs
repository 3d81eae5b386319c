//! The arity-reducing speedup transformation, the unary base case, and
//! certificates for the iterated argument.
//!
//! Given a `k`-ary `c`-colouring `A`, the speedup `B` maps each increasing
//! `(k-1)`-tuple `t` to the set `{ A(t, y) : y > last(t) }`, encoded as an
//! integer in `1..=2^c`. If `A` satisfies the shift constraint then so does
//! `B`: the colour `A(x_1..x_k)` lies in `B(x_1..x_{k-1})`, and equality of
//! `B(x_1..x_{k-1})` with `B(x_2..x_k)` would put it in the latter as well,
//! producing a shifted pair with equal `A`-colours.

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::colouring::{check_table_size, ColouringFunction, ValidityReport};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::numerics::{
    log_star_u64, power_tower, speedup_lower_bound, tower_height_covering, TowerValue,
};
use crate::tuple::next_increasing;

/// Subsets of `{1..c}` as integers `1..=2^c`: `S -> 1 + sum_{i in S} 2^(i-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubsetEncoding {
    colour_count: u32,
}

impl SubsetEncoding {
    /// Supports up to 63 colours so that codes fit in a `u64`.
    pub fn new(colour_count: u32) -> Result<Self> {
        if colour_count == 0 {
            return Err(Error::ZeroColours);
        }
        if colour_count > 63 {
            return Err(Error::ColourCountTooLarge {
                colour_count: format!("2^{colour_count}"),
                limit: u64::MAX,
            });
        }
        Ok(SubsetEncoding { colour_count })
    }

    pub fn colour_count(self) -> u32 {
        self.colour_count
    }

    /// Number of codes, `2^c`.
    pub fn code_count(self) -> u64 {
        1u64 << self.colour_count
    }

    /// Panics on colours outside `1..=c`.
    pub fn encode<I: IntoIterator<Item = u32>>(self, colours: I) -> u64 {
        let mask = colours.into_iter().fold(0u64, |m, c| {
            assert!(
                c >= 1 && c <= self.colour_count,
                "colour {c} outside 1..={}",
                self.colour_count
            );
            m | (1 << (c - 1))
        });
        mask + 1
    }

    pub fn decode(self, code: u64) -> Option<Vec<u32>> {
        if code == 0 || code > self.code_count() {
            return None;
        }
        let mask = code - 1;
        Some(
            (1..=self.colour_count)
                .filter(|i| mask & (1 << (i - 1)) != 0)
                .collect(),
        )
    }
}

/// Applies one speedup step. Works on any table; validity is only preserved
/// when the input is valid. The result always has `2^c` colours.
pub fn speedup(a: &ColouringFunction) -> Result<ColouringFunction> {
    speedup_with_limits(a, &Limits::default())
}

pub fn speedup_with_limits(a: &ColouringFunction, limits: &Limits) -> Result<ColouringFunction> {
    let k = a.arity();
    if k < 2 {
        return Err(Error::WrongArity {
            needed: ">= 2",
            got: k,
        });
    }
    let c = a.colour_count();
    let new_count = next_colour_count(c, limits).ok_or_else(|| Error::ColourCountTooLarge {
        colour_count: format!("2^{c}"),
        limit: limits.max_table_entries,
    })?;
    let n = a.n();
    let indexer = check_table_size(n, k - 1, limits)?;
    let src = a.indexer();
    let src_table = a.table();

    const CHUNK: usize = 1 << 12;
    let mut table = vec![0u32; indexer.len() as usize];
    table
        .par_chunks_mut(CHUNK)
        .enumerate()
        .for_each(|(ci, out)| {
            let mut t = indexer.unrank((ci * CHUNK) as u64).expect("in range");
            let mut ext = Vec::with_capacity(k);
            let len = out.len();
            for (i, slot) in out.iter_mut().enumerate() {
                let last = t[k - 2];
                let mut mask = 0u64;
                if last < n {
                    // (t, last+1), (t, last+2), ..., (t, n) have consecutive ranks
                    ext.clear();
                    ext.extend_from_slice(&t);
                    ext.push(last + 1);
                    let start = src.rank_unchecked(&ext) as usize;
                    for &colour in &src_table[start..start + (n - last) as usize] {
                        mask |= 1 << (colour - 1);
                    }
                }
                *slot = (mask + 1) as u32;
                if i + 1 < len {
                    next_increasing(&mut t, n);
                }
            }
        });
    ColouringFunction::from_parts(indexer, new_count, table)
}

fn next_colour_count(c: u32, limits: &Limits) -> Option<u32> {
    if c >= 32 {
        return None;
    }
    let next = 1u64 << c;
    (next <= limits.max_table_entries && next <= u32::MAX as u64).then_some(next as u32)
}

/// Result of checking a unary colouring function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BaseVerdict {
    pub n: u32,
    #[serde(serialize_with = "as_decimal")]
    pub colour_count: u64,
    /// All `n` values pairwise distinct.
    pub valid: bool,
    pub colour_count_at_least_n: bool,
    /// Lexicographically first pair `x_1 < x_2` with equal colours.
    pub witness: Option<[u32; 2]>,
}

pub fn base_check(f: &ColouringFunction) -> Result<BaseVerdict> {
    if f.arity() != 1 {
        return Err(Error::WrongArity {
            needed: "1",
            got: f.arity(),
        });
    }
    // first and second occurrence of each colour; the witness is the repeated
    // colour whose first occurrence is earliest
    let mut seen: std::collections::HashMap<u32, (u32, Option<u32>)> = Default::default();
    for (i, &colour) in f.table().iter().enumerate() {
        let x = i as u32 + 1;
        seen.entry(colour)
            .and_modify(|e| {
                e.1.get_or_insert(x);
            })
            .or_insert((x, None));
    }
    let witness = seen.values().filter_map(|&(a, b)| b.map(|b| [a, b])).min();
    let verdict = BaseVerdict {
        n: f.n(),
        colour_count: f.colour_count() as u64,
        valid: witness.is_none(),
        colour_count_at_least_n: f.colour_count() >= f.n(),
        witness,
    };
    debug_assert!(!verdict.valid || verdict.colour_count_at_least_n);
    Ok(verdict)
}

fn as_decimal<S: Serializer>(v: &u64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub arity: usize,
    #[serde(serialize_with = "as_decimal")]
    pub colour_count: u64,
    /// Fewest colours any valid function of this arity over `{1..n}` can use.
    #[serde(serialize_with = "as_decimal")]
    pub required_colour_count: u64,
    /// Tower relaxation of the colour count: `^(h+i) 2` at step `i`.
    pub tower_bound: TowerValue,
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LogStarInequality {
    pub arity: usize,
    /// Least `h` with `^h 2 >= c` for the input colour count (2 for 3 colours).
    pub tower_start_height: u32,
    /// `arity + tower_start_height - 1`, i.e. `k + 1` for 3 colours.
    pub lhs: u64,
    pub log_star_n: u32,
    pub holds: bool,
    pub statement: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Conclusion {
    /// Final exact colour count is at least `n`.
    pub exact_bound_holds: bool,
    /// `^(h + k - 1) 2`.
    pub tower_bound: TowerValue,
    pub tower_bound_holds: bool,
    pub log_star_inequality: LogStarInequality,
}

/// Certificate for the iterated speedup of a valid `k`-ary function down to arity 1.
#[derive(Debug, Clone, Serialize)]
pub struct SpeedupTrace {
    pub n: u32,
    pub steps: Vec<TraceStep>,
    pub base_verdict: BaseVerdict,
    pub conclusion: Conclusion,
    #[serde(skip)]
    pub final_table: ColouringFunction,
}

impl SpeedupTrace {
    /// Colour counts grow by exactly `c -> 2^c` and arities drop by one to 1.
    pub fn is_consistent(&self) -> bool {
        let steps_ok = self.steps.windows(2).all(|w| {
            w[1].arity + 1 == w[0].arity
                && w[0].colour_count < 64
                && w[1].colour_count == 1u64 << w[0].colour_count
        });
        let last = self.steps.last();
        steps_ok
            && last.map(|s| s.arity) == Some(1)
            && last.map(|s| s.colour_count) == Some(self.final_table.colour_count() as u64)
            && base_check(&self.final_table).ok().as_ref() == Some(&self.base_verdict)
    }
}

pub fn iterate_speedup(a: &ColouringFunction) -> Result<SpeedupTrace> {
    iterate_speedup_with_limits(a, &Limits::default())
}

/// Verifies `a`, applies the speedup `k-1` times (re-verifying each result),
/// and checks the unary base case.
pub fn iterate_speedup_with_limits(a: &ColouringFunction, limits: &Limits) -> Result<SpeedupTrace> {
    let report: ValidityReport = a.verify();
    if !report.is_valid {
        return Err(Error::InvalidInput(Box::new(report)));
    }
    let n = a.n();
    let k = a.arity();
    let start_height = tower_height_covering(&BigUint::from(a.colour_count()));

    let step_of = |f: &ColouringFunction, i: usize, valid: bool| TraceStep {
        arity: f.arity(),
        colour_count: f.colour_count() as u64,
        required_colour_count: speedup_lower_bound(n as u64, f.arity()),
        tower_bound: power_tower(start_height + i as u32),
        valid,
    };

    let mut steps = vec![step_of(a, 0, true)];
    let mut current = a.clone();
    for i in 1..k {
        let next = speedup_with_limits(&current, limits).map_err(|e| match e.kind() {
            crate::ErrorKind::Guard => Error::TraceGuard {
                step: i,
                arity: current.arity() - 1,
                colour_count: format!("2^{}", current.colour_count()),
            },
            _ => e,
        })?;
        let valid = next.verify_with_cap(1).is_valid;
        steps.push(step_of(&next, i, valid));
        current = next;
    }

    let base_verdict = base_check(&current)?;
    let n_big = BigUint::from(n);
    let tower_bound = power_tower(start_height + k as u32 - 1);
    let lhs = k as u64 + start_height as u64 - 1;
    let log_star_n = log_star_u64(n as u64);
    let holds = lhs >= log_star_n as u64;
    let statement = format!(
        "k + h - 1 = {k} + {start_height} - 1 = {lhs} {} log*({n}) = {log_star_n}",
        if holds { ">=" } else { "<" }
    );
    let conclusion = Conclusion {
        exact_bound_holds: base_verdict.valid && base_verdict.colour_count_at_least_n,
        tower_bound_holds: tower_bound.at_least(&n_big),
        tower_bound,
        log_star_inequality: LogStarInequality {
            arity: k,
            tower_start_height: start_height,
            lhs,
            log_star_n,
            holds,
            statement,
        },
    };
    Ok(SpeedupTrace {
        n,
        steps,
        base_verdict,
        conclusion,
        final_table: current,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    // B(t) straight from the set definition, by scanning every k-tuple.
    fn speedup_by_definition(a: &ColouringFunction) -> Vec<u64> {
        let enc = SubsetEncoding::new(a.colour_count()).unwrap();
        let k = a.arity();
        crate::tuple::IncreasingTuples::new(a.n(), k - 1)
            .map(|t| {
                let set: Vec<u32> = a
                    .entries()
                    .filter(|(x, _)| x[..k - 1] == t[..])
                    .map(|(_, c)| c)
                    .collect();
                enc.encode(set)
            })
            .collect()
    }

    #[test]
    fn encoding_examples() {
        let e = SubsetEncoding::new(3).unwrap();
        assert_eq!(e.encode([]), 1);
        assert_eq!(e.encode([1]), 2);
        assert_eq!(e.encode([2]), 3);
        assert_eq!(e.encode([1, 2, 3]), 8);
        assert_eq!(e.decode(8), Some(vec![1, 2, 3]));
        assert_eq!(e.decode(0), None);
        assert_eq!(e.decode(9), None);
    }

    #[test]
    fn encoding_bijective_up_to_16() {
        for c in 1..=16u32 {
            let e = SubsetEncoding::new(c).unwrap();
            for code in 1..=e.code_count() {
                let set = e.decode(code).unwrap();
                assert_eq!(e.encode(set), code);
            }
        }
    }

    #[test]
    fn worked_example() {
        let a = ColouringFunction::new(3, 2, 2, vec![1, 1, 2]).unwrap();
        let b = speedup(&a).unwrap();
        assert_eq!((b.arity(), b.colour_count()), (1, 4));
        assert_eq!(b.table(), &[2, 3, 1]);
        assert!(b.verify().is_valid);
        let v = base_check(&b).unwrap();
        assert!(v.valid && v.colour_count_at_least_n);
        assert_eq!(v.witness, None);
    }

    #[test]
    fn two_ids_one_colour() {
        let a = ColouringFunction::new(2, 2, 1, vec![1]).unwrap();
        let b = speedup(&a).unwrap();
        assert_eq!((b.colour_count(), b.table()), (2, &[2, 1][..]));
        assert!(b.verify().is_valid);
    }

    #[test]
    fn matches_definition_on_invalid_tables_too() {
        let a = ColouringFunction::from_fn(6, 3, 3, &Limits::default(), |t| {
            (t[0] * 7 + t[1] * 3 + t[2]) % 3 + 1
        })
        .unwrap();
        let b = speedup(&a).unwrap();
        let expected: Vec<u32> = speedup_by_definition(&a)
            .into_iter()
            .map(|c| c as u32)
            .collect();
        assert_eq!(b.table(), &expected[..]);
        assert_eq!(b.colour_count(), 8);
    }

    #[test]
    fn arity_one_rejected() {
        let a = ColouringFunction::new(3, 1, 3, vec![1, 2, 3]).unwrap();
        assert!(matches!(speedup(&a), Err(Error::WrongArity { .. })));
    }

    #[test]
    fn colour_guard() {
        let a = ColouringFunction::new(3, 2, 30, vec![1, 2, 3]).unwrap();
        let err = speedup(&a).unwrap_err();
        assert_eq!(err.kind(), crate::ErrorKind::Guard);
        assert!(speedup_with_limits(&a, &Limits::new(u32::MAX as u64)).is_ok());
    }

    #[test]
    fn base_check_examples() {
        let f = ColouringFunction::new(3, 1, 4, vec![2, 3, 1]).unwrap();
        let v = base_check(&f).unwrap();
        assert!(v.valid && v.colour_count_at_least_n);

        let f = ColouringFunction::new(1, 1, 1, vec![1]).unwrap();
        assert!(base_check(&f).unwrap().valid);

        let f = ColouringFunction::new(4, 1, 2, vec![2, 1, 1, 2]).unwrap();
        let v = base_check(&f).unwrap();
        assert!(!v.valid);
        assert_eq!(v.witness, Some([1, 4]));

        let f = ColouringFunction::new(3, 2, 2, vec![1, 1, 2]).unwrap();
        assert!(base_check(&f).is_err());
    }

    #[test]
    fn base_check_pigeonhole_exhaustive() {
        // every unary table with c < n has a witness pair that verify also reports
        for n in 2..=5u32 {
            for c in 1..n {
                let total = (c as u64).pow(n);
                for code in 0..total {
                    let mut rest = code;
                    let table: Vec<u32> = (0..n)
                        .map(|_| {
                            let d = rest % c as u64;
                            rest /= c as u64;
                            d as u32 + 1
                        })
                        .collect();
                    let f = ColouringFunction::new(n, 1, c, table).unwrap();
                    let v = base_check(&f).unwrap();
                    let [x1, x2] = v.witness.expect("pigeonhole");
                    assert!(x1 < x2);
                    assert_eq!(f.get(&[x1]).unwrap(), f.get(&[x2]).unwrap());
                    assert_eq!(f.verify().violations[0], vec![x1, x2]);
                }
            }
        }
    }

    #[test]
    fn trace_of_identity() {
        let f = ColouringFunction::new(5, 1, 5, vec![1, 2, 3, 4, 5]).unwrap();
        let t = iterate_speedup(&f).unwrap();
        assert_eq!(t.steps.len(), 1);
        assert!(t.base_verdict.valid);
        assert!(t.conclusion.exact_bound_holds);
        assert!(t.is_consistent());
    }

    #[test]
    fn trace_of_worked_example() {
        let a = ColouringFunction::new(3, 2, 2, vec![1, 1, 2]).unwrap();
        let t = iterate_speedup(&a).unwrap();
        let shape: Vec<(usize, u64)> = t.steps.iter().map(|s| (s.arity, s.colour_count)).collect();
        assert_eq!(shape, vec![(2, 2), (1, 4)]);
        assert!(t.is_consistent());
        assert!(t.conclusion.exact_bound_holds);
        // c = 2 covers ^1 2, so the inequality reads k + 1 - 1 >= log* n
        assert_eq!(t.conclusion.log_star_inequality.tower_start_height, 1);
        assert!(t.conclusion.log_star_inequality.holds);
    }

    #[test]
    fn trace_refuses_invalid_input() {
        let a = ColouringFunction::new(3, 1, 2, vec![1, 2, 1]).unwrap();
        match iterate_speedup(&a) {
            Err(Error::InvalidInput(r)) => assert_eq!(r.violations, vec![vec![1, 3]]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn trace_guard_reports_step() {
        // a valid 4-ary 3-colouring exists trivially when n = 4 (no constraints)
        let a = ColouringFunction::new(4, 4, 3, vec![1]).unwrap();
        match iterate_speedup(&a) {
            Err(Error::TraceGuard {
                step,
                arity,
                colour_count,
            }) => {
                assert_eq!((step, arity), (3, 1));
                assert_eq!(colour_count, "2^256");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn trace_json_uses_decimal_strings() {
        let a = ColouringFunction::new(3, 2, 2, vec![1, 1, 2]).unwrap();
        let t = iterate_speedup(&a).unwrap();
        let v = serde_json::to_value(&t).unwrap();
        assert_eq!(v["steps"][1]["colour_count"], "4");
        assert_eq!(v["base_verdict"]["valid"], true);
        assert!(v.get("final_table").is_none());
    }
}
