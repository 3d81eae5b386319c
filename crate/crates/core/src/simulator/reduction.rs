//! Reference colour reduction for directed cycles.
//!
//! Identifiers `1..=n` start as colours `0..n`. Each reduction round
//! replaces a node's colour by `2i + b`, where `i` is the lowest bit in which
//! it differs from its predecessor's colour and `b` is its own bit there.
//! From a palette of `m` colours this leaves at most `2 * bits(m - 1)`; the
//! schedule repeats until six colours remain. Three cleanup rounds then move
//! colours 5, 4 and 3 to the smallest value in `{0, 1, 2}` unused by either
//! neighbour, and the result is shifted to `{1, 2, 3}`.
//!
//! The schedule depends only on `n`, so the output at a node is a function
//! of the identifiers within distance `reduction_rounds(n) + 3`; see
//! [`window_colour`].

use serde::Serialize;

use super::{check_outcome, CycleInstance, RunOutcome};
use crate::error::{Error, Result};

fn bit_length(x: u64) -> u32 {
    64 - x.leading_zeros()
}

/// Palette sizes before each reduction round, for identifiers `1..=n`.
fn palette_schedule(n: u32) -> Vec<u64> {
    let mut m = n as u64;
    let mut out = Vec::new();
    while m > 6 {
        out.push(m);
        m = 2 * bit_length(m - 1) as u64;
    }
    out
}

/// Number of bit-reduction rounds before the cleanup for identifiers `1..=n`.
pub fn reduction_rounds(n: u32) -> usize {
    palette_schedule(n).len()
}

/// Radius at which [`window_colour`] is defined.
pub fn radius_needed(n: u32) -> usize {
    reduction_rounds(n) + 3
}

#[inline]
fn reduce(own: u32, pred: u32) -> u32 {
    let i = (own ^ pred).trailing_zeros();
    2 * i + ((own >> i) & 1)
}

#[inline]
fn smallest_free(a: u32, b: u32) -> u32 {
    (0..3)
        .find(|&c| c != a && c != b)
        .expect("two neighbours leave a free colour")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoundSummary {
    pub round: usize,
    pub phase: &'static str,
    /// Distinct colours present after this round.
    pub colour_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionRun {
    pub n: u32,
    pub rounds: Vec<RoundSummary>,
    pub total_rounds: usize,
    pub outcome: RunOutcome,
}

fn distinct(colours: &[u32]) -> usize {
    let mut v = colours.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

/// Runs the reduction round-synchronously on `cycle`. Requires `n >= 2`.
pub fn reference_colour_reduction(cycle: &CycleInstance) -> Result<ReductionRun> {
    let ids = cycle.ids();
    let n = ids.len();
    if n < 2 {
        return Err(Error::InvalidCycle(
            "colour reduction needs at least 2 nodes".into(),
        ));
    }
    let mut colours: Vec<u32> = ids.iter().map(|&x| x - 1).collect();
    let mut rounds = Vec::new();
    let cv_rounds = reduction_rounds(n as u32);
    for r in 0..cv_rounds {
        let prev = colours.clone();
        for i in 0..n {
            colours[i] = reduce(prev[i], prev[(i + n - 1) % n]);
        }
        rounds.push(RoundSummary {
            round: r + 1,
            phase: "reduce",
            colour_count: distinct(&colours),
        });
    }
    for (j, target) in [5u32, 4, 3].into_iter().enumerate() {
        let prev = colours.clone();
        for i in 0..n {
            if prev[i] == target {
                colours[i] = smallest_free(prev[(i + n - 1) % n], prev[(i + 1) % n]);
            }
        }
        rounds.push(RoundSummary {
            round: cv_rounds + j + 1,
            phase: "cleanup",
            colour_count: distinct(&colours),
        });
    }
    for c in colours.iter_mut() {
        *c += 1;
    }
    let total_rounds = rounds.len();
    let outcome = check_outcome(colours, total_rounds);
    Ok(ReductionRun {
        n: n as u32,
        rounds,
        total_rounds,
        outcome,
    })
}

/// Output of the reduction at the centre of `window` (length `2T + 1`), for
/// identifiers from `1..=n`. Requires `T >= radius_needed(n)`.
pub fn window_colour(window: &[u32], n: u32) -> u32 {
    let len = window.len();
    let centre = len / 2;
    let mut colours: Vec<u32> = window.iter().map(|&x| x - 1).collect();
    // colours[lo..=hi] are exact; the rest are stale
    let (mut lo, mut hi) = (0usize, len - 1);
    for _ in 0..reduction_rounds(n) {
        let prev = colours.clone();
        for i in lo + 1..=hi {
            colours[i] = reduce(prev[i], prev[i - 1]);
        }
        lo += 1;
    }
    for target in [5u32, 4, 3] {
        let prev = colours.clone();
        for i in lo + 1..hi {
            if prev[i] == target {
                colours[i] = smallest_free(prev[i - 1], prev[i + 1]);
            }
        }
        lo += 1;
        hi -= 1;
    }
    debug_assert!(lo <= centre && centre <= hi);
    colours[centre] + 1
}
