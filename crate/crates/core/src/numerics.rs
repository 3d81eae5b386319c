//! Iterated logarithm, power towers of twos, and the round lower bound.
//!
//! Everything is exact: `log*` is evaluated by comparing against tower
//! values (`log* x <= i` iff `x <= ^i 2`) instead of taking logarithms.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

/// Default budget for exact towers, in decimal digits.
pub const DEFAULT_DIGIT_BUDGET: u64 = 100_000;

/// Largest height whose tower is materialised for `log*` comparisons.
/// `^5 2 = 2^65536` has 19729 digits; `^6 2` cannot be stored.
const MAX_EXACT_HEIGHT: usize = 5;

fn towers() -> &'static [BigUint] {
    static TOWERS: OnceLock<Vec<BigUint>> = OnceLock::new();
    TOWERS.get_or_init(|| {
        let mut v = vec![BigUint::one()];
        for i in 1..=MAX_EXACT_HEIGHT {
            let exp = v[i - 1].to_u64().expect("small exponent");
            v.push(BigUint::one() << exp);
        }
        v
    })
}

/// `^i 2`, either exactly or by height alone when it is too large to print.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TowerValue {
    Exact(BigUint),
    Symbolic { height: u32 },
}

impl TowerValue {
    pub fn exact(&self) -> Option<&BigUint> {
        match self {
            TowerValue::Exact(v) => Some(v),
            TowerValue::Symbolic { .. } => None,
        }
    }

    /// Whether this value is at least `n`. Symbolic towers exceed any stored integer.
    pub fn at_least(&self, n: &BigUint) -> bool {
        match self {
            TowerValue::Exact(v) => v >= n,
            TowerValue::Symbolic { .. } => true,
        }
    }
}

impl fmt::Display for TowerValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TowerValue::Exact(v) => write!(f, "{v}"),
            TowerValue::Symbolic { height } => write!(f, "2^^{height}"),
        }
    }
}

impl Serialize for TowerValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn decimal_digits_of_pow2(exp: u64) -> u64 {
    (exp as f64 * std::f64::consts::LOG10_2).floor() as u64 + 1
}

pub fn power_tower(i: u32) -> TowerValue {
    power_tower_with_budget(i, DEFAULT_DIGIT_BUDGET)
}

pub fn power_tower_with_budget(i: u32, digit_budget: u64) -> TowerValue {
    let mut value = BigUint::one();
    for _ in 0..i {
        let exp = match value.to_u64() {
            Some(e) if decimal_digits_of_pow2(e) <= digit_budget => e,
            _ => return TowerValue::Symbolic { height: i },
        };
        value = BigUint::one() << exp;
    }
    TowerValue::Exact(value)
}

/// Least `h` for which `fits_under(^h 2)` holds.
fn log_star_by_towers(fits_under: impl Fn(&BigUint) -> bool) -> u32 {
    for (i, t) in towers().iter().enumerate() {
        if fits_under(t) {
            return i as u32;
        }
    }
    // Anything representable in memory is below ^6 2 = 2^(2^65536).
    MAX_EXACT_HEIGHT as u32 + 1
}

pub fn log_star(x: &BigUint) -> u32 {
    log_star_by_towers(|t| x <= t)
}

pub fn log_star_u64(x: u64) -> u32 {
    log_star(&BigUint::from(x))
}

/// `log*` of a non-negative rational; non-positive inputs give 0.
pub fn log_star_rational(x: &BigRational) -> u32 {
    if !x.is_positive() {
        return 0;
    }
    let numer = x.numer().magnitude();
    let denom = x.denom().magnitude();
    log_star_by_towers(|t| numer <= &(t * denom))
}

/// Parses `p`, `p/q`, or a finite decimal such as `2.5`.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((p, q)) = text.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let digits: BigInt = format!("{whole}{frac}").parse().ok()?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        return Some(BigRational::new(digits, scale));
    }
    text.parse::<BigInt>().ok().map(BigRational::from_integer)
}

/// Minimum round count `T >= log*(n)/2 - 1` for 3-colouring a directed `n`-cycle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoundBound {
    pub log_star: u32,
    /// `log*(n)/2 - 1` in lowest terms.
    #[serde(serialize_with = "ser_ratio")]
    pub bound: Ratio<i64>,
    /// `max(0, ceil(bound))`.
    pub min_rounds: u64,
}

fn ser_ratio<S: serde::Serializer>(r: &Ratio<i64>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(r)
}

pub fn round_lower_bound(n: &BigUint) -> RoundBound {
    let ls = log_star(n) as i64;
    let bound = Ratio::new(ls, 2) - 1;
    let ceil = bound.ceil().to_integer();
    RoundBound {
        log_star: ls as u32,
        bound,
        min_rounds: ceil.max(0) as u64,
    }
}

/// `E_j(c)` with `E_0(c) = c` and `E_j(c) = 2^E_{j-1}(c)`, saturating at `u64::MAX`.
pub fn iterated_exp2_saturating(c: u64, j: usize) -> u64 {
    let mut v = c;
    for _ in 0..j {
        v = if v >= 64 { u64::MAX } else { 1u64 << v };
    }
    v
}

/// Least `c >= 1` with `E_{k-1}(c) >= n`: fewer colours than this cannot
/// survive `k-1` speedups into an injective 1-ary colouring of `{1..n}`.
pub fn speedup_lower_bound(n: u64, k: usize) -> u64 {
    assert!(k >= 1, "arity must be positive");
    let mut c = 1;
    while iterated_exp2_saturating(c, k - 1) < n {
        c += 1;
    }
    c
}

/// Least `h` with `^h 2 >= c`.
pub fn tower_height_covering(c: &BigUint) -> u32 {
    log_star(c)
}

/// `ceil(log2 n)` for `n >= 1`.
pub fn ceil_log2(n: u64) -> u32 {
    assert!(n >= 1);
    if n == 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}
