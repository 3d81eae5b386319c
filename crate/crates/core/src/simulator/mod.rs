//! Radius-`T` algorithms on directed cycles.
//!
//! A node at position `i` of a cycle sees the identifiers
//! `(ids[i-T], ..., ids[i], ..., ids[i+T])` read along the cycle direction,
//! with itself in the centre, and outputs a colour in `{1, 2, 3}`.
//! Restricting such a rule to increasing windows gives a `(2T+1)`-ary
//! 3-colouring function; when the rule colours every cycle properly the
//! restricted table passes [`ColouringFunction::verify`].

pub mod arrangement;
pub mod reduction;

use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::colouring::{check_table_size, ColouringFunction};
use crate::error::{Error, Result};
use crate::limits::Limits;

pub use arrangement::{parse_rule, write_rule, ArrangementIndexer, RuleTable, RULE_MAGIC};
pub use reduction::{reference_colour_reduction, ReductionRun};

/// A directed cycle whose nodes carry the identifiers `1..=n` in some order.
/// The successor of position `i` is position `i + 1 (mod n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CycleInstance {
    ids: Vec<u32>,
}

impl CycleInstance {
    pub fn new(ids: Vec<u32>) -> Result<Self> {
        let n = ids.len();
        if n == 0 {
            return Err(Error::InvalidCycle("empty cycle".into()));
        }
        let mut seen = vec![false; n + 1];
        for &x in &ids {
            if x == 0 || x as usize > n {
                return Err(Error::InvalidCycle(format!(
                    "identifier {x} outside 1..={n}"
                )));
            }
            if std::mem::replace(&mut seen[x as usize], true) {
                return Err(Error::InvalidCycle(format!("identifier {x} repeated")));
            }
        }
        Ok(CycleInstance { ids })
    }

    /// Uniformly shuffled cycle from a ChaCha8 stream seeded with `seed`.
    pub fn random(n: u32, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_with(n, &mut rng)
    }

    pub fn random_with<R: rand::Rng>(n: u32, rng: &mut R) -> Result<Self> {
        let mut ids: Vec<u32> = (1..=n).collect();
        ids.shuffle(rng);
        Self::new(ids)
    }

    pub fn ids(&self) -> &[u32] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Identifiers within distance `radius` of position `i`, centre at index `radius`.
    pub fn neighbourhood(&self, i: usize, radius: usize) -> Vec<u32> {
        let n = self.ids.len();
        (0..=2 * radius)
            .map(|j| self.ids[(i + n * (radius + 1) + j - radius) % n])
            .collect()
    }

    /// The cycle `(x_1, ..., x_{k+1}, rest ascending)`: the first `k+1` nodes carry
    /// the given identifiers consecutively.
    pub fn with_run(run: &[u32], n: u32) -> Result<Self> {
        let mut ids = run.to_vec();
        ids.extend((1..=n).filter(|x| !run.contains(x)));
        Self::new(ids)
    }
}

pub type RuleFn = Arc<dyn Fn(&[u32]) -> u32 + Send + Sync>;

/// How a radius-`T` algorithm turns a window into a colour.
#[derive(Clone)]
pub enum Rule {
    /// Explicit colours for every ordered window.
    Table(RuleTable),
    /// A colouring-function table applied to the window's identifiers in sorted order.
    SortedView(ColouringFunction),
    /// `((centre - 1) mod 3) + 1`.
    Bucket,
    /// The reference reduction evaluated locally, for identifiers `1..=n`.
    Reduction {
        n: u32,
    },
    Custom(RuleFn),
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Table(t) => write!(f, "Table(n={}, T={})", t.n(), t.radius()),
            Rule::SortedView(cf) => write!(f, "SortedView(n={}, k={})", cf.n(), cf.arity()),
            Rule::Bucket => write!(f, "Bucket"),
            Rule::Reduction { n } => write!(f, "Reduction(n={n})"),
            Rule::Custom(_) => write!(f, "Custom"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RadiusAlgorithm {
    radius: usize,
    rule: Rule,
}

impl RadiusAlgorithm {
    pub fn from_table(table: RuleTable) -> Self {
        RadiusAlgorithm {
            radius: table.radius(),
            rule: Rule::Table(table),
        }
    }

    /// Uses `cf` on sorted windows; `cf` must have odd arity `2T + 1`.
    pub fn sorted_view(cf: ColouringFunction) -> Result<Self> {
        let k = cf.arity();
        if k.is_multiple_of(2) {
            return Err(Error::WrongArity {
                needed: "odd (2T+1)",
                got: k,
            });
        }
        Ok(RadiusAlgorithm {
            radius: (k - 1) / 2,
            rule: Rule::SortedView(cf),
        })
    }

    pub fn bucket(radius: usize) -> Self {
        RadiusAlgorithm {
            radius,
            rule: Rule::Bucket,
        }
    }

    /// The reference reduction as a radius-`T` rule; `T` defaults to the
    /// smallest radius at which it is defined.
    pub fn reduction(n: u32, radius: Option<usize>) -> Result<Self> {
        let needed = reduction::radius_needed(n);
        let radius = radius.unwrap_or(needed);
        if radius < needed {
            return Err(Error::Unsupported(format!(
                "reduction for n = {n} needs radius >= {needed}, got {radius}"
            )));
        }
        Ok(RadiusAlgorithm {
            radius,
            rule: Rule::Reduction { n },
        })
    }

    pub fn custom<F>(radius: usize, rule: F) -> Self
    where
        F: Fn(&[u32]) -> u32 + Send + Sync + 'static,
    {
        RadiusAlgorithm {
            radius,
            rule: Rule::Custom(Arc::new(rule)),
        }
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn window_len(&self) -> usize {
        2 * self.radius + 1
    }

    pub fn rule(&self) -> &Rule {
        &self.rule
    }

    /// Colour for one window of `2T + 1` identifiers; rejects outputs outside `{1,2,3}`.
    pub fn evaluate(&self, window: &[u32]) -> Result<u32> {
        debug_assert_eq!(window.len(), self.window_len());
        let colour = match &self.rule {
            Rule::Table(t) => t.get(window)?,
            Rule::SortedView(cf) => {
                let mut sorted = window.to_vec();
                sorted.sort_unstable();
                cf.get(&sorted)?
            }
            Rule::Bucket => (window[self.radius] - 1) % 3 + 1,
            Rule::Reduction { n } => {
                if let Some(&x) = window.iter().find(|&&x| x == 0 || x > *n) {
                    return Err(Error::InvalidTuple {
                        tuple: vec![x],
                        n: *n,
                    });
                }
                reduction::window_colour(window, *n)
            }
            Rule::Custom(f) => f(window),
        };
        if !(1..=3).contains(&colour) {
            return Err(Error::RuleOutput {
                window: window.to_vec(),
                colour,
            });
        }
        Ok(colour)
    }

    fn check_cycle_length(&self, n: u64) -> Result<()> {
        let needed = 2 * self.radius as u64 + 2;
        if n < needed {
            return Err(Error::CycleTooShort {
                n: n as u32,
                radius: self.radius,
                needed,
            });
        }
        Ok(())
    }
}

/// Per-node colours of one run and the edges they colour improperly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunOutcome {
    pub colours: Vec<u32>,
    pub proper: bool,
    /// Position pairs `[i, i+1 mod n]` with equal colours.
    pub violations: Vec<[usize; 2]>,
    pub rounds_used: usize,
}

pub(crate) fn check_outcome(colours: Vec<u32>, rounds_used: usize) -> RunOutcome {
    let n = colours.len();
    let violations: Vec<[usize; 2]> = (0..n)
        .filter(|&i| colours[i] == colours[(i + 1) % n])
        .map(|i| [i, (i + 1) % n])
        .collect();
    RunOutcome {
        proper: violations.is_empty(),
        colours,
        violations,
        rounds_used,
    }
}

/// Runs `alg` at every node of `cycle`. Requires `n >= 2T + 2` so that the
/// windows of adjacent nodes together span distinct identifiers.
pub fn run_on_cycle(alg: &RadiusAlgorithm, cycle: &CycleInstance) -> Result<RunOutcome> {
    alg.check_cycle_length(cycle.len() as u64)?;
    let colours = (0..cycle.len())
        .into_par_iter()
        .map(|i| alg.evaluate(&cycle.neighbourhood(i, alg.radius())))
        .collect::<Result<Vec<u32>>>()?;
    Ok(check_outcome(colours, alg.radius()))
}

/// Tabulates `alg` on increasing windows over `{1..n}` as a `(2T+1)`-ary
/// 3-colouring function.
pub fn extract_colouring_function(alg: &RadiusAlgorithm, n: u32) -> Result<ColouringFunction> {
    extract_with_limits(alg, n, &Limits::default())
}

pub fn extract_with_limits(
    alg: &RadiusAlgorithm,
    n: u32,
    limits: &Limits,
) -> Result<ColouringFunction> {
    alg.check_cycle_length(n as u64)?;
    let k = alg.window_len();
    let indexer = check_table_size(n, k, limits)?;
    let table = indexer
        .iter()
        .map(|t| alg.evaluate(&t))
        .collect::<Result<Vec<u32>>>()?;
    ColouringFunction::from_parts(indexer, 3, table)
}

/// First cycle over `{1..n}` (permutations in lexicographic order) on which
/// `alg` is improper, or `None` if it colours all `n!` of them properly.
pub fn find_improper_cycle(alg: &RadiusAlgorithm, n: u32) -> Result<Option<CycleInstance>> {
    if n > 10 {
        return Err(Error::Unsupported(format!(
            "exhaustive cycle check limited to n <= 10, got {n}"
        )));
    }
    alg.check_cycle_length(n as u64)?;
    let mut perm: Vec<u32> = (1..=n).collect();
    loop {
        let cycle = CycleInstance { ids: perm.clone() };
        let len = perm.len();
        // evaluate edge by edge so the first bad edge stops the scan
        let radius = alg.radius();
        let first = alg.evaluate(&cycle.neighbourhood(0, radius))?;
        let mut prev = first;
        for i in 1..len {
            let cur = alg.evaluate(&cycle.neighbourhood(i, radius))?;
            if cur == prev {
                return Ok(Some(cycle));
            }
            prev = cur;
        }
        if prev == first {
            return Ok(Some(cycle));
        }
        if !next_permutation(&mut perm) {
            return Ok(None);
        }
    }
}

fn next_permutation(v: &mut [u32]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len())
        .rev()
        .find(|&j| v[j] > v[i - 1])
        .expect("pivot exists");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_validation() {
        assert!(CycleInstance::new(vec![]).is_err());
        assert!(CycleInstance::new(vec![1, 1]).is_err());
        assert!(CycleInstance::new(vec![1, 3]).is_err());
        assert!(CycleInstance::new(vec![2, 1, 3]).is_ok());
        let r = CycleInstance::random(50, 7).unwrap();
        assert_eq!(r, CycleInstance::random(50, 7).unwrap());
        assert_ne!(r, CycleInstance::random(50, 8).unwrap());
    }

    #[test]
    fn neighbourhood_wraps() {
        let c = CycleInstance::new(vec![5, 1, 4, 2, 3]).unwrap();
        assert_eq!(c.neighbourhood(0, 1), vec![3, 5, 1]);
        assert_eq!(c.neighbourhood(4, 2), vec![4, 2, 3, 5, 1]);
        assert_eq!(c.neighbourhood(2, 0), vec![4]);
    }

    #[test]
    fn bucket_on_triangle() {
        let c = CycleInstance::new(vec![1, 2, 3]).unwrap();
        let out = run_on_cycle(&RadiusAlgorithm::bucket(0), &c).unwrap();
        assert_eq!(out.colours, vec![1, 2, 3]);
        assert!(out.proper);
        let cf = extract_colouring_function(&RadiusAlgorithm::bucket(0), 3).unwrap();
        assert_eq!(cf.table(), &[1, 2, 3]);
        assert!(cf.verify().is_valid);
    }

    #[test]
    fn constant_rule_fails_everywhere() {
        let alg = RadiusAlgorithm::custom(1, |_| 1);
        let c = CycleInstance::random(9, 1).unwrap();
        let out = run_on_cycle(&alg, &c).unwrap();
        assert!(!out.proper);
        assert_eq!(out.violations.len(), 9);
        assert!(
            !extract_colouring_function(&alg, 9)
                .unwrap()
                .verify()
                .is_valid
        );
    }

    #[test]
    fn rejects_short_cycles_and_bad_outputs() {
        let alg = RadiusAlgorithm::bucket(2);
        let c = CycleInstance::new((1..=5).collect()).unwrap();
        assert!(matches!(
            run_on_cycle(&alg, &c),
            Err(Error::CycleTooShort { needed: 6, .. })
        ));
        let alg = RadiusAlgorithm::custom(0, |w| w[0]);
        let c = CycleInstance::new((1..=5).collect()).unwrap();
        assert!(matches!(
            run_on_cycle(&alg, &c),
            Err(Error::RuleOutput { colour: 4, .. })
        ));
    }

    #[test]
    fn sorted_view_recovers_table() {
        let cf = ColouringFunction::from_fn(6, 3, 3, &Limits::default(), |t| t[0] % 3 + 1).unwrap();
        let alg = RadiusAlgorithm::sorted_view(cf.clone()).unwrap();
        assert_eq!(alg.radius(), 1);
        assert_eq!(extract_colouring_function(&alg, 6).unwrap(), cf);
        let even = ColouringFunction::new(3, 2, 2, vec![1, 1, 2]).unwrap();
        assert!(RadiusAlgorithm::sorted_view(even).is_err());
    }

    #[test]
    fn windowed_reduction_matches_synchronous_run() {
        for (n, seed) in [(14u32, 0u64), (20, 1), (64, 2), (300, 3)] {
            let cycle = CycleInstance::random(n, seed).unwrap();
            let sync = reference_colour_reduction(&cycle).unwrap();
            let alg = RadiusAlgorithm::reduction(n, None).unwrap();
            let local = run_on_cycle(&alg, &cycle).unwrap();
            assert_eq!(local.colours, sync.outcome.colours, "n = {n}");
            assert!(local.proper);
        }
        assert!(RadiusAlgorithm::reduction(100, Some(2)).is_err());
    }

    #[test]
    fn exhaustive_cycle_check() {
        // bucket with T = 0 is proper on every cycle of 3 ids, not on 4
        assert_eq!(
            find_improper_cycle(&RadiusAlgorithm::bucket(0), 3).unwrap(),
            None
        );
        let bad = find_improper_cycle(&RadiusAlgorithm::bucket(0), 4)
            .unwrap()
            .unwrap();
        assert!(
            !run_on_cycle(&RadiusAlgorithm::bucket(0), &bad)
                .unwrap()
                .proper
        );
    }

    #[test]
    fn permutations_in_order() {
        let mut v = vec![1, 2, 3];
        let mut seen = vec![v.clone()];
        while next_permutation(&mut v) {
            seen.push(v.clone());
        }
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[5], vec![3, 2, 1]);
    }
}
