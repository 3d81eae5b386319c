//! Exact minimum colour counts for `k`-ary colouring functions over `{1..n}`,
//! plus exhaustive and sampled enumeration of valid tables.
//!
//! Tuples are assigned in lexicographic order. When tuple `(x_1..x_k)` is
//! reached, the only constrained tuples already coloured are its left shift
//! neighbours `(y, x_1..x_{k-1})` with `y < x_1`; the right neighbours
//! `(x_2..x_k, z)` come later in the order.

use std::sync::atomic::{AtomicUsize, Ordering};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::colouring::{check_table_size, ColouringFunction};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::numerics::speedup_lower_bound;
use crate::tuple::{binomial, TupleIndexer};

/// Shift-neighbour ranks for every tuple, in compressed rows.
#[derive(Debug, Clone)]
pub struct ShiftConstraints {
    indexer: TupleIndexer,
    pred_offsets: Vec<usize>,
    preds: Vec<u32>,
    succ_offsets: Vec<usize>,
    succs: Vec<u32>,
}

impl ShiftConstraints {
    pub fn new(n: u32, k: usize, limits: &Limits) -> Result<Self> {
        let indexer = check_table_size(n, k, limits)?;
        // every increasing (k+1)-tuple contributes one edge in each direction
        limits.check_entries(binomial(n as u64, k as u64 + 1))?;
        let mut pred_offsets = Vec::with_capacity(indexer.len() as usize + 1);
        let mut succ_offsets = Vec::with_capacity(indexer.len() as usize + 1);
        let mut preds = Vec::new();
        let mut succs = Vec::new();
        let mut shifted = vec![0u32; k];
        for t in indexer.iter() {
            pred_offsets.push(preds.len());
            succ_offsets.push(succs.len());
            shifted[1..].copy_from_slice(&t[..k - 1]);
            for y in 1..t[0] {
                shifted[0] = y;
                preds.push(indexer.rank_unchecked(&shifted) as u32);
            }
            shifted[..k - 1].copy_from_slice(&t[1..]);
            for z in t[k - 1] + 1..=n {
                shifted[k - 1] = z;
                succs.push(indexer.rank_unchecked(&shifted) as u32);
            }
        }
        pred_offsets.push(preds.len());
        succ_offsets.push(succs.len());
        Ok(ShiftConstraints {
            indexer,
            pred_offsets,
            preds,
            succ_offsets,
            succs,
        })
    }

    pub fn len(&self) -> usize {
        self.indexer.len() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Ranks of `(y, x_1..x_{k-1})` for `y < x_1`, all earlier in lexicographic order.
    pub fn predecessors(&self, rank: usize) -> &[u32] {
        &self.preds[self.pred_offsets[rank]..self.pred_offsets[rank + 1]]
    }

    /// Ranks of `(x_2..x_k, z)` for `z > x_k`, all later in lexicographic order.
    pub fn successors(&self, rank: usize) -> &[u32] {
        &self.succs[self.succ_offsets[rank]..self.succ_offsets[rank + 1]]
    }

    #[inline]
    fn allows(&self, rank: usize, colour: u32, colours: &[u32]) -> bool {
        self.predecessors(rank)
            .iter()
            .all(|&p| colours[p as usize] != colour)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub n: u32,
    pub k: usize,
    pub min_colours: u32,
    pub witness: ColouringFunction,
    pub nodes_explored: u64,
    pub derived_lower_bound: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Exhaustion {
    pub n: u32,
    pub k: usize,
    pub c_max: u32,
    pub derived_lower_bound: u64,
    pub nodes_explored: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(SearchResult),
    Exhausted(Exhaustion),
}

impl SearchOutcome {
    pub fn found(self) -> Option<SearchResult> {
        match self {
            SearchOutcome::Found(r) => Some(r),
            SearchOutcome::Exhausted(_) => None,
        }
    }

    pub fn nodes_explored(&self) -> u64 {
        match self {
            SearchOutcome::Found(r) => r.nodes_explored,
            SearchOutcome::Exhausted(e) => e.nodes_explored,
        }
    }
}

/// Tuples whose colours are fixed before work is split across threads.
const PREFIX_DEPTH: usize = 6;

pub fn min_colours(n: u32, k: usize, c_max: u32) -> Result<SearchOutcome> {
    min_colours_with_limits(n, k, c_max, &Limits::default())
}

/// Iterative deepening on `c` from the speedup lower bound up to `c_max`,
/// each level a complete backtracking search with canonical colour
/// introduction. Runs on the current rayon pool; the outcome (including
/// `nodes_explored`) does not depend on the number of threads.
pub fn min_colours_with_limits(
    n: u32,
    k: usize,
    c_max: u32,
    limits: &Limits,
) -> Result<SearchOutcome> {
    if c_max == 0 {
        return Err(Error::ZeroColours);
    }
    let cons = ShiftConstraints::new(n, k, limits)?;
    let lower = speedup_lower_bound(n as u64, k);
    let mut nodes = 0u64;
    let mut c = lower;
    while c <= c_max as u64 {
        let (found, level_nodes) = canonical_search(&cons, c as u32);
        nodes += level_nodes;
        if let Some(table) = found {
            let witness = ColouringFunction::from_parts(cons.indexer.clone(), c as u32, table)?;
            return Ok(SearchOutcome::Found(SearchResult {
                n,
                k,
                min_colours: c as u32,
                witness,
                nodes_explored: nodes,
                derived_lower_bound: lower,
            }));
        }
        c += 1;
    }
    Ok(SearchOutcome::Exhausted(Exhaustion {
        n,
        k,
        c_max,
        derived_lower_bound: lower,
        nodes_explored: nodes,
    }))
}

/// First canonical valid table with at most `c` colours, in lexicographic
/// order of the table vector, and the number of search nodes visited.
fn canonical_search(cons: &ShiftConstraints, c: u32) -> (Option<Vec<u32>>, u64) {
    let total = cons.len();
    if total == 0 {
        return (Some(Vec::new()), 0);
    }
    let depth = PREFIX_DEPTH.min(total);
    let mut prefixes = Vec::new();
    let mut colours = vec![0u32; total];
    let prefix_nodes = backtrack(
        cons,
        c,
        true,
        &mut colours,
        0,
        depth,
        &mut |cols| {
            prefixes.push(cols[..depth].to_vec());
            false
        },
        &|| false,
    );
    if depth == total {
        return (prefixes.into_iter().next(), prefix_nodes);
    }

    let best = AtomicUsize::new(usize::MAX);
    let results: Vec<(Option<Vec<u32>>, u64)> = prefixes
        .par_iter()
        .enumerate()
        .map(|(i, prefix)| {
            if best.load(Ordering::Relaxed) < i {
                return (None, 0);
            }
            let mut colours = vec![0u32; total];
            colours[..depth].copy_from_slice(prefix);
            let mut found = None;
            let nodes = backtrack(
                cons,
                c,
                true,
                &mut colours,
                depth,
                total,
                &mut |cols| {
                    found = Some(cols.to_vec());
                    true
                },
                &|| best.load(Ordering::Relaxed) < i,
            );
            if found.is_some() {
                best.fetch_min(i, Ordering::Relaxed);
            }
            (found, nodes)
        })
        .collect();

    // Subtrees before the winner were searched to completion whatever the
    // thread count, so counting up to the winner is deterministic.
    let mut nodes = prefix_nodes;
    for (found, sub) in results {
        nodes += sub;
        if found.is_some() {
            return (found, nodes);
        }
    }
    (None, nodes)
}

/// Depth-first assignment of positions `from..to`, colours ascending.
/// Calls `on_leaf` at each complete assignment of `..to`; stops when it
/// returns `true` or `abort` fires. With `canonical`, a colour may only be
/// one more than the largest colour used so far. Returns nodes visited.
#[allow(clippy::too_many_arguments)]
fn backtrack(
    cons: &ShiftConstraints,
    c: u32,
    canonical: bool,
    colours: &mut [u32],
    from: usize,
    to: usize,
    on_leaf: &mut dyn FnMut(&[u32]) -> bool,
    abort: &dyn Fn() -> bool,
) -> u64 {
    let mut nodes = 0u64;
    if from == to {
        on_leaf(colours);
        return 0;
    }
    // prefix_max[i] = largest colour among positions < i
    let mut prefix_max = vec![0u32; to + 1];
    prefix_max[from] = colours[..from].iter().copied().max().unwrap_or(0);
    let mut pos = from;
    colours[pos] = 0;
    loop {
        if nodes & 0xFFFF == 0 && abort() {
            return nodes;
        }
        let ceiling = if canonical {
            c.min(prefix_max[pos] + 1)
        } else {
            c
        };
        let mut v = colours[pos] + 1;
        while v <= ceiling && !cons.allows(pos, v, colours) {
            v += 1;
        }
        if v <= ceiling {
            colours[pos] = v;
            nodes += 1;
            prefix_max[pos + 1] = prefix_max[pos].max(v);
            if pos + 1 == to {
                if on_leaf(colours) {
                    return nodes;
                }
            } else {
                pos += 1;
                colours[pos] = 0;
            }
        } else {
            colours[pos] = 0;
            if pos == from {
                return nodes;
            }
            pos -= 1;
        }
    }
}

/// Every valid `k`-ary `c`-colouring table over `{1..n}`, each exactly once,
/// in lexicographic order of the table vector.
pub fn enumerate_valid(n: u32, k: usize, c: u32) -> Result<ValidTables> {
    enumerate_valid_with_limits(n, k, c, &Limits::default())
}

pub fn enumerate_valid_with_limits(
    n: u32,
    k: usize,
    c: u32,
    limits: &Limits,
) -> Result<ValidTables> {
    if c == 0 {
        return Err(Error::ZeroColours);
    }
    let cons = ShiftConstraints::new(n, k, limits)?;
    let colours = vec![0; cons.len()];
    Ok(ValidTables {
        cons,
        c,
        colours,
        state: EnumState::Fresh,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EnumState {
    Fresh,
    Running,
    Done,
}

#[derive(Debug, Clone)]
pub struct ValidTables {
    cons: ShiftConstraints,
    c: u32,
    colours: Vec<u32>,
    state: EnumState,
}

impl Iterator for ValidTables {
    type Item = ColouringFunction;

    fn next(&mut self) -> Option<ColouringFunction> {
        let total = self.cons.len();
        let mut pos = match self.state {
            EnumState::Done => return None,
            EnumState::Fresh if total == 0 => {
                self.state = EnumState::Done;
                return ColouringFunction::from_parts(
                    self.cons.indexer.clone(),
                    self.c,
                    Vec::new(),
                )
                .ok();
            }
            EnumState::Fresh => 0,
            EnumState::Running => total - 1,
        };
        self.state = EnumState::Running;
        loop {
            let mut v = self.colours[pos] + 1;
            while v <= self.c && !self.cons.allows(pos, v, &self.colours) {
                v += 1;
            }
            if v <= self.c {
                self.colours[pos] = v;
                if pos + 1 == total {
                    return ColouringFunction::from_parts(
                        self.cons.indexer.clone(),
                        self.c,
                        self.colours.clone(),
                    )
                    .ok();
                }
                pos += 1;
                self.colours[pos] = 0;
            } else {
                self.colours[pos] = 0;
                if pos == 0 {
                    self.state = EnumState::Done;
                    return None;
                }
                pos -= 1;
            }
        }
    }
}

/// Seeded pseudorandom valid tables: randomized backtracking with restarts.
#[derive(Debug, Clone)]
pub struct Sampler {
    cons: ShiftConstraints,
    c: u32,
    rng: ChaCha8Rng,
    seed: u64,
    node_budget: u64,
    max_restarts: u32,
}

impl Sampler {
    pub fn new(n: u32, k: usize, c: u32, seed: u64, limits: &Limits) -> Result<Self> {
        if c == 0 {
            return Err(Error::ZeroColours);
        }
        let cons = ShiftConstraints::new(n, k, limits)?;
        let node_budget = 64 * cons.len() as u64 + 1024;
        Ok(Sampler {
            cons,
            c,
            rng: ChaCha8Rng::seed_from_u64(seed),
            seed,
            node_budget,
            max_restarts: 1000,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Next sampled table, or `None` if every restart ran out of budget.
    pub fn sample(&mut self) -> Option<ColouringFunction> {
        let total = self.cons.len();
        let palette: Vec<u32> = (1..=self.c).collect();
        for _ in 0..self.max_restarts {
            let mut colours = vec![0u32; total];
            // order[pos] is a shuffled palette; cursor[pos] indexes into it
            let mut order: Vec<Vec<u32>> = Vec::with_capacity(total);
            let mut cursor = vec![0usize; total];
            let mut pos = 0usize;
            let mut nodes = 0u64;
            if total == 0 {
                return ColouringFunction::from_parts(self.cons.indexer.clone(), self.c, colours)
                    .ok();
            }
            let mut shuffled = palette.clone();
            shuffled.shuffle(&mut self.rng);
            order.push(shuffled);
            loop {
                nodes += 1;
                if nodes > self.node_budget {
                    break;
                }
                let opts = &order[pos];
                let mut chosen = None;
                while cursor[pos] < opts.len() {
                    let v = opts[cursor[pos]];
                    cursor[pos] += 1;
                    if self.cons.allows(pos, v, &colours) {
                        chosen = Some(v);
                        break;
                    }
                }
                match chosen {
                    Some(v) => {
                        colours[pos] = v;
                        if pos + 1 == total {
                            return ColouringFunction::from_parts(
                                self.cons.indexer.clone(),
                                self.c,
                                colours,
                            )
                            .ok();
                        }
                        pos += 1;
                        let mut shuffled = palette.clone();
                        shuffled.shuffle(&mut self.rng);
                        if order.len() > pos {
                            order[pos] = shuffled;
                        } else {
                            order.push(shuffled);
                        }
                        cursor[pos] = 0;
                    }
                    None => {
                        colours[pos] = 0;
                        if pos == 0 {
                            return None;
                        }
                        pos -= 1;
                    }
                }
            }
        }
        None
    }
}

pub fn sample_valid(
    n: u32,
    k: usize,
    c: u32,
    seed: u64,
    count: usize,
) -> Result<Vec<ColouringFunction>> {
    let mut sampler = Sampler::new(n, k, c, seed, &Limits::default())?;
    Ok(std::iter::from_fn(|| sampler.sample())
        .take(count)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_valid(n: u32, k: usize, c: u32) -> Vec<Vec<u32>> {
        let size = binomial(n as u64, k as u64).unwrap() as u32;
        let mut out = Vec::new();
        for code in 0..(c as u64).pow(size) {
            let mut rest = code;
            let mut table = vec![0; size as usize];
            for slot in table.iter_mut().rev() {
                *slot = (rest % c as u64) as u32 + 1;
                rest /= c as u64;
            }
            let f = ColouringFunction::new(n, k, c, table.clone()).unwrap();
            if f.verify().is_valid {
                out.push(table);
            }
        }
        out
    }

    #[test]
    fn neighbours() {
        let cons = ShiftConstraints::new(5, 2, &Limits::default()).unwrap();
        let ix = TupleIndexer::new(5, 2).unwrap();
        let r = ix.rank(&[3, 4]).unwrap() as usize;
        let preds: Vec<Vec<u32>> = cons
            .predecessors(r)
            .iter()
            .map(|&p| ix.unrank(p as u64).unwrap())
            .collect();
        assert_eq!(preds, vec![vec![1, 3], vec![2, 3]]);
        let succs: Vec<Vec<u32>> = cons
            .successors(r)
            .iter()
            .map(|&p| ix.unrank(p as u64).unwrap())
            .collect();
        assert_eq!(succs, vec![vec![4, 5]]);
    }

    #[test]
    fn unary_needs_n_colours() {
        for n in 1..=8 {
            let r = min_colours(n, 1, n).unwrap().found().unwrap();
            assert_eq!(r.min_colours, n);
            assert!(r.witness.verify().is_valid);
        }
        assert!(matches!(
            min_colours(5, 1, 4).unwrap(),
            SearchOutcome::Exhausted(_)
        ));
    }

    #[test]
    fn small_examples() {
        let r = min_colours(2, 2, 3).unwrap().found().unwrap();
        assert_eq!(r.min_colours, 1);
        let r = min_colours(4, 2, 4).unwrap().found().unwrap();
        assert_eq!(r.min_colours, 2);
        assert_eq!(r.witness.colour_count(), 2);
        assert!(r.witness.verify().is_valid);
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(enumerate_valid(3, 2, 1).unwrap().count(), 0);
        let tables: Vec<Vec<u32>> = enumerate_valid(2, 1, 2)
            .unwrap()
            .map(|f| f.table().to_vec())
            .collect();
        assert_eq!(tables, vec![vec![1, 2], vec![2, 1]]);
        let tables: Vec<Vec<u32>> = enumerate_valid(3, 2, 2)
            .unwrap()
            .map(|f| f.table().to_vec())
            .collect();
        assert_eq!(tables, brute_force_valid(3, 2, 2));
        // no constraints: a single empty-or-free table family
        assert_eq!(enumerate_valid(2, 2, 3).unwrap().count(), 3);
        assert_eq!(enumerate_valid(2, 3, 2).unwrap().count(), 1);
    }

    #[test]
    fn enumerate_matches_brute_force_grid() {
        for (n, k, c) in [
            (4, 1, 4),
            (4, 2, 2),
            (4, 2, 3),
            (5, 2, 2),
            (4, 3, 2),
            (5, 3, 2),
        ] {
            let got: Vec<Vec<u32>> = enumerate_valid(n, k, c)
                .unwrap()
                .map(|f| f.table().to_vec())
                .collect();
            assert_eq!(got, brute_force_valid(n, k, c), "n={n} k={k} c={c}");
        }
    }

    #[test]
    fn sampler_is_seeded() {
        let a = sample_valid(7, 2, 3, 42, 20).unwrap();
        let b = sample_valid(7, 2, 3, 42, 20).unwrap();
        assert_eq!(a.len(), 20);
        assert_eq!(a, b);
        assert!(a.iter().all(|f| f.verify().is_valid));
        let c = sample_valid(7, 2, 3, 43, 20).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn sampler_gives_up_when_infeasible() {
        assert!(sample_valid(5, 1, 4, 0, 1).unwrap().is_empty());
    }

    #[test]
    fn thread_count_does_not_change_outcome() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| min_colours(8, 2, 8).unwrap())
        };
        let one = run(1);
        assert_eq!(one, run(4));
        assert_eq!(one.found().unwrap().min_colours, 3);
    }
}
