//! Executable tools for the `log* n` lower bound on 3-colouring directed cycles.
//!
//! A *`k`-ary `c`-colouring function* assigns a colour in `1..=c` to every
//! strictly increasing `k`-tuple of identifiers from `1..=n` such that
//! `f(x_1..x_k) != f(x_2..x_{k+1})` for every increasing `(k+1)`-tuple.
//! Any `T`-round algorithm that 3-colours directed `n`-cycles yields such a
//! function with `k = 2T + 1`.
//!
//! * [`colouring`]: tables and the verifier.
//! * [`speedup`]: the arity-reducing transformation and trace certificates.
//! * [`numerics`]: `log*`, power towers and the round bound.
//! * [`search`]: exact minimum colour counts and enumeration of valid tables.
//! * [`simulator`]: radius-`T` algorithms on cycles and extraction of tables.

pub mod colouring;
pub mod error;
pub mod format;
pub mod limits;
pub mod numerics;
pub mod search;
pub mod simulator;
pub mod speedup;
pub mod tuple;

pub use colouring::{verify, ColouringFunction, ValidityReport};
pub use error::{Error, ErrorKind, Result};
pub use limits::Limits;
pub use numerics::{log_star, power_tower, round_lower_bound, TowerValue};
pub use search::{enumerate_valid, min_colours, SearchOutcome, SearchResult};
pub use simulator::{CycleInstance, RadiusAlgorithm, RunOutcome};
pub use speedup::{
    base_check, iterate_speedup, speedup, BaseVerdict, SpeedupTrace, SubsetEncoding,
};
pub use tuple::{tuple_rank, tuple_unrank, IdSpace, IncreasingTuple, TupleIndexer};
