//! Resource guard shared by every table-producing operation.

use crate::error::{Error, Result};

/// Name of the environment variable that overrides [`Limits::max_table_entries`].
pub const GUARD_ENV: &str = "LOCALITY_LAB_GUARD";

/// Default maximum number of table entries (and of colours after a speedup).
pub const DEFAULT_MAX_TABLE_ENTRIES: u64 = 100_000_000;

/// Default cap on violating tuples kept in a [`crate::ValidityReport`].
pub const DEFAULT_MAX_VIOLATIONS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_table_entries: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_table_entries: DEFAULT_MAX_TABLE_ENTRIES,
        }
    }
}

impl Limits {
    pub fn new(max_table_entries: u64) -> Self {
        Limits { max_table_entries }
    }

    /// Reads [`GUARD_ENV`]; falls back to the default when unset.
    pub fn from_env() -> Result<Self> {
        match std::env::var(GUARD_ENV) {
            Ok(raw) => raw
                .trim()
                .parse::<u64>()
                .map(Limits::new)
                .map_err(|_| Error::Parse {
                    line: 0,
                    message: format!("{GUARD_ENV} must be a decimal entry count, got {raw:?}"),
                }),
            Err(_) => Ok(Limits::default()),
        }
    }

    pub(crate) fn check_entries(&self, entries: Option<u64>) -> Result<u64> {
        match entries {
            Some(e) if e <= self.max_table_entries => Ok(e),
            Some(e) => Err(Error::TableTooLarge {
                entries: e.to_string(),
                limit: self.max_table_entries,
            }),
            None => Err(Error::TableTooLarge {
                entries: "> 2^64".to_string(),
                limit: self.max_table_entries,
            }),
        }
    }
}
