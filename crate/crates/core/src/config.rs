use serde::{Deserialize, Serialize};

/// Environment variable that overrides the default seed.
pub const SEED_ENV: &str = "ARITY_LAB_SEED";

pub const DEFAULT_SEED: u64 = 7;

/// Resource caps shared by every generator and search.
///
/// Exceeding a cap is always reported as a resource error, never by
/// silently truncating the output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Largest universe an implicit structure may have.
    pub max_universe: u64,
    /// Largest number of relation rows a materialized structure may hold.
    pub max_table_rows: u64,
    /// Largest number of tuples an orbit enumeration may visit.
    pub orbit_budget: u64,
    /// Largest number of vertices a pseudoplane fragment may hold.
    pub max_fragment_vertices: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_universe: u64::from(u32::MAX),
            max_table_rows: 5_000_000,
            orbit_budget: 20_000_000,
            max_fragment_vertices: 2_000_000,
        }
    }
}

/// Seed from the environment, falling back to [`DEFAULT_SEED`].
pub fn default_seed() -> u64 {
    std::env::var(SEED_ENV)
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SEED)
}
