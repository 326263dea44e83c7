//! Arity lower bounds: witness search and verification, the set-system
//! induction, and the example families' witnesses.

pub mod canned;
pub mod search;
pub mod setsys;
pub mod witness;

pub use search::{arity_witness_search, AllTuples, JohnsonOrbitReps, SearchOutcome, TupleSource};
pub use setsys::{build_set_systems, set_system_levels, verify_set_systems, SetSystemPair, SetSystemReport};
pub use witness::{make_witness, verify_witness, Witness, WitnessReport, FINITE_PROVISO};
