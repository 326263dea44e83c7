//! Generators for the four structure families.

pub mod cherlin_lachlan;
pub mod hypergraph;
pub mod johnson;

pub use cherlin_lachlan::{gen_cherlin_lachlan, CherlinLachlan};
pub use hypergraph::{edge_sets, extension_deficiency, gen_hypergraph, parity_reduct, HypergraphMode, KayGraphPair};
pub use johnson::{gen_johnson, JohnsonStructure};
