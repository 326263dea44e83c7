//! Finite relational structures and mechanical checks of arity lower bounds,
//! parity reducts, Johnson-graph homogeneity and labelled free pseudoplanes.
//!
//! Everything here works with quantifier-free types over finite (or
//! implicitly represented) structures. Statements about elementary types in
//! infinite saturated models are out of reach; a witness found in a finite
//! structure certifies a theory-level bound only when that structure embeds
//! in the intended model with quantifier-free types preserved.

pub mod arity;
pub mod combin;
pub mod config;
pub mod distality;
pub mod error;
pub mod generators;
pub mod johnson_homogeneity;
pub mod pseudoplane;
pub mod reproduce;
pub mod structures;

pub use error::{Error, Result};
pub use structures::{Elem, QfType, Relational, Signature, Structure, SubtypeProfile};
