//! Finite fragments of Goode's pseudoplanes.

pub mod fragment;
pub mod phi;
pub mod witness;

pub use fragment::{build_fragment, Fragment, Letter, VertexInfo};
pub use phi::{eval_phi, PhiEval, PhiStructure};
pub use witness::{build_goode_witness, check_drop_one_agreement, AgreementReport, DropReport, GoodeWitness, SortMap};
