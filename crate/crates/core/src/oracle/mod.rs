//! Model semantics, bounded model search and tableau checking, kept
//! independent of the engines so that they can be tested against it.

mod interp;
mod model;
mod sat;
mod tableau;

pub use interp::{eval_concept, transitive_closure, Interpretation, Relation};
pub use model::{find_model, find_model_exhaustive, find_model_with, ModelSearch, OracleError};
pub use tableau::{
    model_to_tableau, unravel_witness, validate_tableau, validate_tableau_as, Logic, TableauReport,
    TableauStructure, TableauViolation, UnravelError,
};
