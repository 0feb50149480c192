//! Concepts, roles, role hierarchies and the syntactic operations on them.

mod concept;
mod nnf;
mod rbox;
mod role;

pub use concept::Concept;
pub use nnf::{closure, extended_closure, negate, nnf, subconcepts};
pub use rbox::{close_hierarchy, RoleBox};
pub use role::{inv, Role};
