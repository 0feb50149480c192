//! Text formats: knowledge-base files, witness files, domino systems and
//! Graphviz output.

mod domino;
mod dot;
mod kb;
mod sexpr;
mod witness;

pub use domino::{domino_gen, parse_domino_system, DominoError, DominoSystem};
pub use dot::{completion_tree_dot, si_tree_dot, trace_dot};
pub use kb::{parse_concept, parse_kb, parse_role, KbDocument, KbError, Query, RoleDecl};
pub use sexpr::{read_all, Pos, Sexpr, SyntaxError};
pub use witness::{witness_from_json, witness_to_json, WitnessError, WitnessFile, WitnessNode};
