//! Decision procedures for the description logics SHIQ and SI.
//!
//! Concepts and roles live in [`syntax`]. [`shiq::decide_sat`] and
//! [`si::si_decide_sat`] decide concept satisfiability with respect to a
//! role box; [`kb`] reduces terminologies and subsumption to that problem;
//! [`oracle`] evaluates concepts in finite interpretations and searches for
//! small models, to cross-check the tableau engines.

pub mod engine;
pub mod format;
pub mod kb;
pub mod oracle;
pub mod shiq;
pub mod si;
pub mod syntax;
mod table;
pub mod trace;

pub use engine::{Answer, BoundKind, EngineError, EngineOptions, EngineStats, Verdict};
pub use syntax::{Concept, Role, RoleBox};
