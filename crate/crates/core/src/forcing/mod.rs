//! Forcing relations over finite preorders: a semantic oracle over generic
//! cones and the syntactic recursions it is checked against.

pub mod atomic;
pub mod boolean_value;
pub mod first_order;
pub mod semantic;
pub mod star;

pub use atomic::{
    decidability_frontier, forces_via_nu_mu, syntactic_forces_atomic, truth_lemma_check, Atomic,
    AtomicForcing, TruthLemma,
};
pub use boolean_value::{formula_to_ro, BooleanValuation};
pub use first_order::{fo_holds_at, forces_fo, semantic_forces_fo, FoForcing, NamePool};
pub use semantic::{cone_generics, semantic_forces, SemanticOracle, Verdict};
pub use star::{restricted_equivalence, restricted_forces, StarForcing};
