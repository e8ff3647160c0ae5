//! Finite forcing workbench: hereditarily finite sets, preorders, Boolean
//! completions, names, formulas and forcing relations over finite posets.

pub mod boolean;
pub mod error;
pub mod forcing;
pub mod formula;
pub mod generic;
pub mod hf;
pub mod names;
pub mod order;
pub mod suite;
pub mod zoo;

pub use error::{Error, Result};
