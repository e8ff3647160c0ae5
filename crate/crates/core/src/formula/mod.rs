//! Formulas: first-order `∈`-formulas and infinitary forcing-language formulas.

pub mod first_order;
pub mod infinitary;

pub use first_order::{
    appropriate, fo_satisfies, lex_min_appropriate, psi_unique, translate_star, FoFormula,
    StarContext, StarTranslation,
};
pub use infinitary::{decode, encode, nnf, nu_mu, nu_mu_unguarded, GodelCode, InfFormula};
