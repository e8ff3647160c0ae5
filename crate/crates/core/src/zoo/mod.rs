//! Concrete forcing notions: collapses with projection families, Friedman's
//! forcing for copying a ground model, and two-step iterations.

pub mod collapse;
pub mod friedman;
pub mod iteration;
pub mod projection;

pub use collapse::{CollapseCondition, CollapseForcing, CollapseOrder, Slot, Variant};
pub use friedman::{Decoded, FriedmanCondition, FriedmanForcing, FriedmanOrder};
pub use iteration::{
    star_star_lift, two_step, CheckNamed, EvaluatedForcing, Iteration, NamedForcing,
};
pub use projection::{
    approachability_instance, ApproachabilityReport, LawOutcome, ProjectionFamily, LAWS,
};
