//! Increasing strata of a finite forcing with projection maps onto them.

use crate::error::{Error, Result};
use crate::names::{evaluate, Filter, PName};
use crate::order::{CondSet, Preorder};
use crate::zoo::collapse::{CollapseForcing, Variant};

/// Strata `P_0 ⊆ … ⊆ P_K` of `order = P_K` and maps `π_{α+1} : P_K → P_{α+1}`
/// for `α < K`.
#[derive(Clone, Debug)]
pub struct ProjectionFamily {
    order: Preorder,
    strata: Vec<CondSet>,
    projections: Vec<Vec<usize>>,
}

/// Result of one approachability law.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawOutcome {
    pub law: &'static str,
    /// First counterexample, if any.
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproachabilityReport {
    pub laws: Vec<LawOutcome>,
}

impl ApproachabilityReport {
    pub fn passes(&self) -> bool {
        self.laws.iter().all(|l| l.failure.is_none())
    }

    pub fn first_failure(&self) -> Option<&LawOutcome> {
        self.laws.iter().find(|l| l.failure.is_some())
    }
}

pub const LAWS: [&str; 6] = [
    "lands-in-stratum",
    "fixes-top",
    "monotone",
    "dense-image",
    "reflects-lower-stratum",
    "identity-on-lower-stratum",
];

impl ProjectionFamily {
    pub fn new(
        order: Preorder,
        strata: Vec<CondSet>,
        projections: Vec<Vec<usize>>,
    ) -> Result<ProjectionFamily> {
        let k = strata
            .len()
            .checked_sub(1)
            .ok_or_else(|| Error::Precondition("no strata".into()))?;
        if projections.len() != k {
            return Err(Error::Precondition(format!(
                "{} projections for {} strata",
                projections.len(),
                k + 1
            )));
        }
        if strata[k].count_ones(..) != order.len() {
            return Err(Error::Precondition(
                "the last stratum must be the whole forcing".into(),
            ));
        }
        for (beta, s) in strata.iter().enumerate() {
            if !s.contains(order.top()) {
                return Err(Error::Precondition(format!(
                    "stratum {beta} misses the top"
                )));
            }
            if beta > 0 && !strata[beta - 1].is_subset(s) {
                return Err(Error::Precondition(format!(
                    "stratum {beta} does not contain stratum {}",
                    beta - 1
                )));
            }
        }
        for pi in &projections {
            if pi.len() != order.len() || pi.iter().any(|&x| x >= order.len()) {
                return Err(Error::Precondition(
                    "projection is not a map on the forcing".into(),
                ));
            }
        }
        Ok(ProjectionFamily {
            order,
            strata,
            projections,
        })
    }

    pub fn order(&self) -> &Preorder {
        &self.order
    }

    /// `K`.
    pub fn height(&self) -> usize {
        self.projections.len()
    }

    pub fn stratum(&self, beta: usize) -> Result<&CondSet> {
        self.strata
            .get(beta)
            .ok_or_else(|| Error::OutOfStratum(format!("no stratum {beta}")))
    }

    /// `π_{α+1}(p)`.
    pub fn project(&self, alpha: usize, p: usize) -> Result<usize> {
        let pi = self
            .projections
            .get(alpha)
            .ok_or_else(|| Error::OutOfStratum(format!("no projection {alpha}+1")))?;
        Ok(pi[p])
    }

    /// Replaces `π_{α+1}`; used to build broken controls.
    pub fn with_projection(&self, alpha: usize, map: Vec<usize>) -> Result<ProjectionFamily> {
        let mut projections = self.projections.clone();
        *projections
            .get_mut(alpha)
            .ok_or_else(|| Error::OutOfStratum(format!("no projection {alpha}+1")))? = map;
        ProjectionFamily::new(self.order.clone(), self.strata.clone(), projections)
    }

    /// Checks every law for every `α < K`, exhaustively.
    pub fn check(&self) -> ApproachabilityReport {
        let mut failures: [Option<String>; 6] = Default::default();
        let p = &self.order;
        let n = p.len();
        let lab = |x: usize| p.label(x).to_string();
        for alpha in 0..self.height() {
            let pi = &self.projections[alpha];
            let upper = &self.strata[alpha + 1];
            let lower = &self.strata[alpha];
            let mut note = |law: usize, msg: String| {
                if failures[law].is_none() {
                    failures[law] = Some(format!("alpha={alpha}: {msg}"));
                }
            };
            for x in 0..n {
                if !upper.contains(pi[x]) {
                    note(0, format!("{} maps outside the stratum", lab(x)));
                }
            }
            if pi[p.top()] != p.top() {
                note(1, format!("top maps to {}", lab(pi[p.top()])));
            }
            for x in 0..n {
                for y in p.up(x).ones() {
                    if !p.leq(pi[x], pi[y]) {
                        note(2, format!("{} <= {} but images are not", lab(x), lab(y)));
                    }
                }
            }
            for x in 0..n {
                for q in p.down(pi[x]).ones().filter(|&q| upper.contains(q)) {
                    if !p.down(x).ones().any(|r| p.leq(pi[r], q)) {
                        note(3, format!("no r <= {} projects below {}", lab(x), lab(q)));
                    }
                }
            }
            for x in lower.ones() {
                for q in 0..n {
                    if p.leq(pi[q], x) && !p.leq(q, x) {
                        note(
                            4,
                            format!("image of {} is below {} but it is not", lab(q), lab(x)),
                        );
                    }
                }
                if pi[x] != x {
                    note(5, format!("{} moves to {}", lab(x), lab(pi[x])));
                }
            }
        }
        ApproachabilityReport {
            laws: LAWS
                .iter()
                .zip(failures)
                .map(|(&law, failure)| LawOutcome { law, failure })
                .collect(),
        }
    }

    /// `σ^G = σ^{π''G}` for names mentioning only stratum-`α` conditions.
    /// Returns the first name where the evaluations differ.
    pub fn generic_transfer(
        &self,
        alpha: usize,
        g: &Filter,
        names: &[PName],
    ) -> Result<Option<PName>> {
        let lower = self.stratum(alpha)?;
        let mut image = self.order.empty_set();
        for x in g.members() {
            image.insert(self.project(alpha, x)?);
        }
        let image = Filter::from_set(image);
        for sigma in names {
            if let Some(c) = sigma.conditions().into_iter().find(|&c| !lower.contains(c)) {
                return Err(Error::OutOfStratum(format!(
                    "{} is not in stratum {alpha}",
                    self.order.label(c)
                )));
            }
            if evaluate(sigma, g) != evaluate(sigma, &image) {
                return Ok(Some(sigma.clone()));
            }
        }
        Ok(None)
    }
}

/// The collapse forcing of height `λ` with strata given by the heights
/// `0..=λ` and projections capping values.
pub fn approachability_instance(
    slots: usize,
    lambda: usize,
    variant: Variant,
) -> Result<ProjectionFamily> {
    let c = CollapseForcing::new(slots, lambda, variant)?.explicit()?;
    let strata = (0..=lambda).map(|beta| c.stratum(beta)).collect();
    let projections = (0..lambda)
        .map(|alpha| c.projection(alpha))
        .collect::<Result<Vec<_>>>()?;
    ProjectionFamily::new(c.order.clone(), strata, projections)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forcing::cone_generics;

    #[test]
    fn collapse_families_are_approachable() {
        for variant in [Variant::Plain, Variant::Star, Variant::Geq] {
            let fam = approachability_instance(2, 3, variant).unwrap();
            let report = fam.check();
            assert!(report.passes(), "{variant:?}: {:?}", report.first_failure());
        }
        assert!(approachability_instance(2, 4, Variant::Plain)
            .unwrap()
            .check()
            .passes());
    }

    #[test]
    fn constant_projection_is_caught() {
        let fam = approachability_instance(1, 3, Variant::Plain).unwrap();
        let top = fam.order().top();
        let broken = fam
            .with_projection(1, vec![top; fam.order().len()])
            .unwrap();
        assert!(!broken.check().passes());
    }

    #[test]
    fn evaluations_transfer() {
        let fam = approachability_instance(2, 3, Variant::Plain).unwrap();
        let lower: Vec<usize> = fam.stratum(1).unwrap().ones().collect();
        let names: Vec<PName> = lower
            .iter()
            .map(|&c| PName::from_entries([(PName::empty(), c)]))
            .collect();
        for g in cone_generics(fam.order()) {
            assert_eq!(fam.generic_transfer(1, &g, &names).unwrap(), None);
        }
        let top = fam.order().top();
        let broken = fam
            .with_projection(1, vec![top; fam.order().len()])
            .unwrap();
        let g = &cone_generics(fam.order())[0];
        assert!(broken.generic_transfer(1, g, &names).unwrap().is_some());
    }
}
