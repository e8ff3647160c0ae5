//! The starred inclusion relation, optionally with every quantifier over
//! conditions restricted to a sub-universe:
//!
//! `p ⊩* σ⊆τ` iff for every `⟨ρ,s⟩∈σ` and `q ≤ p` there is `r ≤ q` such that
//! `r ≤ s` implies some `⟨π,t⟩∈τ` has `r ≤ t` and `r ⊩* ρ=π`.

use std::cell::RefCell;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::names::PName;
use crate::order::{CondSet, Preorder};
use crate::zoo::projection::ProjectionFamily;

pub struct StarForcing<'a> {
    order: &'a Preorder,
    universe: CondSet,
    memo: RefCell<HashMap<(PName, PName), CondSet>>,
}

impl<'a> StarForcing<'a> {
    /// Quantifiers range over the whole preorder.
    pub fn new(order: &'a Preorder) -> StarForcing<'a> {
        StarForcing::restricted(order, order.full_set())
    }

    /// Quantifiers range over `universe` only.
    pub fn restricted(order: &'a Preorder, universe: CondSet) -> StarForcing<'a> {
        StarForcing {
            order,
            universe,
            memo: RefCell::new(HashMap::new()),
        }
    }

    /// `{p : ∀q∈U, q≤p ∃r∈U, r≤q, r∈W}`.
    fn dense_in_universe(&self, w: &CondSet) -> CondSet {
        let mut wu = w.clone();
        wu.intersect_with(&self.universe);
        let mut hits = self.order.empty_set();
        for q in 0..self.order.len() {
            if !self.order.down(q).is_disjoint(&wu) {
                hits.insert(q);
            }
        }
        let mut out = self.order.empty_set();
        for p in 0..self.order.len() {
            let mut below = self.order.down(p).clone();
            below.intersect_with(&self.universe);
            if below.is_subset(&hits) {
                out.insert(p);
            }
        }
        out
    }

    pub fn sub_set(&self, sigma: &PName, tau: &PName) -> CondSet {
        let key = (sigma.clone(), tau.clone());
        if let Some(v) = self.memo.borrow().get(&key) {
            return v.clone();
        }
        let mut out = self.order.full_set();
        for (rho, s) in sigma.entries() {
            let mut w = self.order.down(*s).clone();
            w.toggle_range(..);
            for (pi, t) in tau.entries() {
                let mut part = self.eq_set(rho, pi);
                part.intersect_with(self.order.down(*t));
                w.union_with(&part);
            }
            out.intersect_with(&self.dense_in_universe(&w));
        }
        self.memo.borrow_mut().insert(key, out.clone());
        out
    }

    pub fn eq_set(&self, sigma: &PName, tau: &PName) -> CondSet {
        let mut s = self.sub_set(sigma, tau);
        s.intersect_with(&self.sub_set(tau, sigma));
        s
    }

    pub fn forces_sub(&self, p: usize, sigma: &PName, tau: &PName) -> bool {
        self.sub_set(sigma, tau).contains(p)
    }
}

fn check_stratum(family: &ProjectionFamily, alpha: usize, names: &[&PName]) -> Result<()> {
    let stratum = family.stratum(alpha)?;
    for sigma in names {
        if let Some(c) = sigma
            .conditions()
            .into_iter()
            .find(|&c| !stratum.contains(c))
        {
            return Err(Error::OutOfStratum(format!(
                "{} is not in stratum {alpha}",
                family.order().label(c)
            )));
        }
    }
    Ok(())
}

/// `π_{α+1}(p) ⊩^{*,α+1} σ⊆τ` for names mentioning only stratum-`α`
/// conditions.
pub fn restricted_forces(
    family: &ProjectionFamily,
    alpha: usize,
    p: usize,
    sigma: &PName,
    tau: &PName,
) -> Result<bool> {
    check_stratum(family, alpha, &[sigma, tau])?;
    let star = StarForcing::restricted(family.order(), family.stratum(alpha + 1)?.clone());
    Ok(star.forces_sub(family.project(alpha, p)?, sigma, tau))
}

/// Compares `p ⊩* σ⊆τ` with `π_{α+1}(p) ⊩^{*,α+1} σ⊆τ` for every condition
/// and every ordered pair of the given names. Returns the first disagreement.
pub fn restricted_equivalence(
    family: &ProjectionFamily,
    alpha: usize,
    names: &[PName],
) -> Result<Option<(usize, PName, PName)>> {
    let refs: Vec<&PName> = names.iter().collect();
    check_stratum(family, alpha, &refs)?;
    let full = StarForcing::new(family.order());
    let restricted = StarForcing::restricted(family.order(), family.stratum(alpha + 1)?.clone());
    for sigma in names {
        for tau in names {
            let lhs = full.sub_set(sigma, tau);
            let rhs = restricted.sub_set(sigma, tau);
            for p in 0..family.order().len() {
                if lhs.contains(p) != rhs.contains(family.project(alpha, p)?) {
                    return Ok(Some((p, sigma.clone(), tau.clone())));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forcing::AtomicForcing;
    use crate::order::tests::{chain, p3};

    #[test]
    fn unrestricted_star_matches_atomic_forcing() {
        for order in [p3(), chain(3)] {
            let top = order.top();
            let mut names = vec![PName::empty()];
            for p in 0..order.len() {
                names.push(PName::from_entries([(PName::empty(), p)]));
            }
            names.push(PName::from_entries([(names[1].clone(), top)]));
            let star = StarForcing::new(&order);
            let plain = AtomicForcing::new(&order);
            for s in &names {
                for t in &names {
                    assert_eq!(star.sub_set(s, t), plain.sub_set(s, t), "{s} ⊆ {t}");
                }
            }
        }
    }
}
