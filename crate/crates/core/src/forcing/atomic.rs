//! Forcing for atomic statements computed as sets of conditions, following
//! the mutual recursion on name ranks.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

use super::semantic::SemanticOracle;
use crate::error::{Error, Result};
use crate::formula::{nu_mu, InfFormula};
use crate::names::{Filter, PName};
use crate::order::{CondSet, Preorder};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atomic {
    Eq(PName, PName),
    Mem(PName, PName),
    Sub(PName, PName),
}

impl Atomic {
    pub fn left(&self) -> &PName {
        match self {
            Atomic::Eq(s, _) | Atomic::Mem(s, _) | Atomic::Sub(s, _) => s,
        }
    }

    pub fn right(&self) -> &PName {
        match self {
            Atomic::Eq(_, t) | Atomic::Mem(_, t) | Atomic::Sub(_, t) => t,
        }
    }

    /// `σ ⊆ τ` becomes `σ ∪ τ = τ`, which has the same value at every filter.
    pub fn to_formula(&self) -> InfFormula {
        match self {
            Atomic::Eq(s, t) => InfFormula::Eq(s.clone(), t.clone()),
            Atomic::Mem(s, t) => InfFormula::Mem(s.clone(), t.clone()),
            Atomic::Sub(s, t) => InfFormula::Eq(s.union(t), t.clone()),
        }
    }

    pub fn map_names(&self, mut f: impl FnMut(&PName) -> PName) -> Atomic {
        match self {
            Atomic::Eq(s, t) => Atomic::Eq(f(s), f(t)),
            Atomic::Mem(s, t) => Atomic::Mem(f(s), f(t)),
            Atomic::Sub(s, t) => Atomic::Sub(f(s), f(t)),
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            Atomic::Eq(..) => "=",
            Atomic::Mem(..) => "∈",
            Atomic::Sub(..) => "⊆",
        }
    }
}

impl fmt::Display for Atomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.left(), self.symbol(), self.right())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Kind {
    Mem,
    Sub,
}

/// Memoized syntactic forcing for `∈`, `⊆` and `=`:
///
/// * `p ⊩ σ∈τ` iff `{q : ∃⟨ρ,r⟩∈τ, q ≤ r ∧ q ⊩ σ=ρ}` is dense below `p`;
/// * `p ⊩ σ⊆τ` iff for all `⟨ρ,r⟩∈σ` and `q ≤ p,r`, `{s : s ⊩ ρ∈τ}` is dense below `q`;
/// * `p ⊩ σ=τ` iff `p ⊩ σ⊆τ` and `p ⊩ τ⊆σ`.
pub struct AtomicForcing<'a> {
    order: &'a Preorder,
    memo: RefCell<HashMap<(Kind, PName, PName), CondSet>>,
}

impl<'a> AtomicForcing<'a> {
    pub fn new(order: &'a Preorder) -> AtomicForcing<'a> {
        AtomicForcing {
            order,
            memo: RefCell::new(HashMap::new()),
        }
    }

    pub fn order(&self) -> &'a Preorder {
        self.order
    }

    fn cached(
        &self,
        kind: Kind,
        s: &PName,
        t: &PName,
        compute: impl FnOnce() -> CondSet,
    ) -> CondSet {
        let key = (kind, s.clone(), t.clone());
        if let Some(v) = self.memo.borrow().get(&key) {
            return v.clone();
        }
        let v = compute();
        self.memo.borrow_mut().insert(key, v.clone());
        v
    }

    pub fn mem_set(&self, sigma: &PName, tau: &PName) -> CondSet {
        self.cached(Kind::Mem, sigma, tau, || {
            let mut e = self.order.empty_set();
            for (rho, r) in tau.entries() {
                let mut part = self.eq_set(sigma, rho);
                part.intersect_with(self.order.down(*r));
                e.union_with(&part);
            }
            self.order.dense_below_set(&e)
        })
    }

    pub fn sub_set(&self, sigma: &PName, tau: &PName) -> CondSet {
        self.cached(Kind::Sub, sigma, tau, || {
            let mut out = self.order.full_set();
            for (rho, r) in sigma.entries() {
                // p qualifies iff every q ≤ p,r lies in the regular set mem(ρ,τ)
                let mut ok = self.order.down(*r).clone();
                ok.toggle_range(..);
                ok.union_with(&self.mem_set(rho, tau));
                out.intersect_with(&self.order.interior(&ok));
            }
            out
        })
    }

    pub fn eq_set(&self, sigma: &PName, tau: &PName) -> CondSet {
        let mut s = self.sub_set(sigma, tau);
        s.intersect_with(&self.sub_set(tau, sigma));
        s
    }

    pub fn set(&self, a: &Atomic) -> CondSet {
        match a {
            Atomic::Eq(s, t) => self.eq_set(s, t),
            Atomic::Mem(s, t) => self.mem_set(s, t),
            Atomic::Sub(s, t) => self.sub_set(s, t),
        }
    }

    pub fn forces(&self, p: usize, a: &Atomic) -> bool {
        self.set(a).contains(p)
    }

    /// `{p : p ⊩ φ}` for an infinitary formula, via `p ⊩ ν = μ`.
    pub fn nu_mu_set(&self, phi: &InfFormula) -> CondSet {
        let (nu, mu) = nu_mu(phi, self.order.top());
        self.eq_set(&nu, &mu)
    }

    pub fn forces_via_nu_mu(&self, p: usize, phi: &InfFormula) -> bool {
        self.nu_mu_set(phi).contains(p)
    }

    /// Conditions forcing `a` or its negation.
    pub fn decidability_frontier(&self, a: &Atomic) -> CondSet {
        let yes = self.set(a);
        let mut out = self.order.pseudo_complement(&yes);
        out.union_with(&yes);
        debug_assert!(self.order.dense_below_set(&out).contains(self.order.top()));
        out
    }
}

pub fn syntactic_forces_atomic(order: &Preorder, p: usize, a: &Atomic) -> bool {
    AtomicForcing::new(order).forces(p, a)
}

pub fn forces_via_nu_mu(order: &Preorder, p: usize, phi: &InfFormula) -> bool {
    AtomicForcing::new(order).forces_via_nu_mu(p, phi)
}

pub fn decidability_frontier(order: &Preorder, a: &Atomic) -> CondSet {
    AtomicForcing::new(order).decidability_frontier(a)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TruthLemma {
    /// A member of the filter forcing the statement; weakest found first.
    Witness(usize),
    /// The statement fails at the filter.
    Vacuous,
    /// The statement holds but nothing in the filter forces it.
    Failure,
}

/// For a generic cone `G` where `φ` holds, finds `p ∈ G` forcing `φ`. The
/// witness must force `φ` both semantically and through `ν = μ`.
pub fn truth_lemma_check(
    oracle: &SemanticOracle<'_>,
    g: &Filter,
    phi: &InfFormula,
) -> Result<TruthLemma> {
    let order = oracle.order();
    let i = oracle
        .cones()
        .iter()
        .position(|c| c == g)
        .ok_or(Error::NotGeneric)?;
    if !oracle.holds(i, phi) {
        return Ok(TruthLemma::Vacuous);
    }
    let syntactic = AtomicForcing::new(order).nu_mu_set(phi);
    let mut members = g.members();
    members.sort_by_key(|&p| std::cmp::Reverse(order.down(p).count_ones(..)));
    for p in members {
        if oracle.forces(p, phi).forced {
            return Ok(if syntactic.contains(p) {
                TruthLemma::Witness(p)
            } else {
                TruthLemma::Failure
            });
        }
    }
    Ok(TruthLemma::Failure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hf::HfSet;
    use crate::names::check_name;
    use crate::order::tests::p3;

    #[test]
    fn examples() {
        let p = p3();
        let top = p.top();
        let (a, b) = (p.resolve("a").unwrap(), p.resolve("b").unwrap());
        let f = AtomicForcing::new(&p);
        let empty = check_name(&HfSet::empty(), top);
        assert!(f.forces(top, &Atomic::Eq(empty.clone(), empty.clone())));
        let sigma = PName::from_entries([(PName::empty(), a)]);
        assert!(!f.forces(top, &Atomic::Sub(sigma.clone(), empty.clone())));
        assert!(f.forces(b, &Atomic::Eq(sigma.clone(), empty.clone())));
        let frontier = f.decidability_frontier(&Atomic::Eq(sigma, empty.clone()));
        assert_eq!(frontier.ones().collect::<Vec<_>>(), {
            let mut v = vec![a, b];
            v.sort();
            v
        });
        assert_eq!(
            f.decidability_frontier(&Atomic::Eq(empty.clone(), empty))
                .count_ones(..),
            p.len()
        );
    }

    #[test]
    fn generic_atom_through_nu_mu() {
        let p = p3();
        let (a, b) = (p.resolve("a").unwrap(), p.resolve("b").unwrap());
        let phi = InfFormula::InGeneric(a);
        let f = AtomicForcing::new(&p);
        assert!(f.forces_via_nu_mu(a, &phi));
        assert!(!f.forces_via_nu_mu(b, &phi));
        assert!(!f.forces_via_nu_mu(p.top(), &phi));
    }

    #[test]
    fn truth_lemma_examples() {
        let p = p3();
        let a = p.resolve("a").unwrap();
        let oracle = SemanticOracle::new(&p);
        let g = crate::generic::cone(&p, a);
        assert_eq!(
            truth_lemma_check(&oracle, &g, &InfFormula::InGeneric(a)).unwrap(),
            TruthLemma::Witness(a)
        );
        let e = PName::empty();
        let taut = InfFormula::Eq(e.clone(), e);
        assert_eq!(
            truth_lemma_check(&oracle, &g, &taut).unwrap(),
            TruthLemma::Witness(p.top())
        );
        let not_generic = Filter::from_members(p.len(), &[p.top()]);
        assert_eq!(
            truth_lemma_check(&oracle, &not_generic, &taut),
            Err(Error::NotGeneric)
        );
    }
}
