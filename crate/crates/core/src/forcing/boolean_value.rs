//! Boolean values of atomic statements in a completion, and the map from
//! infinitary formulas into the regular-open algebra.

use std::cell::RefCell;
use std::collections::HashMap;

use super::atomic::Atomic;
use super::semantic::SemanticOracle;
use crate::boolean::{regular_open_algebra, Completion};
use crate::error::{Error, Result};
use crate::formula::InfFormula;
use crate::names::{transport_quotient, PName};
use crate::order::{separative_quotient, Preorder, QuotientMap};

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Kind {
    Mem,
    Eq,
    Sub,
}

/// `⟦σ∈τ⟧ = sup{⟦σ=π⟧ ∧ p : ⟨π,p⟩∈τ}`, `⟦σ=τ⟧ = ⟦σ⊆τ⟧ ∧ ⟦τ⊆σ⟧`,
/// `⟦σ⊆τ⟧ = inf{¬⟦π∈σ⟧ ∨ ⟦π∈τ⟧ : π ∈ dom σ}`, computed over the separative
/// quotient with names transported along the quotient map.
pub struct BooleanValuation {
    quotient: QuotientMap,
    completion: Completion,
    memo: RefCell<HashMap<(Kind, PName, PName), usize>>,
}

impl BooleanValuation {
    /// Uses the regular-open algebra of the separative quotient.
    pub fn new(order: &Preorder) -> BooleanValuation {
        let (target, quotient) = separative_quotient(order);
        let completion = regular_open_algebra(&target);
        BooleanValuation {
            quotient,
            completion,
            memo: RefCell::new(HashMap::new()),
        }
    }

    /// Uses a given completion of the separative quotient.
    pub fn with_completion(order: &Preorder, completion: Completion) -> Result<BooleanValuation> {
        let (target, quotient) = separative_quotient(order);
        if completion.source != target {
            return Err(Error::MismatchedSources);
        }
        completion.verify()?;
        Ok(BooleanValuation {
            quotient,
            completion,
            memo: RefCell::new(HashMap::new()),
        })
    }

    pub fn completion(&self) -> &Completion {
        &self.completion
    }

    pub fn quotient(&self) -> &QuotientMap {
        &self.quotient
    }

    /// `e(p)` for a condition of the original preorder.
    pub fn embed(&self, p: usize) -> usize {
        self.completion.embed(self.quotient.apply(p))
    }

    pub fn value(&self, a: &Atomic) -> usize {
        let a = a.map_names(|n| transport_quotient(n, &self.quotient));
        match &a {
            Atomic::Eq(s, t) => self.eq(s, t),
            Atomic::Mem(s, t) => self.mem(s, t),
            Atomic::Sub(s, t) => self.sub(s, t),
        }
    }

    /// `e(p) ≤ ⟦φ⟧`.
    pub fn forces(&self, p: usize, a: &Atomic) -> bool {
        self.completion.algebra.leq(self.embed(p), self.value(a))
    }

    fn cached(&self, kind: Kind, s: &PName, t: &PName, compute: impl FnOnce() -> usize) -> usize {
        let key = (kind, s.clone(), t.clone());
        if let Some(&v) = self.memo.borrow().get(&key) {
            return v;
        }
        let v = compute();
        self.memo.borrow_mut().insert(key, v);
        v
    }

    fn mem(&self, sigma: &PName, tau: &PName) -> usize {
        self.cached(Kind::Mem, sigma, tau, || {
            let b = &self.completion.algebra;
            let parts: Vec<usize> = tau
                .entries()
                .iter()
                .map(|(pi, p)| b.meet(self.eq(sigma, pi), self.completion.embed(*p)))
                .collect();
            b.sup(parts)
        })
    }

    fn eq(&self, sigma: &PName, tau: &PName) -> usize {
        self.cached(Kind::Eq, sigma, tau, || {
            self.completion
                .algebra
                .meet(self.sub(sigma, tau), self.sub(tau, sigma))
        })
    }

    fn sub(&self, sigma: &PName, tau: &PName) -> usize {
        self.cached(Kind::Sub, sigma, tau, || {
            let b = &self.completion.algebra;
            let parts: Vec<usize> = sigma
                .domain()
                .iter()
                .map(|pi| b.join(b.complement(self.mem(pi, sigma)), self.mem(pi, tau)))
                .collect();
            b.inf(parts)
        })
    }
}

/// The regular-open element `{p : φ holds at every cone through p}`, as an
/// index into `completion`, which must be the regular-open algebra of the
/// oracle's preorder.
pub fn formula_to_ro(
    oracle: &SemanticOracle<'_>,
    completion: &Completion,
    phi: &InfFormula,
) -> Result<usize> {
    if completion.source != *oracle.order() {
        return Err(Error::MismatchedSources);
    }
    let regions = completion
        .regions
        .as_ref()
        .ok_or_else(|| Error::NotRepresentable("completion has no regular-open regions".into()))?;
    let region = oracle.region(&oracle.truth_cones(phi));
    regions
        .iter()
        .position(|r| *r == region)
        .ok_or_else(|| Error::NotRepresentable("truth region is not regular open".into()))
}
