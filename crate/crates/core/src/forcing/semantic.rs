//! Brute-force forcing over the generic cones of a finite preorder.

use std::cell::RefCell;
use std::collections::HashMap;

use super::Atomic;
use crate::formula::InfFormula;
use crate::generic::cone;
use crate::hf::HfSet;
use crate::names::{Filter, PName};
use crate::order::{CondSet, Preorder};

/// Outcome of a forcing query; a refutation names the minimal condition
/// whose cone falsifies the statement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub forced: bool,
    pub witness: Option<usize>,
}

impl Verdict {
    pub fn forced() -> Verdict {
        Verdict {
            forced: true,
            witness: None,
        }
    }

    pub fn refuted(cone: usize) -> Verdict {
        Verdict {
            forced: false,
            witness: Some(cone),
        }
    }
}

/// The cones above minimal classes. On a finite preorder these are exactly
/// the filters meeting every dense set.
pub fn cone_generics(order: &Preorder) -> Vec<Filter> {
    order
        .minimal_classes()
        .into_iter()
        .map(|m| cone(order, m))
        .collect()
}

/// Evaluates names and formulas at every generic cone, caching evaluations
/// per cone.
pub struct SemanticOracle<'a> {
    order: &'a Preorder,
    minimal: Vec<usize>,
    cones: Vec<Filter>,
    caches: RefCell<Vec<HashMap<PName, HfSet>>>,
}

impl<'a> SemanticOracle<'a> {
    pub fn new(order: &'a Preorder) -> SemanticOracle<'a> {
        let minimal = order.minimal_classes();
        let cones: Vec<Filter> = minimal.iter().map(|&m| cone(order, m)).collect();
        let caches = RefCell::new(vec![HashMap::new(); cones.len()]);
        SemanticOracle {
            order,
            minimal,
            cones,
            caches,
        }
    }

    pub fn order(&self) -> &'a Preorder {
        self.order
    }

    /// Minimal condition behind each cone.
    pub fn minimal(&self) -> &[usize] {
        &self.minimal
    }

    pub fn cones(&self) -> &[Filter] {
        &self.cones
    }

    /// Cones containing `p`.
    pub fn cones_through(&self, p: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.cones.len()).filter(move |&i| self.cones[i].contains(p))
    }

    /// `σ^G` for the `i`-th cone.
    pub fn eval(&self, i: usize, sigma: &PName) -> HfSet {
        if let Some(v) = self.caches.borrow()[i].get(sigma) {
            return v.clone();
        }
        let elems: Vec<HfSet> = sigma
            .entries()
            .iter()
            .filter(|(_, p)| self.cones[i].contains(*p))
            .map(|(tau, _)| self.eval(i, tau))
            .collect();
        let v = HfSet::from_elements(elems);
        self.caches.borrow_mut()[i].insert(sigma.clone(), v.clone());
        v
    }

    pub fn holds(&self, i: usize, phi: &InfFormula) -> bool {
        match phi {
            InfFormula::InGeneric(p) => self.cones[i].contains(*p),
            InfFormula::Eq(s, t) => self.eval(i, s) == self.eval(i, t),
            InfFormula::Mem(s, t) => self.eval(i, t).contains(&self.eval(i, s)),
            InfFormula::Not(f) => !self.holds(i, f),
            InfFormula::Or(fs) => fs.iter().any(|f| self.holds(i, f)),
            InfFormula::And(fs) => fs.iter().all(|f| self.holds(i, f)),
        }
    }

    pub fn holds_atomic(&self, i: usize, a: &Atomic) -> bool {
        let (s, t) = (self.eval(i, a.left()), self.eval(i, a.right()));
        match a {
            Atomic::Eq(..) => s == t,
            Atomic::Mem(..) => t.contains(&s),
            Atomic::Sub(..) => s.is_subset(&t),
        }
    }

    /// Truth value at each cone.
    pub fn truth_cones(&self, phi: &InfFormula) -> Vec<bool> {
        (0..self.cones.len()).map(|i| self.holds(i, phi)).collect()
    }

    pub fn truth_cones_atomic(&self, a: &Atomic) -> Vec<bool> {
        (0..self.cones.len())
            .map(|i| self.holds_atomic(i, a))
            .collect()
    }

    /// `{p : every cone through p is marked true}`.
    pub fn region(&self, truth: &[bool]) -> CondSet {
        let mut out = self.order.empty_set();
        for p in 0..self.order.len() {
            if self.cones_through(p).all(|i| truth[i]) {
                out.insert(p);
            }
        }
        out
    }

    fn verdict(&self, p: usize, truth: impl Fn(usize) -> bool) -> Verdict {
        match self.cones_through(p).find(|&i| !truth(i)) {
            Some(i) => Verdict::refuted(self.minimal[i]),
            None => Verdict::forced(),
        }
    }

    pub fn forces(&self, p: usize, phi: &InfFormula) -> Verdict {
        self.verdict(p, |i| self.holds(i, phi))
    }

    pub fn forces_atomic(&self, p: usize, a: &Atomic) -> Verdict {
        self.verdict(p, |i| self.holds_atomic(i, a))
    }
}

pub fn semantic_forces(order: &Preorder, p: usize, phi: &InfFormula) -> Verdict {
    SemanticOracle::new(order).forces(p, phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::names::{check_nat, PName};
    use crate::order::tests::{chain, p3, point};

    fn sigma_a(p: &Preorder) -> PName {
        PName::from_entries([(PName::empty(), p.resolve("a").unwrap())])
    }

    #[test]
    fn cones_of_small_orders() {
        let p = p3();
        let cones: Vec<Vec<usize>> = cone_generics(&p).iter().map(|g| g.members()).collect();
        let (one, a, b) = (
            p.resolve("1").unwrap(),
            p.resolve("a").unwrap(),
            p.resolve("b").unwrap(),
        );
        let mut expected = vec![vec![one, a], vec![one, b]];
        for e in expected.iter_mut() {
            e.sort();
        }
        assert_eq!(cones, expected);
        assert_eq!(cone_generics(&point()).len(), 1);
        let c = chain(3);
        assert_eq!(cone_generics(&c)[0].len(), 3);
    }

    #[test]
    fn forcing_examples() {
        let p = p3();
        let s = sigma_a(&p);
        let one = check_nat(1, p.top());
        let phi = InfFormula::Eq(s.clone(), one);
        let oracle = SemanticOracle::new(&p);
        assert!(oracle.forces(p.resolve("a").unwrap(), &phi).forced);
        let v = oracle.forces(p.top(), &phi);
        assert_eq!(v, Verdict::refuted(p.resolve("b").unwrap()));
        let tau = PName::from_entries([(s.clone(), p.top())]);
        assert!(oracle.forces(p.top(), &InfFormula::Mem(s, tau)).forced);
    }
}
