//! Two-step iterations `P ∗ Q̇` over a declared pool of names for elements of
//! the second factor.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::forcing::{NamePool, SemanticOracle};
use crate::formula::InfFormula;
use crate::hf::HfSet;
use crate::names::{check_name, op_name, Filter, PName};
use crate::order::Preorder;

/// `Q̇` as a domain name, an order name and a name for its top.
#[derive(Clone, Debug)]
pub struct NamedForcing {
    pub dom: PName,
    pub ord: PName,
    pub top: PName,
}

/// A ground preorder `Q` named by check names; element `i` is named by the
/// check name of the natural number `i`.
#[derive(Clone, Debug)]
pub struct CheckNamed {
    pub named: NamedForcing,
    pub element_names: Vec<PName>,
    pub pool: NamePool,
}

impl CheckNamed {
    pub fn new(base: &Preorder, q: &Preorder) -> CheckNamed {
        let top = base.top();
        let element_names: Vec<PName> = (0..q.len())
            .map(|i| check_name(&HfSet::natural(i), top))
            .collect();
        let dom = PName::from_entries(element_names.iter().map(|n| (n.clone(), top)));
        let mut pairs = Vec::new();
        for i in 0..q.len() {
            for j in q.up(i).ones() {
                pairs.push((op_name(&element_names[i], &element_names[j], top), top));
            }
        }
        let ord = PName::from_entries(pairs);
        let named = NamedForcing {
            dom,
            ord,
            top: element_names[q.top()].clone(),
        };
        let pool = NamePool::closure(element_names.iter().cloned());
        CheckNamed {
            named,
            element_names,
            pool,
        }
    }
}

/// `Q̇^G` as an explicit preorder on the evaluated domain.
#[derive(Clone, Debug)]
pub struct EvaluatedForcing {
    pub order: Preorder,
    pub elements: Vec<HfSet>,
}

impl EvaluatedForcing {
    pub fn index_of(&self, x: &HfSet) -> Option<usize> {
        self.elements.iter().position(|y| y == x)
    }
}

#[derive(Clone, Debug)]
pub struct Iteration {
    pub base: Preorder,
    pub named: NamedForcing,
    /// Carrier pairs `⟨p, q̇⟩`.
    pub pairs: Vec<(usize, PName)>,
    pub order: Preorder,
    index: HashMap<(usize, PName), usize>,
}

/// Evaluates `Q̇` along the cone `i` and checks it is a preorder with the
/// named top.
fn evaluate_named(
    oracle: &SemanticOracle<'_>,
    i: usize,
    named: &NamedForcing,
) -> Result<EvaluatedForcing> {
    let bad = |msg: String| {
        Error::NotPreorderName(format!(
            "at cone {}: {msg}",
            oracle.order().label(oracle.minimal()[i])
        ))
    };
    let elements: Vec<HfSet> = oracle.eval(i, &named.dom).elements().to_vec();
    let rel = oracle.eval(i, &named.ord);
    for r in rel.elements() {
        match r.as_kuratowski() {
            Some((a, b)) if elements.contains(&a) && elements.contains(&b) => {}
            _ => return Err(bad(format!("{r} is not a pair of domain elements"))),
        }
    }
    let leq = |a: &HfSet, b: &HfSet| rel.contains(&HfSet::kuratowski(a.clone(), b.clone()));
    let top = oracle.eval(i, &named.top);
    let top_index = elements
        .iter()
        .position(|x| *x == top)
        .ok_or_else(|| bad(format!("top {top} is not in the domain")))?;
    for a in &elements {
        if !leq(a, a) {
            return Err(bad(format!("{a} is not below itself")));
        }
        if !leq(a, &top) {
            return Err(bad(format!("{a} is not below the top")));
        }
        for b in elements.iter().filter(|b| leq(a, b)) {
            for c in elements.iter().filter(|c| leq(b, c)) {
                if !leq(a, c) {
                    return Err(bad(format!("{a} <= {b} <= {c} is not transitive")));
                }
            }
        }
    }
    let labels = elements.iter().map(|x| x.to_string()).collect();
    let order = Preorder::from_fn(labels, top_index, |a, b| leq(&elements[a], &elements[b]))?;
    Ok(EvaluatedForcing { order, elements })
}

/// `{⟨p,q̇⟩ : p ⊩ q̇ ∈ Q̇}` for `q̇` in the pool, ordered by `p0 ≤ p1` and
/// `p0 ⊩ op(q̇0,q̇1) ∈ ≤_Q̇`. Every cone must see a preorder.
pub fn two_step(base: &Preorder, named: &NamedForcing, pool: &NamePool) -> Result<Iteration> {
    let oracle = SemanticOracle::new(base);
    for i in 0..oracle.cones().len() {
        evaluate_named(&oracle, i, named)?;
    }
    let top = base.top();
    if !pool.contains(&named.top) {
        return Err(Error::Precondition(
            "the top name is not in the pool".into(),
        ));
    }
    // membership and order of pool names, evaluated once per cone
    let cones = oracle.cones().len();
    let names = pool.names();
    let through: Vec<Vec<usize>> = (0..base.len())
        .map(|p| oracle.cones_through(p).collect())
        .collect();
    let mut in_dom = vec![vec![false; names.len()]; cones];
    let mut below = vec![vec![vec![false; names.len()]; names.len()]; cones];
    for i in 0..cones {
        let (dom, ord) = (oracle.eval(i, &named.dom), oracle.eval(i, &named.ord));
        let vals: Vec<HfSet> = names.iter().map(|q| oracle.eval(i, q)).collect();
        for a in 0..names.len() {
            in_dom[i][a] = dom.contains(&vals[a]);
            for b in 0..names.len() {
                below[i][a][b] = ord.contains(&HfSet::kuratowski(vals[a].clone(), vals[b].clone()));
            }
        }
    }
    let top_k = names.binary_search(&named.top).expect("pool member");
    let mut pairs = vec![(top, named.top.clone())];
    let mut ks = vec![top_k];
    for p in 0..base.len() {
        for (k, q) in names.iter().enumerate() {
            if (p, k) != (top, top_k) && through[p].iter().all(|&i| in_dom[i][k]) {
                pairs.push((p, q.clone()));
                ks.push(k);
            }
        }
    }
    let labels: Vec<String> = pairs
        .iter()
        .zip(&ks)
        .map(|((p, _), k)| format!("<{},q{k}>", base.label(*p)))
        .collect();
    let order = Preorder::from_fn(labels, 0, |a, b| {
        let (p0, p1) = (pairs[a].0, pairs[b].0);
        base.leq(p0, p1) && through[p0].iter().all(|&i| below[i][ks[a]][ks[b]])
    })?;
    let index = pairs
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, c)| (c, i))
        .collect();
    Ok(Iteration {
        base: base.clone(),
        named: named.clone(),
        pairs,
        order,
        index,
    })
}

impl Iteration {
    pub fn index_of(&self, p: usize, q: &PName) -> Option<usize> {
        self.index.get(&(p, q.clone())).copied()
    }

    /// `Q̇^G` for a cone generic `G` of the first factor.
    pub fn evaluate_second(&self, g: &Filter) -> Result<EvaluatedForcing> {
        let oracle = SemanticOracle::new(&self.base);
        let i = oracle
            .cones()
            .iter()
            .position(|c| c == g)
            .ok_or(Error::NotGeneric)?;
        evaluate_named(&oracle, i, &self.named)
    }

    /// `G ∗ H = {⟨p,q̇⟩ : p ∈ G, q̇^G ∈ H}`.
    pub fn compose_generics(&self, g: &Filter, q: &EvaluatedForcing, h: &Filter) -> Filter {
        let mut out = self.order.empty_set();
        for (k, (p, name)) in self.pairs.iter().enumerate() {
            if g.contains(*p)
                && q.index_of(&crate::names::evaluate(name, g))
                    .is_some_and(|x| h.contains(x))
            {
                out.insert(k);
            }
        }
        Filter::from_set(out)
    }
}

/// Replaces each condition `c` of the second factor by `⟨𝟙, q̌_c⟩`, where
/// `element_names[c]` is the name `q̌_c`.
pub fn star_star_lift(
    phi: &InfFormula,
    iteration: &Iteration,
    element_names: &[PName],
) -> Result<InfFormula> {
    let top = iteration.base.top();
    phi.try_map_conditions(&mut |c| {
        let name = element_names
            .get(c)
            .ok_or_else(|| Error::NotRepresentable(format!("condition #{c} has no name")))?;
        iteration
            .index_of(top, name)
            .ok_or_else(|| Error::NotRepresentable(format!("<1,{name}> is not in the iteration")))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forcing::cone_generics;
    use crate::generic::{cone, is_generic};
    use crate::names::Evaluator;
    use crate::order::tests::{chain, p3, point};

    #[test]
    fn trivial_first_factor() {
        let base = point();
        let q = p3();
        let c = CheckNamed::new(&base, &q);
        let it = two_step(&base, &c.named, &c.pool).unwrap();
        assert_eq!(it.order.len(), 3);
        for a in 0..3 {
            for b in 0..3 {
                let (x, y) = (
                    it.index_of(0, &c.element_names[a]).unwrap(),
                    it.index_of(0, &c.element_names[b]).unwrap(),
                );
                assert_eq!(it.order.leq(x, y), q.leq(a, b));
            }
        }
    }

    #[test]
    fn generics_compose() {
        let base = p3();
        let q = chain(2);
        let c = CheckNamed::new(&base, &q);
        let it = two_step(&base, &c.named, &c.pool).unwrap();
        assert_eq!(it.order.len(), 6);
        let mut composed = Vec::new();
        for g in cone_generics(&base) {
            let qg = it.evaluate_second(&g).unwrap();
            for h in cone_generics(&qg.order) {
                let gh = it.compose_generics(&g, &qg, &h);
                assert!(is_generic(&it.order, gh.as_set()));
                composed.push(gh);
            }
        }
        composed.sort_by_key(|f| f.members());
        let mut expected = cone_generics(&it.order);
        expected.sort_by_key(|f| f.members());
        assert_eq!(composed, expected);
    }

    #[test]
    fn lift_preserves_truth() {
        let base = p3();
        let q = p3();
        let c = CheckNamed::new(&base, &q);
        let it = two_step(&base, &c.named, &c.pool).unwrap();
        let (a, b) = (q.resolve("a").unwrap(), q.resolve("b").unwrap());
        let sigma = PName::from_entries([(PName::empty(), a)]);
        let phis = [
            InfFormula::InGeneric(a),
            InfFormula::Or(vec![InfFormula::InGeneric(a), InfFormula::InGeneric(b)]),
            InfFormula::Mem(PName::empty(), sigma.clone()),
            InfFormula::not(InfFormula::Eq(sigma, PName::empty())),
        ];
        for g in cone_generics(&base) {
            let qg = it.evaluate_second(&g).unwrap();
            for m in 0..q.len() {
                let hq = cone(&q, m);
                let x = qg.index_of(&HfSet::natural(m)).unwrap();
                let gh = it.compose_generics(&g, &qg, &cone(&qg.order, x));
                for phi in &phis {
                    let lifted = star_star_lift(phi, &it, &c.element_names).unwrap();
                    assert_eq!(
                        phi.holds(&mut Evaluator::new(&hq)),
                        lifted.holds(&mut Evaluator::new(&gh)),
                        "{phi:?}"
                    );
                }
            }
        }
        assert!(matches!(
            star_star_lift(&InfFormula::InGeneric(7), &it, &c.element_names),
            Err(Error::NotRepresentable(_))
        ));
    }

    #[test]
    fn non_preorder_names_are_rejected() {
        let base = p3();
        let q = chain(2);
        let mut c = CheckNamed::new(&base, &q);
        // drop reflexivity of the bottom element
        let bottom = &c.element_names[1];
        let loop_entry = (op_name(bottom, bottom, base.top()), base.top());
        c.named.ord = c.named.ord.without(&loop_entry);
        assert!(matches!(
            two_step(&base, &c.named, &c.pool),
            Err(Error::NotPreorderName(_))
        ));
    }
}
