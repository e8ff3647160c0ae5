//! Conditions `⟨d,e,f⟩` building a relation `E` on indices together with a
//! map `F` from indices onto a ground model, so that `E` copies membership.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::forcing::SemanticOracle;
use crate::formula::{
    appropriate, fo_satisfies, lex_min_appropriate, translate_star, FoFormula, StarContext,
};
use crate::generic::{DenseProvider, DenseSetSchedule, Forcing};
use crate::hf::{GroundModel, HfSet};
use crate::names::{check_nat, op_name, PName};
use crate::order::Preorder;

pub const MAX_INDICES: usize = 8;
/// Largest carrier `FriedmanForcing::explicit` will enumerate.
pub const MAX_ENUMERATED: usize = 5_000;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FriedmanCondition {
    pub d: BTreeSet<usize>,
    /// `(i, j)` means `i e j`.
    pub e: BTreeSet<(usize, usize)>,
    pub f: BTreeMap<usize, HfSet>,
}

impl FriedmanCondition {
    pub fn top() -> FriedmanCondition {
        FriedmanCondition::default()
    }

    pub fn new(
        d: impl IntoIterator<Item = usize>,
        e: impl IntoIterator<Item = (usize, usize)>,
        f: impl IntoIterator<Item = (usize, HfSet)>,
    ) -> FriedmanCondition {
        FriedmanCondition {
            d: d.into_iter().collect(),
            e: e.into_iter().collect(),
            f: f.into_iter().collect(),
        }
    }

    /// `p_{ij} = ⟨{i,j}, {⟨i,j⟩}, ∅⟩`.
    pub fn pair(i: usize, j: usize) -> FriedmanCondition {
        FriedmanCondition::new([i, j], [(i, j)], [])
    }

    /// `q^n = ⟨{1,…,n+1}, {⟨1,n+1⟩}, ∅⟩`, for `n ≥ 1`.
    pub fn qn_antichain(n: usize) -> Result<FriedmanCondition> {
        if n == 0 {
            return Err(Error::Precondition("q^0 would carry the loop 1 e 1".into()));
        }
        Ok(FriedmanCondition::new(1..=n + 1, [(1, n + 1)], []))
    }

    /// `dom f = d`.
    pub fn is_total(&self) -> bool {
        self.f.len() == self.d.len() && self.f.keys().eq(self.d.iter())
    }

    /// Swaps the indices `i` and `j` everywhere.
    pub fn index_swap(&self, i: usize, j: usize) -> FriedmanCondition {
        let s = |k: usize| {
            if k == i {
                j
            } else if k == j {
                i
            } else {
                k
            }
        };
        FriedmanCondition {
            d: self.d.iter().map(|&k| s(k)).collect(),
            e: self.e.iter().map(|&(a, b)| (s(a), s(b))).collect(),
            f: self.f.iter().map(|(&k, x)| (s(k), x.clone())).collect(),
        }
    }

    /// `[0,1|0e1|0={},1={{}}]`.
    pub fn label(&self) -> String {
        let d: Vec<String> = self.d.iter().map(|k| k.to_string()).collect();
        let e: Vec<String> = self.e.iter().map(|(a, b)| format!("{a}e{b}")).collect();
        let f: Vec<String> = self.f.iter().map(|(k, x)| format!("{k}={x}")).collect();
        format!("[{}|{}|{}]", d.join(","), e.join(","), f.join(","))
    }

    /// Clause linking `e` to membership when `f` is total.
    pub fn membership_clause_holds(&self) -> bool {
        if !self.is_total() {
            return true;
        }
        self.d.iter().all(|&i| {
            self.d
                .iter()
                .all(|&j| self.e.contains(&(i, j)) == self.f[&j].contains(&self.f[&i]))
        })
    }

    /// Adds index `j` with value `x`, with `e` edges induced by membership.
    fn add_index(&self, j: usize, x: HfSet) -> FriedmanCondition {
        let mut q = self.clone();
        for (&i, y) in &self.f {
            if x.contains(y) {
                q.e.insert((i, j));
            }
            if y.contains(&x) {
                q.e.insert((j, i));
            }
        }
        q.d.insert(j);
        q.f.insert(j, x);
        q
    }
}

impl fmt::Display for FriedmanCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn is_acyclic(d: &BTreeSet<usize>, e: &BTreeSet<(usize, usize)>) -> bool {
    let mut remaining: BTreeSet<usize> = d.clone();
    loop {
        let source = remaining
            .iter()
            .copied()
            .find(|&j| !e.iter().any(|&(a, b)| b == j && remaining.contains(&a)));
        match source {
            Some(j) => {
                remaining.remove(&j);
            }
            None => return remaining.is_empty(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FriedmanForcing {
    pub model: GroundModel,
    /// Indices range over `0..n`.
    pub n: usize,
}

impl FriedmanForcing {
    pub fn new(model: GroundModel, n: usize) -> Result<FriedmanForcing> {
        if n > MAX_INDICES {
            return Err(Error::BoundExceeded(format!(
                "{n} indices (at most {MAX_INDICES})"
            )));
        }
        Ok(FriedmanForcing { model, n })
    }

    /// All clauses except membership of the values in the ground model.
    fn is_valid_shape(&self, p: &FriedmanCondition) -> bool {
        p.d.iter().all(|&k| k < self.n)
            && p.e.iter().all(|(a, b)| p.d.contains(a) && p.d.contains(b))
            && is_acyclic(&p.d, &p.e)
            && (p.f.is_empty() || p.is_total())
            && p.f.values().collect::<BTreeSet<_>>().len() == p.f.len()
            && p.membership_clause_holds()
    }

    /// Conditions with `dom f = d`.
    pub fn total_conditions(&self) -> Result<Vec<FriedmanCondition>> {
        let m = self.model.len();
        let mut size: usize = 0;
        let mut falling = 1usize;
        let mut binom = 1usize;
        for k in 0..=self.n.min(m) {
            size = size.saturating_add(binom.saturating_mul(falling));
            binom = binom * (self.n - k) / (k + 1);
            falling = falling.saturating_mul(m - k);
        }
        if size > MAX_ENUMERATED {
            return Err(Error::SizeCap {
                size,
                cap: MAX_ENUMERATED,
            });
        }
        let mut out = vec![FriedmanCondition::top()];
        let mut frontier = vec![FriedmanCondition::top()];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for p in &frontier {
                let start = p.d.iter().next_back().map_or(0, |&k| k + 1);
                for j in start..self.n {
                    for x in self.model.carrier() {
                        if !p.f.values().any(|y| y == x) {
                            next.push(p.add_index(j, x.clone()));
                        }
                    }
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out.sort_by(|a, b| a.d.len().cmp(&b.d.len()).then_with(|| a.cmp(b)));
        Ok(out)
    }

    /// The total conditions together with every `p_{ij}`, `i ≠ j`.
    pub fn explicit(&self) -> Result<FriedmanOrder> {
        let mut conditions = self.total_conditions()?;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    conditions.push(FriedmanCondition::pair(i, j));
                }
            }
        }
        let labels: Vec<String> = conditions.iter().map(|c| c.label()).collect();
        let order = Preorder::from_fn(labels, 0, |a, b| self.leq(&conditions[a], &conditions[b]))?;
        let index = conditions
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, c)| (c, i))
            .collect();
        Ok(FriedmanOrder {
            forcing: self.clone(),
            conditions,
            order,
            index,
        })
    }

    /// Whether some condition lies below both. A common extension can always
    /// be cut down to `d_p ∪ d_q`, so only that domain is searched.
    pub fn compatible(&self, p: &FriedmanCondition, q: &FriedmanCondition) -> bool {
        let overlap: BTreeSet<usize> = p.d.intersection(&q.d).copied().collect();
        let on = |e: &BTreeSet<(usize, usize)>| -> BTreeSet<(usize, usize)> {
            e.iter()
                .copied()
                .filter(|(a, b)| overlap.contains(a) && overlap.contains(b))
                .collect()
        };
        if on(&p.e) != on(&q.e) {
            return false;
        }
        let d: BTreeSet<usize> = p.d.union(&q.d).copied().collect();
        if p.f.is_empty() && q.f.is_empty() {
            let e: BTreeSet<(usize, usize)> = p.e.union(&q.e).copied().collect();
            return is_acyclic(&d, &e);
        }
        let mut f: BTreeMap<usize, HfSet> = p.f.clone();
        for (k, x) in &q.f {
            match f.get(k) {
                Some(y) if y != x => return false,
                _ => {
                    f.insert(*k, x.clone());
                }
            }
        }
        let open: Vec<usize> = d.iter().copied().filter(|k| !f.contains_key(k)).collect();
        self.complete_search(p, q, &d, &mut f, &open)
    }

    fn complete_search(
        &self,
        p: &FriedmanCondition,
        q: &FriedmanCondition,
        d: &BTreeSet<usize>,
        f: &mut BTreeMap<usize, HfSet>,
        open: &[usize],
    ) -> bool {
        match open.split_first() {
            None => {
                let e: BTreeSet<(usize, usize)> = d
                    .iter()
                    .flat_map(|&i| d.iter().map(move |&j| (i, j)))
                    .filter(|(i, j)| f[j].contains(&f[i]))
                    .collect();
                let r = FriedmanCondition {
                    d: d.clone(),
                    e,
                    f: f.clone(),
                };
                self.is_valid(&r) && self.leq(&r, p) && self.leq(&r, q)
            }
            Some((&k, rest)) => {
                for x in self.model.carrier() {
                    if f.values().any(|y| y == x) {
                        continue;
                    }
                    f.insert(k, x.clone());
                    let ok = self.complete_search(p, q, d, f, rest);
                    f.remove(&k);
                    if ok {
                        return true;
                    }
                }
                false
            }
        }
    }

    /// Makes `f` total by `f(j) = {f(i) : i e j} ∪ {{∅, j}}`. The flag reports
    /// whether every new value lies in the ground model.
    pub fn total_extension(&self, p: &FriedmanCondition) -> Result<(FriedmanCondition, bool)> {
        if !p.f.is_empty() || p.d.is_empty() {
            return Err(Error::Precondition(
                "needs a nonempty domain and an empty map".into(),
            ));
        }
        if !is_acyclic(&p.d, &p.e) {
            return Err(Error::Precondition("e is cyclic".into()));
        }
        let mut f: BTreeMap<usize, HfSet> = BTreeMap::new();
        while f.len() < p.d.len() {
            let j =
                *p.d.iter()
                    .find(|j| {
                        !f.contains_key(j) && p.e.iter().all(|(a, b)| b != *j || f.contains_key(a))
                    })
                    .expect("acyclic relation has a source");
            let below =
                p.e.iter()
                    .filter(|(_, b)| *b == j)
                    .map(|(a, _)| f[a].clone());
            let tag = HfSet::pair(HfSet::empty(), HfSet::natural(j));
            f.insert(j, HfSet::from_elements(below.chain([tag])));
        }
        let in_model = f.values().all(|x| self.model.contains(x));
        let q = FriedmanCondition {
            d: p.d.clone(),
            e: p.e.clone(),
            f,
        };
        debug_assert!(q.membership_clause_holds());
        Ok((q, in_model))
    }

    /// Adds a fresh index `j` with `f(j) = x` and the membership edges.
    pub fn surjectivity_extension(
        &self,
        p: &FriedmanCondition,
        x: &HfSet,
        rng: Option<&mut ChaCha8Rng>,
    ) -> Result<FriedmanCondition> {
        if !p.is_total() {
            return Err(Error::Precondition("needs a total condition".into()));
        }
        if p.f.values().any(|y| y == x) {
            return Err(Error::Precondition(format!("{x} is already in the range")));
        }
        let mut fresh: Vec<usize> = (0..self.n).filter(|k| !p.d.contains(k)).collect();
        if let Some(r) = rng {
            fresh.shuffle(r);
        }
        let j = *fresh.first().ok_or(Error::NoFreshIndex(self.n))?;
        Ok(p.add_index(j, x.clone()))
    }

    /// Puts index `j` into the domain with an unused ground-model value.
    pub fn index_extension(
        &self,
        p: &FriedmanCondition,
        j: usize,
        rng: Option<&mut ChaCha8Rng>,
    ) -> Result<FriedmanCondition> {
        if p.d.contains(&j) {
            return Ok(p.clone());
        }
        if !p.is_total() {
            return Err(Error::Precondition("needs a total condition".into()));
        }
        let mut unused: Vec<&HfSet> = self
            .model
            .carrier()
            .iter()
            .filter(|x| !p.f.values().any(|y| y == *x))
            .collect();
        if let Some(r) = rng {
            unused.shuffle(r);
        }
        let x = unused
            .first()
            .ok_or_else(|| Error::Precondition("every ground set is already used".into()))?;
        Ok(p.add_index(j, (*x).clone()))
    }

    /// `D_j = {p : j ∈ dom f_p}` for every index and `{p : x ∈ ran f_p}` for
    /// every ground set.
    pub fn schedule(&self) -> DenseSetSchedule<FriedmanCondition> {
        let mut s = DenseSetSchedule::default();
        for j in 0..self.n {
            let me = self.clone();
            s.push(DenseProvider::new(
                format!("D_index{j}"),
                move |p: &FriedmanCondition| p.f.contains_key(&j),
                move |p, rng| me.index_extension(p, j, rng),
            ));
        }
        for x in self.model.carrier() {
            let me = self.clone();
            let (x1, x2) = (x.clone(), x.clone());
            s.push(DenseProvider::new(
                format!("D_range{x}"),
                move |p: &FriedmanCondition| p.f.values().any(|y| *y == x1),
                move |p, rng| {
                    if p.f.values().any(|y| *y == x2) {
                        Ok(p.clone())
                    } else {
                        me.surjectivity_extension(p, &x2, rng)
                    }
                },
            ));
        }
        s
    }

    /// `p^x̄_n̄`: each step adds `n_k` with value `x_k` and the membership edges
    /// to earlier entries.
    pub fn p_sequence(&self, xs: &[HfSet], ns: &[usize]) -> Result<FriedmanCondition> {
        if !appropriate(ns, xs)? {
            return Err(Error::NotAppropriate);
        }
        if let Some(&k) = ns.iter().find(|&&k| k >= self.n) {
            return Err(Error::BoundExceeded(format!(
                "index {k} with {} indices",
                self.n
            )));
        }
        let mut p = FriedmanCondition::top();
        for (x, &k) in xs.iter().zip(ns) {
            if !p.d.contains(&k) {
                p = p.add_index(k, x.clone());
            }
        }
        Ok(p)
    }

    /// `p^x̄` with the lexicographically least appropriate indices.
    pub fn p_lex(&self, xs: &[HfSet]) -> Result<FriedmanCondition> {
        self.p_sequence(xs, &lex_min_appropriate(xs))
    }
}

impl Forcing for FriedmanForcing {
    type Condition = FriedmanCondition;

    fn top(&self) -> FriedmanCondition {
        FriedmanCondition::top()
    }

    fn is_valid(&self, p: &FriedmanCondition) -> bool {
        self.is_valid_shape(p) && p.f.values().all(|x| self.model.contains(x))
    }

    /// `d_q ⊆ d_p`, `e_p ∩ (d_q × d_q) = e_q` and `f_q ⊆ f_p`.
    fn leq(&self, p: &FriedmanCondition, q: &FriedmanCondition) -> bool {
        q.d.is_subset(&p.d)
            && p.e
                .iter()
                .filter(|(a, b)| q.d.contains(a) && q.d.contains(b))
                .eq(q.e.iter())
            && q.f.iter().all(|(k, x)| p.f.get(k) == Some(x))
    }

    fn show(&self, p: &FriedmanCondition) -> String {
        p.label()
    }
}

/// Total conditions and the `p_{ij}` as an explicit preorder.
#[derive(Clone, Debug)]
pub struct FriedmanOrder {
    pub forcing: FriedmanForcing,
    pub conditions: Vec<FriedmanCondition>,
    pub order: Preorder,
    index: HashMap<FriedmanCondition, usize>,
}

impl FriedmanOrder {
    pub fn index_of(&self, c: &FriedmanCondition) -> Result<usize> {
        self.index
            .get(c)
            .copied()
            .ok_or_else(|| Error::UnknownCondition(c.label()))
    }

    /// `Ė = {⟨op(ǐ,ǰ), p_{ij}⟩ : i ≠ j}`.
    pub fn edot_name(&self) -> Result<PName> {
        let top = self.order.top();
        let mut entries = Vec::new();
        for i in 0..self.forcing.n {
            for j in 0..self.forcing.n {
                if i != j {
                    let c = self.index_of(&FriedmanCondition::pair(i, j))?;
                    entries.push((op_name(&check_nat(i, top), &check_nat(j, top), top), c));
                }
            }
        }
        Ok(PName::from_entries(entries))
    }

    pub fn star_context(&self) -> Result<StarContext> {
        Ok(StarContext {
            top: self.order.top(),
            edot: self.edot_name()?,
        })
    }

    /// Compares `M ⊨ φ(x̄)` with `p^x̄ ⊩ φ*` where the translation uses the
    /// least appropriate indices and disjunctions of length `n`.
    pub fn star_agreement(
        &self,
        oracle: &SemanticOracle<'_>,
        ctx: &StarContext,
        phi: &FoFormula,
        xs: &[HfSet],
    ) -> Result<(bool, bool)> {
        let truth = fo_satisfies(&self.forcing.model, &[], phi, xs)?;
        let ns = lex_min_appropriate(xs);
        let star = translate_star(phi, &ns, self.forcing.n, ctx)?;
        let p = self.index_of(&self.forcing.p_sequence(xs, &ns)?)?;
        Ok((truth, oracle.forces(p, &star.formula).forced))
    }
}

/// `E = ⋃ e_p` and `F = ⋃ f_p` over a set of conditions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decoded {
    pub e: BTreeSet<(usize, usize)>,
    pub f: BTreeMap<usize, HfSet>,
}

impl Decoded {
    pub fn from_conditions<'a>(
        conditions: impl IntoIterator<Item = &'a FriedmanCondition>,
    ) -> Result<Decoded> {
        let mut e = BTreeSet::new();
        let mut f: BTreeMap<usize, HfSet> = BTreeMap::new();
        for p in conditions {
            e.extend(p.e.iter().copied());
            for (k, x) in &p.f {
                if let Some(y) = f.insert(*k, x.clone()) {
                    if y != *x {
                        return Err(Error::InconsistentFilter(format!(
                            "index {k} maps to {y} and {x}"
                        )));
                    }
                }
            }
        }
        Ok(Decoded { e, f })
    }

    /// `F` is a bijection from `0..n` onto the model.
    pub fn is_bijection_onto(&self, model: &GroundModel, n: usize) -> bool {
        let range: BTreeSet<&HfSet> = self.f.values().collect();
        self.f.keys().copied().eq(0..n)
            && range.len() == self.f.len()
            && range.len() == model.len()
            && range.iter().all(|x| model.contains(x))
    }

    /// `i E j ⇔ F(i) ∈ F(j)` on the domain of `F`, and `E` lives there.
    pub fn is_isomorphism(&self) -> bool {
        let dom: Vec<usize> = self.f.keys().copied().collect();
        self.e
            .iter()
            .all(|(a, b)| self.f.contains_key(a) && self.f.contains_key(b))
            && dom.iter().all(|i| {
                dom.iter()
                    .all(|j| self.e.contains(&(*i, *j)) == self.f[j].contains(&self.f[i]))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generic::rasiowa_sikorski;
    use crate::hf::{parse_set_literal, vstage};

    fn set(s: &str) -> HfSet {
        parse_set_literal(s).unwrap()
    }

    fn forcing(k: usize, n: usize) -> FriedmanForcing {
        FriedmanForcing::new(vstage(k).unwrap(), n).unwrap()
    }

    #[test]
    fn validity() {
        let f = forcing(2, 2);
        assert!(f.is_valid(&FriedmanCondition::new([0, 1], [(0, 1)], [])));
        assert!(!f.is_valid(&FriedmanCondition::new([0, 1], [(0, 1), (1, 0)], [])));
        assert!(!f.is_valid(&FriedmanCondition::new([0], [], [(0, set("{{{}}}"))])));
    }

    #[test]
    fn minimal_total_conditions_are_bijections() {
        let o = forcing(2, 2).explicit().unwrap();
        let minimal = o.order.minimal_classes();
        assert_eq!(minimal.len(), 2);
        for m in minimal {
            assert_eq!(o.conditions[m].f.len(), 2);
        }
        let o3 = forcing(3, 4).explicit().unwrap();
        assert_eq!(o3.order.minimal_classes().len(), 24);
    }

    #[test]
    fn total_extension_values() {
        let f = forcing(3, 6);
        let p = FriedmanCondition::new([0, 1], [(0, 1)], []);
        let (q, _) = f.total_extension(&p).unwrap();
        assert_eq!(q.f[&0], set("{{{}}}"));
        assert_eq!(q.f[&1], set("{{{{}}},{{},{{}}}}"));
        assert!(f.leq(&q, &p));
        let (r, in_model) = f
            .total_extension(&FriedmanCondition::new([5], [], []))
            .unwrap();
        assert_eq!(
            r.f[&5],
            HfSet::singleton(HfSet::pair(HfSet::empty(), HfSet::natural(5)))
        );
        assert!(!in_model);
    }

    #[test]
    fn surjectivity_extension() {
        let f = forcing(3, 2);
        let p = FriedmanCondition::new([0], [], [(0, HfSet::empty())]);
        let q = f.surjectivity_extension(&p, &set("{{}}"), None).unwrap();
        assert_eq!(q.d, [0, 1].into_iter().collect());
        assert!(q.e.contains(&(0, 1)));
        assert!(f.leq(&q, &p) && q.membership_clause_holds());
        assert!(f.surjectivity_extension(&p, &HfSet::empty(), None).is_err());
        assert_eq!(
            f.surjectivity_extension(&q, &set("{{{}}}"), None),
            Err(Error::NoFreshIndex(2))
        );
    }

    #[test]
    fn scheduler_decodes_membership() {
        let f = forcing(2, 2);
        let g = rasiowa_sikorski(&f, &f.schedule(), f.top(), None).unwrap();
        let decoded = Decoded::from_conditions(&g.chain).unwrap();
        assert!(decoded.is_bijection_onto(&f.model, 2));
        assert!(decoded.is_isomorphism());
        assert_eq!(decoded.e.len(), 1);
        let f3 = forcing(3, 4);
        for seed in 0..5 {
            let g = rasiowa_sikorski(&f3, &f3.schedule(), f3.top(), Some(seed)).unwrap();
            let decoded = Decoded::from_conditions(&g.chain).unwrap();
            assert!(decoded.is_bijection_onto(&f3.model, 4) && decoded.is_isomorphism());
        }
    }

    #[test]
    fn inconsistent_union() {
        let a = FriedmanCondition::new([0], [], [(0, HfSet::empty())]);
        let b = FriedmanCondition::new([0], [], [(0, set("{{}}"))]);
        assert!(matches!(
            Decoded::from_conditions([&a, &b]),
            Err(Error::InconsistentFilter(_))
        ));
    }

    #[test]
    fn sequences() {
        let f = forcing(2, 2);
        let e = HfSet::empty();
        let one = set("{{}}");
        assert_eq!(
            f.p_sequence(std::slice::from_ref(&e), &[0]).unwrap(),
            FriedmanCondition::new([0], [], [(0, e.clone())])
        );
        let p = f.p_sequence(&[e.clone(), one.clone()], &[0, 1]).unwrap();
        assert_eq!(p.e, [(0, 1)].into_iter().collect());
        assert_eq!(
            f.p_sequence(&[e.clone(), e.clone()], &[0, 0]).unwrap(),
            f.p_sequence(std::slice::from_ref(&e), &[0]).unwrap()
        );
        assert_eq!(
            f.p_sequence(&[e.clone(), e.clone()], &[0, 1]),
            Err(Error::NotAppropriate)
        );
        assert!(f.leq(&p, &f.p_sequence(&[e], &[0]).unwrap()));
    }

    #[test]
    fn antichain_and_swaps() {
        let f = forcing(2, 5);
        assert_eq!(
            FriedmanCondition::qn_antichain(2).unwrap(),
            FriedmanCondition::new([1, 2, 3], [(1, 3)], [])
        );
        let qs: Vec<FriedmanCondition> = (1..=3)
            .map(|n| FriedmanCondition::qn_antichain(n).unwrap())
            .collect();
        for a in &qs {
            assert!(!a.d.contains(&0));
            for b in &qs {
                if a != b {
                    assert!(!f.compatible(a, b), "{a} {b}");
                }
            }
        }
        let x = set("{{}}");
        let p0 = f.p_sequence(std::slice::from_ref(&x), &[0]).unwrap();
        assert_eq!(p0.index_swap(0, 1), f.p_sequence(&[x], &[1]).unwrap());
    }

    #[test]
    fn swaps_are_order_isomorphisms() {
        let o = forcing(2, 3).explicit().unwrap();
        let f = &o.forcing;
        for p in &o.conditions {
            for q in &o.conditions {
                assert_eq!(f.leq(p, q), f.leq(&p.index_swap(0, 2), &q.index_swap(0, 2)));
            }
        }
    }
}
