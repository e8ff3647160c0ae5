//! Finite Boolean algebras and completions of finite preorders.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::order::{antisymmetric_quotient, CondSet, Preorder};

/// A finite Boolean algebra on `0..size`, given by operation tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteBooleanAlgebra {
    size: usize,
    meet: Vec<usize>,
    join: Vec<usize>,
    complement: Vec<usize>,
    zero: usize,
    one: usize,
}

impl FiniteBooleanAlgebra {
    /// Checks every Boolean-algebra axiom on the whole carrier.
    pub fn new(
        size: usize,
        meet: Vec<usize>,
        join: Vec<usize>,
        complement: Vec<usize>,
        zero: usize,
        one: usize,
    ) -> Result<FiniteBooleanAlgebra> {
        if size == 0
            || meet.len() != size * size
            || join.len() != size * size
            || complement.len() != size
        {
            return Err(Error::NotBoolean("table shapes".into()));
        }
        if zero >= size || one >= size {
            return Err(Error::NotBoolean("constants out of range".into()));
        }
        let all = meet.iter().chain(&join).chain(&complement);
        if all.into_iter().any(|&x| x >= size) {
            return Err(Error::NotBoolean("operation leaves the carrier".into()));
        }
        let b = FiniteBooleanAlgebra {
            size,
            meet,
            join,
            complement,
            zero,
            one,
        };
        b.check_axioms()?;
        Ok(b)
    }

    fn check_axioms(&self) -> Result<()> {
        let n = self.size;
        let fail = |law: &str, a: usize| Err(Error::NotBoolean(format!("{law} fails at {a}")));
        for a in 0..n {
            if self.meet(a, self.one) != a || self.join(a, self.zero) != a {
                return fail("identity", a);
            }
            if self.meet(a, self.complement(a)) != self.zero
                || self.join(a, self.complement(a)) != self.one
            {
                return fail("complement", a);
            }
            for b in 0..n {
                if self.meet(a, b) != self.meet(b, a) || self.join(a, b) != self.join(b, a) {
                    return fail("commutativity", a);
                }
                if self.meet(a, self.join(a, b)) != a || self.join(a, self.meet(a, b)) != a {
                    return fail("absorption", a);
                }
                for c in 0..n {
                    if self.meet(a, self.meet(b, c)) != self.meet(self.meet(a, b), c)
                        || self.join(a, self.join(b, c)) != self.join(self.join(a, b), c)
                    {
                        return fail("associativity", a);
                    }
                    if self.meet(a, self.join(b, c)) != self.join(self.meet(a, b), self.meet(a, c))
                    {
                        return fail("distributivity", a);
                    }
                }
            }
        }
        Ok(())
    }

    /// Builds the algebra of a finite partial order that happens to be a
    /// Boolean lattice, given by its `≤` matrix.
    pub fn from_order(
        size: usize,
        le: impl Fn(usize, usize) -> bool,
    ) -> Result<FiniteBooleanAlgebra> {
        let bottoms: Vec<usize> = (0..size).filter(|&z| (0..size).all(|x| le(z, x))).collect();
        let tops: Vec<usize> = (0..size).filter(|&o| (0..size).all(|x| le(x, o))).collect();
        let (zero, one) = match (bottoms.as_slice(), tops.as_slice()) {
            ([z], [o]) => (*z, *o),
            _ => return Err(Error::NotBoolean("no unique bottom and top".into())),
        };
        let mut meet = vec![0; size * size];
        let mut join = vec![0; size * size];
        for a in 0..size {
            for b in 0..size {
                let lower: Vec<usize> = (0..size).filter(|&x| le(x, a) && le(x, b)).collect();
                let glb = lower
                    .iter()
                    .copied()
                    .find(|&g| lower.iter().all(|&x| le(x, g)));
                let upper: Vec<usize> = (0..size).filter(|&x| le(a, x) && le(b, x)).collect();
                let lub = upper
                    .iter()
                    .copied()
                    .find(|&l| upper.iter().all(|&x| le(l, x)));
                match (glb, lub) {
                    (Some(g), Some(l)) => {
                        meet[a * size + b] = g;
                        join[a * size + b] = l;
                    }
                    _ => return Err(Error::NotBoolean(format!("no meet or join for {a}, {b}"))),
                }
            }
        }
        let mut complement = vec![0; size];
        for a in 0..size {
            let c = (0..size).find(|&c| meet[a * size + c] == zero && join[a * size + c] == one);
            complement[a] = c.ok_or_else(|| Error::NotBoolean(format!("{a} has no complement")))?;
        }
        FiniteBooleanAlgebra::new(size, meet, join, complement, zero, one)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.size + b]
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a * self.size + b]
    }

    pub fn complement(&self, a: usize) -> usize {
        self.complement[a]
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn one(&self) -> usize {
        self.one
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.meet(a, b) == a
    }

    pub fn sup<I: IntoIterator<Item = usize>>(&self, items: I) -> usize {
        items
            .into_iter()
            .fold(self.zero, |acc, x| self.join(acc, x))
    }

    pub fn inf<I: IntoIterator<Item = usize>>(&self, items: I) -> usize {
        items.into_iter().fold(self.one, |acc, x| self.meet(acc, x))
    }

    pub fn atoms(&self) -> Vec<usize> {
        (0..self.size)
            .filter(|&a| {
                a != self.zero
                    && (0..self.size).all(|x| !self.leq(x, a) || x == a || x == self.zero)
            })
            .collect()
    }
}

/// A Boolean algebra with a map from a preorder into its nonzero part.
#[derive(Clone, Debug)]
pub struct Completion {
    pub source: Preorder,
    pub algebra: FiniteBooleanAlgebra,
    pub embedding: Vec<usize>,
    /// Human-readable names of the algebra elements.
    pub element_names: Vec<String>,
    /// For regular-open algebras: the down-set behind each element.
    pub regions: Option<Vec<CondSet>>,
}

impl Completion {
    pub fn embed(&self, p: usize) -> usize {
        self.embedding[p]
    }

    /// Order preservation, nonzero image, and density of the embedding.
    pub fn verify(&self) -> Result<()> {
        let b = &self.algebra;
        let p = &self.source;
        if self.embedding.len() != p.len() {
            return Err(Error::NotBoolean("embedding has the wrong domain".into()));
        }
        for x in 0..p.len() {
            if self.embed(x) == b.zero() {
                return Err(Error::NotBoolean(format!("{} maps to zero", p.label(x))));
            }
            for y in 0..p.len() {
                if p.leq(x, y) && !b.leq(self.embed(x), self.embed(y)) {
                    return Err(Error::NotBoolean(format!(
                        "order not preserved at {}",
                        p.label(x)
                    )));
                }
            }
        }
        for e in 0..b.size() {
            if e != b.zero() && !(0..p.len()).any(|x| b.leq(self.embed(x), e)) {
                return Err(Error::NotBoolean(format!(
                    "embedding not dense below element {e}"
                )));
            }
        }
        Ok(())
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = self.embedding.clone();
        seen.sort_unstable();
        seen.dedup();
        seen.len() == self.embedding.len()
    }
}

/// The regular down-sets `U = {p : ∀q≤p ∃r≤q r∈U}` of `P`, with `e(p)` the
/// regularization of `↓p`.
pub fn regular_open_algebra(p: &Preorder) -> Completion {
    let reg = |u: &CondSet| p.dense_below_set(u);
    let embeds: Vec<CondSet> = (0..p.len()).map(|x| reg(p.down(x))).collect();
    let mut found: Vec<CondSet> = vec![p.empty_set()];
    let mut index: HashMap<CondSet, usize> = HashMap::new();
    index.insert(p.empty_set(), 0);
    for e in &embeds {
        if !index.contains_key(e) {
            index.insert(e.clone(), found.len());
            found.push(e.clone());
        }
    }
    // Close under binary joins and complements.
    let mut i = 0;
    while i < found.len() {
        let u = found[i].clone();
        let mut fresh = vec![p.pseudo_complement(&u)];
        for v in found.iter().take(i + 1) {
            let mut w = u.clone();
            w.union_with(v);
            fresh.push(reg(&w));
        }
        for w in fresh {
            if !index.contains_key(&w) {
                index.insert(w.clone(), found.len());
                found.push(w);
            }
        }
        i += 1;
    }
    found.sort_by(|a, b| {
        a.count_ones(..)
            .cmp(&b.count_ones(..))
            .then_with(|| a.ones().collect::<Vec<_>>().cmp(&b.ones().collect()))
    });
    let index: HashMap<CondSet, usize> = found
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, u)| (u, i))
        .collect();
    let n = found.len();
    let mut meet = vec![0; n * n];
    let mut join = vec![0; n * n];
    for a in 0..n {
        for b in 0..n {
            let mut m = found[a].clone();
            m.intersect_with(&found[b]);
            meet[a * n + b] = index[&m];
            let mut j = found[a].clone();
            j.union_with(&found[b]);
            join[a * n + b] = index[&reg(&j)];
        }
    }
    let complement: Vec<usize> = found
        .iter()
        .map(|u| index[&p.pseudo_complement(u)])
        .collect();
    let zero = index[&p.empty_set()];
    let one = index[&p.full_set()];
    let algebra = FiniteBooleanAlgebra::new(n, meet, join, complement, zero, one)
        .expect("regular open sets of a finite preorder form a Boolean algebra");
    let element_names = found
        .iter()
        .map(|u| {
            let parts: Vec<&str> = u.ones().map(|x| p.label(x)).collect();
            format!("{{{}}}", parts.join(","))
        })
        .collect();
    let embedding = embeds.iter().map(|e| index[e]).collect();
    Completion {
        source: p.clone(),
        algebra,
        embedding,
        element_names,
        regions: Some(found),
    }
}

/// Saturates a separative partial order by alternately adjoining suprema and
/// negations and identifying equivalent elements, until the size is stable.
/// The cap defaults to `2^m` with `m` the number of minimal classes.
pub fn saturate_to_boolean(p: &Preorder) -> Result<Completion> {
    saturate_to_boolean_capped(p, None)
}

pub fn saturate_to_boolean_capped(p: &Preorder, cap: Option<usize>) -> Result<Completion> {
    if !p.is_separative() {
        return Err(Error::NotSeparative);
    }
    if !p.is_antisymmetric() {
        return Err(Error::InvalidPreorder(
            "saturation needs an antisymmetric order".into(),
        ));
    }
    let m = p.minimal_classes().len();
    let cap = cap.unwrap_or_else(|| 1usize.checked_shl(m as u32).unwrap_or(usize::MAX));
    let base = p.len();
    let mut q = p.clone();
    loop {
        let before = q.len();
        q = adjoin_suprema(&q, base)?;
        q = antisymmetric_quotient(&q).0;
        q = adjoin_negations(&q)?;
        q = antisymmetric_quotient(&q).0;
        if !q.is_separative() {
            return Err(Error::InvalidPreorder(
                "saturation lost separativity".into(),
            ));
        }
        if q.len() + 1 > cap {
            return Err(Error::SizeCap {
                size: q.len() + 1,
                cap,
            });
        }
        if q.len() == before {
            break;
        }
    }
    // Elements of q, then a fresh zero.
    let n = q.len();
    let algebra =
        FiniteBooleanAlgebra::from_order(n + 1, |x, y| x == n || (y != n && q.leq(x, y)))?;
    let mut element_names: Vec<String> = q.labels().to_vec();
    element_names.push("0".into());
    let completion = Completion {
        source: p.clone(),
        algebra,
        embedding: (0..base).collect(),
        element_names,
        regions: None,
    };
    completion.verify()?;
    Ok(completion)
}

/// One round of suprema: all nonempty subsets of the base conditions plus all
/// pairs of current elements.
fn adjoin_suprema(q: &Preorder, base: usize) -> Result<Preorder> {
    let n = q.len();
    let mut candidates: Vec<Vec<usize>> = Vec::new();
    if base <= 12 {
        for mask in 1usize..(1 << base) {
            candidates.push((0..base).filter(|i| mask >> i & 1 == 1).collect());
        }
    }
    for x in 0..n {
        for y in x + 1..n {
            candidates.push(vec![x, y]);
        }
    }
    let compat: Vec<CondSet> = (0..n).map(|x| q.compat_set(x)).collect();
    struct New {
        members: Vec<usize>,
        up: CondSet,
        down: CondSet,
    }
    let mut news: Vec<New> = Vec::new();
    for a in candidates {
        let mut up = q.full_set();
        let mut reach = q.empty_set();
        for &x in &a {
            up.intersect_with(q.up(x));
            reach.union_with(&compat[x]);
        }
        let down = q.interior(&reach);
        let existing = up.intersection(&down).next().is_some();
        if existing || news.iter().any(|s| s.up == up && s.down == down) {
            continue;
        }
        news.push(New {
            members: a,
            up,
            down,
        });
    }
    let mut labels = q.labels().to_vec();
    for s in &news {
        let parts: Vec<&str> = s.members.iter().map(|&x| q.label(x)).collect();
        labels.push(fresh_label(&labels, format!("sup{{{}}}", parts.join(","))));
    }
    Preorder::from_fn(labels, q.top(), |x, y| match (x >= n, y >= n) {
        (false, false) => q.leq(x, y),
        (true, false) => news[x - n].up.contains(y),
        (false, true) => news[y - n].down.contains(x),
        (true, true) => news[x - n]
            .members
            .iter()
            .all(|&a| news[y - n].down.contains(a)),
    })
}

/// One round of negations of every element that is not equivalent to top.
fn adjoin_negations(q: &Preorder) -> Result<Preorder> {
    let n = q.len();
    let compat: Vec<CondSet> = (0..n).map(|x| q.compat_set(x)).collect();
    let mut news: Vec<usize> = Vec::new();
    for x in 0..n {
        if compat[x].count_ones(..) == n {
            continue; // ¬x would be zero
        }
        let below_neg = |y: usize| !compat[x].contains(y);
        let neg_below = |y: usize| {
            let mut u = compat[x].clone();
            u.union_with(&compat[y]);
            u.count_ones(..) == n
        };
        if (0..n).any(|y| below_neg(y) && neg_below(y)) {
            continue; // already present up to equivalence
        }
        news.push(x);
    }
    let mut labels = q.labels().to_vec();
    for &x in &news {
        labels.push(fresh_label(&labels, format!("¬{}", q.label(x))));
    }
    Preorder::from_fn(labels, q.top(), |a, b| match (a >= n, b >= n) {
        (false, false) => q.leq(a, b),
        (true, false) => {
            let mut u = compat[news[a - n]].clone();
            u.union_with(&compat[b]);
            u.count_ones(..) == n
        }
        (false, true) => !compat[news[b - n]].contains(a),
        (true, true) => q.leq(news[b - n], news[a - n]),
    })
}

fn fresh_label(existing: &[String], wanted: String) -> String {
    if !existing.contains(&wanted) {
        return wanted;
    }
    (1..)
        .map(|i| format!("{wanted}'{i}"))
        .find(|l| !existing.contains(l))
        .expect("unbounded supply")
}

/// Where a candidate completion map stops being a Boolean isomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoFailure {
    pub law: &'static str,
    pub element: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsoOutcome {
    Isomorphism(Vec<usize>),
    Failure(IsoFailure),
}

/// `f(b) = sup{e1(p) : e0(p) ≤ b}`, checked to be an isomorphism with
/// `f ∘ e0 = e1`.
pub fn completion_isomorphism(c0: &Completion, c1: &Completion) -> Result<IsoOutcome> {
    if c0.source != c1.source {
        return Err(Error::MismatchedSources);
    }
    let (b0, b1) = (&c0.algebra, &c1.algebra);
    let p = &c0.source;
    let f: Vec<usize> = (0..b0.size())
        .map(|b| {
            b1.sup(
                (0..p.len())
                    .filter(|&x| b0.leq(c0.embed(x), b))
                    .map(|x| c1.embed(x)),
            )
        })
        .collect();
    let fail = |law, element| Ok(IsoOutcome::Failure(IsoFailure { law, element }));
    if b0.size() != b1.size() {
        return fail("size", 0);
    }
    let mut hit = vec![false; b1.size()];
    for (b, &fb) in f.iter().enumerate() {
        if hit[fb] {
            return fail("injective", b);
        }
        hit[fb] = true;
    }
    for x in 0..p.len() {
        if f[c0.embed(x)] != c1.embed(x) {
            return fail("fixes the embedding", c0.embed(x));
        }
    }
    for a in 0..b0.size() {
        if f[b0.complement(a)] != b1.complement(f[a]) {
            return fail("complement", a);
        }
        for b in 0..b0.size() {
            if f[b0.meet(a, b)] != b1.meet(f[a], f[b]) {
                return fail("meet", a);
            }
            if f[b0.join(a, b)] != b1.join(f[a], f[b]) {
                return fail("join", a);
            }
        }
    }
    Ok(IsoOutcome::Isomorphism(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::tests::{chain, p3, point};

    fn antichain(k: usize) -> Preorder {
        let mut labels = vec!["1".to_string()];
        labels.extend((0..k).map(|i| format!("a{i}")));
        let pairs: Vec<(usize, usize)> = (1..=k).map(|i| (i, 0)).collect();
        Preorder::new(labels, &pairs, 0).unwrap()
    }

    #[test]
    fn regular_open_sizes() {
        let ro = regular_open_algebra(&p3());
        assert_eq!(ro.algebra.size(), 4);
        assert!(ro.is_injective());
        ro.verify().unwrap();
        assert_eq!(regular_open_algebra(&point()).algebra.size(), 2);
        let c = regular_open_algebra(&chain(2));
        assert_eq!(c.algebra.size(), 2);
        assert!(!c.is_injective());
    }

    #[test]
    fn regular_open_matches_brute_force() {
        for p in [p3(), chain(3), antichain(3), point()] {
            let n = p.len();
            let mut count = 0;
            for mask in 0u32..(1 << n) {
                let u = p.set_of(&(0..n).filter(|i| mask >> i & 1 == 1).collect::<Vec<_>>());
                let is_down = u.ones().all(|x| p.down(x).is_subset(&u));
                if is_down && p.dense_below_set(&u) == u {
                    count += 1;
                }
            }
            assert_eq!(regular_open_algebra(&p).algebra.size(), count);
        }
    }

    #[test]
    fn saturation_examples() {
        let s = saturate_to_boolean(&p3()).unwrap();
        assert_eq!(s.algebra.size(), 4);
        let ro = regular_open_algebra(&p3());
        assert!(matches!(
            completion_isomorphism(&ro, &s).unwrap(),
            IsoOutcome::Isomorphism(_)
        ));
        assert_eq!(saturate_to_boolean(&point()).unwrap().algebra.size(), 2);
        assert_eq!(
            saturate_to_boolean(&antichain(3)).unwrap().algebra.size(),
            8
        );
        assert_eq!(
            saturate_to_boolean(&chain(2)).unwrap_err(),
            Error::NotSeparative
        );
    }

    #[test]
    fn saturation_cap() {
        assert!(matches!(
            saturate_to_boolean_capped(&antichain(3), Some(4)),
            Err(Error::SizeCap { .. })
        ));
    }

    #[test]
    fn isomorphism_identity_and_mismatch() {
        let ro = regular_open_algebra(&p3());
        match completion_isomorphism(&ro, &ro).unwrap() {
            IsoOutcome::Isomorphism(f) => assert_eq!(f, (0..4).collect::<Vec<_>>()),
            other => panic!("{other:?}"),
        }
        let other = regular_open_algebra(&antichain(3));
        assert_eq!(
            completion_isomorphism(&ro, &other).unwrap_err(),
            Error::MismatchedSources
        );
    }

    #[test]
    fn isomorphism_detects_a_bad_embedding() {
        let ro = regular_open_algebra(&p3());
        let mut bad = ro.clone();
        bad.embedding[2] = bad.embedding[1];
        assert!(matches!(
            completion_isomorphism(&ro, &bad).unwrap(),
            IsoOutcome::Failure(_)
        ));
    }

    #[test]
    fn rejects_non_boolean_tables() {
        // Three-element chain as a lattice has no complements.
        let r = FiniteBooleanAlgebra::from_order(3, |x, y| x <= y);
        assert!(matches!(r, Err(Error::NotBoolean(_))));
    }

    #[test]
    fn atoms_of_a_powerset() {
        let ro = regular_open_algebra(&antichain(3));
        assert_eq!(ro.algebra.atoms().len(), 3);
    }
}
