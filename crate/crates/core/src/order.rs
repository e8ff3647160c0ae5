//! Finite preorders used as forcing notions.
//!
//! Conditions are indices into the carrier; labels are kept for display and
//! lookup. Stronger conditions are lower.

use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

pub type CondSet = FixedBitSet;

#[derive(Clone, PartialEq, Eq)]
pub struct Preorder {
    labels: Vec<String>,
    /// `up[p] = {q : p ≤ q}`
    up: Vec<CondSet>,
    /// `down[q] = {p : p ≤ q}`
    down: Vec<CondSet>,
    top: usize,
}

impl fmt::Debug for Preorder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Preorder[")?;
        for p in 0..self.len() {
            if p > 0 {
                write!(f, "; ")?;
            }
            let ups: Vec<&str> = self.up[p]
                .ones()
                .filter(|&q| q != p)
                .map(|q| self.label(q))
                .collect();
            write!(f, "{} <= {{{}}}", self.label(p), ups.join(","))?;
        }
        write!(f, "; top {}]", self.label(self.top))
    }
}

impl Preorder {
    /// Closes the generating pairs `(p, q)` (meaning `p ≤ q`) reflexively and
    /// transitively, then checks that `top` is above everything.
    pub fn new(labels: Vec<String>, pairs: &[(usize, usize)], top: usize) -> Result<Preorder> {
        let n = labels.len();
        check_labels(&labels)?;
        if top >= n {
            return Err(Error::UnknownCondition(format!("#{top}")));
        }
        let mut up = vec![CondSet::with_capacity(n); n];
        for (p, row) in up.iter_mut().enumerate() {
            row.insert(p);
        }
        for &(p, q) in pairs {
            if p >= n || q >= n {
                return Err(Error::UnknownCondition(format!("#{}", p.max(q))));
            }
            up[p].insert(q);
        }
        // Warshall closure on rows.
        for k in 0..n {
            let row_k = up[k].clone();
            for row in up.iter_mut() {
                if row.contains(k) {
                    row.union_with(&row_k);
                }
            }
        }
        Preorder::from_up_rows(labels, up, top)
    }

    /// Label-based convenience constructor.
    pub fn from_labels(labels: &[&str], pairs: &[(&str, &str)], top: &str) -> Result<Preorder> {
        let owned: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
        let find = |s: &str| {
            labels
                .iter()
                .position(|l| *l == s)
                .ok_or_else(|| Error::UnknownCondition(s.to_string()))
        };
        let mut idx = Vec::with_capacity(pairs.len());
        for (p, q) in pairs {
            idx.push((find(p)?, find(q)?));
        }
        Preorder::new(owned, &idx, find(top)?)
    }

    /// Builds from a relation given pointwise; the relation must already be a
    /// preorder with `top` greatest.
    pub fn from_fn(
        labels: Vec<String>,
        top: usize,
        le: impl Fn(usize, usize) -> bool,
    ) -> Result<Preorder> {
        let n = labels.len();
        check_labels(&labels)?;
        if top >= n {
            return Err(Error::UnknownCondition(format!("#{top}")));
        }
        let mut up = vec![CondSet::with_capacity(n); n];
        for (p, row) in up.iter_mut().enumerate() {
            for q in 0..n {
                if le(p, q) {
                    row.insert(q);
                }
            }
        }
        let out = Preorder::from_up_rows(labels, up, top)?;
        out.check_transitive()?;
        Ok(out)
    }

    fn from_up_rows(labels: Vec<String>, up: Vec<CondSet>, top: usize) -> Result<Preorder> {
        let n = labels.len();
        let mut down = vec![CondSet::with_capacity(n); n];
        for (p, row) in up.iter().enumerate() {
            if !row.contains(p) {
                return Err(Error::InvalidPreorder(format!(
                    "{} is not reflexive",
                    labels[p]
                )));
            }
            if !row.contains(top) {
                return Err(Error::InvalidPreorder(format!(
                    "{} is not below top {}",
                    labels[p], labels[top]
                )));
            }
            for q in row.ones() {
                down[q].insert(p);
            }
        }
        Ok(Preorder {
            labels,
            up,
            down,
            top,
        })
    }

    fn check_transitive(&self) -> Result<()> {
        for p in 0..self.len() {
            for q in self.up[p].ones() {
                if !self.up[q].is_subset(&self.up[p]) {
                    let r = self.up[q]
                        .difference(&self.up[p])
                        .next()
                        .expect("nonempty difference");
                    return Err(Error::InvalidPreorder(format!(
                        "not transitive: {} <= {} <= {}",
                        self.labels[p], self.labels[q], self.labels[r]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, p: usize) -> &str {
        &self.labels[p]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn resolve(&self, label: &str) -> Result<usize> {
        self.index_of(label)
            .ok_or_else(|| Error::UnknownCondition(label.to_string()))
    }

    pub fn resolve_all(&self, labels: &[&str]) -> Result<Vec<usize>> {
        labels.iter().map(|l| self.resolve(l)).collect()
    }

    pub fn leq(&self, p: usize, q: usize) -> bool {
        self.up[p].contains(q)
    }

    pub fn equivalent(&self, p: usize, q: usize) -> bool {
        self.leq(p, q) && self.leq(q, p)
    }

    pub fn compatible(&self, p: usize, q: usize) -> bool {
        !self.down[p].is_disjoint(&self.down[q])
    }

    pub fn up(&self, p: usize) -> &CondSet {
        &self.up[p]
    }

    pub fn down(&self, p: usize) -> &CondSet {
        &self.down[p]
    }

    pub fn empty_set(&self) -> CondSet {
        CondSet::with_capacity(self.len())
    }

    pub fn full_set(&self) -> CondSet {
        let mut s = self.empty_set();
        s.insert_range(..);
        s
    }

    pub fn set_of(&self, members: &[usize]) -> CondSet {
        let mut s = self.empty_set();
        for &m in members {
            s.insert(m);
        }
        s
    }

    /// `{q : some member of D lies below q}`.
    pub fn hits(&self, d: &CondSet) -> CondSet {
        let mut out = self.empty_set();
        for q in 0..self.len() {
            if !self.down[q].is_disjoint(d) {
                out.insert(q);
            }
        }
        out
    }

    /// `{p : every q ≤ p lies in S}`.
    pub fn interior(&self, s: &CondSet) -> CondSet {
        let mut out = self.empty_set();
        for p in 0..self.len() {
            if self.down[p].is_subset(s) {
                out.insert(p);
            }
        }
        out
    }

    /// `{p : D is dense below p}`; also the regularization of a down-set.
    pub fn dense_below_set(&self, d: &CondSet) -> CondSet {
        self.interior(&self.hits(d))
    }

    /// `{p : no q ≤ p lies in U}`.
    pub fn pseudo_complement(&self, u: &CondSet) -> CondSet {
        let mut out = self.hits(u);
        out.toggle_range(..);
        out
    }

    /// `{r : r is compatible with p}`.
    pub fn compat_set(&self, p: usize) -> CondSet {
        self.hits(&self.down[p])
    }

    pub fn is_dense(&self, d: &[usize]) -> bool {
        self.is_dense_below(d, self.top)
    }

    pub fn is_dense_below(&self, d: &[usize], p: usize) -> bool {
        self.dense_below_set(&self.set_of(d)).contains(p)
    }

    pub fn is_predense_below(&self, a: &[usize], p: usize) -> bool {
        let mut compat = self.empty_set();
        for &x in a {
            compat.union_with(&self.compat_set(x));
        }
        self.down[p].is_subset(&compat)
    }

    pub fn is_antichain(&self, a: &[usize]) -> bool {
        a.iter()
            .enumerate()
            .all(|(i, &x)| a[i + 1..].iter().all(|&y| !self.compatible(x, y)))
    }

    pub fn is_maximal_antichain(&self, a: &[usize]) -> bool {
        self.is_antichain(a) && self.is_predense_below(a, self.top)
    }

    pub fn is_antisymmetric(&self) -> bool {
        (0..self.len()).all(|p| self.up[p].ones().all(|q| q == p || !self.leq(q, p)))
    }

    pub fn is_separative(&self) -> bool {
        for p in 0..self.len() {
            for q in 0..self.len() {
                if !self.leq(p, q) && self.down[p].is_subset(&self.compat_set(q)) {
                    return false;
                }
            }
        }
        true
    }

    /// Minimal conditions, one per equivalence class, lowest index first.
    pub fn minimal_classes(&self) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for p in 0..self.len() {
            let minimal = self.down[p].ones().all(|d| self.leq(p, d));
            if minimal && !out.iter().any(|&m| self.equivalent(m, p)) {
                out.push(p);
            }
        }
        out
    }

    /// Every maximal antichain; antichains are listed by increasing indices.
    pub fn maximal_antichains(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut current = Vec::new();
        self.antichain_search(0, &mut current, &mut out);
        out
    }

    fn antichain_search(&self, from: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let mut extended = false;
        for x in from..self.len() {
            if current.iter().all(|&y| !self.compatible(x, y)) {
                extended = true;
                current.push(x);
                self.antichain_search(x + 1, current, out);
                current.pop();
            }
        }
        if !extended && self.is_predense_below(current, self.top) {
            out.push(current.clone());
        }
    }

    /// Restriction to the given conditions; `top` must be among them.
    pub fn restrict(&self, members: &[usize]) -> Result<Preorder> {
        let top = members
            .iter()
            .position(|&m| m == self.top)
            .ok_or_else(|| Error::InvalidPreorder("restriction drops the top element".into()))?;
        let labels = members.iter().map(|&m| self.labels[m].clone()).collect();
        Preorder::from_fn(labels, top, |i, j| self.leq(members[i], members[j]))
    }
}

fn check_labels(labels: &[String]) -> Result<()> {
    if labels.is_empty() {
        return Err(Error::InvalidPreorder("empty carrier".into()));
    }
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(Error::DuplicateLabel(l.clone()));
        }
    }
    Ok(())
}

/// Projection of a preorder onto a quotient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientMap {
    pub source: Preorder,
    pub target: Preorder,
    pub map: Vec<usize>,
}

impl QuotientMap {
    pub fn apply(&self, p: usize) -> usize {
        self.map[p]
    }
}

/// Groups conditions by `key`, numbering classes by their lowest member.
fn classes_by<K: PartialEq>(n: usize, key: impl Fn(usize) -> K) -> (Vec<usize>, Vec<usize>) {
    let keys: Vec<K> = (0..n).map(&key).collect();
    let mut reps: Vec<usize> = Vec::new();
    let mut map = vec![0; n];
    for p in 0..n {
        match reps.iter().position(|&r| keys[r] == keys[p]) {
            Some(c) => map[p] = c,
            None => {
                map[p] = reps.len();
                reps.push(p);
            }
        }
    }
    (reps, map)
}

/// Separative quotient: `p ≈ q` iff the same conditions are compatible with
/// both; `[p] ≤ [q]` iff everything compatible with `p` is compatible with `q`.
pub fn separative_quotient(p: &Preorder) -> (Preorder, QuotientMap) {
    let compat: Vec<CondSet> = (0..p.len()).map(|x| p.compat_set(x)).collect();
    let (reps, map) = classes_by(p.len(), |x| compat[x].clone());
    let labels = reps.iter().map(|&r| p.labels[r].clone()).collect();
    let target = Preorder::from_fn(labels, map[p.top], |i, j| {
        compat[reps[i]].is_subset(&compat[reps[j]])
    })
    .expect("separative quotient order is a preorder with top");
    let qm = QuotientMap {
        source: p.clone(),
        target: target.clone(),
        map,
    };
    (target, qm)
}

/// Quotient by mutual `≤`.
pub fn antisymmetric_quotient(p: &Preorder) -> (Preorder, QuotientMap) {
    let (reps, map) = classes_by(p.len(), |x| p.up[x].clone());
    let labels = reps.iter().map(|&r| p.labels[r].clone()).collect();
    let target = Preorder::from_fn(labels, map[p.top], |i, j| p.leq(reps[i], reps[j]))
        .expect("antisymmetric quotient of a preorder");
    let qm = QuotientMap {
        source: p.clone(),
        target: target.clone(),
        map,
    };
    (target, qm)
}

/// Result of adjoining one element to a preorder.
#[derive(Clone, Debug)]
pub struct Adjunction {
    pub order: Preorder,
    /// Index of the new element (always last).
    pub element: usize,
    /// The new element lies below every condition and has nothing from the
    /// input below it.
    pub zero: bool,
}

fn extend_by_one(
    p: &Preorder,
    label: String,
    below: impl Fn(usize) -> bool,
    above: impl Fn(usize) -> bool,
) -> Result<Preorder> {
    let n = p.len();
    let mut labels = p.labels.clone();
    if labels.contains(&label) {
        return Err(Error::DuplicateLabel(label));
    }
    labels.push(label);
    // below(x): new ≤ x; above(x): x ≤ new
    Preorder::from_fn(labels, p.top, |x, y| match (x == n, y == n) {
        (false, false) => p.leq(x, y),
        (true, false) => below(y),
        (false, true) => above(x),
        (true, true) => true,
    })
}

fn set_label(p: &Preorder, a: &[usize]) -> String {
    let parts: Vec<&str> = a.iter().map(|&x| p.label(x)).collect();
    format!("sup{{{}}}", parts.join(","))
}

/// Adds `sup A` with `sup A ≤ p` iff every member of `A` is below `p`, and
/// `p ≤ sup A` iff `A` is predense below `p`.
///
/// Fails when the resulting relation is not transitive, which happens on some
/// non-separative inputs.
pub fn add_supremum(p: &Preorder, a: &[usize]) -> Result<Adjunction> {
    for &x in a {
        if x >= p.len() {
            return Err(Error::UnknownCondition(format!("#{x}")));
        }
    }
    if a.is_empty() {
        log::warn!("adding the supremum of the empty set produces a zero-like condition");
    }
    let order = extend_by_one(
        p,
        set_label(p, a),
        |x| a.iter().all(|&m| p.leq(m, x)),
        |x| p.is_predense_below(a, x),
    )?;
    let element = p.len();
    let zero = (0..p.len()).all(|x| !order.leq(x, element));
    Ok(Adjunction {
        order,
        element,
        zero,
    })
}

/// Adds `¬q` with `p ≤ ¬q` iff `p ⊥ q` and `¬q ≤ p` iff every condition is
/// compatible with `q` or with `p`. The input must be separative.
pub fn add_negation(p: &Preorder, q: usize) -> Result<Adjunction> {
    if q >= p.len() {
        return Err(Error::UnknownCondition(format!("#{q}")));
    }
    if !p.is_separative() {
        return Err(Error::NotSeparative);
    }
    let compat_q = p.compat_set(q);
    let order = extend_by_one(
        p,
        format!("¬{}", p.label(q)),
        |x| {
            let mut u = compat_q.clone();
            u.union_with(&p.compat_set(x));
            u.count_ones(..) == p.len()
        },
        |x| !p.compatible(x, q),
    )?;
    let element = p.len();
    let zero = (0..p.len()).all(|x| p.compatible(x, q));
    if !zero && !order.is_separative() {
        return Err(Error::InvalidPreorder("negation broke separativity".into()));
    }
    Ok(Adjunction {
        order,
        element,
        zero,
    })
}

/// True iff every maximal antichain of `sub` is predense (below top) in
/// `full`. Conditions are matched by label.
pub fn is_complete_subforcing(sub: &Preorder, full: &Preorder) -> Result<bool> {
    let embed: Vec<usize> = sub
        .labels
        .iter()
        .map(|l| full.resolve(l))
        .collect::<Result<_>>()?;
    for x in 0..sub.len() {
        for y in 0..sub.len() {
            if sub.leq(x, y) != full.leq(embed[x], embed[y]) {
                return Err(Error::OrderDisagreement(format!(
                    "{} vs {}",
                    sub.label(x),
                    sub.label(y)
                )));
            }
        }
    }
    for a in sub.maximal_antichains() {
        let image: Vec<usize> = a.iter().map(|&x| embed[x]).collect();
        if !full.is_predense_below(&image, full.top) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub fn p3() -> Preorder {
        Preorder::from_labels(&["1", "a", "b"], &[("a", "1"), ("b", "1")], "1").unwrap()
    }

    pub fn chain(n: usize) -> Preorder {
        let labels: Vec<String> = (0..n)
            .map(|i| if i == 0 { "1".into() } else { format!("c{i}") })
            .collect();
        let pairs: Vec<(usize, usize)> = (1..n).map(|i| (i, i - 1)).collect();
        Preorder::new(labels, &pairs, 0).unwrap()
    }

    pub fn point() -> Preorder {
        Preorder::from_labels(&["1"], &[], "1").unwrap()
    }

    #[test]
    fn density() {
        let p = p3();
        assert!(p.is_dense(&[1, 2]));
        assert!(!p.is_dense(&[1]));
        assert!(!p.is_dense(&[0]));
        assert!(point().is_dense(&[0]));
    }

    #[test]
    fn predensity() {
        let p = p3();
        assert!(p.is_predense_below(&[1, 2], 0));
        assert!(p.is_predense_below(&[1], 1));
        assert!(!p.is_predense_below(&[1], 0));
    }

    #[test]
    fn antichains() {
        let p = p3();
        assert!(p.is_maximal_antichain(&[1, 2]));
        assert!(p.is_maximal_antichain(&[0]));
        assert!(!p.is_antichain(&[1, 0]));
        assert_eq!(p.maximal_antichains(), vec![vec![0], vec![1, 2]]);
    }

    #[test]
    fn separativity() {
        assert!(p3().is_separative());
        assert!(!chain(2).is_separative());
        assert!(point().is_separative());
    }

    #[test]
    fn quotients() {
        let (q, m) = separative_quotient(&chain(2));
        assert_eq!(q.len(), 1);
        assert_eq!(m.map, vec![0, 0]);
        let (q, _) = separative_quotient(&p3());
        assert_eq!(q, p3());
    }

    #[test]
    fn minimal() {
        assert_eq!(p3().minimal_classes(), vec![1, 2]);
        assert_eq!(point().minimal_classes(), vec![0]);
        assert_eq!(chain(3).minimal_classes(), vec![2]);
    }

    #[test]
    fn top_must_be_greatest() {
        assert!(Preorder::from_labels(&["1", "a"], &[], "1").is_err());
        assert!(matches!(
            Preorder::from_labels(&["1", "1"], &[], "1"),
            Err(Error::DuplicateLabel(_))
        ));
    }

    #[test]
    fn suprema() {
        let p = p3();
        let s = add_supremum(&p, &[1, 2]).unwrap();
        assert!(s.order.equivalent(s.element, 0));
        let s = add_supremum(&p, &[1]).unwrap();
        assert!(s.order.equivalent(s.element, 1));
        let s = add_supremum(&p, &[]).unwrap();
        assert!(s.zero);
        assert!((0..3).all(|x| s.order.leq(s.element, x)));
    }

    #[test]
    fn supremum_in_a_chain_is_not_transitive() {
        // 1 ≤ sup{b} ≤ b but 1 ≰ b.
        assert!(matches!(
            add_supremum(&chain(3), &[2]),
            Err(Error::InvalidPreorder(_))
        ));
    }

    #[test]
    fn negations() {
        let p = p3();
        let n = add_negation(&p, 1).unwrap();
        assert!(n.order.equivalent(n.element, 2));
        assert!(!n.zero);
        let nn = add_negation(&n.order, n.element).unwrap();
        assert!(nn.order.equivalent(nn.element, 1));
        let z = add_negation(&p, 0).unwrap();
        assert!(z.zero);
        assert!((0..3).all(|x| z.order.leq(z.element, x) && !z.order.leq(x, z.element)));
        assert_eq!(
            add_negation(&chain(2), 0).unwrap_err(),
            Error::NotSeparative
        );
    }

    #[test]
    fn complete_subforcing() {
        let p = p3();
        assert!(is_complete_subforcing(&p, &p).unwrap());
        let sub = Preorder::from_labels(&["1", "a"], &[("a", "1")], "1").unwrap();
        assert!(!is_complete_subforcing(&sub, &p).unwrap());
        let bad = Preorder::from_labels(&["1", "a"], &[("a", "1"), ("1", "a")], "1").unwrap();
        assert!(matches!(
            is_complete_subforcing(&bad, &p),
            Err(Error::OrderDisagreement(_))
        ));
    }
}
