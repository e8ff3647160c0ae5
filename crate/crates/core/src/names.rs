//! Names over a finite preorder, filters, and evaluation.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex, OnceLock, Weak};

use crate::hf::HfSet;
use crate::order::{CondSet, Preorder, QuotientMap};

/// A finite set of pairs `⟨name, condition⟩`, kept sorted and deduplicated.
/// Names are hash-consed: structurally equal names share one node, so
/// equality is pointer equality.
#[derive(Clone)]
pub struct PName(Arc<NameNode>);

struct NameNode {
    entries: Box<[(PName, usize)]>,
    rank: u32,
    digest: u64,
}

#[derive(Default)]
struct Interner {
    buckets: HashMap<u64, Vec<Weak<NameNode>>>,
    sweep_at: usize,
}

fn intern(node: NameNode) -> PName {
    static INTERNER: OnceLock<Mutex<Interner>> = OnceLock::new();
    let mut guard = INTERNER
        .get_or_init(Default::default)
        .lock()
        .unwrap_or_else(|e| e.into_inner());
    let table = &mut *guard;
    let bucket = table.buckets.entry(node.digest).or_default();
    bucket.retain(|w| w.strong_count() > 0);
    // children are interned, so comparing entries only compares pointers
    if let Some(found) = bucket
        .iter()
        .filter_map(Weak::upgrade)
        .find(|a| a.rank == node.rank && a.entries == node.entries)
    {
        return PName(found);
    }
    let fresh = Arc::new(node);
    bucket.push(Arc::downgrade(&fresh));
    if table.buckets.len() > table.sweep_at {
        table
            .buckets
            .retain(|_, b| b.iter().any(|w| w.strong_count() > 0));
        table.sweep_at = (2 * table.buckets.len()).max(4096);
    }
    PName(fresh)
}

impl PName {
    pub fn empty() -> PName {
        PName::from_entries(Vec::new())
    }

    pub fn from_entries<I: IntoIterator<Item = (PName, usize)>>(entries: I) -> PName {
        let mut v: Vec<(PName, usize)> = entries.into_iter().collect();
        v.sort();
        v.dedup();
        let rank = v.iter().map(|(n, _)| n.rank() + 1).max().unwrap_or(0);
        let mut h: u64 = 0x84222325cbf29ce4;
        for (n, c) in &v {
            h = (h ^ n.digest())
                .wrapping_mul(0x0000_0100_0000_01b3)
                .rotate_left(11);
            h = (h ^ (*c as u64).wrapping_add(0x9e37_79b9)).wrapping_mul(0x0000_0100_0000_01b3);
        }
        h ^= v.len() as u64;
        intern(NameNode {
            entries: v.into_boxed_slice(),
            rank,
            digest: h,
        })
    }

    pub fn entries(&self) -> &[(PName, usize)] {
        &self.0.entries
    }

    pub fn len(&self) -> usize {
        self.0.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.entries.is_empty()
    }

    /// Supremum of `rank(τ) + 1` over the entries.
    pub fn rank(&self) -> u32 {
        self.0.rank
    }

    fn digest(&self) -> u64 {
        self.0.digest
    }

    /// Names in the domain, without repetition.
    pub fn domain(&self) -> Vec<PName> {
        let mut out: Vec<PName> = self.entries().iter().map(|(n, _)| n.clone()).collect();
        out.dedup();
        out
    }

    /// Every name occurring hereditarily inside `self`, excluding `self`.
    pub fn subnames(&self) -> BTreeSet<PName> {
        let mut out = BTreeSet::new();
        let mut stack: Vec<PName> = self.domain();
        while let Some(n) = stack.pop() {
            if out.insert(n.clone()) {
                stack.extend(n.domain());
            }
        }
        out
    }

    /// Every condition occurring hereditarily.
    pub fn conditions(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut seen = BTreeSet::new();
        let mut stack = vec![self.clone()];
        while let Some(n) = stack.pop() {
            if !seen.insert(n.clone()) {
                continue;
            }
            for (m, c) in n.entries() {
                out.insert(*c);
                stack.push(m.clone());
            }
        }
        out
    }

    pub fn union(&self, other: &PName) -> PName {
        PName::from_entries(self.entries().iter().chain(other.entries()).cloned())
    }

    pub fn with(&self, entry: (PName, usize)) -> PName {
        PName::from_entries(self.entries().iter().cloned().chain(std::iter::once(entry)))
    }

    pub fn without(&self, entry: &(PName, usize)) -> PName {
        PName::from_entries(self.entries().iter().filter(|e| *e != entry).cloned())
    }

    /// Applies `f` to every condition hereditarily.
    pub fn map_conditions(&self, f: &mut impl FnMut(usize) -> usize) -> PName {
        let mut memo = HashMap::new();
        self.map_with(f, &mut memo)
    }

    fn map_with(
        &self,
        f: &mut impl FnMut(usize) -> usize,
        memo: &mut HashMap<PName, PName>,
    ) -> PName {
        if let Some(done) = memo.get(self) {
            return done.clone();
        }
        let out = PName::from_entries(
            self.entries()
                .iter()
                .map(|(n, c)| (n.map_with(f, memo), f(*c)))
                .collect::<Vec<_>>(),
        );
        memo.insert(self.clone(), out.clone());
        out
    }

    /// Like [`PName::map_conditions`] but `f` may refuse a condition.
    pub fn try_map_conditions<E>(
        &self,
        f: &mut impl FnMut(usize) -> Result<usize, E>,
    ) -> Result<PName, E> {
        let mut entries = Vec::with_capacity(self.len());
        for (n, c) in self.entries() {
            entries.push((n.try_map_conditions(f)?, f(*c)?));
        }
        Ok(PName::from_entries(entries))
    }

    /// Rendering with condition labels.
    pub fn display<'a>(&'a self, order: &'a Preorder) -> impl fmt::Display + 'a {
        NameDisplay {
            name: self,
            order: Some(order),
        }
    }
}

struct NameDisplay<'a> {
    name: &'a PName,
    order: Option<&'a Preorder>,
}

impl fmt::Display for NameDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (n, c)) in self.name.entries().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            let inner = NameDisplay {
                name: n,
                order: self.order,
            };
            match self.order {
                Some(o) if *c < o.len() => write!(f, "<{inner},{}>", o.label(*c))?,
                _ => write!(f, "<{inner},#{c}>")?,
            }
        }
        f.write_str("}")
    }
}

impl fmt::Display for PName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        NameDisplay {
            name: self,
            order: None,
        }
        .fmt(f)
    }
}

impl fmt::Debug for PName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl PartialEq for PName {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

impl Eq for PName {}

impl Hash for PName {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.digest());
    }
}

impl Ord for PName {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.rank()
            .cmp(&other.rank())
            .then_with(|| self.entries().cmp(other.entries()))
    }
}

impl PartialOrd for PName {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `x̌ = {⟨y̌, top⟩ : y ∈ x}`.
pub fn check_name(x: &HfSet, top: usize) -> PName {
    PName::from_entries(
        x.elements()
            .iter()
            .map(|y| (check_name(y, top), top))
            .collect::<Vec<_>>(),
    )
}

/// Check name of the von Neumann natural `n`.
pub fn check_nat(n: usize, top: usize) -> PName {
    check_name(&HfSet::natural(n), top)
}

/// `op(σ,τ) = {⟨{⟨σ,1⟩},1⟩, ⟨{⟨σ,1⟩,⟨τ,1⟩},1⟩}`.
pub fn op_name(sigma: &PName, tau: &PName, top: usize) -> PName {
    let single = PName::from_entries([(sigma.clone(), top)]);
    let double = PName::from_entries([(sigma.clone(), top), (tau.clone(), top)]);
    PName::from_entries([(single, top), (double, top)])
}

/// Conditions are coded as the von Neumann natural of their index.
pub fn condition_code(p: usize) -> HfSet {
    HfSet::natural(p)
}

/// `Ġ = {⟨p̌, p⟩ : p ∈ P}`.
pub fn gdot_name(order: &Preorder) -> PName {
    let top = order.top();
    PName::from_entries(
        (0..order.len())
            .map(|p| (check_name(&condition_code(p), top), p))
            .collect::<Vec<_>>(),
    )
}

/// A set of conditions; see `generic::filter_validate` for the filter laws.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Filter {
    members: CondSet,
}

impl Filter {
    pub fn from_set(members: CondSet) -> Filter {
        Filter { members }
    }

    pub fn from_members(size: usize, members: &[usize]) -> Filter {
        let mut s = CondSet::with_capacity(size);
        for &m in members {
            s.insert(m);
        }
        Filter { members: s }
    }

    pub fn contains(&self, p: usize) -> bool {
        self.members.contains(p)
    }

    pub fn members(&self) -> Vec<usize> {
        self.members.ones().collect()
    }

    pub fn as_set(&self) -> &CondSet {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Memoizing evaluator `σ ↦ σ^G`.
pub struct Evaluator<'a> {
    filter: &'a Filter,
    cache: HashMap<PName, HfSet>,
}

impl<'a> Evaluator<'a> {
    pub fn new(filter: &'a Filter) -> Evaluator<'a> {
        Evaluator {
            filter,
            cache: HashMap::new(),
        }
    }

    pub fn filter(&self) -> &Filter {
        self.filter
    }

    pub fn eval(&mut self, sigma: &PName) -> HfSet {
        if let Some(v) = self.cache.get(sigma) {
            return v.clone();
        }
        let mut elems = Vec::new();
        for (tau, p) in sigma.entries() {
            if self.filter.contains(*p) {
                elems.push(self.eval(tau));
            }
        }
        let v = HfSet::from_elements(elems);
        self.cache.insert(sigma.clone(), v.clone());
        v
    }
}

/// `σ^G = {τ^G : ∃p∈G ⟨τ,p⟩∈σ}`.
pub fn evaluate(sigma: &PName, g: &Filter) -> HfSet {
    Evaluator::new(g).eval(sigma)
}

/// `σ^p = {τ^p : ∃q ⟨τ,q⟩∈σ, p ≤ q}`.
pub fn p_evaluation(sigma: &PName, order: &Preorder, p: usize) -> HfSet {
    HfSet::from_elements(
        sigma
            .entries()
            .iter()
            .filter(|(_, q)| order.leq(p, *q))
            .map(|(tau, _)| p_evaluation(tau, order, p)),
    )
}

/// `σ^π = {⟨τ^π, π(p)⟩ : ⟨τ,p⟩ ∈ σ}`.
pub fn transport_quotient(sigma: &PName, pi: &QuotientMap) -> PName {
    sigma.map_conditions(&mut |p| pi.apply(p))
}

/// Replaces the condition `sup` by `top` hereditarily.
pub fn plus_transform(sigma: &PName, sup: usize, top: usize) -> PName {
    sigma.map_conditions(&mut |p| if p == sup { top } else { p })
}

/// Drops every pair conditioned on `sup`, hereditarily.
pub fn minus_transform(sigma: &PName, sup: usize) -> PName {
    PName::from_entries(
        sigma
            .entries()
            .iter()
            .filter(|(_, p)| *p != sup)
            .map(|(tau, p)| (minus_transform(tau, sup), *p))
            .collect::<Vec<_>>(),
    )
}
