//! Collapse forcings: finite partial functions from slots to ordinals, in the
//! plain, initial-segment and marker variants, truncated to finitely many slots
//! and values.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::generic::{DenseProvider, Forcing};
use crate::names::{check_nat, op_name, PName};
use crate::order::{CondSet, Preorder};

pub const MAX_SLOTS: usize = 8;
pub const MAX_HEIGHT: usize = 16;
/// Largest carrier `CollapseForcing::explicit` will enumerate.
pub const MAX_ENUMERATED: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Val(usize),
    /// The marker `≥β`.
    AtLeast(usize),
}

impl Slot {
    fn bound(self) -> usize {
        match self {
            Slot::Val(v) | Slot::AtLeast(v) => v,
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Val(v) => write!(f, "{v}"),
            Slot::AtLeast(b) => write!(f, ">={b}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    Plain,
    /// Domains are initial segments of the slots.
    Star,
    /// Values may also be markers `≥β`.
    Geq,
}

impl Variant {
    pub fn keyword(self) -> &'static str {
        match self {
            Variant::Plain => "plain",
            Variant::Star => "star",
            Variant::Geq => "geq",
        }
    }

    pub fn parse(s: &str) -> Option<Variant> {
        match s {
            "plain" => Some(Variant::Plain),
            "star" => Some(Variant::Star),
            "geq" => Some(Variant::Geq),
            _ => None,
        }
    }
}

/// A finite partial function from slots to values.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CollapseCondition(BTreeMap<usize, Slot>);

impl CollapseCondition {
    pub fn empty() -> CollapseCondition {
        CollapseCondition(BTreeMap::new())
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, Slot)>) -> CollapseCondition {
        CollapseCondition(pairs.into_iter().collect())
    }

    pub fn values(pairs: &[(usize, usize)]) -> CollapseCondition {
        CollapseCondition::from_pairs(pairs.iter().map(|&(n, v)| (n, Slot::Val(v))))
    }

    pub fn get(&self, n: usize) -> Option<Slot> {
        self.0.get(&n).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, Slot)> + '_ {
        self.0.iter().map(|(&n, &s)| (n, s))
    }

    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn has_value(&self, v: usize) -> bool {
        self.0.values().any(|&s| s == Slot::Val(v))
    }

    pub fn with(&self, n: usize, s: Slot) -> CollapseCondition {
        let mut m = self.0.clone();
        m.insert(n, s);
        CollapseCondition(m)
    }

    pub fn map_values(&self, f: impl Fn(Slot) -> Slot) -> CollapseCondition {
        CollapseCondition(self.0.iter().map(|(&n, &s)| (n, f(s))).collect())
    }

    /// `{0:2,1:>=1}`.
    pub fn label(&self) -> String {
        let parts: Vec<String> = self.0.iter().map(|(n, s)| format!("{n}:{s}")).collect();
        format!("{{{}}}", parts.join(","))
    }

    pub fn parse_label(text: &str) -> Result<CollapseCondition> {
        let bad = || Error::UnknownCondition(text.to_string());
        let inner = text
            .trim()
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .ok_or_else(bad)?;
        let mut m = BTreeMap::new();
        for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (n, v) = part.split_once(':').ok_or_else(bad)?;
            let n: usize = n.trim().parse().map_err(|_| bad())?;
            let v = v.trim();
            let slot = match v.strip_prefix(">=") {
                Some(b) => Slot::AtLeast(b.trim().parse().map_err(|_| bad())?),
                None => Slot::Val(v.parse().map_err(|_| bad())?),
            };
            if m.insert(n, slot).is_some() {
                return Err(bad());
            }
        }
        Ok(CollapseCondition(m))
    }
}

impl fmt::Display for CollapseCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CollapseForcing {
    pub slots: usize,
    pub height: usize,
    pub variant: Variant,
}

impl CollapseForcing {
    pub fn new(slots: usize, height: usize, variant: Variant) -> Result<CollapseForcing> {
        if slots > MAX_SLOTS {
            return Err(Error::BoundExceeded(format!(
                "{slots} slots (at most {MAX_SLOTS})"
            )));
        }
        if height > MAX_HEIGHT {
            return Err(Error::BoundExceeded(format!(
                "height {height} (at most {MAX_HEIGHT})"
            )));
        }
        Ok(CollapseForcing {
            slots,
            height,
            variant,
        })
    }

    fn slot_ok(&self, s: Slot) -> bool {
        match s {
            Slot::Val(v) => v < self.height,
            Slot::AtLeast(b) => self.variant == Variant::Geq && b < self.height,
        }
    }

    /// `q(n)` is `≥α` and `p(n)` is `β` or `≥β` with `β ≥ α`.
    fn slot_leq(&self, p: Slot, q: Slot) -> bool {
        p == q || (self.variant == Variant::Geq && matches!(q, Slot::AtLeast(a) if p.bound() >= a))
    }

    /// Number of conditions `explicit` would enumerate.
    pub fn carrier_size(&self) -> usize {
        let per_slot = match self.variant {
            Variant::Geq => 2 * self.height,
            _ => self.height,
        };
        match self.variant {
            Variant::Star => (0..=self.slots)
                .map(|k| per_slot.saturating_pow(k as u32))
                .sum(),
            _ => (per_slot + 1).saturating_pow(self.slots as u32),
        }
    }

    fn slot_values(&self) -> Vec<Slot> {
        let mut out: Vec<Slot> = (0..self.height).map(Slot::Val).collect();
        if self.variant == Variant::Geq {
            out.extend((0..self.height).map(Slot::AtLeast));
        }
        out
    }

    /// Every condition, weakest first: by domain size, then lexicographically.
    pub fn conditions(&self) -> Result<Vec<CollapseCondition>> {
        self.conditions_capped(MAX_ENUMERATED)
    }

    pub fn conditions_capped(&self, cap: usize) -> Result<Vec<CollapseCondition>> {
        let size = self.carrier_size();
        if size > cap {
            return Err(Error::SizeCap { size, cap });
        }
        let values = self.slot_values();
        let mut out = vec![CollapseCondition::empty()];
        for n in 0..self.slots {
            let mut next = Vec::new();
            for p in &out {
                if self.variant == Variant::Star && p.len() < n {
                    continue;
                }
                for &v in &values {
                    next.push(p.with(n, v));
                }
            }
            out.extend(next);
        }
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Ok(out)
    }

    pub fn explicit(&self) -> Result<CollapseOrder> {
        self.explicit_capped(MAX_ENUMERATED)
    }

    pub fn explicit_capped(&self, cap: usize) -> Result<CollapseOrder> {
        let conditions = self.conditions_capped(cap)?;
        let labels: Vec<String> = conditions.iter().map(|c| c.label()).collect();
        let order = Preorder::from_fn(labels, 0, |i, j| self.leq(&conditions[i], &conditions[j]))?;
        let index = conditions
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, c)| (c, i))
            .collect();
        Ok(CollapseOrder {
            forcing: *self,
            conditions,
            order,
            index,
        })
    }

    /// Lowest free slot (a random one under a seed), or the next slot for the
    /// initial-segment variant.
    fn free_slot(&self, p: &CollapseCondition, rng: Option<&mut ChaCha8Rng>) -> Option<usize> {
        if self.variant == Variant::Star {
            return (p.len() < self.slots).then_some(p.len());
        }
        let mut free: Vec<usize> = (0..self.slots).filter(|n| p.get(*n).is_none()).collect();
        if let Some(r) = rng {
            free.shuffle(r);
        }
        free.first().copied()
    }

    /// `D_α = {p : α ∈ ran p}` with an extender writing `α` into a free slot.
    pub fn value_provider(&self, alpha: usize) -> Result<DenseProvider<CollapseCondition>> {
        if alpha >= self.height {
            return Err(Error::BoundExceeded(format!(
                "value {alpha} at height {}",
                self.height
            )));
        }
        if self.variant == Variant::Geq {
            return Err(Error::Precondition(
                "value sets are defined for the plain and star variants".into(),
            ));
        }
        let me = *self;
        Ok(DenseProvider::new(
            format!("D_value{alpha}"),
            move |p: &CollapseCondition| p.has_value(alpha),
            move |p: &CollapseCondition, rng| {
                if p.has_value(alpha) {
                    return Ok(p.clone());
                }
                let n = me.free_slot(p, rng).ok_or(Error::NoFreeSlot(alpha))?;
                Ok(p.with(n, Slot::Val(alpha)))
            },
        ))
    }

    /// `D_n = {p : n ∈ dom p}`; the extender fills slots up to `n` with the
    /// lowest value (a random one under a seed).
    pub fn slot_provider(&self, n: usize) -> Result<DenseProvider<CollapseCondition>> {
        if n >= self.slots || self.height == 0 {
            return Err(Error::BoundExceeded(format!(
                "slot {n} of {} at height {}",
                self.slots, self.height
            )));
        }
        let me = *self;
        Ok(DenseProvider::new(
            format!("D_slot{n}"),
            move |p: &CollapseCondition| p.get(n).is_some(),
            move |p: &CollapseCondition, mut rng: Option<&mut ChaCha8Rng>| {
                let mut q = p.clone();
                let fill: Vec<usize> = if me.variant == Variant::Star {
                    (0..=n).collect()
                } else {
                    vec![n]
                };
                for m in fill {
                    if q.get(m).is_none() {
                        let v = match rng.as_deref_mut() {
                            Some(r) => *(0..me.height)
                                .collect::<Vec<_>>()
                                .choose(r)
                                .expect("positive height"),
                            None => 0,
                        };
                        q = q.with(m, Slot::Val(v));
                    }
                }
                Ok(q)
            },
        ))
    }

    /// A condition incompatible with every member of the antichain `a`: same
    /// domain as its first member, each value one above the largest value
    /// any member takes at that slot.
    pub fn antichain_defeater(&self, a: &[CollapseCondition]) -> Result<CollapseCondition> {
        if self.variant == Variant::Geq {
            return Err(Error::Precondition(
                "defeaters are defined for the plain and star variants".into(),
            ));
        }
        let first = a
            .first()
            .ok_or_else(|| Error::Precondition("empty antichain".into()))?;
        if a.len() == 1 && first.is_empty() {
            return Err(Error::Precondition("the antichain {1} is maximal".into()));
        }
        let mut c = CollapseCondition::empty();
        for n in first.domain() {
            let sup = a
                .iter()
                .filter_map(|b| b.get(n))
                .map(Slot::bound)
                .max()
                .expect("first member has slot n");
            let value = sup + 1;
            if value >= self.height {
                return Err(Error::HeightOverflow {
                    value,
                    height: self.height,
                });
            }
            c = c.with(n, Slot::Val(value));
        }
        Ok(c)
    }

    /// Replaces `p(n)` by `≥α` whenever `p(n) ≥ α` or `p(n)` is `≥β` with
    /// `β > α`.
    pub fn geq_reduction(&self, p: &CollapseCondition, alpha: usize) -> Result<CollapseCondition> {
        if self.variant != Variant::Geq {
            return Err(Error::Precondition(
                "reduction needs the marker variant".into(),
            ));
        }
        if alpha >= self.height {
            return Err(Error::BoundExceeded(format!(
                "{alpha} at height {}",
                self.height
            )));
        }
        Ok(p.map_values(|s| match s {
            Slot::Val(v) if v >= alpha => Slot::AtLeast(alpha),
            Slot::AtLeast(b) if b > alpha => Slot::AtLeast(alpha),
            s => s,
        }))
    }

    /// Caps values above `α` at `α` and markers above `≥α` at `≥α`.
    pub fn project(&self, p: &CollapseCondition, alpha: usize) -> CollapseCondition {
        p.map_values(|s| match s {
            Slot::Val(v) if v > alpha => Slot::Val(alpha),
            Slot::AtLeast(b) if b > alpha => Slot::AtLeast(alpha),
            s => s,
        })
    }
}

impl Forcing for CollapseForcing {
    type Condition = CollapseCondition;

    fn top(&self) -> CollapseCondition {
        CollapseCondition::empty()
    }

    fn is_valid(&self, p: &CollapseCondition) -> bool {
        let in_range = p.entries().all(|(n, s)| n < self.slots && self.slot_ok(s));
        let initial = self.variant != Variant::Star || p.domain().enumerate().all(|(i, n)| i == n);
        in_range && initial
    }

    fn leq(&self, p: &CollapseCondition, q: &CollapseCondition) -> bool {
        q.entries()
            .all(|(n, qs)| p.get(n).is_some_and(|ps| self.slot_leq(ps, qs)))
    }

    fn show(&self, p: &CollapseCondition) -> String {
        p.label()
    }
}

/// A fully enumerated collapse forcing.
#[derive(Clone, Debug)]
pub struct CollapseOrder {
    pub forcing: CollapseForcing,
    pub conditions: Vec<CollapseCondition>,
    pub order: Preorder,
    index: HashMap<CollapseCondition, usize>,
}

impl CollapseOrder {
    pub fn index_of(&self, c: &CollapseCondition) -> Result<usize> {
        self.index
            .get(c)
            .copied()
            .ok_or_else(|| Error::UnknownCondition(c.label()))
    }

    pub fn condition(&self, i: usize) -> &CollapseCondition {
        &self.conditions[i]
    }

    /// Members of `D_α`.
    pub fn value_set(&self, alpha: usize) -> Vec<usize> {
        (0..self.conditions.len())
            .filter(|&i| self.conditions[i].has_value(alpha))
            .collect()
    }

    /// Conditions whose values and markers all lie below `bound`.
    pub fn stratum(&self, bound: usize) -> CondSet {
        let mut s = self.order.empty_set();
        for (i, c) in self.conditions.iter().enumerate() {
            if c.entries().all(|(_, v)| v.bound() < bound) {
                s.insert(i);
            }
        }
        s
    }

    /// The marker-variant truncation at `α`: values below `α` and markers
    /// `≥β` with `β ≤ α`.
    pub fn geq_truncation(&self, alpha: usize) -> Vec<usize> {
        (0..self.conditions.len())
            .filter(|&i| {
                self.conditions[i].entries().all(|(_, s)| match s {
                    Slot::Val(v) => v < alpha,
                    Slot::AtLeast(b) => b <= alpha,
                })
            })
            .collect()
    }

    /// `{⟨op(ň,α̌), {⟨n,α⟩}⟩ : n < slots, α < λ}`.
    pub fn surjection_name(&self, lambda: usize) -> Result<PName> {
        if self.forcing.variant != Variant::Plain {
            return Err(Error::Precondition(
                "the surjection name is built over the plain variant".into(),
            ));
        }
        if lambda > self.forcing.height {
            return Err(Error::BoundExceeded(format!(
                "{lambda} above height {}",
                self.forcing.height
            )));
        }
        let top = self.order.top();
        let mut entries = Vec::new();
        for n in 0..self.forcing.slots {
            for alpha in 0..lambda {
                let c = self.index_of(&CollapseCondition::values(&[(n, alpha)]))?;
                entries.push((op_name(&check_nat(n, top), &check_nat(alpha, top), top), c));
            }
        }
        Ok(PName::from_entries(entries))
    }

    /// Index map of the projection capping at `α`.
    pub fn projection(&self, alpha: usize) -> Result<Vec<usize>> {
        self.conditions
            .iter()
            .map(|c| self.index_of(&self.forcing.project(c, alpha)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hf::HfSet;
    use crate::names::{evaluate, Filter};
    use crate::order::is_complete_subforcing;

    #[test]
    fn sizes() {
        let c = CollapseForcing::new(2, 3, Variant::Plain)
            .unwrap()
            .explicit()
            .unwrap();
        assert_eq!(c.conditions.len(), 16);
        let s = CollapseForcing::new(2, 3, Variant::Star).unwrap();
        assert_eq!(s.conditions().unwrap().len(), 1 + 3 + 9);
        assert_eq!(
            CollapseForcing::new(2, 3, Variant::Geq)
                .unwrap()
                .conditions()
                .unwrap()
                .len(),
            49
        );
        assert!(CollapseForcing::new(MAX_SLOTS + 1, 2, Variant::Plain).is_err());
    }

    #[test]
    fn star_is_dense_in_plain() {
        let plain = CollapseForcing::new(2, 3, Variant::Plain)
            .unwrap()
            .explicit()
            .unwrap();
        let star = CollapseForcing::new(2, 3, Variant::Star).unwrap();
        let members: Vec<usize> = star
            .conditions()
            .unwrap()
            .iter()
            .map(|c| plain.index_of(c).unwrap())
            .collect();
        assert!(plain.order.is_dense(&members));
    }

    #[test]
    fn marker_ordering() {
        let g = CollapseForcing::new(1, 2, Variant::Geq).unwrap();
        let p = CollapseCondition::from_pairs([(0, Slot::AtLeast(0))]);
        let q = CollapseCondition::values(&[(0, 1)]);
        assert!(g.leq(&q, &p));
        assert!(!g.leq(&p, &q));
    }

    #[test]
    fn value_sets() {
        let f = CollapseForcing::new(2, 3, Variant::Plain).unwrap();
        let d2 = f.value_provider(2).unwrap();
        assert_eq!(
            d2.extend(&CollapseCondition::empty(), None).unwrap(),
            CollapseCondition::values(&[(0, 2)])
        );
        let p = CollapseCondition::values(&[(1, 2)]);
        assert_eq!(d2.extend(&p, None).unwrap(), p);
        let full = CollapseCondition::values(&[(0, 0), (1, 1)]);
        assert_eq!(d2.extend(&full, None), Err(Error::NoFreeSlot(2)));
        assert!(f.value_provider(3).is_err());
        // a full condition avoiding alpha has no extension in the set, so it is
        // dense only below its own members; the extender covers free slots
        let c = f.explicit().unwrap();
        for alpha in 0..3 {
            let d = c.value_set(alpha);
            assert!(!c.order.is_dense(&d));
            for (i, p) in c.conditions.iter().enumerate() {
                assert_eq!(c.order.is_dense_below(&d, i), p.has_value(alpha), "{p:?}");
            }
        }
    }

    #[test]
    fn surjection_name_evaluation() {
        let c = CollapseForcing::new(1, 1, Variant::Plain)
            .unwrap()
            .explicit()
            .unwrap();
        let sigma = c.surjection_name(1).unwrap();
        let p = c.index_of(&CollapseCondition::values(&[(0, 0)])).unwrap();
        let g = Filter::from_members(c.conditions.len(), &[c.order.top(), p]);
        let zero = HfSet::natural(0);
        assert_eq!(
            evaluate(&sigma, &g),
            HfSet::singleton(HfSet::kuratowski(zero.clone(), zero))
        );
        let trivial = Filter::from_members(c.conditions.len(), &[c.order.top()]);
        assert!(evaluate(&sigma, &trivial).is_empty());
    }

    #[test]
    fn defeaters() {
        let f = CollapseForcing::new(1, 4, Variant::Plain).unwrap();
        let a = [
            CollapseCondition::values(&[(0, 1)]),
            CollapseCondition::values(&[(0, 2)]),
        ];
        assert_eq!(
            f.antichain_defeater(&a).unwrap(),
            CollapseCondition::values(&[(0, 3)])
        );
        assert_eq!(
            f.antichain_defeater(&[CollapseCondition::values(&[(0, 0)])])
                .unwrap(),
            CollapseCondition::values(&[(0, 1)])
        );
        assert_eq!(
            f.antichain_defeater(&[CollapseCondition::values(&[(0, 3)])]),
            Err(Error::HeightOverflow {
                value: 4,
                height: 4
            })
        );
        assert!(f.antichain_defeater(&[CollapseCondition::empty()]).is_err());
    }

    #[test]
    fn marker_reduction() {
        let f = CollapseForcing::new(2, 4, Variant::Geq).unwrap();
        let p = CollapseCondition::values(&[(0, 3), (1, 1)]);
        let expected = CollapseCondition::from_pairs([(0, Slot::AtLeast(2)), (1, Slot::Val(1))]);
        assert_eq!(f.geq_reduction(&p, 2).unwrap(), expected);
        let low = CollapseCondition::values(&[(0, 0)]);
        assert_eq!(f.geq_reduction(&low, 2).unwrap(), low);
        let c = CollapseForcing::new(2, 3, Variant::Geq)
            .unwrap()
            .explicit()
            .unwrap();
        let trunc = c.order.restrict(&c.geq_truncation(1)).unwrap();
        assert!(is_complete_subforcing(&trunc, &c.order).unwrap());
    }

    #[test]
    fn projection_caps_values() {
        let f = CollapseForcing::new(2, 6, Variant::Plain).unwrap();
        let p = CollapseCondition::values(&[(0, 5), (1, 1)]);
        assert_eq!(
            f.project(&p, 2),
            CollapseCondition::values(&[(0, 2), (1, 1)])
        );
        let low = CollapseCondition::values(&[(0, 1)]);
        assert_eq!(f.project(&low, 2), low);
    }

    #[test]
    fn labels_round_trip() {
        let p = CollapseCondition::from_pairs([(0, Slot::AtLeast(2)), (1, Slot::Val(1))]);
        assert_eq!(p.label(), "{0:>=2,1:1}");
        assert_eq!(CollapseCondition::parse_label(&p.label()).unwrap(), p);
        assert_eq!(
            CollapseCondition::parse_label("{}").unwrap(),
            CollapseCondition::empty()
        );
        assert!(CollapseCondition::parse_label("{0:1,0:2}").is_err());
    }
}
