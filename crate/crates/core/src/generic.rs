//! Generic filters: exact cones over finite preorders and descending-chain
//! constructions against an explicit schedule of dense sets.

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::names::Filter;
use crate::order::{CondSet, Preorder};

/// A forcing notion given by a validity test and an order test, possibly
/// without an enumerable carrier.
pub trait Forcing {
    type Condition: Clone + PartialEq + fmt::Debug;

    fn top(&self) -> Self::Condition;
    fn is_valid(&self, p: &Self::Condition) -> bool;
    fn leq(&self, p: &Self::Condition, q: &Self::Condition) -> bool;

    fn show(&self, p: &Self::Condition) -> String {
        format!("{p:?}")
    }
}

impl Forcing for Preorder {
    type Condition = usize;

    fn top(&self) -> usize {
        Preorder::top(self)
    }

    fn is_valid(&self, p: &usize) -> bool {
        *p < self.len()
    }

    fn leq(&self, p: &usize, q: &usize) -> bool {
        Preorder::leq(self, *p, *q)
    }

    fn show(&self, p: &usize) -> String {
        self.label(*p).to_string()
    }
}

/// `{q : m ≤ q}`.
pub fn cone(order: &Preorder, m: usize) -> Filter {
    Filter::from_set(order.up(m).clone())
}

/// Upward closed, directed within itself, and containing the top.
pub fn filter_validate(order: &Preorder, s: &CondSet) -> bool {
    if !s.contains(order.top()) {
        return false;
    }
    for p in s.ones() {
        if !order.up(p).is_subset(s) {
            return false;
        }
        for q in s.ones() {
            let mut common = order.down(p).clone();
            common.intersect_with(order.down(q));
            if common.is_disjoint(s) {
                return false;
            }
        }
    }
    true
}

/// A filter meeting every dense set; over a finite preorder this is a filter
/// containing a minimal condition.
pub fn is_generic(order: &Preorder, s: &CondSet) -> bool {
    filter_validate(order, s)
        && order
            .minimal_classes()
            .into_iter()
            .any(|m| s.ones().any(|p| order.equivalent(p, m)))
}

type Member<C> = Box<dyn Fn(&C) -> bool + Send + Sync>;
type Extender<C> = Box<dyn Fn(&C, Option<&mut ChaCha8Rng>) -> Result<C> + Send + Sync>;

/// A dense set given by a membership test and a constructive extender.
pub struct DenseProvider<C> {
    pub name: String,
    member: Member<C>,
    extend: Extender<C>,
}

impl<C> DenseProvider<C> {
    pub fn new(
        name: impl Into<String>,
        member: impl Fn(&C) -> bool + Send + Sync + 'static,
        extend: impl Fn(&C, Option<&mut ChaCha8Rng>) -> Result<C> + Send + Sync + 'static,
    ) -> DenseProvider<C> {
        DenseProvider {
            name: name.into(),
            member: Box::new(member),
            extend: Box::new(extend),
        }
    }

    pub fn contains(&self, p: &C) -> bool {
        (self.member)(p)
    }

    pub fn extend(&self, p: &C, rng: Option<&mut ChaCha8Rng>) -> Result<C> {
        (self.extend)(p, rng)
    }
}

impl<C> fmt::Debug for DenseProvider<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DenseProvider({})", self.name)
    }
}

pub struct DenseSetSchedule<C> {
    providers: Vec<DenseProvider<C>>,
}

impl<C> Default for DenseSetSchedule<C> {
    fn default() -> Self {
        DenseSetSchedule {
            providers: Vec::new(),
        }
    }
}

impl<C> DenseSetSchedule<C> {
    pub fn new(providers: Vec<DenseProvider<C>>) -> DenseSetSchedule<C> {
        DenseSetSchedule { providers }
    }

    pub fn push(&mut self, p: DenseProvider<C>) {
        self.providers.push(p);
    }

    /// Keeps the providers whose names pass `keep`, in schedule order.
    pub fn retain(&mut self, keep: impl Fn(&str) -> bool) {
        self.providers.retain(|p| keep(&p.name));
    }

    pub fn providers(&self) -> &[DenseProvider<C>] {
        &self.providers
    }

    pub fn len(&self) -> usize {
        self.providers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.providers.is_empty()
    }
}

/// A filter generated by the last condition of a descending chain.
#[derive(Clone, Debug)]
pub struct ChainFilter<C> {
    pub chain: Vec<C>,
    /// Provider names in the order they were met.
    pub met: Vec<String>,
}

impl<C: Clone> ChainFilter<C> {
    pub fn last(&self) -> &C {
        self.chain
            .last()
            .expect("a chain starts with its start condition")
    }

    pub fn contains<F: Forcing<Condition = C>>(&self, forcing: &F, p: &C) -> bool {
        forcing.leq(self.last(), p)
    }
}

/// Builds `start = p_0 ≥ p_1 ≥ …`, one step per scheduled dense set. A seed
/// shuffles the schedule and is passed to the extenders; without a seed the
/// extenders make their lowest-index choices.
pub fn rasiowa_sikorski<F: Forcing>(
    forcing: &F,
    schedule: &DenseSetSchedule<F::Condition>,
    start: F::Condition,
    seed: Option<u64>,
) -> Result<ChainFilter<F::Condition>> {
    if !forcing.is_valid(&start) {
        return Err(Error::Precondition(format!(
            "start {} is not a condition",
            forcing.show(&start)
        )));
    }
    let mut order: Vec<usize> = (0..schedule.len()).collect();
    let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
    if let Some(r) = rng.as_mut() {
        order.shuffle(r);
    }
    let mut chain = vec![start];
    let mut met = Vec::with_capacity(order.len());
    for i in order {
        let provider = &schedule.providers()[i];
        let current = chain.last().expect("nonempty chain").clone();
        let next = provider.extend(&current, rng.as_mut())?;
        if !forcing.is_valid(&next) || !forcing.leq(&next, &current) || !provider.contains(&next) {
            return Err(Error::ExtenderContract(format!(
                "{} returned {} from {}",
                provider.name,
                forcing.show(&next),
                forcing.show(&current)
            )));
        }
        log::debug!("met {} at {}", provider.name, forcing.show(&next));
        met.push(provider.name.clone());
        chain.push(next);
    }
    Ok(ChainFilter { chain, met })
}

/// A provider for an explicitly listed subset of a finite preorder; steps to
/// the first member below the current condition.
pub fn explicit_provider(
    order: &Preorder,
    name: impl Into<String>,
    members: &[usize],
) -> DenseProvider<usize> {
    let set = order.set_of(members);
    let downs: Vec<CondSet> = (0..order.len()).map(|p| order.down(p).clone()).collect();
    let set2 = set.clone();
    DenseProvider::new(
        name,
        move |p: &usize| set.contains(*p),
        move |p: &usize, rng: Option<&mut ChaCha8Rng>| {
            let mut options: Vec<usize> = downs[*p].ones().filter(|q| set2.contains(*q)).collect();
            if options.is_empty() {
                return Err(Error::ExtenderContract(format!(
                    "nothing below #{p} in the set"
                )));
            }
            if let Some(r) = rng {
                options.shuffle(r);
            }
            Ok(options[0])
        },
    )
}
