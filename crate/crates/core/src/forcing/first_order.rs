//! Forcing for first-order formulas with quantifiers bounded by a name pool.

use std::collections::BTreeSet;

use super::atomic::AtomicForcing;
use super::semantic::{SemanticOracle, Verdict};
use crate::error::{Error, Result};
use crate::formula::FoFormula;
use crate::names::PName;
use crate::order::{CondSet, Preorder};

/// A finite stand-in for the class of all names, closed under subnames.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamePool {
    names: Vec<PName>,
}

impl NamePool {
    pub fn new(names: impl IntoIterator<Item = PName>) -> Result<NamePool> {
        let set: BTreeSet<PName> = names.into_iter().collect();
        if set.iter().any(|n| !n.subnames().is_subset(&set)) {
            return Err(Error::PoolNotClosed);
        }
        Ok(NamePool {
            names: set.into_iter().collect(),
        })
    }

    /// Smallest pool containing `names`.
    pub fn closure(names: impl IntoIterator<Item = PName>) -> NamePool {
        let mut set = BTreeSet::new();
        for n in names {
            set.extend(n.subnames());
            set.insert(n);
        }
        NamePool {
            names: set.into_iter().collect(),
        }
    }

    pub fn names(&self) -> &[PName] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn contains(&self, n: &PName) -> bool {
        self.names.binary_search(n).is_ok()
    }
}

fn lookup(env: &[Option<PName>], i: usize) -> Result<&PName> {
    env.get(i)
        .and_then(|x| x.as_ref())
        .ok_or(Error::UnboundVariable(i))
}

fn class(classes: &[PName], k: usize) -> Result<&PName> {
    classes
        .get(k)
        .ok_or_else(|| Error::FreeVariables(format!("no class name for A_{k}")))
}

fn start_env(pool: &NamePool, env: &[PName]) -> Result<Vec<Option<PName>>> {
    if let Some(n) = env.iter().find(|n| !pool.contains(n)) {
        return Err(Error::Precondition(format!("{n} is not in the pool")));
    }
    Ok(env.iter().cloned().map(Some).collect())
}

/// The forcing recursion as condition sets: `∧` intersects, `¬S` is
/// `{p : no q ≤ p lies in S}`, `∀` intersects over the pool, `∃` is the set of
/// conditions below which the union over the pool is dense, and a class atom
/// `σ ∈ A_k` is forced like membership in the class name `Γ_k`.
pub struct FoForcing<'a> {
    atomic: AtomicForcing<'a>,
    pool: &'a NamePool,
    classes: &'a [PName],
}

impl<'a> FoForcing<'a> {
    pub fn new(order: &'a Preorder, pool: &'a NamePool, classes: &'a [PName]) -> FoForcing<'a> {
        FoForcing {
            atomic: AtomicForcing::new(order),
            pool,
            classes,
        }
    }

    pub fn set(&self, phi: &FoFormula, env: &[PName]) -> Result<CondSet> {
        let mut env = start_env(self.pool, env)?;
        self.compute(phi, &mut env)
    }

    pub fn forces(&self, p: usize, phi: &FoFormula, env: &[PName]) -> Result<bool> {
        Ok(self.set(phi, env)?.contains(p))
    }

    fn order(&self) -> &Preorder {
        self.atomic.order()
    }

    fn instances(
        &self,
        k: usize,
        psi: &FoFormula,
        env: &mut Vec<Option<PName>>,
    ) -> Result<Vec<CondSet>> {
        if env.len() <= k {
            env.resize(k + 1, None);
        }
        let saved = env[k].take();
        let mut out = Vec::with_capacity(self.pool.len());
        for tau in self.pool.names() {
            env[k] = Some(tau.clone());
            match self.compute(psi, env) {
                Ok(s) => out.push(s),
                Err(e) => {
                    env[k] = saved;
                    return Err(e);
                }
            }
        }
        env[k] = saved;
        Ok(out)
    }

    /// The existential clause computed directly and as `¬∀¬`; both are
    /// returned so callers can confirm they agree.
    pub fn exists_both_ways(
        &self,
        k: usize,
        psi: &FoFormula,
        env: &[PName],
    ) -> Result<(CondSet, CondSet)> {
        let mut env = start_env(self.pool, env)?;
        let parts = self.instances(k, psi, &mut env)?;
        Ok(self.exists_sets(&parts))
    }

    fn exists_sets(&self, parts: &[CondSet]) -> (CondSet, CondSet) {
        let order = self.order();
        let mut union = order.empty_set();
        let mut all_neg = order.full_set();
        for s in parts {
            union.union_with(s);
            all_neg.intersect_with(&order.pseudo_complement(s));
        }
        (
            order.dense_below_set(&union),
            order.pseudo_complement(&all_neg),
        )
    }

    fn compute(&self, phi: &FoFormula, env: &mut Vec<Option<PName>>) -> Result<CondSet> {
        let order = self.order();
        Ok(match phi {
            FoFormula::Eq(i, j) => self.atomic.eq_set(lookup(env, *i)?, lookup(env, *j)?),
            FoFormula::Mem(i, j) => self.atomic.mem_set(lookup(env, *i)?, lookup(env, *j)?),
            FoFormula::Pred(k, i) => self
                .atomic
                .mem_set(lookup(env, *i)?, class(self.classes, *k)?),
            FoFormula::Not(f) => order.pseudo_complement(&self.compute(f, env)?),
            FoFormula::And(fs) => {
                let mut out = order.full_set();
                for f in fs {
                    out.intersect_with(&self.compute(f, env)?);
                }
                out
            }
            FoFormula::Or(fs) => {
                let mut all_neg = order.full_set();
                for f in fs {
                    all_neg.intersect_with(&order.pseudo_complement(&self.compute(f, env)?));
                }
                order.pseudo_complement(&all_neg)
            }
            FoFormula::Forall(k, f) => {
                let mut out = order.full_set();
                for s in self.instances(*k, f, env)? {
                    out.intersect_with(&s);
                }
                out
            }
            FoFormula::Exists(k, f) => {
                let parts = self.instances(*k, f, env)?;
                let (direct, dual) = self.exists_sets(&parts);
                debug_assert_eq!(direct, dual);
                direct
            }
        })
    }
}

pub fn forces_fo(
    order: &Preorder,
    p: usize,
    phi: &FoFormula,
    pool: &NamePool,
    classes: &[PName],
    env: &[PName],
) -> Result<bool> {
    FoForcing::new(order, pool, classes).forces(p, phi, env)
}

/// Truth at a generic cone with quantifiers ranging over the pool's values.
pub fn fo_holds_at(
    oracle: &SemanticOracle<'_>,
    cone: usize,
    pool: &NamePool,
    classes: &[PName],
    phi: &FoFormula,
    env: &[PName],
) -> Result<bool> {
    let mut env = start_env(pool, env)?;
    holds(oracle, cone, pool, classes, phi, &mut env)
}

fn holds(
    oracle: &SemanticOracle<'_>,
    i: usize,
    pool: &NamePool,
    classes: &[PName],
    phi: &FoFormula,
    env: &mut Vec<Option<PName>>,
) -> Result<bool> {
    Ok(match phi {
        FoFormula::Eq(a, b) => oracle.eval(i, lookup(env, *a)?) == oracle.eval(i, lookup(env, *b)?),
        FoFormula::Mem(a, b) => oracle
            .eval(i, lookup(env, *b)?)
            .contains(&oracle.eval(i, lookup(env, *a)?)),
        FoFormula::Pred(k, a) => oracle
            .eval(i, class(classes, *k)?)
            .contains(&oracle.eval(i, lookup(env, *a)?)),
        FoFormula::Not(f) => !holds(oracle, i, pool, classes, f, env)?,
        FoFormula::And(fs) => {
            for f in fs {
                if !holds(oracle, i, pool, classes, f, env)? {
                    return Ok(false);
                }
            }
            true
        }
        FoFormula::Or(fs) => {
            for f in fs {
                if holds(oracle, i, pool, classes, f, env)? {
                    return Ok(true);
                }
            }
            false
        }
        FoFormula::Exists(k, f) | FoFormula::Forall(k, f) => {
            let want = matches!(phi, FoFormula::Exists(..));
            if env.len() <= *k {
                env.resize(k + 1, None);
            }
            let saved = env[*k].take();
            let mut result = Ok(!want);
            for tau in pool.names() {
                env[*k] = Some(tau.clone());
                match holds(oracle, i, pool, classes, f, env) {
                    Ok(v) if v == want => {
                        result = Ok(want);
                        break;
                    }
                    Ok(_) => {}
                    Err(e) => {
                        result = Err(e);
                        break;
                    }
                }
            }
            env[*k] = saved;
            result?
        }
    })
}

/// Pool-relative semantic forcing: truth at every cone through `p`.
pub fn semantic_forces_fo(
    oracle: &SemanticOracle<'_>,
    p: usize,
    pool: &NamePool,
    classes: &[PName],
    phi: &FoFormula,
    env: &[PName],
) -> Result<Verdict> {
    let cones: Vec<usize> = oracle.cones_through(p).collect();
    for i in cones {
        if !fo_holds_at(oracle, i, pool, classes, phi, env)? {
            return Ok(Verdict::refuted(oracle.minimal()[i]));
        }
    }
    Ok(Verdict::forced())
}
