//! Resolves a parsed scenario into loaded forcings, names and formulas, and
//! a list of tasks ready to run. Every reference and validator failure is
//! reported with the position of the offending expression.

use std::collections::HashMap;

use forcelab_core::forcing::{Atomic, NamePool};
use forcelab_core::formula::{FoFormula, InfFormula};
use forcelab_core::generic::{
    cone, explicit_provider, rasiowa_sikorski, DenseSetSchedule, Forcing,
};
use forcelab_core::hf::{parse_set_literal, vstage, GroundModel, HfSet};
use forcelab_core::names::{check_name, check_nat, gdot_name, op_name, Filter, PName};
use forcelab_core::order::{separative_quotient, Preorder, QuotientMap};
use forcelab_core::suite::{collapse_instances, fo_exhaustive, fo_sampled, preorder_suite};
use forcelab_core::zoo::{
    two_step, CheckNamed, CollapseCondition, CollapseForcing, CollapseOrder, Decoded,
    FriedmanCondition, FriedmanForcing, FriedmanOrder, Iteration, NamedForcing, Variant,
};

use crate::error::DslError;
use crate::scenario::{ForcingDef, GenericDecl, Item, Scenario};
use crate::sexpr::{Pos, SExpr};

pub const DEFAULT_MAX_CARRIER: usize = 5000;
pub const DEFAULT_POOL_RANK: u32 = 2;

/// Suite names with the property each one checks, as printed in report
/// headers.
pub const SUITES: [(&str, &str); 10] = [
    (
        "atomic-equivalence",
        "syntactic atomic forcing agrees with the cone oracle",
    ),
    (
        "truth-lemma",
        "every true atomic statement at a generic cone is forced by a member",
    ),
    (
        "nu-mu",
        "a formula holds at a generic exactly when its two names evaluate equally",
    ),
    (
        "boolean-values",
        "forcing coincides with the order against regular open values",
    ),
    (
        "completion-iso",
        "the saturated completion is isomorphic to the regular open algebra",
    ),
    (
        "approachability",
        "projection laws, restricted forcing and evaluation transfer for collapses",
    ),
    (
        "friedman-iso",
        "scheduled generics of the graph-coding forcing decode to the ground model",
    ),
    (
        "varphi-star",
        "ground truth agrees with forcing the translated formula at coded sequences",
    ),
    (
        "two-step",
        "cone generics compose to generics of the two-step iteration",
    ),
    (
        "quotient-transfer",
        "atomic forcing is preserved by the separative quotient",
    ),
];

pub fn suite_name(name: &str) -> Option<&'static str> {
    SUITES.iter().find(|(n, _)| *n == name).map(|(n, _)| *n)
}

pub fn suite_description(name: &str) -> &'static str {
    SUITES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, d)| *d)
        .unwrap_or("")
}

#[derive(Clone, Debug, Default)]
pub struct Flags {
    pub seed: u64,
    pub pool_rank: Option<u32>,
    pub max_size: Option<usize>,
    /// When nonempty, only these suites run.
    pub suites: Vec<String>,
    pub timing: bool,
}

impl Flags {
    /// `--max-size`, then `FORCELAB_MAX_CARRIER`, then the default.
    pub fn carrier_cap(&self) -> usize {
        self.max_size
            .or_else(|| {
                std::env::var("FORCELAB_MAX_CARRIER")
                    .ok()
                    .and_then(|v| v.parse().ok())
            })
            .unwrap_or(DEFAULT_MAX_CARRIER)
    }
}

pub enum ForcingKind {
    Explicit,
    Collapse(Box<CollapseOrder>),
    Friedman(Box<FriedmanOrder>),
    Iteration(Box<Iteration>),
    Quotient(Box<QuotientMap>),
}

pub struct LoadedForcing {
    pub id: String,
    pub order: Preorder,
    pub kind: ForcingKind,
}

pub struct LoadedGeneric {
    pub forcing: usize,
    pub filter: Filter,
    /// Label of the last chain condition.
    pub last: String,
    pub met: Vec<String>,
    pub decoded: Option<Decoded>,
}

#[derive(Default)]
pub struct Env {
    pub ground: Option<GroundModel>,
    pub forcings: Vec<LoadedForcing>,
    forcing_ids: HashMap<String, usize>,
    names: HashMap<String, (usize, PName)>,
    formulas: HashMap<String, (usize, InfFormula)>,
    fo_formulas: HashMap<String, FoFormula>,
    pools: HashMap<String, (usize, NamePool)>,
    pub generics: HashMap<String, LoadedGeneric>,
}

/// An atomic statement (including `⊆`) or a compound formula.
#[derive(Clone, Debug)]
pub enum Stmt {
    Atomic(Atomic),
    Formula(InfFormula),
}

pub enum QueryOp {
    Forces {
        f: usize,
        p: usize,
        stmt: Stmt,
        syntactic: bool,
    },
    Agree {
        f: usize,
        stmt: Stmt,
    },
    BooleanValue {
        f: usize,
        a: Atomic,
    },
    Evaluate {
        name: PName,
        generic: String,
    },
    Rank(PName),
    Separative(usize),
    Antisymmetric(usize),
    Minimal(usize),
    RoSize(usize),
    Size(usize),
    Dense {
        f: usize,
        set: Vec<usize>,
        below: Option<usize>,
    },
    Antichain {
        f: usize,
        set: Vec<usize>,
        maximal: bool,
    },
    TruthLemma {
        f: usize,
        stmt: Stmt,
    },
    InGeneric {
        generic: String,
        p: usize,
    },
    IsGeneric(String),
    Decode(String),
    FoSatisfies {
        phi: FoFormula,
        xs: Vec<HfSet>,
    },
    ForcesFo {
        f: usize,
        p: usize,
        phi: FoFormula,
        pool: String,
        env: Vec<PName>,
    },
    Star {
        f: usize,
        phi: FoFormula,
        xs: Vec<HfSet>,
    },
}

pub struct QueryTask {
    pub id: String,
    pub kind: String,
    pub op: QueryOp,
    pub expect: Option<String>,
}

pub enum SuiteRun {
    Posets {
        posets: Vec<Preorder>,
        rank: u32,
        per_poset: usize,
        seed: u64,
    },
    Approachability {
        instances: Vec<(usize, usize, Variant)>,
        broken: Option<usize>,
    },
    Friedman {
        stage: usize,
        indices: usize,
        seeds: Vec<u64>,
    },
    VarphiStar {
        stage: usize,
        formulas: Vec<(usize, FoFormula)>,
    },
}

pub struct SuiteTask {
    pub id: String,
    pub name: &'static str,
    pub run: SuiteRun,
}

pub enum Task {
    Query(QueryTask),
    Suite(SuiteTask),
}

impl Task {
    pub fn id(&self) -> &str {
        match self {
            Task::Query(q) => &q.id,
            Task::Suite(s) => &s.id,
        }
    }
}

pub struct Loaded {
    pub name: String,
    pub env: Env,
    pub tasks: Vec<Task>,
    pub flags: Flags,
}

impl std::fmt::Debug for Loaded {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let ids: Vec<&str> = self.tasks.iter().map(Task::id).collect();
        f.debug_struct("Loaded")
            .field("name", &self.name)
            .field("tasks", &ids)
            .finish()
    }
}

fn err(pos: Pos, msg: impl Into<String>) -> DslError {
    DslError::new(pos, msg)
}

fn core_err(pos: Pos) -> impl Fn(forcelab_core::Error) -> DslError {
    move |e| err(pos, e.to_string())
}

fn atom(x: &SExpr, what: &str) -> Result<String, DslError> {
    x.as_atom()
        .map(str::to_string)
        .ok_or_else(|| err(x.pos(), format!("expected {what}")))
}

fn number<T: std::str::FromStr>(x: &SExpr, what: &str) -> Result<T, DslError> {
    x.as_atom()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| err(x.pos(), format!("expected {what}")))
}

fn args(x: &SExpr) -> &[SExpr] {
    x.as_list().map(|l| &l[1..]).unwrap_or(&[])
}

fn set_literal(x: &SExpr) -> Result<HfSet, DslError> {
    let s = atom(x, "a set literal")?;
    parse_set_literal(&s).map_err(core_err(x.pos()))
}

fn variable(x: &SExpr) -> Result<usize, DslError> {
    x.as_atom()
        .and_then(|s| s.strip_prefix('v'))
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| err(x.pos(), "expected a variable v<i>"))
}

impl Env {
    fn forcing(&self, x: &SExpr) -> Result<usize, DslError> {
        let id = atom(x, "a forcing id")?;
        self.forcing_ids
            .get(&id)
            .copied()
            .ok_or_else(|| err(x.pos(), format!("unresolved forcing {id}")))
    }

    fn over(&self, over: &Option<String>, pos: Pos) -> Result<usize, DslError> {
        match over {
            Some(id) => self
                .forcing_ids
                .get(id)
                .copied()
                .ok_or_else(|| err(pos, format!("unresolved forcing {id}"))),
            None if self.forcings.is_empty() => Err(err(pos, "no forcing declared yet")),
            None => Ok(self.forcings.len() - 1),
        }
    }

    fn order(&self, f: usize) -> &Preorder {
        &self.forcings[f].order
    }

    fn condition(&self, f: usize, x: &SExpr) -> Result<usize, DslError> {
        let label = atom(x, "a condition")?;
        self.order(f).index_of(&label).ok_or_else(|| {
            err(
                x.pos(),
                format!("{label} is not a condition of {}", self.forcings[f].id),
            )
        })
    }

    fn conditions(&self, f: usize, xs: &[SExpr]) -> Result<Vec<usize>, DslError> {
        xs.iter().map(|x| self.condition(f, x)).collect()
    }

    fn name(&self, f: usize, x: &SExpr) -> Result<PName, DslError> {
        let pos = x.pos();
        let top = self.order(f).top();
        if let Some(id) = x.as_atom() {
            let (g, n) = self
                .names
                .get(id)
                .ok_or_else(|| err(pos, format!("unresolved name {id}")))?;
            if *g != f {
                return Err(err(
                    pos,
                    format!(
                        "name {id} is over {}, not {}",
                        self.forcings[*g].id, self.forcings[f].id
                    ),
                ));
            }
            return Ok(n.clone());
        }
        let a = args(x);
        match (x.head(), a) {
            (Some("check"), [s]) => Ok(check_name(&set_literal(s)?, top)),
            (Some("nat"), [n]) => Ok(check_nat(number(n, "a natural")?, top)),
            (Some("op"), [s, t]) => Ok(op_name(&self.name(f, s)?, &self.name(f, t)?, top)),
            (Some("empty"), []) => Ok(PName::empty()),
            (Some("gdot"), []) => Ok(gdot_name(self.order(f))),
            (Some("edot"), []) => match &self.forcings[f].kind {
                ForcingKind::Friedman(o) => o.edot_name().map_err(core_err(pos)),
                _ => Err(err(pos, "(edot) needs a graph-coding forcing")),
            },
            (Some("pairs"), entries) => {
                let mut out = Vec::with_capacity(entries.len());
                for e in entries {
                    match e.as_list() {
                        Some([n, c]) => out.push((self.name(f, n)?, self.condition(f, c)?)),
                        _ => return Err(err(e.pos(), "expected (NAME condition)")),
                    }
                }
                Ok(PName::from_entries(out))
            }
            _ => Err(err(pos, format!("unknown name expression {x}"))),
        }
    }

    fn formula(&self, f: usize, x: &SExpr) -> Result<InfFormula, DslError> {
        let pos = x.pos();
        if let Some(id) = x.as_atom() {
            let (g, phi) = self
                .formulas
                .get(id)
                .ok_or_else(|| err(pos, format!("unresolved formula {id}")))?;
            if *g != f {
                return Err(err(
                    pos,
                    format!(
                        "formula {id} is over {}, not {}",
                        self.forcings[*g].id, self.forcings[f].id
                    ),
                ));
            }
            return Ok(phi.clone());
        }
        let a = args(x);
        match (x.head(), a) {
            (Some("ing"), [c]) => Ok(InfFormula::InGeneric(self.condition(f, c)?)),
            (Some("eq"), [s, t]) => Ok(InfFormula::Eq(self.name(f, s)?, self.name(f, t)?)),
            (Some("mem"), [s, t]) => Ok(InfFormula::Mem(self.name(f, s)?, self.name(f, t)?)),
            (Some("not"), [g]) => Ok(InfFormula::not(self.formula(f, g)?)),
            (Some("or"), gs) => Ok(InfFormula::Or(
                gs.iter()
                    .map(|g| self.formula(f, g))
                    .collect::<Result<_, _>>()?,
            )),
            (Some("and"), gs) => Ok(InfFormula::And(
                gs.iter()
                    .map(|g| self.formula(f, g))
                    .collect::<Result<_, _>>()?,
            )),
            _ => Err(err(pos, format!("unknown formula {x}"))),
        }
    }

    fn atomic(&self, f: usize, x: &SExpr) -> Result<Atomic, DslError> {
        match (x.head(), args(x)) {
            (Some("eq"), [s, t]) => Ok(Atomic::Eq(self.name(f, s)?, self.name(f, t)?)),
            (Some("mem"), [s, t]) => Ok(Atomic::Mem(self.name(f, s)?, self.name(f, t)?)),
            (Some("sub"), [s, t]) => Ok(Atomic::Sub(self.name(f, s)?, self.name(f, t)?)),
            _ => match self.formula(f, x)? {
                InfFormula::Eq(s, t) => Ok(Atomic::Eq(s, t)),
                InfFormula::Mem(s, t) => Ok(Atomic::Mem(s, t)),
                _ => Err(err(
                    x.pos(),
                    "expected an atomic statement (eq, mem or sub)",
                )),
            },
        }
    }

    fn stmt(&self, f: usize, x: &SExpr) -> Result<Stmt, DslError> {
        match self.atomic(f, x) {
            Ok(a) => Ok(Stmt::Atomic(a)),
            Err(_) => self.formula(f, x).map(Stmt::Formula),
        }
    }

    fn fo_formula(&self, x: &SExpr) -> Result<FoFormula, DslError> {
        let pos = x.pos();
        if let Some(id) = x.as_atom() {
            return self
                .fo_formulas
                .get(id)
                .cloned()
                .ok_or_else(|| err(pos, format!("unresolved formula {id}")));
        }
        let a = args(x);
        match (x.head(), a) {
            (Some("eq"), [i, j]) => Ok(FoFormula::Eq(variable(i)?, variable(j)?)),
            (Some("mem"), [i, j]) => Ok(FoFormula::Mem(variable(i)?, variable(j)?)),
            (Some("pred"), [k, i]) => {
                Ok(FoFormula::Pred(number(k, "a class index")?, variable(i)?))
            }
            (Some("not"), [g]) => Ok(FoFormula::not(self.fo_formula(g)?)),
            (Some("or"), gs) => Ok(FoFormula::Or(
                gs.iter()
                    .map(|g| self.fo_formula(g))
                    .collect::<Result<_, _>>()?,
            )),
            (Some("and"), gs) => Ok(FoFormula::And(
                gs.iter()
                    .map(|g| self.fo_formula(g))
                    .collect::<Result<_, _>>()?,
            )),
            (Some("ex"), [k, g]) => Ok(FoFormula::exists(
                number(k, "a variable index")?,
                self.fo_formula(g)?,
            )),
            (Some("all"), [k, g]) => Ok(FoFormula::forall(
                number(k, "a variable index")?,
                self.fo_formula(g)?,
            )),
            _ => Err(err(pos, format!("unknown first-order formula {x}"))),
        }
    }

    fn generic(&self, x: &SExpr) -> Result<String, DslError> {
        let id = atom(x, "a generic id")?;
        if self.generics.contains_key(&id) {
            Ok(id)
        } else {
            Err(err(x.pos(), format!("unresolved generic {id}")))
        }
    }

    fn friedman(&self, f: usize, pos: Pos) -> Result<&FriedmanOrder, DslError> {
        match &self.forcings[f].kind {
            ForcingKind::Friedman(o) => Ok(o),
            _ => Err(err(
                pos,
                format!("{} is not a graph-coding forcing", self.forcings[f].id),
            )),
        }
    }

    fn fresh(&self, id: &str, pos: Pos) -> Result<(), DslError> {
        let taken = self.forcing_ids.contains_key(id)
            || self.names.contains_key(id)
            || self.formulas.contains_key(id)
            || self.fo_formulas.contains_key(id)
            || self.pools.contains_key(id)
            || self.generics.contains_key(id);
        if taken {
            Err(err(pos, format!("{id} is already declared")))
        } else {
            Ok(())
        }
    }
}

fn check_cap(size: usize, cap: usize, pos: Pos) -> Result<(), DslError> {
    if size > cap {
        Err(err(
            pos,
            format!("carrier of {size} conditions exceeds the cap {cap}"),
        ))
    } else {
        Ok(())
    }
}

fn load_forcing(
    env: &Env,
    def: &ForcingDef,
    cap: usize,
    pos: Pos,
) -> Result<(Preorder, ForcingKind), DslError> {
    let ce = core_err(pos);
    match def {
        ForcingDef::Explicit { elems, le, top } => {
            check_cap(elems.len(), cap, pos)?;
            let labels: Vec<&str> = elems.iter().map(String::as_str).collect();
            let pairs: Vec<(&str, &str)> =
                le.iter().map(|(p, q)| (p.as_str(), q.as_str())).collect();
            let order = Preorder::from_labels(&labels, &pairs, top).map_err(ce)?;
            Ok((order, ForcingKind::Explicit))
        }
        ForcingDef::Collapse {
            slots,
            lambda,
            variant,
        } => {
            let o = CollapseForcing::new(*slots, *lambda, *variant)
                .and_then(|c| c.explicit_capped(cap))
                .map_err(ce)?;
            Ok((o.order.clone(), ForcingKind::Collapse(Box::new(o))))
        }
        ForcingDef::Friedman { stage, indices } => {
            let o = vstage(*stage)
                .and_then(|m| FriedmanForcing::new(m, *indices))
                .and_then(|f| f.explicit())
                .map_err(ce)?;
            check_cap(o.order.len(), cap, pos)?;
            Ok((o.order.clone(), ForcingKind::Friedman(Box::new(o))))
        }
        ForcingDef::Iterate {
            base,
            dom,
            ord,
            top,
            pool,
        } => {
            let b = env.over(&Some(base.clone()), pos)?;
            let named = NamedForcing {
                dom: env.name(b, dom)?,
                ord: env.name(b, ord)?,
                top: env.name(b, top)?,
            };
            let names = pool
                .iter()
                .map(|n| env.name(b, n))
                .collect::<Result<Vec<_>, _>>()?;
            let it = two_step(env.order(b), &named, &NamePool::closure(names)).map_err(ce)?;
            check_cap(it.order.len(), cap, pos)?;
            Ok((it.order.clone(), ForcingKind::Iteration(Box::new(it))))
        }
        ForcingDef::IterateChecked { base, second } => {
            let b = env.over(&Some(base.clone()), pos)?;
            let q = env.over(&Some(second.clone()), pos)?;
            let named = CheckNamed::new(env.order(b), env.order(q));
            let it = two_step(env.order(b), &named.named, &named.pool).map_err(ce)?;
            check_cap(it.order.len(), cap, pos)?;
            Ok((it.order.clone(), ForcingKind::Iteration(Box::new(it))))
        }
        ForcingDef::Quotient { of } => {
            let f = env.over(&Some(of.clone()), pos)?;
            let (order, map) = separative_quotient(env.order(f));
            Ok((order, ForcingKind::Quotient(Box::new(map))))
        }
    }
}

fn parse_label_set(label: &str) -> Option<Vec<&str>> {
    let inner = label.strip_prefix("D{")?.strip_suffix('}')?;
    Some(inner.split(',').filter(|s| !s.is_empty()).collect())
}

fn unknown_provider(g: &GenericDecl, offered: &[String]) -> Option<DslError> {
    let wanted = g.schedule.as_ref()?;
    wanted.iter().find(|w| !offered.contains(w)).map(|w| {
        err(
            g.pos,
            format!("{w} is not a dense set offered by {}", g.forcing),
        )
    })
}

fn load_generic(env: &Env, g: &GenericDecl) -> Result<LoadedGeneric, DslError> {
    let pos = g.pos;
    let ce = core_err(pos);
    let f = env.over(&Some(g.forcing.clone()), pos)?;
    let order = env.order(f);
    let keep = |name: &str| {
        g.schedule
            .as_ref()
            .is_none_or(|s| s.iter().any(|w| w == name))
    };
    match &env.forcings[f].kind {
        ForcingKind::Collapse(o) => {
            let forcing = o.forcing;
            let mut providers = Vec::new();
            for n in 0..forcing.slots {
                providers.push(forcing.slot_provider(n).map_err(&ce)?);
            }
            if forcing.variant != Variant::Geq {
                for alpha in 0..forcing.height {
                    providers.push(forcing.value_provider(alpha).map_err(&ce)?);
                }
            }
            let offered: Vec<String> = providers.iter().map(|p| p.name.clone()).collect();
            if let Some(e) = unknown_provider(g, &offered) {
                return Err(e);
            }
            let mut schedule = DenseSetSchedule::new(providers);
            // unscheduled runs fill every slot, which already reaches a minimal condition
            schedule.retain(|name| match &g.schedule {
                Some(_) => keep(name),
                None => name.starts_with("D_slot"),
            });
            let start = match &g.start {
                Some(s) => CollapseCondition::parse_label(s).map_err(&ce)?,
                None => forcing.top(),
            };
            let chain = rasiowa_sikorski(&forcing, &schedule, start, g.seed).map_err(&ce)?;
            let last = o.index_of(chain.last()).map_err(&ce)?;
            Ok(LoadedGeneric {
                forcing: f,
                filter: cone(order, last),
                last: chain.last().label(),
                met: chain.met,
                decoded: None,
            })
        }
        ForcingKind::Friedman(o) => {
            let forcing = &o.forcing;
            let mut schedule = forcing.schedule();
            let offered: Vec<String> = schedule
                .providers()
                .iter()
                .map(|p| p.name.clone())
                .collect();
            if let Some(e) = unknown_provider(g, &offered) {
                return Err(e);
            }
            schedule.retain(keep);
            let start = match &g.start {
                Some(s) => {
                    let i = order.index_of(s).ok_or_else(|| {
                        err(pos, format!("{s} is not a condition of {}", g.forcing))
                    })?;
                    o.conditions[i].clone()
                }
                None => FriedmanCondition::top(),
            };
            let chain = rasiowa_sikorski(forcing, &schedule, start, g.seed).map_err(&ce)?;
            let last = chain.last().clone();
            let members: Vec<usize> = (0..o.conditions.len())
                .filter(|&i| forcing.leq(&last, &o.conditions[i]))
                .collect();
            let decoded = Decoded::from_conditions(&chain.chain).map_err(&ce)?;
            Ok(LoadedGeneric {
                forcing: f,
                filter: Filter::from_members(order.len(), &members),
                last: last.label(),
                met: chain.met,
                decoded: Some(decoded),
            })
        }
        _ => {
            let minimal: Vec<usize> = (0..order.len())
                .filter(|&p| {
                    order
                        .minimal_classes()
                        .iter()
                        .any(|&m| order.equivalent(p, m))
                })
                .collect();
            let mut providers = Vec::new();
            match &g.schedule {
                None => providers.push(explicit_provider(order, "D_min", &minimal)),
                Some(names) => {
                    for w in names {
                        let members = if w == "D_min" {
                            minimal.clone()
                        } else {
                            let labels = parse_label_set(w).ok_or_else(|| {
                                err(pos, format!("{w} is not D_min or D{{labels}}"))
                            })?;
                            let mut ms = Vec::new();
                            for l in labels {
                                ms.push(order.index_of(l).ok_or_else(|| {
                                    err(pos, format!("{l} is not a condition of {}", g.forcing))
                                })?);
                            }
                            if !order.is_dense(&ms) {
                                return Err(err(pos, format!("{w} is not dense")));
                            }
                            ms
                        };
                        providers.push(explicit_provider(order, w.clone(), &members));
                    }
                }
            }
            let start = match &g.start {
                Some(s) => order
                    .index_of(s)
                    .ok_or_else(|| err(pos, format!("{s} is not a condition of {}", g.forcing)))?,
                None => order.top(),
            };
            let chain = rasiowa_sikorski(order, &DenseSetSchedule::new(providers), start, g.seed)
                .map_err(&ce)?;
            let last = *chain.last();
            Ok(LoadedGeneric {
                forcing: f,
                filter: cone(order, last),
                last: order.label(last).to_string(),
                met: chain.met,
                decoded: None,
            })
        }
    }
}

fn query_kind_forcing(env: &Env, a: &[SExpr], pos: Pos) -> Result<usize, DslError> {
    env.forcing(a.first().ok_or_else(|| err(pos, "missing forcing"))?)
}

fn load_query(env: &Env, body: &SExpr) -> Result<QueryOp, DslError> {
    let pos = body.pos();
    let head = body.head().ok_or_else(|| err(pos, "expected (KIND ...)"))?;
    let a = args(body);
    let bad = || err(pos, format!("wrong arguments for {head}"));
    let f = || query_kind_forcing(env, a, pos);
    Ok(match (head, a) {
        ("forces" | "forces-syntactic", [_, p, s]) => {
            let f = f()?;
            QueryOp::Forces {
                f,
                p: env.condition(f, p)?,
                stmt: env.stmt(f, s)?,
                syntactic: head == "forces-syntactic",
            }
        }
        ("agree", [_, s]) => {
            let f = f()?;
            QueryOp::Agree {
                f,
                stmt: env.stmt(f, s)?,
            }
        }
        ("boolean-value", [_, s]) => {
            let f = f()?;
            QueryOp::BooleanValue {
                f,
                a: env.atomic(f, s)?,
            }
        }
        ("truth-lemma", [_, s]) => {
            let f = f()?;
            QueryOp::TruthLemma {
                f,
                stmt: env.stmt(f, s)?,
            }
        }
        ("evaluate", [n, g]) => {
            let generic = env.generic(g)?;
            QueryOp::Evaluate {
                name: env.name(env.generics[&generic].forcing, n)?,
                generic,
            }
        }
        ("rank", [n]) => QueryOp::Rank(env.name(env.over(&None, pos)?, n)?),
        ("rank", [n, fx]) => QueryOp::Rank(env.name(env.forcing(fx)?, n)?),
        ("separative", [_]) => QueryOp::Separative(f()?),
        ("antisymmetric", [_]) => QueryOp::Antisymmetric(f()?),
        ("minimal", [_]) => QueryOp::Minimal(f()?),
        ("ro-size", [_]) => QueryOp::RoSize(f()?),
        ("size", [_]) => QueryOp::Size(f()?),
        ("dense", [_, ms @ ..]) => {
            let f = f()?;
            QueryOp::Dense {
                f,
                set: env.conditions(f, ms)?,
                below: None,
            }
        }
        ("dense-below", [_, p, ms @ ..]) => {
            let f = f()?;
            QueryOp::Dense {
                f,
                set: env.conditions(f, ms)?,
                below: Some(env.condition(f, p)?),
            }
        }
        ("antichain" | "maximal-antichain", [_, ms @ ..]) => {
            let f = f()?;
            QueryOp::Antichain {
                f,
                set: env.conditions(f, ms)?,
                maximal: head == "maximal-antichain",
            }
        }
        ("in-generic", [g, p]) => {
            let generic = env.generic(g)?;
            QueryOp::InGeneric {
                p: env.condition(env.generics[&generic].forcing, p)?,
                generic,
            }
        }
        ("is-generic", [g]) => QueryOp::IsGeneric(env.generic(g)?),
        ("decode", [g]) => {
            let generic = env.generic(g)?;
            if env.generics[&generic].decoded.is_none() {
                return Err(err(
                    g.pos(),
                    format!("{generic} is not over a graph-coding forcing"),
                ));
            }
            QueryOp::Decode(generic)
        }
        ("fo-satisfies", [phi, xs @ ..]) => {
            if env.ground.is_none() {
                return Err(err(pos, "fo-satisfies needs a (ground ...) declaration"));
            }
            let xs = xs.iter().map(set_literal).collect::<Result<Vec<_>, _>>()?;
            let model = env.ground.as_ref().expect("checked above");
            if let Some(x) = xs.iter().find(|x| !model.contains(x)) {
                return Err(err(pos, format!("{x} is not in the ground model")));
            }
            QueryOp::FoSatisfies {
                phi: env.fo_formula(phi)?,
                xs,
            }
        }
        ("forces-fo", [_, p, phi, pool, names @ ..]) => {
            let f = f()?;
            let pool_id = atom(pool, "a pool id")?;
            match env.pools.get(&pool_id) {
                Some((g, _)) if *g == f => {}
                Some(_) => {
                    return Err(err(
                        pool.pos(),
                        format!("pool {pool_id} is over another forcing"),
                    ))
                }
                None => return Err(err(pool.pos(), format!("unresolved pool {pool_id}"))),
            }
            let names = names
                .iter()
                .map(|n| env.name(f, n))
                .collect::<Result<Vec<_>, _>>()?;
            QueryOp::ForcesFo {
                f,
                p: env.condition(f, p)?,
                phi: env.fo_formula(phi)?,
                pool: pool_id,
                env: names,
            }
        }
        ("star", [fx, phi, xs @ ..]) => {
            let f = env.forcing(fx)?;
            let o = env.friedman(f, fx.pos())?;
            let xs = xs.iter().map(set_literal).collect::<Result<Vec<_>, _>>()?;
            if let Some(x) = xs.iter().find(|x| !o.forcing.model.contains(x)) {
                return Err(err(pos, format!("{x} is not in the ground model")));
            }
            QueryOp::Star {
                f,
                phi: env.fo_formula(phi)?,
                xs,
            }
        }
        (
            "forces" | "forces-syntactic" | "agree" | "boolean-value" | "truth-lemma" | "evaluate"
            | "rank" | "separative" | "antisymmetric" | "minimal" | "ro-size" | "size" | "dense"
            | "dense-below" | "antichain" | "maximal-antichain" | "in-generic" | "is-generic"
            | "decode" | "fo-satisfies" | "forces-fo" | "star",
            _,
        ) => return Err(bad()),
        _ => return Err(err(pos, format!("unknown query kind {head}"))),
    })
}

fn option<'a>(options: &'a [SExpr], key: &str) -> Option<&'a SExpr> {
    options.iter().find(|o| o.head() == Some(key))
}

fn option_number<T: std::str::FromStr>(
    options: &[SExpr],
    key: &str,
) -> Result<Option<T>, DslError> {
    match option(options, key) {
        None => Ok(None),
        Some(o) => match args(o) {
            [x] => number(x, &format!("a number for {key}")).map(Some),
            _ => Err(err(o.pos(), format!("({key} n) takes one number"))),
        },
    }
}

const SUITE_OPTIONS: [&str; 12] = [
    "posets",
    "generated",
    "rank",
    "seed",
    "per-poset",
    "instances",
    "break",
    "stage",
    "indices",
    "runs",
    "seeds",
    "formulas",
];

fn load_suite(
    env: &Env,
    name: &'static str,
    options: &[SExpr],
    flags: &Flags,
    pos: Pos,
) -> Result<SuiteRun, DslError> {
    for o in options {
        if !o.head().is_some_and(|h| SUITE_OPTIONS.contains(&h)) {
            return Err(err(o.pos(), format!("unknown suite option {o}")));
        }
    }
    let seed = option_number(options, "seed")?.unwrap_or(flags.seed);
    match name {
        "approachability" => {
            let instances = match option(options, "instances") {
                None => collapse_instances(),
                Some(o) => args(o)
                    .iter()
                    .map(|i| match (i.head(), args(i)) {
                        (Some("collapse"), [n, l, v]) => {
                            let vs = atom(v, "a variant")?;
                            let variant = Variant::parse(&vs)
                                .ok_or_else(|| err(v.pos(), format!("unknown variant {vs}")))?;
                            Ok((number(n, "a slot count")?, number(l, "a height")?, variant))
                        }
                        (None, []) if i.as_atom().is_some() => {
                            let f = env.forcing(i)?;
                            match &env.forcings[f].kind {
                                ForcingKind::Collapse(c) => {
                                    Ok((c.forcing.slots, c.forcing.height, c.forcing.variant))
                                }
                                _ => Err(err(i.pos(), "expected a collapse forcing")),
                            }
                        }
                        _ => Err(err(
                            i.pos(),
                            "expected (collapse n lambda variant) or a collapse forcing id",
                        )),
                    })
                    .collect::<Result<Vec<_>, _>>()?,
            };
            let broken = option_number(options, "break")?;
            if let Some(alpha) = broken {
                if let Some((n, l, v)) = instances.iter().find(|(_, l, _)| alpha >= *l) {
                    return Err(err(
                        pos,
                        format!("break {alpha} is outside collapse({n},{l},{})", v.keyword()),
                    ));
                }
            }
            Ok(SuiteRun::Approachability { instances, broken })
        }
        "friedman-iso" => {
            let seeds = match option(options, "seeds") {
                Some(o) => args(o)
                    .iter()
                    .map(|s| number(s, "a seed"))
                    .collect::<Result<Vec<u64>, _>>()?,
                None => {
                    let runs: u64 = option_number(options, "runs")?.unwrap_or(20);
                    (seed..seed + runs).collect()
                }
            };
            Ok(SuiteRun::Friedman {
                stage: option_number(options, "stage")?.unwrap_or(3),
                indices: option_number(options, "indices")?.unwrap_or(4),
                seeds,
            })
        }
        "varphi-star" => {
            let formulas = match option(options, "formulas").map(|o| (o, args(o))) {
                None => fo_exhaustive(),
                Some((_, [x])) if x.as_atom() == Some("exhaustive") => fo_exhaustive(),
                Some((_, [x, n])) if x.as_atom() == Some("sampled") => {
                    fo_sampled(number(n, "a sample count")?, seed)
                }
                Some((_, ids)) => ids
                    .iter()
                    .map(|i| {
                        let phi = env.fo_formula(i)?;
                        Ok((phi.free_vars().into_iter().max().map_or(0, |v| v + 1), phi))
                    })
                    .collect::<Result<Vec<_>, DslError>>()?,
            };
            Ok(SuiteRun::VarphiStar {
                stage: option_number(options, "stage")?.unwrap_or(2),
                formulas,
            })
        }
        _ => {
            let posets = match (
                option(options, "posets"),
                option_number::<usize>(options, "generated")?,
            ) {
                (Some(_), Some(_)) => {
                    return Err(err(pos, "give either (posets ...) or (generated n)"))
                }
                (Some(o), None) => args(o)
                    .iter()
                    .map(|x| env.forcing(x).map(|f| env.order(f).clone()))
                    .collect::<Result<_, _>>()?,
                (None, n) => preorder_suite(n.unwrap_or(20), seed),
            };
            let rank = option_number(options, "rank")?
                .or(flags.pool_rank)
                .unwrap_or(DEFAULT_POOL_RANK);
            let per_poset = option_number(options, "per-poset")?.unwrap_or(3);
            Ok(SuiteRun::Posets {
                posets,
                rank,
                per_poset,
                seed,
            })
        }
    }
}

/// Loads every declaration in order and resolves queries and suites.
pub fn load(scenario: &Scenario, flags: &Flags) -> Result<Loaded, DslError> {
    let cap = flags.carrier_cap();
    let mut env = Env::default();
    let mut tasks = Vec::new();
    let mut task_ids: HashMap<String, usize> = HashMap::new();
    for item in &scenario.items {
        match item {
            Item::Ground { stage, pos } => {
                let m = vstage(*stage).map_err(core_err(*pos))?;
                check_cap(m.len(), cap, *pos)?;
                env.ground = Some(m);
            }
            Item::Forcing { id, def, pos } => {
                env.fresh(id, *pos)?;
                let (order, kind) = load_forcing(&env, def, cap, *pos)?;
                env.forcing_ids.insert(id.clone(), env.forcings.len());
                env.forcings.push(LoadedForcing {
                    id: id.clone(),
                    order,
                    kind,
                });
            }
            Item::Name {
                id,
                over,
                body,
                pos,
            } => {
                env.fresh(id, *pos)?;
                let f = env.over(over, *pos)?;
                let n = env.name(f, body)?;
                env.names.insert(id.clone(), (f, n));
            }
            Item::Formula {
                id,
                over,
                first_order,
                body,
                pos,
            } => {
                env.fresh(id, *pos)?;
                if *first_order {
                    let phi = env.fo_formula(body)?;
                    env.fo_formulas.insert(id.clone(), phi);
                } else {
                    let f = env.over(over, *pos)?;
                    let phi = env.formula(f, body)?;
                    env.formulas.insert(id.clone(), (f, phi));
                }
            }
            Item::Pool {
                id,
                over,
                names,
                pos,
            } => {
                env.fresh(id, *pos)?;
                let f = env.over(over, *pos)?;
                let ns = names
                    .iter()
                    .map(|n| env.name(f, n))
                    .collect::<Result<Vec<_>, _>>()?;
                env.pools.insert(id.clone(), (f, NamePool::closure(ns)));
            }
            Item::Generic(g) => {
                env.fresh(&g.id, g.pos)?;
                let loaded = load_generic(&env, g)?;
                env.generics.insert(g.id.clone(), loaded);
            }
            Item::Query {
                id,
                body,
                expect,
                pos,
            } => {
                if task_ids.contains_key(id) {
                    return Err(err(*pos, format!("duplicate query id {id}")));
                }
                task_ids.insert(id.clone(), 1);
                let op = load_query(&env, body)?;
                let kind = body.head().unwrap_or_default().to_string();
                tasks.push(Task::Query(QueryTask {
                    id: id.clone(),
                    kind,
                    op,
                    expect: expect.clone(),
                }));
            }
            Item::Suite { name, options, pos } => {
                let name =
                    suite_name(name).ok_or_else(|| err(*pos, format!("unknown suite {name}")))?;
                if !flags.suites.is_empty() && !flags.suites.iter().any(|s| s == name) {
                    continue;
                }
                let run = load_suite(&env, name, options, flags, *pos)?;
                let count = task_ids.entry(name.to_string()).or_insert(0);
                *count += 1;
                let id = if *count == 1 {
                    name.to_string()
                } else {
                    format!("{name}#{count}")
                };
                tasks.push(Task::Suite(SuiteTask { id, name, run }));
            }
        }
    }
    Ok(Loaded {
        name: scenario.name.clone(),
        env,
        tasks,
        flags: flags.clone(),
    })
}

impl Env {
    pub fn pool(&self, id: &str) -> &NamePool {
        &self.pools[id].1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::parse;

    fn load_text(text: &str) -> Result<Loaded, DslError> {
        load(&parse(text)?, &Flags::default())
    }

    #[test]
    fn loads_forcings_names_and_queries() {
        let l = load_text(
            "(scenario t
               (forcing P (elems 1 a b) (le (a 1) (b 1)) (top 1))
               (name s (pairs ((check {}) a)))
               (formula phi (or (ing a) (ing b)))
               (query q (forces P 1 phi))
               (query r (rank s)))",
        )
        .unwrap();
        assert_eq!(l.env.forcings.len(), 1);
        assert_eq!(l.tasks.len(), 2);
    }

    #[test]
    fn unresolved_references_have_locations() {
        let e = load_text("(scenario t\n (forcing P (elems 1) (top 1))\n (query q (rank nope)))")
            .unwrap_err();
        assert_eq!((e.pos.line, e.pos.col), (3, 17));
        assert!(e.msg.contains("nope"));
        let e = load_text("(scenario t (query q (size Q)))").unwrap_err();
        assert!(e.msg.contains("unresolved forcing Q"));
    }

    #[test]
    fn validators_run_at_load() {
        // b <= a <= 1 without b <= 1 is fine since transitivity is closed, but a cycle of labels is not a top
        assert!(load_text("(scenario t (forcing P (elems 1 a) (le (1 a)) (top 1)))").is_err());
        let e = load_text("(scenario t (forcing P (elems 1 a b) (le (a 1) (b 1)) (top 1)) (generic G (forcing P) (schedule D{a})))")
            .unwrap_err();
        assert!(e.msg.contains("not dense"));
    }

    #[test]
    fn carrier_cap_applies() {
        let flags = Flags {
            max_size: Some(10),
            ..Flags::default()
        };
        let s = parse("(scenario t (forcing C (collapse 2 3 plain)))").unwrap();
        assert!(load(&s, &flags).is_err());
        assert!(load(&s, &Flags::default()).is_ok());
    }

    #[test]
    fn generics_over_zoo_forcings() {
        let l = load_text(
            "(scenario t
               (forcing C (collapse 2 2 plain))
               (generic G (forcing C) (schedule D_slot0 D_slot1) (seed 4))
               (forcing F (friedman (vstage 2) 2))
               (generic H (forcing F) (seed 1)))",
        )
        .unwrap();
        let g = &l.env.generics["G"];
        assert_eq!(g.met.len(), 2);
        assert!(l.env.generics["H"]
            .decoded
            .as_ref()
            .unwrap()
            .is_isomorphism());
    }
}
