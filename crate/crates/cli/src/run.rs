//! Executes loaded tasks. Tasks are independent, so they run on the rayon
//! pool; records come back in task order.

use std::time::Instant;

use rayon::prelude::*;

use forcelab_core::boolean::regular_open_algebra;
use forcelab_core::forcing::{
    forces_fo, forces_via_nu_mu, semantic_forces_fo, syntactic_forces_atomic, truth_lemma_check,
    BooleanValuation, SemanticOracle, TruthLemma,
};
use forcelab_core::formula::fo_satisfies;
use forcelab_core::generic::is_generic;
use forcelab_core::names::evaluate;
use forcelab_core::order::Preorder;
use forcelab_core::suite::{
    approachability, approachability_family, atomic_equivalence, boolean_values, completion_iso,
    friedman_iso, nu_mu_contract, quotient_transfer, truth_lemma, two_step_generics, varphi_star,
    SuiteOutcome,
};
use forcelab_core::zoo::approachability_instance;

use crate::load::{
    suite_description, Env, ForcingKind, Loaded, QueryOp, QueryTask, Stmt, SuiteRun, SuiteTask,
    Task,
};
use crate::report::{Record, Report, Verdict};

fn labels(order: &Preorder, set: impl IntoIterator<Item = usize>) -> String {
    let ls: Vec<&str> = set.into_iter().map(|p| order.label(p)).collect();
    format!("{{{}}}", ls.join(","))
}

fn semantic(oracle: &SemanticOracle<'_>, p: usize, stmt: &Stmt) -> (bool, Option<usize>) {
    let v = match stmt {
        Stmt::Atomic(a) => oracle.forces_atomic(p, a),
        Stmt::Formula(phi) => oracle.forces(p, phi),
    };
    (v.forced, v.witness)
}

fn syntactic(order: &Preorder, p: usize, stmt: &Stmt) -> bool {
    match stmt {
        Stmt::Atomic(a) => syntactic_forces_atomic(order, p, a),
        Stmt::Formula(phi) => forces_via_nu_mu(order, p, phi),
    }
}

fn forced_word(b: bool) -> &'static str {
    if b {
        "forced"
    } else {
        "refuted"
    }
}

/// The value of a query and an optional witness.
fn evaluate_query(env: &Env, op: &QueryOp) -> Result<(String, Option<String>), String> {
    let e = |x: forcelab_core::Error| x.to_string();
    let order = |f: usize| &env.forcings[f].order;
    Ok(match op {
        QueryOp::Forces {
            f,
            p,
            stmt,
            syntactic: false,
        } => {
            let o = order(*f);
            let (forced, w) = semantic(&SemanticOracle::new(o), *p, stmt);
            (
                forced_word(forced).into(),
                w.map(|m| o.label(m).to_string()),
            )
        }
        QueryOp::Forces {
            f,
            p,
            stmt,
            syntactic: true,
        } => (forced_word(syntactic(order(*f), *p, stmt)).into(), None),
        QueryOp::Agree { f, stmt } => {
            let o = order(*f);
            let oracle = SemanticOracle::new(o);
            match (0..o.len()).find(|&p| semantic(&oracle, p, stmt).0 != syntactic(o, p, stmt)) {
                None => ("agree".into(), None),
                Some(p) => ("differ".into(), Some(o.label(p).to_string())),
            }
        }
        QueryOp::BooleanValue { f, a } => {
            let o = order(*f);
            let bv = BooleanValuation::new(o);
            (labels(o, (0..o.len()).filter(|&p| bv.forces(p, a))), None)
        }
        QueryOp::Evaluate { name, generic } => (
            evaluate(name, &env.generics[generic].filter).to_string(),
            None,
        ),
        QueryOp::Rank(n) => (n.rank().to_string(), None),
        QueryOp::Separative(f) => (order(*f).is_separative().to_string(), None),
        QueryOp::Antisymmetric(f) => (order(*f).is_antisymmetric().to_string(), None),
        QueryOp::Minimal(f) => (labels(order(*f), order(*f).minimal_classes()), None),
        QueryOp::RoSize(f) => (
            regular_open_algebra(order(*f)).algebra.size().to_string(),
            None,
        ),
        QueryOp::Size(f) => (order(*f).len().to_string(), None),
        QueryOp::Dense { f, set, below } => {
            let o = order(*f);
            let dense = match below {
                Some(p) => o.is_dense_below(set, *p),
                None => o.is_dense(set),
            };
            (dense.to_string(), None)
        }
        QueryOp::Antichain { f, set, maximal } => {
            let o = order(*f);
            let yes = if *maximal {
                o.is_maximal_antichain(set)
            } else {
                o.is_antichain(set)
            };
            (yes.to_string(), None)
        }
        QueryOp::TruthLemma { f, stmt } => {
            let o = order(*f);
            let oracle = SemanticOracle::new(o);
            let phi = match stmt {
                Stmt::Atomic(a) => a.to_formula(),
                Stmt::Formula(phi) => phi.clone(),
            };
            let mut parts = Vec::new();
            for (i, g) in oracle.cones().iter().enumerate() {
                let cone = o.label(oracle.minimal()[i]);
                match truth_lemma_check(&oracle, g, &phi).map_err(e)? {
                    TruthLemma::Witness(p) => parts.push(format!("{cone}:{}", o.label(p))),
                    TruthLemma::Vacuous => parts.push(format!("{cone}:false")),
                    TruthLemma::Failure => return Ok(("fails".into(), Some(cone.to_string()))),
                }
            }
            ("holds".into(), Some(parts.join(",")))
        }
        QueryOp::InGeneric { generic, p } => {
            (env.generics[generic].filter.contains(*p).to_string(), None)
        }
        QueryOp::IsGeneric(generic) => {
            let g = &env.generics[generic];
            (
                is_generic(order(g.forcing), g.filter.as_set()).to_string(),
                Some(g.last.clone()),
            )
        }
        QueryOp::Decode(generic) => {
            let g = &env.generics[generic];
            let ForcingKind::Friedman(o) = &env.forcings[g.forcing].kind else {
                return Err("not a graph-coding generic".into());
            };
            let d = g.decoded.as_ref().expect("checked at load");
            let ok = d.is_bijection_onto(&o.forcing.model, o.forcing.n) && d.is_isomorphism();
            (
                if ok { "isomorphism" } else { "not-isomorphism" }.into(),
                Some(g.last.clone()),
            )
        }
        QueryOp::FoSatisfies { phi, xs } => {
            let model = env.ground.as_ref().expect("checked at load");
            (
                fo_satisfies(model, &[], phi, xs).map_err(e)?.to_string(),
                None,
            )
        }
        QueryOp::ForcesFo {
            f,
            p,
            phi,
            pool,
            env: names,
        } => {
            let o = order(*f);
            let pool = env.pool(pool);
            let syntactic = forces_fo(o, *p, phi, pool, &[], names).map_err(e)?;
            let oracle = SemanticOracle::new(o);
            let sem = semantic_forces_fo(&oracle, *p, pool, &[], phi, names).map_err(e)?;
            if sem.forced != syntactic {
                return Err(format!(
                    "syntactic {} but semantic {}",
                    forced_word(syntactic),
                    forced_word(sem.forced)
                ));
            }
            (
                forced_word(syntactic).into(),
                sem.witness.map(|m| o.label(m).to_string()),
            )
        }
        QueryOp::Star { f, phi, xs } => {
            let ForcingKind::Friedman(o) = &env.forcings[*f].kind else {
                return Err("not a graph-coding forcing".into());
            };
            let ctx = o.star_context().map_err(e)?;
            let oracle = SemanticOracle::new(&o.order);
            let (truth, forced) = o.star_agreement(&oracle, &ctx, phi, xs).map_err(e)?;
            let word = if truth == forced { "agree" } else { "differ" };
            (word.into(), Some(format!("model={truth}")))
        }
    })
}

fn run_query(env: &Env, q: &QueryTask) -> Record {
    let mut r = Record {
        id: q.id.clone(),
        kind: q.kind.clone(),
        verdict: Verdict::Value,
        value: String::new(),
        witness: None,
        expected: None,
        checked: None,
        time_ms: None,
    };
    match evaluate_query(env, &q.op) {
        Ok((value, witness)) => {
            r.verdict = match &q.expect {
                None => Verdict::Value,
                Some(e) if *e == value => Verdict::Pass,
                Some(e) => {
                    r.expected = Some(e.clone());
                    Verdict::Fail
                }
            };
            r.value = value;
            r.witness = witness;
        }
        Err(msg) => {
            r.verdict = Verdict::Fail;
            r.value = "error".into();
            r.witness = Some(msg);
        }
    }
    r
}

fn run_suite_outcome(s: &SuiteTask) -> SuiteOutcome {
    match &s.run {
        SuiteRun::Posets {
            posets,
            rank,
            per_poset,
            seed,
        } => match s.name {
            "atomic-equivalence" => atomic_equivalence(posets, *rank, *seed),
            "truth-lemma" => truth_lemma(posets, *rank, *seed),
            "nu-mu" => nu_mu_contract(posets, *per_poset, *rank, *seed),
            "boolean-values" => boolean_values(posets, *rank, *seed),
            "completion-iso" => completion_iso(posets),
            "two-step" => two_step_generics(posets, posets),
            "quotient-transfer" => quotient_transfer(posets, *rank, *seed),
            other => unreachable!("{other} takes no poset list"),
        },
        SuiteRun::Approachability {
            instances,
            broken: None,
        } => approachability(instances),
        SuiteRun::Approachability {
            instances,
            broken: Some(alpha),
        } => {
            let mut out = SuiteOutcome {
                suite: "approachability",
                checked: 0,
                failure: None,
            };
            for &(slots, lambda, variant) in instances {
                let tag = format!("collapse({slots},{lambda},{})", variant.keyword());
                let one = approachability_instance(slots, lambda, variant).and_then(|family| {
                    let top = family.order().top();
                    family.with_projection(*alpha, vec![top; family.order().len()])
                });
                let one = match one {
                    Ok(broken) => approachability_family(
                        &format!("{tag} with constant projection at {alpha}"),
                        &broken,
                    ),
                    Err(e) => SuiteOutcome {
                        suite: "approachability",
                        checked: 0,
                        failure: Some(format!("{tag}: {e}")),
                    },
                };
                out.checked += one.checked;
                if one.failure.is_some() {
                    out.failure = one.failure;
                    break;
                }
            }
            out
        }
        SuiteRun::Friedman {
            stage,
            indices,
            seeds,
        } => friedman_iso(*stage, *indices, seeds.iter().copied()),
        SuiteRun::VarphiStar { stage, formulas } => varphi_star(*stage, formulas),
    }
}

fn run_suite(s: &SuiteTask) -> Record {
    let outcome = run_suite_outcome(s);
    Record {
        id: s.id.clone(),
        kind: "suite".into(),
        verdict: if outcome.passed() {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        value: String::new(),
        witness: outcome.failure,
        expected: None,
        checked: Some(outcome.checked),
        time_ms: None,
    }
}

fn run_task(env: &Env, task: &Task, timing: bool) -> Record {
    let start = Instant::now();
    let mut r = match task {
        Task::Query(q) => run_query(env, q),
        Task::Suite(s) => run_suite(s),
    };
    if timing {
        r.time_ms = Some(start.elapsed().as_millis() as u64);
    }
    r
}

pub fn run(loaded: &Loaded) -> Report {
    let records: Vec<Record> = loaded
        .tasks
        .par_iter()
        .map(|t| run_task(&loaded.env, t, loaded.flags.timing))
        .collect();
    let mut suites: Vec<(String, String)> = Vec::new();
    for t in &loaded.tasks {
        if let Task::Suite(s) = t {
            if !suites.iter().any(|(n, _)| n == s.name) {
                suites.push((s.name.to_string(), suite_description(s.name).to_string()));
            }
        }
    }
    Report {
        scenario: loaded.name.clone(),
        seed: loaded.flags.seed,
        suites,
        records,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::load::{load, Flags};
    use crate::scenario::parse;

    fn report(text: &str) -> Report {
        run(&load(&parse(text).unwrap(), &Flags::default()).unwrap())
    }

    #[test]
    fn p3_queries() {
        let r = report(
            "(scenario t
               (forcing P (elems 1 a b) (le (a 1) (b 1)) (top 1))
               (name s (pairs ((check {}) a)))
               (query q1 (forces P 1 (or (ing a) (ing b))) (expect forced))
               (query q2 (forces P 1 (ing a)))
               (query q3 (minimal P) (expect {a,b}))
               (query q4 (ro-size P) (expect 4))
               (query q5 (agree P (sub s (check {}))) (expect agree))
               (query q6 (forces P a (mem (check {}) s)) (expect refuted)))",
        );
        let lines: Vec<String> = r.records.iter().map(Record::text_line).collect();
        assert_eq!(lines[0], "RESULT q1 PASS forced");
        assert_eq!(lines[1], "RESULT q2 VALUE refuted witness=b");
        assert_eq!(lines[2], "RESULT q3 PASS {a,b}");
        assert_eq!(lines[3], "RESULT q4 PASS 4");
        assert_eq!(lines[4], "RESULT q5 PASS agree");
        assert_eq!(lines[5], "RESULT q6 FAIL forced expected=refuted");
        assert!(r.failed());
    }

    #[test]
    fn broken_projection_fails_with_a_witness() {
        let r = report(
            "(scenario t (suite approachability (instances (collapse 1 2 plain)) (break 1)))",
        );
        assert_eq!(r.records[0].verdict, Verdict::Fail);
        assert!(r.records[0]
            .witness
            .as_ref()
            .unwrap()
            .contains("constant projection"));
        let ok = report("(scenario t (suite approachability (instances (collapse 1 2 plain))))");
        assert_eq!(ok.records[0].verdict, Verdict::Pass);
    }

    #[test]
    fn empty_scenarios_report_nothing() {
        let r = report("(scenario empty)");
        assert!(r.records.is_empty());
        assert!(!r.failed());
    }
}
