//! Seeded generators for preorders, names and formulas, and the verification
//! batteries run over them. Every battery compares two independent
//! computations exactly and stops at the first disagreement.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::boolean::{
    completion_isomorphism, regular_open_algebra, saturate_to_boolean, IsoOutcome,
};
use crate::forcing::{
    cone_generics, restricted_equivalence, truth_lemma_check, Atomic, AtomicForcing,
    BooleanValuation, SemanticOracle, TruthLemma,
};
use crate::formula::{nu_mu, FoFormula, InfFormula};
use crate::generic::{is_generic, rasiowa_sikorski, Forcing};
use crate::hf::{vstage, HfSet};
use crate::names::{check_name, transport_quotient, PName};
use crate::order::{separative_quotient, Preorder};
use crate::zoo::{
    approachability_instance, two_step, CheckNamed, Decoded, FriedmanForcing, ProjectionFamily,
    Variant,
};

/// Result of one battery.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteOutcome {
    pub suite: &'static str,
    /// Number of individual comparisons made.
    pub checked: usize,
    pub failure: Option<String>,
}

impl SuiteOutcome {
    fn new(suite: &'static str) -> SuiteOutcome {
        SuiteOutcome {
            suite,
            checked: 0,
            failure: None,
        }
    }

    fn failed(mut self, msg: impl Into<String>) -> SuiteOutcome {
        self.failure = Some(msg.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

const LABELS: [&str; 6] = ["1", "a", "b", "c", "d", "e"];

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

fn relation_key(m: &[Vec<bool>], perm: &[usize]) -> u64 {
    let n = m.len();
    let mut key = 0u64;
    for i in 0..n {
        for j in 0..n {
            key = (key << 1) | m[perm[i]][perm[j]] as u64;
        }
    }
    key
}

/// Every preorder on `n ≤ 5` conditions whose greatest element is `1`, one
/// per isomorphism class, in a fixed order.
pub fn preorders_of_size(n: usize) -> Vec<Preorder> {
    assert!((1..=5).contains(&n), "sizes 1..=5");
    let free: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (1..n).map(move |j| (i, j)))
        .filter(|(i, j)| i != j)
        .collect();
    let perms: Vec<Vec<usize>> = permutations(&(1..n).collect::<Vec<_>>())
        .into_iter()
        .map(|p| std::iter::once(0).chain(p).collect())
        .collect();
    let mut seen = BTreeSet::new();
    let mut found: Vec<(u64, Vec<Vec<bool>>)> = Vec::new();
    for mask in 0u32..(1 << free.len()) {
        let mut m = vec![vec![false; n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = true;
            row[0] = true;
        }
        for (b, &(i, j)) in free.iter().enumerate() {
            if mask >> b & 1 == 1 {
                m[i][j] = true;
            }
        }
        let transitive =
            (0..n).all(|i| (0..n).all(|j| !m[i][j] || (0..n).all(|k| !m[j][k] || m[i][k])));
        if !transitive {
            continue;
        }
        let key = perms
            .iter()
            .map(|p| relation_key(&m, p))
            .min()
            .expect("nonempty");
        if seen.insert(key) {
            found.push((key, m));
        }
    }
    found.sort_by_key(|(k, _)| *k);
    found
        .into_iter()
        .map(|(_, m)| {
            let labels = LABELS[..n].iter().map(|s| s.to_string()).collect();
            Preorder::from_fn(labels, 0, |a, b| m[a][b]).expect("transitive with a top")
        })
        .collect()
}

/// The first `count` of: every preorder with a top on at most five
/// conditions up to isomorphism (69 classes, smallest first), then seeded
/// relabellings of the four- and five-condition ones with the top at
/// varying positions.
pub fn preorder_suite(count: usize, seed: u64) -> Vec<Preorder> {
    let mut out: Vec<Preorder> = (1..=5).flat_map(preorders_of_size).collect();
    let larger: Vec<Preorder> = out.iter().filter(|p| p.len() >= 4).cloned().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < count {
        let base = larger
            .choose(&mut rng)
            .expect("four-condition preorders exist");
        let n = base.len();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        // condition i of the copy is condition perm[i] of the base
        let labels = perm.iter().map(|&i| base.label(i).to_string()).collect();
        let top = perm
            .iter()
            .position(|&i| i == base.top())
            .expect("permutation");
        let copy = Preorder::from_fn(labels, top, |a, b| base.leq(perm[a], perm[b]))
            .expect("relabelled preorder");
        out.push(copy);
    }
    out.truncate(count);
    out
}

/// Names of rank at most `max_rank`: the empty name, check names of
/// naturals, every `{⟨τ,p⟩}` for a fixed `τ` one rank lower, and seeded
/// two-entry names.
pub fn name_suite(order: &Preorder, max_rank: u32, seed: u64) -> Vec<PName> {
    let top = order.top();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut all: BTreeSet<PName> = BTreeSet::from([PName::empty()]);
    let mut prev = vec![PName::empty()];
    for r in 1..=max_rank {
        let lower: Vec<PName> = all.iter().cloned().collect();
        let mut layer = vec![check_name(&HfSet::natural(r as usize), top)];
        layer.extend((0..order.len()).map(|p| PName::from_entries([(prev[0].clone(), p)])));
        for _ in 0..2 {
            let a = prev.choose(&mut rng).expect("nonempty layer").clone();
            let b = lower.choose(&mut rng).expect("nonempty pool").clone();
            let (p, q) = (rng.gen_range(0..order.len()), rng.gen_range(0..order.len()));
            layer.push(PName::from_entries([(a, p), (b, q)]));
        }
        layer.retain(|n| n.rank() == r);
        all.extend(layer.iter().cloned());
        prev = layer;
    }
    all.into_iter().collect()
}

fn atomics(names: &[PName]) -> impl Iterator<Item = Atomic> + '_ {
    names.iter().flat_map(move |s| {
        names.iter().flat_map(move |t| {
            [
                Atomic::Eq(s.clone(), t.clone()),
                Atomic::Mem(s.clone(), t.clone()),
                Atomic::Sub(s.clone(), t.clone()),
            ]
        })
    })
}

/// A formula of depth exactly `depth` over the given names.
pub fn random_inf_formula(
    order: &Preorder,
    names: &[PName],
    depth: usize,
    rng: &mut ChaCha8Rng,
) -> InfFormula {
    let pick = |rng: &mut ChaCha8Rng| names.choose(rng).expect("nonempty names").clone();
    if depth == 0 {
        return match rng.gen_range(0..3) {
            0 => InfFormula::InGeneric(rng.gen_range(0..order.len())),
            1 => InfFormula::Eq(pick(rng), pick(rng)),
            _ => InfFormula::Mem(pick(rng), pick(rng)),
        };
    }
    match rng.gen_range(0..3) {
        0 => InfFormula::not(random_inf_formula(order, names, depth - 1, rng)),
        k => {
            let len = rng.gen_range(2..=3);
            let mut parts = vec![random_inf_formula(order, names, depth - 1, rng)];
            for _ in 1..len {
                let d = rng.gen_range(0..depth);
                parts.push(random_inf_formula(order, names, d, rng));
            }
            parts.shuffle(rng);
            if k == 1 {
                InfFormula::Or(parts)
            } else {
                InfFormula::And(parts)
            }
        }
    }
}

fn literals(scope: usize) -> Vec<FoFormula> {
    let mut atoms = Vec::new();
    for i in 0..scope {
        for j in 0..scope {
            if i <= j {
                atoms.push(FoFormula::Eq(i, j));
            }
            atoms.push(FoFormula::Mem(i, j));
        }
    }
    let negated: Vec<FoFormula> = atoms.iter().cloned().map(FoFormula::not).collect();
    atoms.extend(negated);
    atoms
}

/// Normal-form formulas with free variables among `v_0..v_{scope-1}`:
/// literals, conjunctions and disjunctions of two literals, and `∃v_scope`,
/// `∀v_scope` applied to the grammar one level deeper.
pub fn fo_grammar(scope: usize, depth: usize) -> Vec<FoFormula> {
    let lits = literals(scope);
    let mut out = lits.clone();
    for (i, a) in lits.iter().enumerate() {
        for b in &lits[i + 1..] {
            out.push(FoFormula::And(vec![a.clone(), b.clone()]));
            out.push(FoFormula::Or(vec![a.clone(), b.clone()]));
        }
    }
    if depth > 0 {
        for body in fo_grammar(scope + 1, depth - 1) {
            out.push(FoFormula::exists(scope, body.clone()));
            out.push(FoFormula::forall(scope, body));
        }
    }
    out
}

/// The whole grammar for scopes `0..=2` and quantifier depth at most 2.
pub fn fo_exhaustive() -> Vec<(usize, FoFormula)> {
    (0..=2)
        .flat_map(|s| fo_grammar(s, 2).into_iter().map(move |f| (s, f)))
        .collect()
}

/// `per_scope` seeded picks from the grammar for each scope `0..=2`.
pub fn fo_sampled(per_scope: usize, seed: u64) -> Vec<(usize, FoFormula)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for s in 0..=2 {
        let all = fo_grammar(s, 2);
        out.extend(
            all.choose_multiple(&mut rng, per_scope)
                .map(|f| (s, f.clone())),
        );
    }
    out
}

fn poset_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(i as u64)
}

/// Syntactic forcing of `=`, `∈`, `⊆` agrees with truth at every cone below.
pub fn atomic_equivalence(posets: &[Preorder], max_rank: u32, seed: u64) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("atomic-equivalence");
    for (i, order) in posets.iter().enumerate() {
        let names = name_suite(order, max_rank, poset_seed(seed, i));
        let oracle = SemanticOracle::new(order);
        let syntactic = AtomicForcing::new(order);
        for a in atomics(&names) {
            let semantic = oracle.region(&oracle.truth_cones_atomic(&a));
            let forced = syntactic.set(&a);
            out.checked += order.len();
            if semantic != forced {
                let p = (0..order.len())
                    .find(|&p| semantic.contains(p) != forced.contains(p))
                    .expect("sets differ");
                return out.failed(format!("{order:?}: at {} for {a}", order.label(p)));
            }
        }
    }
    out
}

/// Every atomic statement true at a generic cone is forced by a member.
pub fn truth_lemma(posets: &[Preorder], max_rank: u32, seed: u64) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("truth-lemma");
    for (i, order) in posets.iter().enumerate() {
        let names = name_suite(order, max_rank, poset_seed(seed, i));
        let oracle = SemanticOracle::new(order);
        for a in atomics(&names) {
            let phi = a.to_formula();
            for g in oracle.cones() {
                out.checked += 1;
                match truth_lemma_check(&oracle, g, &phi) {
                    Ok(TruthLemma::Witness(_)) | Ok(TruthLemma::Vacuous) => {}
                    Ok(TruthLemma::Failure) => {
                        return out.failed(format!(
                            "{order:?}: {a} holds at {:?} but is not forced",
                            g.members()
                        ))
                    }
                    Err(e) => return out.failed(format!("{order:?}: {e}")),
                }
            }
        }
    }
    out
}

/// `φ^G ⇔ ν^G = μ^G` at every cone, and forcing through `ν = μ` agrees
/// with semantic forcing everywhere.
pub fn nu_mu_contract(
    posets: &[Preorder],
    per_poset: usize,
    max_rank: u32,
    seed: u64,
) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("nu-mu");
    for (i, order) in posets.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(poset_seed(seed, i));
        let names = name_suite(order, max_rank, poset_seed(seed, i));
        let oracle = SemanticOracle::new(order);
        let syntactic = AtomicForcing::new(order);
        for _ in 0..per_poset {
            let depth = rng.gen_range(0..=3);
            let phi = random_inf_formula(order, &names, depth, &mut rng);
            let (nu, mu) = nu_mu(&phi, order.top());
            for c in 0..oracle.cones().len() {
                out.checked += 1;
                if oracle.holds(c, &phi) != (oracle.eval(c, &nu) == oracle.eval(c, &mu)) {
                    return out.failed(format!("{order:?}: {} at cone {c}", phi.display(order)));
                }
            }
            let semantic = oracle.region(&oracle.truth_cones(&phi));
            out.checked += order.len();
            if semantic != syntactic.nu_mu_set(&phi) {
                return out.failed(format!(
                    "{order:?}: forcing sets differ for {}",
                    phi.display(order)
                ));
            }
        }
    }
    out
}

/// `p ⊩ φ ⇔ e(p) ≤ ⟦φ⟧` in the regular open algebra of the separative
/// quotient.
pub fn boolean_values(posets: &[Preorder], max_rank: u32, seed: u64) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("boolean-values");
    for (i, order) in posets.iter().enumerate() {
        let names = name_suite(order, max_rank, poset_seed(seed, i));
        let oracle = SemanticOracle::new(order);
        let valuation = BooleanValuation::new(order);
        for a in atomics(&names) {
            let semantic = oracle.region(&oracle.truth_cones_atomic(&a));
            for p in 0..order.len() {
                out.checked += 1;
                if valuation.forces(p, &a) != semantic.contains(p) {
                    return out.failed(format!("{order:?}: at {} for {a}", order.label(p)));
                }
            }
        }
    }
    out
}

/// The saturated completion of the separative quotient and its regular open
/// algebra are isomorphic over the quotient, and `RO(P)` has
/// `2^(#minimal classes)` elements.
pub fn completion_iso(posets: &[Preorder]) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("completion-iso");
    for order in posets {
        out.checked += 1;
        let expected = 1usize << order.minimal_classes().len();
        let size = regular_open_algebra(order).algebra.size();
        if size != expected {
            return out.failed(format!(
                "{order:?}: {size} regular open sets, expected {expected}"
            ));
        }
        let (quotient, _) = separative_quotient(order);
        let ro = regular_open_algebra(&quotient);
        let saturated = match saturate_to_boolean(&quotient) {
            Ok(c) => c,
            Err(e) => return out.failed(format!("{order:?}: {e}")),
        };
        match completion_isomorphism(&saturated, &ro) {
            Ok(IsoOutcome::Isomorphism(_)) => {}
            Ok(IsoOutcome::Failure(f)) => {
                return out.failed(format!(
                    "{order:?}: {} fails at element {}",
                    f.law, f.element
                ))
            }
            Err(e) => return out.failed(format!("{order:?}: {e}")),
        }
    }
    out
}

/// Names over stratum `α`: the empty name, `{⟨∅,c⟩}` for each condition `c`
/// of the stratum, and a few two-entry and rank-two names.
pub fn stratum_names(family: &ProjectionFamily, alpha: usize) -> Vec<PName> {
    let lower: Vec<usize> = family
        .stratum(alpha)
        .map(|s| s.ones().collect())
        .unwrap_or_default();
    let singles: Vec<PName> = lower
        .iter()
        .map(|&c| PName::from_entries([(PName::empty(), c)]))
        .collect();
    let mut names: BTreeSet<PName> = BTreeSet::from([PName::empty()]);
    names.extend(singles.iter().cloned());
    let top = family.order().top();
    for (k, s) in singles.iter().enumerate().take(4) {
        let c = lower[(k + 1) % lower.len()];
        names.insert(PName::from_entries([(PName::empty(), c), (s.clone(), top)]));
        names.insert(PName::from_entries([(s.clone(), c)]));
    }
    names.into_iter().collect()
}

/// Every approachability law holds, restricted forcing agrees with `⊩*` and
/// evaluations transfer along the projections.
pub fn approachability_family(tag: &str, family: &ProjectionFamily) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("approachability");
    let report = family.check();
    out.checked += report.laws.len();
    if let Some(law) = report.first_failure() {
        return out.failed(format!(
            "{tag}: {} {}",
            law.law,
            law.failure.clone().unwrap_or_default()
        ));
    }
    let generics = cone_generics(family.order());
    for alpha in 0..family.height() {
        let names = stratum_names(family, alpha);
        out.checked += names.len() * names.len() * family.order().len();
        match restricted_equivalence(family, alpha, &names) {
            Ok(None) => {}
            Ok(Some((p, s, t))) => {
                return out.failed(format!(
                    "{tag}: restricted forcing differs at alpha={alpha}, {} for {s} ⊆ {t}",
                    family.order().label(p)
                ))
            }
            Err(e) => return out.failed(format!("{tag}: {e}")),
        }
        for g in &generics {
            out.checked += names.len();
            match family.generic_transfer(alpha, g, &names) {
                Ok(None) => {}
                Ok(Some(s)) => {
                    return out.failed(format!("{tag}: {s} does not transfer at alpha={alpha}"))
                }
                Err(e) => return out.failed(format!("{tag}: {e}")),
            }
        }
    }
    out
}

/// The collapse families pass [`approachability_family`], and broken
/// controls built from them are caught.
pub fn approachability(instances: &[(usize, usize, Variant)]) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("approachability");
    for &(slots, lambda, variant) in instances {
        let tag = format!("collapse({slots},{lambda},{})", variant.keyword());
        let family = match approachability_instance(slots, lambda, variant) {
            Ok(f) => f,
            Err(e) => return out.failed(format!("{tag}: {e}")),
        };
        let one = approachability_family(&tag, &family);
        out.checked += one.checked;
        if let Some(f) = one.failure {
            return out.failed(f);
        }
        if let Err(msg) = broken_controls(&family, lambda) {
            return out.failed(format!("{tag}: {msg}"));
        }
    }
    out
}

/// A constant-top projection must break a law and, when the lower stratum
/// is nontrivial, evaluation transfer and restricted forcing.
fn broken_controls(family: &ProjectionFamily, lambda: usize) -> Result<(), String> {
    let n = family.order().len();
    if n == 1 {
        return Ok(());
    }
    let alpha = lambda - 1;
    let broken = family
        .with_projection(alpha, vec![family.order().top(); n])
        .map_err(|e| e.to_string())?;
    if broken.check().passes() {
        return Err("a constant projection passed every law".into());
    }
    let names = stratum_names(family, alpha);
    if names
        .iter()
        .any(|s| s.conditions().iter().any(|&c| c != family.order().top()))
    {
        let mut caught = false;
        for g in cone_generics(family.order()) {
            caught |= broken
                .generic_transfer(alpha, &g, &names)
                .map_err(|e| e.to_string())?
                .is_some();
        }
        if !caught {
            return Err("a constant projection transferred every evaluation".into());
        }
        if restricted_equivalence(&broken, alpha, &names)
            .map_err(|e| e.to_string())?
            .is_none()
        {
            return Err("a constant projection kept restricted forcing intact".into());
        }
    }
    Ok(())
}

/// The scheduler over the total conditions decodes to an isomorphic copy of
/// the ground model, for each seed.
pub fn friedman_iso(
    stage: usize,
    indices: usize,
    seeds: impl IntoIterator<Item = u64>,
) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("friedman-iso");
    let forcing = match vstage(stage).and_then(|m| FriedmanForcing::new(m, indices)) {
        Ok(f) => f,
        Err(e) => return out.failed(e.to_string()),
    };
    let schedule = forcing.schedule();
    for seed in seeds {
        out.checked += 1;
        let chain = match rasiowa_sikorski(&forcing, &schedule, forcing.top(), Some(seed)) {
            Ok(c) => c,
            Err(e) => return out.failed(format!("seed {seed}: {e}")),
        };
        if !chain.chain.iter().all(|p| p.is_total()) {
            return out.failed(format!("seed {seed}: the chain left the total conditions"));
        }
        match Decoded::from_conditions(&chain.chain) {
            Ok(d) if d.is_bijection_onto(&forcing.model, indices) && d.is_isomorphism() => {}
            Ok(_) => {
                return out.failed(format!(
                    "seed {seed}: {} does not decode to an isomorphism",
                    chain.last()
                ))
            }
            Err(e) => return out.failed(format!("seed {seed}: {e}")),
        }
    }
    out
}

fn tuples(carrier: &[HfSet], len: usize) -> Vec<Vec<HfSet>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                carrier
                    .iter()
                    .map(move |x| t.iter().cloned().chain([x.clone()]).collect())
            })
            .collect();
    }
    out
}

/// Truth in the ground model agrees with forcing the translation at `p^x̄`,
/// for every assignment, with the truncation equal to the model size.
pub fn varphi_star(stage: usize, formulas: &[(usize, FoFormula)]) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("varphi-star");
    let setup = vstage(stage).and_then(|m| {
        let n = m.len();
        FriedmanForcing::new(m, n)?.explicit()
    });
    let order = match setup {
        Ok(o) => o,
        Err(e) => return out.failed(e.to_string()),
    };
    let ctx = match order.star_context() {
        Ok(c) => c,
        Err(e) => return out.failed(e.to_string()),
    };
    let oracle = SemanticOracle::new(&order.order);
    for (scope, phi) in formulas {
        for xs in tuples(order.forcing.model.carrier(), *scope) {
            out.checked += 1;
            match order.star_agreement(&oracle, &ctx, phi, &xs) {
                Ok((truth, forced)) if truth == forced => {}
                Ok((truth, _)) => {
                    let shown: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
                    return out.failed(format!(
                        "{phi} at ({}): model says {truth}",
                        shown.join(",")
                    ));
                }
                Err(e) => return out.failed(format!("{phi}: {e}")),
            }
        }
    }
    out
}

/// For check-named `Q`, the products `G ∗ H` of cone generics are generic
/// and are exactly the cone generics of the iteration.
pub fn two_step_generics(bases: &[Preorder], seconds: &[Preorder]) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("two-step");
    for base in bases {
        for q in seconds {
            let named = CheckNamed::new(base, q);
            let it = match two_step(base, &named.named, &named.pool) {
                Ok(it) => it,
                Err(e) => return out.failed(format!("{base:?} * {q:?}: {e}")),
            };
            let mut composed = BTreeSet::new();
            for g in cone_generics(base) {
                let qg = match it.evaluate_second(&g) {
                    Ok(x) => x,
                    Err(e) => return out.failed(format!("{base:?} * {q:?}: {e}")),
                };
                for h in cone_generics(&qg.order) {
                    out.checked += 1;
                    let gh = it.compose_generics(&g, &qg, &h);
                    if !is_generic(&it.order, gh.as_set()) {
                        return out.failed(format!(
                            "{base:?} * {q:?}: {:?} is not generic",
                            gh.members()
                        ));
                    }
                    composed.insert(gh.members());
                }
            }
            let cones: BTreeSet<Vec<usize>> = cone_generics(&it.order)
                .iter()
                .map(|f| f.members())
                .collect();
            if composed != cones {
                return out.failed(format!(
                    "{base:?} * {q:?}: composed generics differ from the cones"
                ));
            }
        }
    }
    out
}

/// `p ⊩ φ(σ)` in `P` iff `π(p) ⊩ φ(σ^π)` in the separative quotient.
pub fn quotient_transfer(posets: &[Preorder], max_rank: u32, seed: u64) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("quotient-transfer");
    for (i, order) in posets.iter().enumerate() {
        let names = name_suite(order, max_rank, poset_seed(seed, i));
        let (quotient, pi) = separative_quotient(order);
        let source = AtomicForcing::new(order);
        let target = AtomicForcing::new(&quotient);
        for a in atomics(&names) {
            let moved = a.map_names(|n| transport_quotient(n, &pi));
            let (lhs, rhs) = (source.set(&a), target.set(&moved));
            for p in 0..order.len() {
                out.checked += 1;
                if lhs.contains(p) != rhs.contains(pi.map[p]) {
                    return out.failed(format!("{order:?}: at {} for {a}", order.label(p)));
                }
            }
        }
    }
    out
}

/// Every collapse family with at most two slots and height at most four.
pub fn collapse_instances() -> Vec<(usize, usize, Variant)> {
    let mut out = Vec::new();
    for slots in 1..=2 {
        for lambda in 1..=4 {
            for v in [Variant::Plain, Variant::Star, Variant::Geq] {
                out.push((slots, lambda, v));
            }
        }
    }
    out
}
