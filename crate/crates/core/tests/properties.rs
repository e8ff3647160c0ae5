//! Randomized properties over small preorders. Forcing is checked against a
//! brute-force oracle that enumerates every subset of the carrier, keeps the
//! ones that are filters meeting every dense set, and evaluates formulas there.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use forcelab_core::boolean::regular_open_algebra;
use forcelab_core::forcing::{forces_via_nu_mu, syntactic_forces_atomic, Atomic, SemanticOracle};
use forcelab_core::formula::{decode, encode, nnf, InfFormula};
use forcelab_core::generic::filter_validate;
use forcelab_core::hf::{canonicalize, HfSet};
use forcelab_core::names::{evaluate, Evaluator, Filter, PName};
use forcelab_core::order::{separative_quotient, Preorder};
use forcelab_core::suite::{name_suite, random_inf_formula};

/// A preorder on `n` conditions with condition 0 on top, from a random
/// relation closed under reflexivity and transitivity.
fn preorder() -> impl Strategy<Value = Preorder> {
    (1usize..=5)
        .prop_flat_map(|n| proptest::collection::vec(any::<bool>(), n * n))
        .prop_map(|bits| {
            let n = (bits.len() as f64).sqrt() as usize;
            let mut le: Vec<Vec<bool>> = (0..n)
                .map(|p| {
                    (0..n)
                        .map(|q| p == q || q == 0 || bits[p * n + q])
                        .collect()
                })
                .collect();
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        if le[i][k] && le[k][j] {
                            le[i][j] = true;
                        }
                    }
                }
            }
            let labels = (0..n).map(|i| format!("c{i}")).collect();
            Preorder::from_fn(labels, 0, |p, q| le[p][q]).expect("closed relation")
        })
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..1 << n).map(move |mask| (0..n).filter(|&i| mask & (1 << i) != 0).collect())
}

/// Every filter meeting every dense set, found by enumeration.
fn brute_generics(order: &Preorder) -> Vec<Vec<usize>> {
    let n = order.len();
    let dense: Vec<Vec<usize>> = subsets(n)
        .filter(|d| (0..n).all(|p| d.iter().any(|&x| order.leq(x, p))))
        .collect();
    subsets(n)
        .filter(|s| {
            let upward = s
                .iter()
                .all(|&p| (0..n).all(|q| !order.leq(p, q) || s.contains(&q)));
            let directed = s.iter().all(|&p| {
                s.iter()
                    .all(|&q| s.iter().any(|&r| order.leq(r, p) && order.leq(r, q)))
            });
            let nonempty = s.contains(&order.top());
            upward && directed && nonempty && dense.iter().all(|d| d.iter().any(|x| s.contains(x)))
        })
        .collect()
}

fn brute_forces(order: &Preorder, generics: &[Vec<usize>], p: usize, phi: &InfFormula) -> bool {
    generics.iter().filter(|g| g.contains(&p)).all(|g| {
        let filter = Filter::from_members(order.len(), g);
        phi.holds(&mut Evaluator::new(&filter))
    })
}

fn names_for(order: &Preorder, seed: u64) -> Vec<PName> {
    name_suite(order, 2, seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hf_sets_ignore_order_and_repetition(xs in proptest::collection::vec(0usize..6, 0..6)) {
        let forward = HfSet::from_elements(xs.iter().map(|&n| HfSet::natural(n)));
        let backward = HfSet::from_elements(xs.iter().rev().chain(xs.iter()).map(|&n| HfSet::natural(n)));
        prop_assert_eq!(&forward, &backward);
        let distinct: std::collections::BTreeSet<usize> = xs.iter().copied().collect();
        prop_assert_eq!(forward.len(), distinct.len());
        let expected_rank = distinct.iter().next_back().map_or(0, |&m| m as u32 + 1);
        prop_assert_eq!(forward.rank(), expected_rank);
    }

    #[test]
    fn naturals_and_pairs_decode(a in 0usize..8, b in 0usize..8) {
        prop_assert_eq!(HfSet::natural(a).as_natural(), Some(a));
        let pair = HfSet::kuratowski(HfSet::natural(a), HfSet::natural(b));
        prop_assert_eq!(pair.as_kuratowski(), Some((HfSet::natural(a), HfSet::natural(b))));
        prop_assert_eq!(canonicalize(&pair.to_graph(), 0).unwrap(), pair);
    }

    #[test]
    fn names_are_interned(entries in proptest::collection::vec((0usize..3, 0usize..4), 0..6)) {
        let leaf = |k: usize| PName::from_entries((0..k).map(|i| (PName::empty(), i)));
        let a = PName::from_entries(entries.iter().map(|&(k, p)| (leaf(k), p)));
        let b = PName::from_entries(entries.iter().rev().map(|&(k, p)| (leaf(k), p)));
        prop_assert_eq!(&a, &b);
        let mut sorted = entries.clone();
        sorted.sort_unstable();
        sorted.dedup();
        prop_assert_eq!(a.len(), sorted.len());
    }

    #[test]
    fn cone_generics_are_exactly_the_generic_filters(order in preorder()) {
        let oracle = SemanticOracle::new(&order);
        let mut found: Vec<Vec<usize>> = oracle.cones().iter().map(Filter::members).collect();
        found.sort();
        found.dedup();
        let mut expected = brute_generics(&order);
        expected.sort();
        prop_assert_eq!(found, expected);
    }

    #[test]
    fn upward_closures_are_filters(order in preorder(), p in 0usize..5) {
        let p = p % order.len();
        prop_assert!(filter_validate(&order, order.up(p)));
        let everything = order.full_set();
        let directed = (0..order.len()).all(|a| (0..order.len()).all(|b| order.compatible(a, b)));
        prop_assert_eq!(filter_validate(&order, &everything), directed);
    }

    #[test]
    fn separative_quotient_is_separative_and_monotone(order in preorder()) {
        let (target, map) = separative_quotient(&order);
        prop_assert!(target.is_separative());
        prop_assert_eq!(separative_quotient(&target).0.len(), target.len());
        for p in 0..order.len() {
            for q in 0..order.len() {
                if order.leq(p, q) {
                    prop_assert!(target.leq(map.apply(p), map.apply(q)));
                }
                prop_assert_eq!(order.compatible(p, q), target.compatible(map.apply(p), map.apply(q)));
            }
        }
    }

    #[test]
    fn regular_open_completions_embed_densely(order in preorder()) {
        let completion = regular_open_algebra(&order);
        prop_assert!(completion.verify().is_ok());
        let b = &completion.algebra;
        for x in 0..b.size() {
            prop_assert_eq!(b.meet(x, b.complement(x)), b.zero());
            prop_assert_eq!(b.join(x, b.complement(x)), b.one());
        }
    }

    #[test]
    fn atomic_forcing_matches_brute_force(order in preorder(), seed in any::<u64>()) {
        let generics = brute_generics(&order);
        let names = names_for(&order, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..6 {
            use rand::seq::SliceRandom;
            let s = names.choose(&mut rng).unwrap().clone();
            let t = names.choose(&mut rng).unwrap().clone();
            for a in [Atomic::Eq(s.clone(), t.clone()), Atomic::Mem(s.clone(), t.clone()), Atomic::Sub(s, t)] {
                for p in 0..order.len() {
                    let expected = brute_forces(&order, &generics, p, &a.to_formula());
                    prop_assert_eq!(syntactic_forces_atomic(&order, p, &a), expected, "{} at {}", a.symbol(), p);
                }
            }
        }
    }

    #[test]
    fn forcing_is_monotone_and_matches_brute_force(order in preorder(), seed in any::<u64>(), depth in 0usize..3) {
        let generics = brute_generics(&order);
        let names = names_for(&order, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = random_inf_formula(&order, &names, depth, &mut rng);
        let oracle = SemanticOracle::new(&order);
        for p in 0..order.len() {
            let forced = oracle.forces(p, &phi).forced;
            prop_assert_eq!(forced, brute_forces(&order, &generics, p, &phi));
            prop_assert_eq!(forces_via_nu_mu(&order, p, &phi), forced);
            for q in 0..order.len() {
                if forced && order.leq(q, p) {
                    prop_assert!(oracle.forces(q, &phi).forced);
                }
            }
        }
    }

    #[test]
    fn negation_normal_form_keeps_truth(order in preorder(), seed in any::<u64>(), depth in 0usize..4) {
        let names = names_for(&order, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = random_inf_formula(&order, &names, depth, &mut rng);
        let normal = nnf(&phi);
        prop_assert!(normal.is_nnf());
        prop_assert_eq!(decode(&encode(&phi)).unwrap(), phi.clone());
        for g in brute_generics(&order) {
            let filter = Filter::from_members(order.len(), &g);
            let mut ev = Evaluator::new(&filter);
            prop_assert_eq!(phi.holds(&mut ev), normal.holds(&mut ev));
        }
    }

    #[test]
    fn evaluated_ranks_stay_below_name_ranks(order in preorder(), seed in any::<u64>()) {
        let generics = brute_generics(&order);
        for sigma in names_for(&order, seed) {
            let values: Vec<HfSet> =
                generics.iter().map(|g| evaluate(&sigma, &Filter::from_members(order.len(), g))).collect();
            for v in &values {
                prop_assert!(v.rank() <= sigma.rank());
            }
        }
    }
}
