//! Infinitary forcing-language formulas with finite index sets.

use std::fmt;

use crate::error::{Error, Result};
use crate::names::{check_nat, op_name, Evaluator, PName};
use crate::order::Preorder;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InfFormula {
    /// `p̌ ∈ Ġ`
    InGeneric(usize),
    Eq(PName, PName),
    Mem(PName, PName),
    Not(Box<InfFormula>),
    Or(Vec<InfFormula>),
    And(Vec<InfFormula>),
}

impl InfFormula {
    pub fn not(f: InfFormula) -> InfFormula {
        InfFormula::Not(Box::new(f))
    }

    pub fn depth(&self) -> usize {
        match self {
            InfFormula::InGeneric(_) | InfFormula::Eq(..) | InfFormula::Mem(..) => 0,
            InfFormula::Not(f) => 1 + f.depth(),
            InfFormula::Or(fs) | InfFormula::And(fs) => {
                1 + fs.iter().map(|f| f.depth()).max().unwrap_or(0)
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            InfFormula::InGeneric(_) | InfFormula::Eq(..) | InfFormula::Mem(..) => 1,
            InfFormula::Not(f) => 1 + f.size(),
            InfFormula::Or(fs) | InfFormula::And(fs) => {
                1 + fs.iter().map(|f| f.size()).sum::<usize>()
            }
        }
    }

    /// Truth at the filter behind `ev`.
    pub fn holds(&self, ev: &mut Evaluator<'_>) -> bool {
        match self {
            InfFormula::InGeneric(p) => ev.filter().contains(*p),
            InfFormula::Eq(s, t) => ev.eval(s) == ev.eval(t),
            InfFormula::Mem(s, t) => {
                let (a, b) = (ev.eval(s), ev.eval(t));
                b.contains(&a)
            }
            InfFormula::Not(f) => !f.holds(ev),
            InfFormula::Or(fs) => fs.iter().any(|f| f.holds(ev)),
            InfFormula::And(fs) => fs.iter().all(|f| f.holds(ev)),
        }
    }

    /// Replaces conditions in atoms and names; `f` may refuse a condition.
    pub fn try_map_conditions<E>(
        &self,
        f: &mut impl FnMut(usize) -> Result<usize, E>,
    ) -> Result<InfFormula, E> {
        Ok(match self {
            InfFormula::InGeneric(p) => InfFormula::InGeneric(f(*p)?),
            InfFormula::Eq(s, t) => {
                InfFormula::Eq(s.try_map_conditions(f)?, t.try_map_conditions(f)?)
            }
            InfFormula::Mem(s, t) => {
                InfFormula::Mem(s.try_map_conditions(f)?, t.try_map_conditions(f)?)
            }
            InfFormula::Not(g) => InfFormula::not(g.try_map_conditions(f)?),
            InfFormula::Or(gs) => InfFormula::Or(
                gs.iter()
                    .map(|g| g.try_map_conditions(f))
                    .collect::<Result<_, E>>()?,
            ),
            InfFormula::And(gs) => InfFormula::And(
                gs.iter()
                    .map(|g| g.try_map_conditions(f))
                    .collect::<Result<_, E>>()?,
            ),
        })
    }

    /// True when every negation is applied to a `p̌ ∈ Ġ` atom.
    pub fn is_nnf(&self) -> bool {
        match self {
            InfFormula::InGeneric(_) | InfFormula::Eq(..) | InfFormula::Mem(..) => true,
            InfFormula::Not(f) => matches!(**f, InfFormula::InGeneric(_)),
            InfFormula::Or(fs) | InfFormula::And(fs) => fs.iter().all(|f| f.is_nnf()),
        }
    }

    pub fn display<'a>(&'a self, order: &'a Preorder) -> impl fmt::Display + 'a {
        FormulaDisplay { f: self, order }
    }
}

struct FormulaDisplay<'a> {
    f: &'a InfFormula,
    order: &'a Preorder,
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let o = self.order;
        let sub = |f| FormulaDisplay { f, order: o };
        match self.f {
            InfFormula::InGeneric(p) => write!(out, "(ing {})", o.label(*p)),
            InfFormula::Eq(s, t) => write!(out, "(eq {} {})", s.display(o), t.display(o)),
            InfFormula::Mem(s, t) => write!(out, "(mem {} {})", s.display(o), t.display(o)),
            InfFormula::Not(f) => write!(out, "(not {})", sub(f)),
            InfFormula::Or(fs) | InfFormula::And(fs) => {
                out.write_str(if matches!(self.f, InfFormula::Or(_)) {
                    "(or"
                } else {
                    "(and"
                })?;
                for f in fs {
                    write!(out, " {}", sub(f))?;
                }
                out.write_str(")")
            }
        }
    }
}

/// Gödel code values: naturals, conditions, names and tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GodelCode {
    Nat(usize),
    Cond(usize),
    Name(PName),
    Tuple(Vec<GodelCode>),
}

impl fmt::Display for GodelCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GodelCode::Nat(n) => write!(f, "{n}"),
            GodelCode::Cond(p) => write!(f, "c{p}"),
            GodelCode::Name(n) => write!(f, "{n}"),
            GodelCode::Tuple(items) => {
                f.write_str("<")?;
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(">")
            }
        }
    }
}

/// Tags: 0 `p̌∈Ġ`, 1 `=`, 2 `∈`, 3 `¬`, 4 `⋁`, 5 `⋀`. Index sets are the
/// naturals below the number of members.
pub fn encode(phi: &InfFormula) -> GodelCode {
    use GodelCode::*;
    let family = |tag: usize, fs: &[InfFormula]| {
        let members = fs
            .iter()
            .enumerate()
            .map(|(i, f)| Tuple(vec![Nat(i), encode(f)]))
            .collect();
        Tuple(vec![Nat(tag), Nat(fs.len()), Tuple(members)])
    };
    match phi {
        InfFormula::InGeneric(p) => Tuple(vec![Nat(0), Cond(*p)]),
        InfFormula::Eq(s, t) => Tuple(vec![Nat(1), Name(s.clone()), Name(t.clone())]),
        InfFormula::Mem(s, t) => Tuple(vec![Nat(2), Name(s.clone()), Name(t.clone())]),
        InfFormula::Not(f) => Tuple(vec![Nat(3), encode(f)]),
        InfFormula::Or(fs) => family(4, fs),
        InfFormula::And(fs) => family(5, fs),
    }
}

pub fn decode(code: &GodelCode) -> Result<InfFormula> {
    use GodelCode::*;
    let bad = |why: &str| Err(Error::MalformedCode(format!("{why}: {code}")));
    let Tuple(items) = code else {
        return bad("expected a tuple");
    };
    match items.as_slice() {
        [Nat(0), Cond(p)] => Ok(InfFormula::InGeneric(*p)),
        [Nat(1), Name(s), Name(t)] => Ok(InfFormula::Eq(s.clone(), t.clone())),
        [Nat(2), Name(s), Name(t)] => Ok(InfFormula::Mem(s.clone(), t.clone())),
        [Nat(3), inner] => Ok(InfFormula::not(decode(inner)?)),
        [Nat(tag @ (4 | 5)), Nat(k), Tuple(members)] => {
            if members.len() != *k {
                return bad("index set does not match the family");
            }
            let mut fs = Vec::with_capacity(*k);
            for (i, m) in members.iter().enumerate() {
                match m {
                    Tuple(pair) if pair.len() == 2 && pair[0] == Nat(i) => {
                        fs.push(decode(&pair[1])?)
                    }
                    _ => return bad("family member is not ⟨i, code⟩ in order"),
                }
            }
            Ok(if *tag == 4 {
                InfFormula::Or(fs)
            } else {
                InfFormula::And(fs)
            })
        }
        _ => bad("unknown shape"),
    }
}

/// Negation normal form: the only negations left are `p̌ ∉ Ġ`.
pub fn nnf(phi: &InfFormula) -> InfFormula {
    positive(phi)
}

fn positive(phi: &InfFormula) -> InfFormula {
    match phi {
        InfFormula::InGeneric(_) | InfFormula::Eq(..) | InfFormula::Mem(..) => phi.clone(),
        InfFormula::Not(f) => negative(f),
        InfFormula::Or(fs) => InfFormula::Or(fs.iter().map(positive).collect()),
        InfFormula::And(fs) => InfFormula::And(fs.iter().map(positive).collect()),
    }
}

fn negative(phi: &InfFormula) -> InfFormula {
    match phi {
        InfFormula::InGeneric(p) => InfFormula::not(InfFormula::InGeneric(*p)),
        InfFormula::Eq(s, t) => not_equal(s, t),
        InfFormula::Mem(s, t) => not_member(s, t),
        InfFormula::Not(f) => positive(f),
        InfFormula::Or(fs) => InfFormula::And(fs.iter().map(negative).collect()),
        InfFormula::And(fs) => InfFormula::Or(fs.iter().map(negative).collect()),
    }
}

/// `σ ≠ τ ≡ σ ⊈ τ ∨ τ ⊈ σ`
fn not_equal(s: &PName, t: &PName) -> InfFormula {
    InfFormula::Or(vec![not_subset(s, t), not_subset(t, s)])
}

/// `σ ⊈ τ ≡ ⋁_{⟨π,p⟩∈σ} (π ∉ τ ∧ p̌ ∈ Ġ)`
fn not_subset(s: &PName, t: &PName) -> InfFormula {
    InfFormula::Or(
        s.entries()
            .iter()
            .map(|(pi, p)| InfFormula::And(vec![not_member(pi, t), InfFormula::InGeneric(*p)]))
            .collect(),
    )
}

/// `σ ∉ τ ≡ ⋀_{⟨π,p⟩∈τ} (σ ≠ π ∨ p̌ ∉ Ġ)`
fn not_member(s: &PName, t: &PName) -> InfFormula {
    InfFormula::And(
        t.entries()
            .iter()
            .map(|(pi, p)| {
                InfFormula::Or(vec![
                    not_equal(s, pi),
                    InfFormula::not(InfFormula::InGeneric(*p)),
                ])
            })
            .collect(),
    )
}

/// The pair `(ν, μ)` with `𝟙 ⊩ φ ↔ ν = μ`, built on `nnf(φ)`.
pub fn nu_mu(phi: &InfFormula, top: usize) -> (PName, PName) {
    nu_mu_nnf(&nnf(phi), top, true)
}

/// The disjunction clause exactly as displayed, without the guard against a
/// disjunct whose two names coincide. Kept so the defect stays testable.
pub fn nu_mu_unguarded(phi: &InfFormula, top: usize) -> (PName, PName) {
    nu_mu_nnf(&nnf(phi), top, false)
}

fn nu_mu_nnf(phi: &InfFormula, top: usize, guarded: bool) -> (PName, PName) {
    let zero = check_nat(0, top);
    match phi {
        InfFormula::InGeneric(p) => (PName::from_entries([(zero, *p)]), check_nat(1, top)),
        InfFormula::Not(inner) => match **inner {
            InfFormula::InGeneric(p) => (PName::empty(), PName::from_entries([(zero, p)])),
            _ => unreachable!("nnf leaves negations only on generic-membership atoms"),
        },
        InfFormula::Eq(s, t) => (s.clone(), t.clone()),
        InfFormula::Mem(s, t) => (t.clone(), t.with((s.clone(), top))),
        InfFormula::And(fs) => {
            let mut nu = Vec::new();
            let mut mu = Vec::new();
            for (i, f) in fs.iter().enumerate() {
                let (n, m) = nu_mu_nnf(f, top, guarded);
                let tag = check_nat(i, top);
                nu.push((op_name(&n, &tag, top), top));
                mu.push((op_name(&m, &tag, top), top));
            }
            (PName::from_entries(nu), PName::from_entries(mu))
        }
        InfFormula::Or(fs) => {
            let bars: Vec<(PName, PName)> = fs
                .iter()
                .enumerate()
                .map(|(i, f)| {
                    let (n, m) = nu_mu_nnf(f, top, guarded);
                    let tag = check_nat(i, top);
                    (op_name(&n, &tag, top), op_name(&m, &tag, top))
                })
                .collect();
            let mixed: Vec<PName> = bars.iter().map(|(n, m)| op_name(n, m, top)).collect();
            let diagonal: Vec<PName> = bars.iter().map(|(n, _)| op_name(n, n, top)).collect();
            let pi = PName::from_entries(
                mixed
                    .iter()
                    .chain(&diagonal)
                    .map(|x| (x.clone(), top))
                    .collect::<Vec<_>>(),
            );
            let nu = PName::from_entries(
                (0..bars.len())
                    .map(|i| {
                        // When ν_i and μ_i are the same name the two entries coincide;
                        // removing it would also drop the diagonal entry.
                        let ni = if guarded && mixed[i] == diagonal[i] {
                            pi.clone()
                        } else {
                            pi.without(&(mixed[i].clone(), top))
                        };
                        (ni, top)
                    })
                    .collect::<Vec<_>>(),
            );
            let mu = nu.with((pi, top));
            (nu, mu)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hf::HfSet;
    use crate::names::{evaluate, Filter};
    use crate::order::tests::p3;

    fn cone(m: usize) -> Filter {
        Filter::from_set(p3().up(m).clone())
    }

    fn sigma() -> PName {
        PName::from_entries([(PName::empty(), 1)])
    }

    #[test]
    fn codes() {
        assert_eq!(
            encode(&InfFormula::InGeneric(1)),
            GodelCode::Tuple(vec![GodelCode::Nat(0), GodelCode::Cond(1)])
        );
        let s = sigma();
        let t = PName::empty();
        assert_eq!(
            encode(&InfFormula::Eq(s.clone(), t.clone())),
            GodelCode::Tuple(vec![
                GodelCode::Nat(1),
                GodelCode::Name(s.clone()),
                GodelCode::Name(t.clone())
            ])
        );
        let neg = InfFormula::not(InfFormula::Mem(s.clone(), t.clone()));
        assert_eq!(
            encode(&neg),
            GodelCode::Tuple(vec![
                GodelCode::Nat(3),
                GodelCode::Tuple(vec![
                    GodelCode::Nat(2),
                    GodelCode::Name(s),
                    GodelCode::Name(t)
                ])
            ])
        );
        let f = InfFormula::Or(vec![InfFormula::InGeneric(1), InfFormula::And(vec![])]);
        assert_eq!(decode(&encode(&f)).unwrap(), f);
        assert!(decode(&GodelCode::Nat(3)).is_err());
        assert!(decode(&GodelCode::Tuple(vec![
            GodelCode::Nat(4),
            GodelCode::Nat(2),
            GodelCode::Tuple(vec![])
        ]))
        .is_err());
    }

    #[test]
    fn nnf_shapes() {
        let a = InfFormula::InGeneric(1);
        let b = InfFormula::InGeneric(2);
        let f = InfFormula::not(InfFormula::And(vec![a.clone(), b.clone()]));
        assert_eq!(
            nnf(&f),
            InfFormula::Or(vec![InfFormula::not(a.clone()), InfFormula::not(b)])
        );
        assert_eq!(nnf(&InfFormula::not(InfFormula::not(a.clone()))), a);
        let pi = PName::empty();
        let tau = PName::from_entries([(pi.clone(), 1)]);
        let g = nnf(&InfFormula::not(InfFormula::Mem(sigma(), tau)));
        match &g {
            InfFormula::And(items) => {
                assert_eq!(items.len(), 1);
                match &items[0] {
                    InfFormula::Or(parts) => {
                        assert_eq!(parts[1], InfFormula::not(InfFormula::InGeneric(1)))
                    }
                    other => panic!("{other:?}"),
                }
            }
            other => panic!("{other:?}"),
        }
        assert!(g.is_nnf());
    }

    #[test]
    fn nu_mu_generic_atom() {
        let (nu, mu) = nu_mu(&InfFormula::InGeneric(1), 0);
        assert_eq!(nu, PName::from_entries([(PName::empty(), 1)]));
        assert_eq!(mu, check_nat(1, 0));
        assert_eq!(evaluate(&nu, &cone(1)), evaluate(&mu, &cone(1)));
        assert_eq!(evaluate(&nu, &cone(1)), HfSet::singleton(HfSet::empty()));
        assert_ne!(evaluate(&nu, &cone(2)), evaluate(&mu, &cone(2)));
    }

    #[test]
    fn nu_mu_disjunction() {
        let f = InfFormula::Or(vec![InfFormula::InGeneric(1), InfFormula::InGeneric(2)]);
        let (nu, mu) = nu_mu(&f, 0);
        for m in [1, 2] {
            assert_eq!(evaluate(&nu, &cone(m)), evaluate(&mu, &cone(m)));
        }
        let g = InfFormula::Or(vec![InfFormula::InGeneric(1)]);
        let (nu, mu) = nu_mu(&g, 0);
        assert_eq!(evaluate(&nu, &cone(1)), evaluate(&mu, &cone(1)));
        assert_ne!(evaluate(&nu, &cone(2)), evaluate(&mu, &cone(2)));
    }

    #[test]
    fn coinciding_disjunct_names() {
        let s = sigma();
        let f = InfFormula::Or(vec![InfFormula::Eq(s.clone(), s)]);
        let (nu, mu) = nu_mu(&f, 0);
        assert_eq!(evaluate(&nu, &cone(1)), evaluate(&mu, &cone(1)));
        let (nu, mu) = nu_mu_unguarded(&f, 0);
        assert_ne!(evaluate(&nu, &cone(1)), evaluate(&mu, &cone(1)));
    }
}
