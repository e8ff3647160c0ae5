//! First-order formulas over `∈` with class predicates.

use std::collections::BTreeSet;
use std::fmt;

use super::infinitary::InfFormula;
use crate::error::{Error, Result};
use crate::hf::{GroundModel, HfSet};
use crate::names::{check_nat, op_name, PName};

/// Variables are `v_i`, written as their index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FoFormula {
    Eq(usize, usize),
    Mem(usize, usize),
    /// `v_i ∈ A_k`, stored as `Pred(k, i)`.
    Pred(usize, usize),
    Not(Box<FoFormula>),
    Or(Vec<FoFormula>),
    And(Vec<FoFormula>),
    Exists(usize, Box<FoFormula>),
    Forall(usize, Box<FoFormula>),
}

impl FoFormula {
    pub fn not(f: FoFormula) -> FoFormula {
        FoFormula::Not(Box::new(f))
    }

    pub fn exists(k: usize, f: FoFormula) -> FoFormula {
        FoFormula::Exists(k, Box::new(f))
    }

    pub fn forall(k: usize, f: FoFormula) -> FoFormula {
        FoFormula::Forall(k, Box::new(f))
    }

    /// `a → b` as `¬a ∨ b`.
    pub fn implies(a: FoFormula, b: FoFormula) -> FoFormula {
        FoFormula::Or(vec![FoFormula::not(a), b])
    }

    pub fn free_vars(&self) -> BTreeSet<usize> {
        match self {
            FoFormula::Eq(i, j) | FoFormula::Mem(i, j) => [*i, *j].into_iter().collect(),
            FoFormula::Pred(_, i) => [*i].into_iter().collect(),
            FoFormula::Not(f) => f.free_vars(),
            FoFormula::Or(fs) | FoFormula::And(fs) => {
                fs.iter().flat_map(|f| f.free_vars()).collect()
            }
            FoFormula::Exists(k, f) | FoFormula::Forall(k, f) => {
                let mut s = f.free_vars();
                s.remove(k);
                s
            }
        }
    }

    /// Inside every `∃v_k ψ` and `∀v_k ψ`, the free variables of `ψ` are among `v_0..v_k`.
    pub fn is_normal_form(&self) -> bool {
        match self {
            FoFormula::Eq(..) | FoFormula::Mem(..) | FoFormula::Pred(..) => true,
            FoFormula::Not(f) => f.is_normal_form(),
            FoFormula::Or(fs) | FoFormula::And(fs) => fs.iter().all(|f| f.is_normal_form()),
            FoFormula::Exists(k, f) | FoFormula::Forall(k, f) => {
                f.free_vars().iter().all(|v| v <= k) && f.is_normal_form()
            }
        }
    }

    pub fn quantifier_depth(&self) -> usize {
        match self {
            FoFormula::Eq(..) | FoFormula::Mem(..) | FoFormula::Pred(..) => 0,
            FoFormula::Not(f) => f.quantifier_depth(),
            FoFormula::Or(fs) | FoFormula::And(fs) => {
                fs.iter().map(|f| f.quantifier_depth()).max().unwrap_or(0)
            }
            FoFormula::Exists(_, f) | FoFormula::Forall(_, f) => 1 + f.quantifier_depth(),
        }
    }

    /// Renames every variable `v_i` to `v_{i+by}`, bound ones included.
    pub fn shift(&self, by: usize) -> FoFormula {
        match self {
            FoFormula::Eq(i, j) => FoFormula::Eq(i + by, j + by),
            FoFormula::Mem(i, j) => FoFormula::Mem(i + by, j + by),
            FoFormula::Pred(k, i) => FoFormula::Pred(*k, i + by),
            FoFormula::Not(f) => FoFormula::not(f.shift(by)),
            FoFormula::Or(fs) => FoFormula::Or(fs.iter().map(|f| f.shift(by)).collect()),
            FoFormula::And(fs) => FoFormula::And(fs.iter().map(|f| f.shift(by)).collect()),
            FoFormula::Exists(k, f) => FoFormula::exists(k + by, f.shift(by)),
            FoFormula::Forall(k, f) => FoFormula::forall(k + by, f.shift(by)),
        }
    }
}

impl fmt::Display for FoFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FoFormula::Eq(i, j) => write!(f, "(eq v{i} v{j})"),
            FoFormula::Mem(i, j) => write!(f, "(mem v{i} v{j})"),
            FoFormula::Pred(k, i) => write!(f, "(pred {k} v{i})"),
            FoFormula::Not(g) => write!(f, "(not {g})"),
            FoFormula::Or(gs) | FoFormula::And(gs) => {
                f.write_str(if matches!(self, FoFormula::Or(_)) {
                    "(or"
                } else {
                    "(and"
                })?;
                for g in gs {
                    write!(f, " {g}")?;
                }
                f.write_str(")")
            }
            FoFormula::Exists(k, g) => write!(f, "(ex {k} {g})"),
            FoFormula::Forall(k, g) => write!(f, "(all {k} {g})"),
        }
    }
}

/// Finite Tarskian satisfaction; quantifiers range over the model's carrier
/// and `A_k` is `predicates[k]`.
pub fn fo_satisfies(
    model: &GroundModel,
    predicates: &[BTreeSet<HfSet>],
    phi: &FoFormula,
    assignment: &[HfSet],
) -> Result<bool> {
    let mut env: Vec<Option<HfSet>> = assignment.iter().cloned().map(Some).collect();
    satisfies(model, predicates, phi, &mut env)
}

fn lookup(env: &[Option<HfSet>], i: usize) -> Result<&HfSet> {
    env.get(i)
        .and_then(|x| x.as_ref())
        .ok_or(Error::UnboundVariable(i))
}

fn satisfies(
    model: &GroundModel,
    preds: &[BTreeSet<HfSet>],
    phi: &FoFormula,
    env: &mut Vec<Option<HfSet>>,
) -> Result<bool> {
    Ok(match phi {
        FoFormula::Eq(i, j) => lookup(env, *i)? == lookup(env, *j)?,
        FoFormula::Mem(i, j) => lookup(env, *j)?.contains(lookup(env, *i)?),
        FoFormula::Pred(k, i) => {
            let class = preds
                .get(*k)
                .ok_or_else(|| Error::FreeVariables(format!("no predicate A_{k}")))?;
            class.contains(lookup(env, *i)?)
        }
        FoFormula::Not(f) => !satisfies(model, preds, f, env)?,
        FoFormula::Or(fs) => {
            for f in fs {
                if satisfies(model, preds, f, env)? {
                    return Ok(true);
                }
            }
            false
        }
        FoFormula::And(fs) => {
            for f in fs {
                if !satisfies(model, preds, f, env)? {
                    return Ok(false);
                }
            }
            true
        }
        FoFormula::Exists(k, f) | FoFormula::Forall(k, f) => {
            let want = matches!(phi, FoFormula::Exists(..));
            if env.len() <= *k {
                env.resize(k + 1, None);
            }
            let saved = env[*k].take();
            let mut result = !want;
            for x in model.carrier() {
                env[*k] = Some(x.clone());
                if satisfies(model, preds, f, env)? == want {
                    result = want;
                    break;
                }
            }
            env[*k] = saved;
            result
        }
    })
}

/// `n_i = n_j ⇔ x_i = x_j`.
pub fn appropriate(nbar: &[usize], xbar: &[HfSet]) -> Result<bool> {
    if nbar.len() != xbar.len() {
        return Err(Error::LengthMismatch(format!(
            "{} indices for {} sets",
            nbar.len(),
            xbar.len()
        )));
    }
    Ok((0..nbar.len())
        .all(|i| (0..nbar.len()).all(|j| (nbar[i] == nbar[j]) == (xbar[i] == xbar[j]))))
}

/// Lexicographically least appropriate sequence.
pub fn lex_min_appropriate(xbar: &[HfSet]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(xbar.len());
    let mut next = 0;
    for (i, x) in xbar.iter().enumerate() {
        match xbar[..i].iter().position(|y| y == x) {
            Some(j) => out.push(out[j]),
            None => {
                out.push(next);
                next += 1;
            }
        }
    }
    out
}

/// `φ(v_0) ∧ ∀v_1 [φ(v_1) → v_1 = v_0]`, with `φ(v_1)` obtained by shifting
/// every variable up by one so nothing is captured.
pub fn psi_unique(phi: &FoFormula) -> Result<FoFormula> {
    let fv = phi.free_vars();
    if fv.len() != 1 || !fv.contains(&0) {
        return Err(Error::FreeVariables(format!(
            "expected exactly v0, found {fv:?}"
        )));
    }
    Ok(FoFormula::And(vec![
        phi.clone(),
        FoFormula::forall(1, FoFormula::implies(phi.shift(1), FoFormula::Eq(1, 0))),
    ]))
}

/// Names the star translation needs from the Friedman forcing.
#[derive(Clone, Debug)]
pub struct StarContext {
    pub top: usize,
    pub edot: PName,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarTranslation {
    pub formula: InfFormula,
    /// Every existential became a disjunction over `i < truncation`.
    pub truncation: usize,
}

/// `(v_i=v_j)* = ň_i=ň_j`, `(v_i∈v_j)* = op(ň_i,ň_j) ∈ Ė`, connectives
/// structurally, `∃v_k` as `⋁_{i<N}` and `∀v_k` as `⋀_{i<N}`.
pub fn translate_star(
    phi: &FoFormula,
    nbar: &[usize],
    truncation: usize,
    ctx: &StarContext,
) -> Result<StarTranslation> {
    if let Some(v) = phi.free_vars().into_iter().find(|&v| v >= nbar.len()) {
        return Err(Error::LengthMismatch(format!(
            "v{v} is free but only {} indices were given",
            nbar.len()
        )));
    }
    if truncation < nbar.len() {
        return Err(Error::LengthMismatch(format!(
            "truncation {truncation} below sequence length {}",
            nbar.len()
        )));
    }
    Ok(StarTranslation {
        formula: star(phi, nbar, truncation, ctx)?,
        truncation,
    })
}

fn star(phi: &FoFormula, nbar: &[usize], n: usize, ctx: &StarContext) -> Result<InfFormula> {
    let nv = |i: usize| check_nat(nbar[i], ctx.top);
    Ok(match phi {
        FoFormula::Eq(i, j) => InfFormula::Eq(nv(*i), nv(*j)),
        FoFormula::Mem(i, j) => {
            InfFormula::Mem(op_name(&nv(*i), &nv(*j), ctx.top), ctx.edot.clone())
        }
        FoFormula::Pred(..) => {
            return Err(Error::Unsupported(
                "class predicates have no star translation".into(),
            ))
        }
        FoFormula::Not(f) => InfFormula::not(star(f, nbar, n, ctx)?),
        FoFormula::Or(fs) => InfFormula::Or(
            fs.iter()
                .map(|f| star(f, nbar, n, ctx))
                .collect::<Result<_>>()?,
        ),
        FoFormula::And(fs) => InfFormula::And(
            fs.iter()
                .map(|f| star(f, nbar, n, ctx))
                .collect::<Result<_>>()?,
        ),
        FoFormula::Exists(k, f) | FoFormula::Forall(k, f) => {
            let mut parts = Vec::with_capacity(n);
            for i in 0..n {
                let mut ext: Vec<usize> =
                    (0..*k).map(|p| nbar.get(p).copied().unwrap_or(0)).collect();
                ext.push(i);
                parts.push(star(f, &ext, n, ctx)?);
            }
            if matches!(phi, FoFormula::Exists(..)) {
                InfFormula::Or(parts)
            } else {
                InfFormula::And(parts)
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hf::vstage;

    fn e() -> HfSet {
        HfSet::empty()
    }

    #[test]
    fn satisfaction_examples() {
        let m3 = vstage(3).unwrap();
        let one = HfSet::singleton(e());
        assert!(fo_satisfies(&m3, &[], &FoFormula::Mem(0, 1), &[e(), one]).unwrap());
        let empty_exists = FoFormula::exists(
            0,
            FoFormula::forall(1, FoFormula::not(FoFormula::Mem(1, 0))),
        );
        assert!(fo_satisfies(&m3, &[], &empty_exists, &[]).unwrap());
        let m2 = vstage(2).unwrap();
        assert!(!fo_satisfies(&m2, &[], &FoFormula::exists(0, FoFormula::Mem(0, 0)), &[]).unwrap());
        assert_eq!(
            fo_satisfies(&m2, &[], &FoFormula::Eq(0, 3), &[e()]),
            Err(Error::UnboundVariable(3))
        );
    }

    #[test]
    fn predicates() {
        let m = vstage(2).unwrap();
        let class: BTreeSet<HfSet> = [e()].into_iter().collect();
        assert!(fo_satisfies(&m, std::slice::from_ref(&class), &FoFormula::Pred(0, 0), &[e()]).unwrap());
        assert!(!fo_satisfies(
            &m,
            &[class],
            &FoFormula::Pred(0, 0),
            &[HfSet::singleton(e())]
        )
        .unwrap());
    }

    #[test]
    fn appropriate_sequences() {
        let one = HfSet::singleton(e());
        assert_eq!(lex_min_appropriate(&[e(), e()]), vec![0, 0]);
        assert_eq!(lex_min_appropriate(&[e(), one.clone()]), vec![0, 1]);
        assert_eq!(
            lex_min_appropriate(&[one.clone(), e(), one.clone()]),
            vec![0, 1, 0]
        );
        assert!(!appropriate(&[0, 1], &[e(), e()]).unwrap());
        assert!(appropriate(&[3, 1], &[e(), one]).unwrap());
        assert!(appropriate(&[0], &[]).is_err());
    }

    #[test]
    fn uniqueness_formula() {
        let m = vstage(2).unwrap();
        let psi = psi_unique(&FoFormula::Eq(0, 0)).unwrap();
        assert!(psi.is_normal_form());
        for x in m.carrier() {
            assert!(!fo_satisfies(&m, &[], &psi, std::slice::from_ref(x)).unwrap());
        }
        let no_elements = FoFormula::forall(1, FoFormula::not(FoFormula::Mem(1, 0)));
        let psi = psi_unique(&no_elements).unwrap();
        let m3 = vstage(3).unwrap();
        for x in m3.carrier() {
            assert_eq!(
                fo_satisfies(&m3, &[], &psi, std::slice::from_ref(x)).unwrap(),
                x.is_empty()
            );
        }
        assert!(psi_unique(&FoFormula::Eq(0, 1)).is_err());
    }

    #[test]
    fn star_examples() {
        let ctx = StarContext {
            top: 0,
            edot: PName::empty(),
        };
        let t = translate_star(&FoFormula::Mem(0, 1), &[0, 1], 2, &ctx).unwrap();
        assert_eq!(
            t.formula,
            InfFormula::Mem(
                op_name(&check_nat(0, 0), &check_nat(1, 0), 0),
                PName::empty()
            )
        );
        let t = translate_star(&FoFormula::Eq(0, 0), &[3], 4, &ctx).unwrap();
        assert_eq!(t.formula, InfFormula::Eq(check_nat(3, 0), check_nat(3, 0)));
        let phi = FoFormula::exists(1, FoFormula::Mem(1, 0));
        let t = translate_star(&phi, &[0], 3, &ctx).unwrap();
        let expected = InfFormula::Or(
            (0..3)
                .map(|i| {
                    InfFormula::Mem(
                        op_name(&check_nat(i, 0), &check_nat(0, 0), 0),
                        PName::empty(),
                    )
                })
                .collect(),
        );
        assert_eq!(t.formula, expected);
        assert_eq!(t.truncation, 3);
        assert!(translate_star(&FoFormula::Mem(0, 1), &[0], 2, &ctx).is_err());
    }

    #[test]
    fn normal_form_detection() {
        assert!(FoFormula::exists(1, FoFormula::Mem(1, 0)).is_normal_form());
        assert!(!FoFormula::exists(0, FoFormula::Mem(1, 0)).is_normal_form());
    }
}
