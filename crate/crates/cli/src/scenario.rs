//! Typed scenario syntax. Name, formula, query and suite bodies stay as
//! s-expressions and are interpreted when the scenario is loaded.

use forcelab_core::zoo::Variant;

use crate::error::DslError;
use crate::sexpr::{parse_all, Pos, SExpr};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    pub name: String,
    pub items: Vec<Item>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Ground {
        stage: usize,
        pos: Pos,
    },
    Forcing {
        id: String,
        def: ForcingDef,
        pos: Pos,
    },
    Name {
        id: String,
        over: Option<String>,
        body: SExpr,
        pos: Pos,
    },
    Formula {
        id: String,
        over: Option<String>,
        first_order: bool,
        body: SExpr,
        pos: Pos,
    },
    Pool {
        id: String,
        over: Option<String>,
        names: Vec<SExpr>,
        pos: Pos,
    },
    Generic(GenericDecl),
    Query {
        id: String,
        body: SExpr,
        expect: Option<String>,
        pos: Pos,
    },
    Suite {
        name: String,
        options: Vec<SExpr>,
        pos: Pos,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ForcingDef {
    Explicit {
        elems: Vec<String>,
        le: Vec<(String, String)>,
        top: String,
    },
    Collapse {
        slots: usize,
        lambda: usize,
        variant: Variant,
    },
    Friedman {
        stage: usize,
        indices: usize,
    },
    Iterate {
        base: String,
        dom: SExpr,
        ord: SExpr,
        top: SExpr,
        pool: Vec<SExpr>,
    },
    IterateChecked {
        base: String,
        second: String,
    },
    Quotient {
        of: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericDecl {
    pub id: String,
    pub forcing: String,
    /// `None` schedules every provider the forcing offers.
    pub schedule: Option<Vec<String>>,
    pub start: Option<String>,
    pub seed: Option<u64>,
    pub pos: Pos,
}

fn err(pos: Pos, msg: impl Into<String>) -> DslError {
    DslError::new(pos, msg)
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

/// `(head args...)`, returning the arguments.
fn form<'a>(x: &'a SExpr, head: &str) -> Result<&'a [SExpr], DslError> {
    match x.as_list() {
        Some([h, rest @ ..]) if h.as_atom() == Some(head) => Ok(rest),
        _ => Err(err(x.pos(), format!("expected ({head} ...)"))),
    }
}

fn arity<'a>(xs: &'a [SExpr], n: usize, pos: Pos, what: &str) -> Result<&'a [SExpr], DslError> {
    if xs.len() == n {
        Ok(xs)
    } else {
        Err(err(
            pos,
            format!("{what} takes {n} argument(s), found {}", xs.len()),
        ))
    }
}

/// Splits trailing `(over P)` style options from positional arguments.
fn take_option<'a>(xs: &'a [SExpr], key: &str) -> (Option<&'a [SExpr]>, Vec<&'a SExpr>) {
    let mut found = None;
    let mut rest = Vec::new();
    for x in xs {
        match x.as_list() {
            Some([h, args @ ..]) if h.as_atom() == Some(key) && found.is_none() => {
                found = Some(args)
            }
            _ => rest.push(x),
        }
    }
    (found, rest)
}

fn over(xs: &[SExpr]) -> Result<(Option<String>, Vec<&SExpr>), DslError> {
    let (o, rest) = take_option(xs, "over");
    let over = match o {
        Some([p]) => Some(atom(p, "a forcing id")?),
        Some(_) => return Err(err(xs[0].pos(), "(over P) takes one forcing")),
        None => None,
    };
    Ok((over, rest))
}

fn vstage_arg(x: &SExpr) -> Result<usize, DslError> {
    let args = arity(form(x, "vstage")?, 1, x.pos(), "vstage")?;
    number(&args[0], "a stage")
}

fn parse_forcing(body: &SExpr) -> Result<ForcingDef, DslError> {
    let pos = body.pos();
    match body.head() {
        Some("collapse") => {
            let a = arity(form(body, "collapse")?, 3, pos, "collapse")?;
            let v = atom(&a[2], "plain, star or geq")?;
            let variant = Variant::parse(&v)
                .ok_or_else(|| err(a[2].pos(), format!("unknown variant {v}")))?;
            Ok(ForcingDef::Collapse {
                slots: number(&a[0], "a slot count")?,
                lambda: number(&a[1], "a height")?,
                variant,
            })
        }
        Some("friedman") => {
            let a = arity(form(body, "friedman")?, 2, pos, "friedman")?;
            Ok(ForcingDef::Friedman {
                stage: vstage_arg(&a[0])?,
                indices: number(&a[1], "an index bound")?,
            })
        }
        Some("quotient") => {
            let a = arity(form(body, "quotient")?, 1, pos, "quotient")?;
            Ok(ForcingDef::Quotient {
                of: atom(&a[0], "a forcing id")?,
            })
        }
        Some("iterate") => {
            let a = form(body, "iterate")?;
            if let [base, second] = a {
                if second.head() == Some("checked") {
                    let q = arity(form(second, "checked")?, 1, second.pos(), "checked")?;
                    return Ok(ForcingDef::IterateChecked {
                        base: atom(base, "a forcing id")?,
                        second: atom(&q[0], "a forcing id")?,
                    });
                }
            }
            let (top, _) = take_option(a, "top");
            let (pool, _) = take_option(a, "pool");
            let positional: Vec<&SExpr> = a
                .iter()
                .filter(|x| !matches!(x.head(), Some("top" | "pool")))
                .collect();
            let (Some([top]), Some(pool), [base, dom, ord]) = (top, pool, positional.as_slice())
            else {
                return Err(err(pos, "expected (iterate P dom ord (top t) (pool names...)) or (iterate P (checked Q))"));
            };
            Ok(ForcingDef::Iterate {
                base: atom(base, "a forcing id")?,
                dom: (*dom).clone(),
                ord: (*ord).clone(),
                top: top.clone(),
                pool: pool.to_vec(),
            })
        }
        _ => {
            let list = body
                .as_list()
                .ok_or_else(|| err(pos, "expected a forcing definition"))?;
            let (elems, rest) = take_option(list, "elems");
            let (le, _) = take_option(list, "le");
            let (top, _) = take_option(list, "top");
            let elems = elems.ok_or_else(|| err(pos, "missing (elems ...)"))?;
            let elems = elems
                .iter()
                .map(|x| atom(x, "a condition label"))
                .collect::<Result<Vec<_>, _>>()?;
            let le = le
                .unwrap_or(&[])
                .iter()
                .map(|pair| match pair.as_list() {
                    Some([a, b]) => Ok((atom(a, "a label")?, atom(b, "a label")?)),
                    _ => Err(err(pair.pos(), "expected (p q) meaning p <= q")),
                })
                .collect::<Result<Vec<_>, _>>()?;
            let top = match top {
                Some([t]) => atom(t, "a label")?,
                _ => return Err(err(pos, "missing (top t)")),
            };
            if rest
                .iter()
                .any(|x| !matches!(x.head(), Some("le") | Some("top")))
            {
                return Err(err(pos, "unexpected clause in forcing literal"));
            }
            Ok(ForcingDef::Explicit { elems, le, top })
        }
    }
}

fn parse_item(x: &SExpr) -> Result<Item, DslError> {
    let pos = x.pos();
    let list = x
        .as_list()
        .ok_or_else(|| err(pos, "expected a declaration"))?;
    let head = x
        .head()
        .ok_or_else(|| err(pos, "expected a declaration keyword"))?;
    let args = &list[1..];
    let id = || {
        args.first()
            .ok_or_else(|| err(pos, format!("{head} needs an id")))
            .and_then(|a| atom(a, "an id"))
    };
    match head {
        "ground" => {
            let a = arity(args, 1, pos, "ground")?;
            Ok(Item::Ground {
                stage: vstage_arg(&a[0])?,
                pos,
            })
        }
        "forcing" => {
            let def = match args.get(1).and_then(SExpr::head) {
                Some("collapse" | "friedman" | "iterate" | "quotient") => {
                    parse_forcing(&arity(args, 2, pos, "forcing")?[1])?
                }
                _ => parse_forcing(&SExpr::List(args.get(1..).unwrap_or(&[]).to_vec(), pos))?,
            };
            Ok(Item::Forcing {
                id: id()?,
                def,
                pos,
            })
        }
        "name" | "formula" | "fo-formula" => {
            let (over, rest) = over(&args[1..])?;
            let [body] = rest.as_slice() else {
                return Err(err(
                    pos,
                    format!("{head} takes an id, an optional (over P) and one body"),
                ));
            };
            let body = (*body).clone();
            Ok(match head {
                "name" => Item::Name {
                    id: id()?,
                    over,
                    body,
                    pos,
                },
                _ => Item::Formula {
                    id: id()?,
                    over,
                    first_order: head == "fo-formula",
                    body,
                    pos,
                },
            })
        }
        "pool" => {
            let (over, rest) = over(&args[1..])?;
            Ok(Item::Pool {
                id: id()?,
                over,
                names: rest.into_iter().cloned().collect(),
                pos,
            })
        }
        "generic" => {
            let rest = &args[1..];
            let (forcing, _) = take_option(rest, "forcing");
            let (schedule, _) = take_option(rest, "schedule");
            let (start, _) = take_option(rest, "start");
            let (seed, _) = take_option(rest, "seed");
            let forcing = match forcing {
                Some([f]) => atom(f, "a forcing id")?,
                _ => return Err(err(pos, "generic needs (forcing F)")),
            };
            let schedule = match schedule {
                None => None,
                Some([a]) if a.as_atom() == Some("all") => None,
                Some(xs) => Some(
                    xs.iter()
                        .map(|x| atom(x, "a dense set name"))
                        .collect::<Result<Vec<_>, _>>()?,
                ),
            };
            let start = match start {
                Some([s]) => Some(atom(s, "a condition")?),
                None => None,
                Some(_) => return Err(err(pos, "(start p) takes one condition")),
            };
            let seed = match seed {
                Some([s]) => Some(number(s, "a seed")?),
                None => None,
                Some(_) => return Err(err(pos, "(seed s) takes one number")),
            };
            Ok(Item::Generic(GenericDecl {
                id: id()?,
                forcing,
                schedule,
                start,
                seed,
                pos,
            }))
        }
        "query" => {
            let (expect, rest) = take_option(&args[1..], "expect");
            let [body] = rest.as_slice() else {
                return Err(err(
                    pos,
                    "query takes an id, a body and an optional (expect v)",
                ));
            };
            let expect = match expect {
                Some([v]) => Some(v.to_string()),
                None => None,
                Some(_) => return Err(err(pos, "(expect v) takes one value")),
            };
            Ok(Item::Query {
                id: id()?,
                body: (*body).clone(),
                expect,
                pos,
            })
        }
        "suite" => Ok(Item::Suite {
            name: id()?,
            options: args[1..].to_vec(),
            pos,
        }),
        other => Err(err(pos, format!("unknown declaration {other}"))),
    }
}

pub fn parse(text: &str) -> Result<Scenario, DslError> {
    let top = parse_all(text)?;
    let [only] = top.as_slice() else {
        let pos = top.get(1).map(SExpr::pos).unwrap_or_default();
        return Err(err(pos, "expected exactly one (scenario NAME ...) form"));
    };
    let args = form(only, "scenario")?;
    let (name, items) = args
        .split_first()
        .ok_or_else(|| err(only.pos(), "scenario needs a name"))?;
    Ok(Scenario {
        name: atom(name, "a scenario name")?,
        items: items.iter().map(parse_item).collect::<Result<_, _>>()?,
    })
}

fn a(s: impl Into<String>) -> SExpr {
    SExpr::atom(s)
}

fn l(items: Vec<SExpr>) -> SExpr {
    SExpr::list(items)
}

fn with_over(mut v: Vec<SExpr>, over: &Option<String>) -> Vec<SExpr> {
    if let Some(p) = over {
        v.insert(2, l(vec![a("over"), a(p)]));
    }
    v
}

impl ForcingDef {
    fn to_sexprs(&self) -> Vec<SExpr> {
        match self {
            ForcingDef::Explicit { elems, le, top } => vec![
                l(std::iter::once(a("elems"))
                    .chain(elems.iter().map(a))
                    .collect()),
                l(std::iter::once(a("le"))
                    .chain(le.iter().map(|(p, q)| l(vec![a(p), a(q)])))
                    .collect()),
                l(vec![a("top"), a(top)]),
            ],
            ForcingDef::Collapse {
                slots,
                lambda,
                variant,
            } => {
                vec![l(vec![
                    a("collapse"),
                    a(slots.to_string()),
                    a(lambda.to_string()),
                    a(variant.keyword()),
                ])]
            }
            ForcingDef::Friedman { stage, indices } => {
                vec![l(vec![
                    a("friedman"),
                    l(vec![a("vstage"), a(stage.to_string())]),
                    a(indices.to_string()),
                ])]
            }
            ForcingDef::Iterate {
                base,
                dom,
                ord,
                top,
                pool,
            } => vec![l(vec![
                a("iterate"),
                a(base),
                dom.clone(),
                ord.clone(),
                l(vec![a("top"), top.clone()]),
                l(std::iter::once(a("pool"))
                    .chain(pool.iter().cloned())
                    .collect()),
            ])],
            ForcingDef::IterateChecked { base, second } => {
                vec![l(vec![
                    a("iterate"),
                    a(base),
                    l(vec![a("checked"), a(second)]),
                ])]
            }
            ForcingDef::Quotient { of } => vec![l(vec![a("quotient"), a(of)])],
        }
    }
}

impl Item {
    pub fn pos(&self) -> Pos {
        match self {
            Item::Ground { pos, .. }
            | Item::Forcing { pos, .. }
            | Item::Name { pos, .. }
            | Item::Formula { pos, .. }
            | Item::Pool { pos, .. }
            | Item::Query { pos, .. }
            | Item::Suite { pos, .. } => *pos,
            Item::Generic(g) => g.pos,
        }
    }

    pub fn to_sexpr(&self) -> SExpr {
        match self {
            Item::Ground { stage, .. } => l(vec![
                a("ground"),
                l(vec![a("vstage"), a(stage.to_string())]),
            ]),
            Item::Forcing { id, def, .. } => l([a("forcing"), a(id)]
                .into_iter()
                .chain(def.to_sexprs())
                .collect()),
            Item::Name { id, over, body, .. } => {
                l(with_over(vec![a("name"), a(id), body.clone()], over))
            }
            Item::Formula {
                id,
                over,
                first_order,
                body,
                ..
            } => {
                let head = if *first_order {
                    "fo-formula"
                } else {
                    "formula"
                };
                l(with_over(vec![a(head), a(id), body.clone()], over))
            }
            Item::Pool {
                id, over, names, ..
            } => l(with_over(
                [a("pool"), a(id)]
                    .into_iter()
                    .chain(names.iter().cloned())
                    .collect(),
                over,
            )),
            Item::Generic(g) => {
                let mut v = vec![a("generic"), a(&g.id), l(vec![a("forcing"), a(&g.forcing)])];
                v.push(match &g.schedule {
                    None => l(vec![a("schedule"), a("all")]),
                    Some(s) => l(std::iter::once(a("schedule"))
                        .chain(s.iter().map(a))
                        .collect()),
                });
                if let Some(s) = &g.start {
                    v.push(l(vec![a("start"), a(s)]));
                }
                if let Some(s) = g.seed {
                    v.push(l(vec![a("seed"), a(s.to_string())]));
                }
                l(v)
            }
            Item::Query {
                id, body, expect, ..
            } => {
                let mut v = vec![a("query"), a(id), body.clone()];
                if let Some(e) = expect {
                    v.push(l(vec![a("expect"), a(e)]));
                }
                l(v)
            }
            Item::Suite { name, options, .. } => l([a("suite"), a(name)]
                .into_iter()
                .chain(options.iter().cloned())
                .collect()),
        }
    }
}

/// Canonical text: one declaration per line.
pub fn serialize(s: &Scenario) -> String {
    let mut out = format!("(scenario {}\n", s.name);
    for item in &s.items {
        out.push_str("  ");
        out.push_str(&item.to_sexpr().to_string());
        out.push('\n');
    }
    out.push_str(")\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
        ; three conditions
        (scenario demo
          (ground (vstage 2))
          (forcing P (elems 1 a b) (le (a 1) (b 1)) (top 1))
          (forcing C (collapse 2 3 plain))
          (forcing F (friedman (vstage 2) 2))
          (forcing I (iterate P (checked P)))
          (name sigma (over P) (pairs ((check {}) a)))
          (formula phi (or (ing a) (ing b)))
          (fo-formula psi (ex 1 (mem v1 v0)))
          (pool X (over P) sigma (check {}))
          (generic G (forcing C) (schedule D_value0 D_value1) (seed 3))
          (query q1 (forces P 1 phi) (expect true))
          (suite atomic-equivalence (posets P)))
    "#;

    #[test]
    fn parses_every_declaration() {
        let s = parse(SAMPLE).unwrap();
        assert_eq!(s.name, "demo");
        assert_eq!(s.items.len(), 12);
        assert!(
            matches!(&s.items[1], Item::Forcing { def: ForcingDef::Explicit { elems, .. }, .. } if elems.len() == 3)
        );
        assert!(
            matches!(&s.items[9], Item::Generic(g) if g.seed == Some(3) && g.schedule.as_ref().unwrap().len() == 2)
        );
    }

    #[test]
    fn serialize_round_trips() {
        let s = parse(SAMPLE).unwrap();
        let text = serialize(&s);
        let again = parse(&text).unwrap();
        assert_eq!(s, again);
        assert_eq!(serialize(&again), text);
    }

    #[test]
    fn errors_have_locations() {
        let e = parse("(scenario x\n  (forcing P (elems 1) (top 1))\n  (bogus))").unwrap_err();
        assert_eq!((e.pos.line, e.pos.col), (3, 3));
        let e = parse("(scenario x (forcing C (collapse 2 3 weird)))").unwrap_err();
        assert!(e.msg.contains("weird"));
    }
}
