//! Hereditarily finite sets and finite transitive ground models.
//!
//! Sets are kept in canonical form: elements sorted by the Ackermann order and
//! deduplicated, so structural equality is extensional equality.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Default upper bound for [`vstage`].
pub const VSTAGE_BOUND: usize = 5;

#[derive(Clone)]
pub struct HfSet(Arc<Node>);

struct Node {
    elems: Box<[HfSet]>,
    rank: u32,
    digest: u64,
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

impl HfSet {
    pub fn empty() -> HfSet {
        HfSet::from_sorted(Vec::new())
    }

    /// Builds the canonical set with the given elements.
    pub fn from_elements<I: IntoIterator<Item = HfSet>>(elems: I) -> HfSet {
        let mut v: Vec<HfSet> = elems.into_iter().collect();
        v.sort();
        v.dedup();
        HfSet::from_sorted(v)
    }

    fn from_sorted(elems: Vec<HfSet>) -> HfSet {
        let rank = elems.iter().map(|e| e.rank() + 1).max().unwrap_or(0);
        let mut h = FNV_OFFSET;
        for e in &elems {
            h = (h ^ e.digest()).wrapping_mul(FNV_PRIME);
            h = h.rotate_left(7);
        }
        h = (h ^ elems.len() as u64).wrapping_mul(FNV_PRIME);
        HfSet(Arc::new(Node {
            elems: elems.into_boxed_slice(),
            rank,
            digest: h,
        }))
    }

    pub fn singleton(x: HfSet) -> HfSet {
        HfSet::from_sorted(vec![x])
    }

    /// `{x, y}`.
    pub fn pair(x: HfSet, y: HfSet) -> HfSet {
        HfSet::from_elements([x, y])
    }

    pub fn elements(&self) -> &[HfSet] {
        &self.0.elems
    }

    pub fn len(&self) -> usize {
        self.0.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.elems.is_empty()
    }

    pub fn rank(&self) -> u32 {
        self.0.rank
    }

    fn digest(&self) -> u64 {
        self.0.digest
    }

    pub fn contains(&self, x: &HfSet) -> bool {
        if x.rank() >= self.rank() {
            return false;
        }
        self.0.elems.binary_search(x).is_ok()
    }

    pub fn is_subset(&self, other: &HfSet) -> bool {
        self.elements().iter().all(|x| other.contains(x))
    }

    pub fn union(&self, other: &HfSet) -> HfSet {
        HfSet::from_elements(self.elements().iter().chain(other.elements()).cloned())
    }

    pub fn with(&self, x: HfSet) -> HfSet {
        HfSet::from_elements(self.elements().iter().cloned().chain(std::iter::once(x)))
    }

    /// Von Neumann natural: `0 = ∅`, `n+1 = n ∪ {n}`.
    pub fn natural(n: usize) -> HfSet {
        let mut acc = Vec::with_capacity(n);
        for _ in 0..n {
            let next = HfSet::from_sorted(acc.clone());
            acc.push(next);
        }
        HfSet::from_sorted(acc)
    }

    /// Inverse of [`HfSet::natural`].
    pub fn as_natural(&self) -> Option<usize> {
        let n = self.len();
        if self.rank() as usize != n {
            return None;
        }
        for (i, e) in self.elements().iter().enumerate() {
            if e.len() != i || e.as_natural() != Some(i) {
                return None;
            }
        }
        Some(n)
    }

    /// Kuratowski pair `{{x},{x,y}}`.
    pub fn kuratowski(x: HfSet, y: HfSet) -> HfSet {
        HfSet::pair(HfSet::singleton(x.clone()), HfSet::pair(x, y))
    }

    /// Inverse of [`HfSet::kuratowski`].
    pub fn as_kuratowski(&self) -> Option<(HfSet, HfSet)> {
        match self.elements() {
            [only] if only.len() == 1 => {
                let x = only.elements()[0].clone();
                Some((x.clone(), x))
            }
            [a, b] => {
                let (small, big) = if a.len() == 1 { (a, b) } else { (b, a) };
                if small.len() != 1 || big.len() != 2 {
                    return None;
                }
                let x = &small.elements()[0];
                if !big.contains(x) {
                    return None;
                }
                let y = big.elements().iter().find(|e| *e != x)?.clone();
                Some((x.clone(), y))
            }
            _ => None,
        }
    }

    /// Elements of the least transitive set containing every element of `self`.
    pub fn transitive_closure(&self) -> BTreeSet<HfSet> {
        let mut out = BTreeSet::new();
        let mut stack: Vec<HfSet> = self.elements().to_vec();
        while let Some(x) = stack.pop() {
            if out.insert(x.clone()) {
                stack.extend(x.elements().iter().cloned());
            }
        }
        out
    }

    pub fn is_transitive(&self) -> bool {
        self.elements().iter().all(|x| x.is_subset(self))
    }

    /// Bracket encoding: `{` then the encodings of the elements in canonical order, then `}`.
    pub fn encoding(&self) -> String {
        let mut s = String::new();
        self.write_encoding(&mut s);
        s
    }

    fn write_encoding(&self, out: &mut String) {
        out.push('{');
        for e in self.elements() {
            e.write_encoding(out);
        }
        out.push('}');
    }

    /// Ackermann code `Σ 2^code(y)`, when it fits in a `u64`.
    pub fn ackermann_code(&self) -> Option<u64> {
        let mut acc: u64 = 0;
        for e in self.elements() {
            let c = e.ackermann_code()?;
            if c >= 64 {
                return None;
            }
            acc |= 1u64 << c;
        }
        Some(acc)
    }

    /// Flattens the set into an adjacency description accepted by [`canonicalize`].
    /// Node 0 is the root.
    pub fn to_graph(&self) -> Vec<Vec<usize>> {
        let mut ids: HashMap<HfSet, usize> = HashMap::new();
        let mut nodes: Vec<Vec<usize>> = Vec::new();
        fn visit(x: &HfSet, ids: &mut HashMap<HfSet, usize>, nodes: &mut Vec<Vec<usize>>) -> usize {
            if let Some(&i) = ids.get(x) {
                return i;
            }
            let i = nodes.len();
            nodes.push(Vec::new());
            ids.insert(x.clone(), i);
            let kids: Vec<usize> = x.elements().iter().map(|e| visit(e, ids, nodes)).collect();
            nodes[i] = kids;
            i
        }
        visit(self, &mut ids, &mut nodes);
        nodes
    }
}

/// Builds the canonical set denoted by `root` in an adjacency description
/// (`graph[i]` lists the members of node `i`; repetitions are allowed).
pub fn canonicalize(graph: &[Vec<usize>], root: usize) -> Result<HfSet> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Fresh,
        Open,
        Done,
    }
    fn go(
        g: &[Vec<usize>],
        i: usize,
        marks: &mut [Mark],
        memo: &mut [Option<HfSet>],
    ) -> Result<HfSet> {
        match marks.get(i) {
            None => return Err(Error::DanglingNode(i)),
            Some(Mark::Done) => return Ok(memo[i].clone().expect("finished node")),
            Some(Mark::Open) => return Err(Error::CyclicSet(i)),
            Some(Mark::Fresh) => {}
        }
        marks[i] = Mark::Open;
        let mut kids = Vec::with_capacity(g[i].len());
        for &k in &g[i] {
            kids.push(go(g, k, marks, memo)?);
        }
        let s = HfSet::from_elements(kids);
        marks[i] = Mark::Done;
        memo[i] = Some(s.clone());
        Ok(s)
    }
    let mut marks = vec![Mark::Fresh; graph.len()];
    let mut memo = vec![None; graph.len()];
    go(graph, root, &mut marks, &mut memo)
}

impl PartialEq for HfSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.digest() == other.digest()
                && self.rank() == other.rank()
                && self.0.elems == other.0.elems)
    }
}

impl Eq for HfSet {}

impl Hash for HfSet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.digest());
    }
}

impl Ord for HfSet {
    /// Ackermann order: `x < y` iff the largest element of the symmetric
    /// difference lies in `y`.
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        match self.rank().cmp(&other.rank()) {
            Ordering::Equal => {}
            o => return o,
        }
        let (a, b) = (self.elements(), other.elements());
        let (mut i, mut j) = (a.len(), b.len());
        loop {
            match (i, j) {
                (0, 0) => return Ordering::Equal,
                (0, _) => return Ordering::Less,
                (_, 0) => return Ordering::Greater,
                _ => {
                    let c = a[i - 1].cmp(&b[j - 1]);
                    if c != Ordering::Equal {
                        return c;
                    }
                    i -= 1;
                    j -= 1;
                }
            }
        }
    }
}

impl PartialOrd for HfSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for HfSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.elements().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for HfSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses `{}`, `{a,b}` and `nat:n` literals (whitespace allowed).
pub fn parse_set_literal(text: &str) -> Result<HfSet> {
    let chars: Vec<char> = text.chars().collect();
    let mut pos = 0;
    let s = parse_set_at(&chars, &mut pos)?;
    skip_ws(&chars, &mut pos);
    if pos != chars.len() {
        return Err(Error::SetLiteral(format!("trailing input in {text:?}")));
    }
    Ok(s)
}

fn skip_ws(c: &[char], pos: &mut usize) {
    while *pos < c.len() && c[*pos].is_whitespace() {
        *pos += 1;
    }
}

fn parse_set_at(c: &[char], pos: &mut usize) -> Result<HfSet> {
    skip_ws(c, pos);
    if c[*pos..].starts_with(&['n', 'a', 't', ':']) {
        *pos += 4;
        let start = *pos;
        while *pos < c.len() && c[*pos].is_ascii_digit() {
            *pos += 1;
        }
        let digits: String = c[start..*pos].iter().collect();
        let n: usize = digits
            .parse()
            .map_err(|_| Error::SetLiteral(format!("bad natural {digits:?}")))?;
        if n > 64 {
            return Err(Error::SetLiteral(format!("natural {n} too large")));
        }
        return Ok(HfSet::natural(n));
    }
    if c.get(*pos) != Some(&'{') {
        return Err(Error::SetLiteral(format!(
            "expected '{{' at offset {}",
            *pos
        )));
    }
    *pos += 1;
    let mut elems = Vec::new();
    skip_ws(c, pos);
    if c.get(*pos) == Some(&'}') {
        *pos += 1;
        return Ok(HfSet::empty());
    }
    loop {
        elems.push(parse_set_at(c, pos)?);
        skip_ws(c, pos);
        match c.get(*pos) {
            Some(',') => *pos += 1,
            Some('}') => {
                *pos += 1;
                return Ok(HfSet::from_elements(elems));
            }
            _ => {
                return Err(Error::SetLiteral(format!(
                    "expected ',' or '}}' at offset {}",
                    *pos
                )))
            }
        }
    }
}

/// A finite transitive set containing `∅`.
#[derive(Clone, Debug)]
pub struct GroundModel {
    carrier: Vec<HfSet>,
    index: HashMap<HfSet, usize>,
    stage: Option<usize>,
}

impl GroundModel {
    /// Validates transitivity and membership of `∅`.
    pub fn from_sets<I: IntoIterator<Item = HfSet>>(sets: I) -> Result<GroundModel> {
        let carrier: BTreeSet<HfSet> = sets.into_iter().collect();
        if !carrier.contains(&HfSet::empty()) {
            return Err(Error::MissingEmpty);
        }
        for x in &carrier {
            for y in x.elements() {
                if !carrier.contains(y) {
                    return Err(Error::NotTransitive(format!("{y} ∈ {x} is missing")));
                }
            }
        }
        Ok(GroundModel::build(carrier.into_iter().collect(), None))
    }

    fn build(carrier: Vec<HfSet>, stage: Option<usize>) -> GroundModel {
        let index = carrier
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, x)| (x, i))
            .collect();
        GroundModel {
            carrier,
            index,
            stage,
        }
    }

    /// Members in Ackermann order.
    pub fn carrier(&self) -> &[HfSet] {
        &self.carrier
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    pub fn stage(&self) -> Option<usize> {
        self.stage
    }

    pub fn contains(&self, x: &HfSet) -> bool {
        self.index.contains_key(x)
    }

    pub fn index_of(&self, x: &HfSet) -> Option<usize> {
        self.index.get(x).copied()
    }
}

impl PartialEq for GroundModel {
    fn eq(&self, other: &Self) -> bool {
        self.carrier == other.carrier
    }
}

impl Eq for GroundModel {}

/// `V_k`: all sets of rank below `k`, with `k` at most [`VSTAGE_BOUND`].
pub fn vstage(k: usize) -> Result<GroundModel> {
    vstage_bounded(k, VSTAGE_BOUND)
}

pub fn vstage_bounded(k: usize, bound: usize) -> Result<GroundModel> {
    if k > bound {
        return Err(Error::StageBound { k, bound });
    }
    // V_0 is empty and so not a ground model in the strict sense; it is still
    // returned so that the stage sizes line up.
    let mut level: Vec<HfSet> = Vec::new();
    for _ in 0..k {
        let n = level.len();
        let mut next = Vec::with_capacity(1 << n);
        for mask in 0u64..(1u64 << n) {
            let elems = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| level[i].clone());
            next.push(HfSet::from_elements(elems));
        }
        next.sort();
        level = next;
    }
    Ok(GroundModel::build(level, Some(k)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e() -> HfSet {
        HfSet::empty()
    }

    #[test]
    fn dedup_and_order_independence() {
        let a = HfSet::from_elements([e(), e()]);
        assert_eq!(a, HfSet::singleton(e()));
        let one = HfSet::singleton(e());
        assert_eq!(
            HfSet::from_elements([one.clone(), e()]),
            HfSet::from_elements([e(), one])
        );
    }

    #[test]
    fn ranks() {
        assert_eq!(e().rank(), 0);
        assert_eq!(HfSet::singleton(e()).rank(), 1);
        assert_eq!(HfSet::from_elements([HfSet::singleton(e()), e()]).rank(), 2);
    }

    #[test]
    fn stage_sizes() {
        let sizes: Vec<usize> = (0..=4).map(|k| vstage(k).unwrap().len()).collect();
        assert_eq!(sizes, vec![0, 1, 2, 4, 16]);
        assert_eq!(vstage(1).unwrap().carrier(), &[e()]);
        assert!(matches!(vstage(6), Err(Error::StageBound { .. })));
    }

    #[test]
    fn stage_is_transitive() {
        let m = vstage(3).unwrap();
        for x in m.carrier() {
            for y in x.transitive_closure() {
                assert!(m.contains(&y));
            }
        }
    }

    #[test]
    fn naturals_pairs_closure() {
        assert_eq!(
            HfSet::natural(2),
            HfSet::from_elements([e(), HfSet::singleton(e())])
        );
        assert_eq!(
            HfSet::kuratowski(e(), e()),
            HfSet::singleton(HfSet::singleton(e()))
        );
        let x = HfSet::singleton(HfSet::singleton(e()));
        let tc: Vec<HfSet> = x.transitive_closure().into_iter().collect();
        assert_eq!(tc, vec![e(), HfSet::singleton(e())]);
        assert_eq!(HfSet::natural(5).as_natural(), Some(5));
        assert_eq!(x.as_natural(), None);
    }

    #[test]
    fn ackermann_codes_follow_the_order() {
        let m = vstage(4).unwrap();
        let codes: Vec<u64> = m
            .carrier()
            .iter()
            .map(|x| x.ackermann_code().unwrap())
            .collect();
        assert_eq!(codes, (0..16).collect::<Vec<u64>>());
    }

    #[test]
    fn cyclic_graph_rejected() {
        assert_eq!(
            canonicalize(&[vec![1], vec![0]], 0),
            Err(Error::CyclicSet(0))
        );
        assert_eq!(
            canonicalize(&[vec![1, 1], vec![]], 0).unwrap(),
            HfSet::singleton(e())
        );
    }

    #[test]
    fn literals() {
        assert_eq!(parse_set_literal("{}").unwrap(), e());
        assert_eq!(
            parse_set_literal("{ {}, {{}} }").unwrap(),
            HfSet::natural(2)
        );
        assert_eq!(
            parse_set_literal("{nat:1,nat:0}").unwrap(),
            HfSet::natural(2)
        );
        assert!(parse_set_literal("{").is_err());
        let x = HfSet::natural(3);
        assert_eq!(parse_set_literal(&x.to_string()).unwrap(), x);
    }

    #[test]
    fn ground_model_validation() {
        let one = HfSet::singleton(e());
        assert!(GroundModel::from_sets([e(), one.clone()]).is_ok());
        assert_eq!(
            GroundModel::from_sets([one.clone()]).unwrap_err(),
            Error::MissingEmpty
        );
        let two = HfSet::singleton(one);
        assert!(matches!(
            GroundModel::from_sets([e(), two]),
            Err(Error::NotTransitive(_))
        ));
    }
}
