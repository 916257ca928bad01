//! Finite-condition combinatorics: finite partial Lipschitz injections,
//! separating sets of boxes, the box-wise closure test, the extension
//! procedure that adds a prescribed domain and range point, and antichain
//! search.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::backforth::DenseOracle;
use crate::error::{Error, Result};
use crate::lipschitz::{check_lipschitz, compare_pairs, Counterwitness, PartialMap, Property, Verdict, ViolationKind};
use crate::prefix::{distance, in_basic_open, Alphabet, Letter, LogDistance, Point, Word};

/// A finite partial Lipschitz injection.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Condition(PartialMap);

impl Condition {
    pub fn new(map: PartialMap) -> Result<Self> {
        match is_condition(&map) {
            Verdict::Ok => Ok(Condition(map)),
            Verdict::Violation(w) => Err(Error::NotLipschitz(w)),
        }
    }

    pub fn empty() -> Self {
        Condition::default()
    }

    pub fn map(&self) -> &PartialMap {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<'de> Deserialize<'de> for Condition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Condition::new(PartialMap::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// Lipschitz and injective.
pub fn is_condition(m: &PartialMap) -> Verdict {
    let pairs = m.pairs();
    for (i, (a, b)) in pairs.iter().enumerate() {
        for (a2, b2) in &pairs[i + 1..] {
            if b == b2 {
                return Verdict::Violation(Box::new(Counterwitness {
                    kind: ViolationKind::NotInjective,
                    first: (a.clone(), b.clone()),
                    second: (a2.clone(), b2.clone()),
                    index: distance(a, a2).exponent().expect("distinct domain points"),
                }));
            }
        }
    }
    check_lipschitz(m)
}

/// Why two conditions have no common extension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Incompatibility {
    /// Both assign an image to `point`, and the images differ.
    Conflict { point: Point, left: Point, right: Point },
    /// The union is a function but not a condition.
    Violation { witness: Counterwitness },
}

/// `None` when `p ∪ q` is a condition. Pairs inside `p` or inside `q` are
/// already fine, so only cross pairs are compared.
pub fn incompatibility(p: &Condition, q: &Condition) -> Option<Incompatibility> {
    for (a, b) in p.0.pairs() {
        if let Some(b2) = q.0.get(a) {
            if b2 != b {
                return Some(Incompatibility::Conflict {
                    point: a.clone(),
                    left: b.clone(),
                    right: b2.clone(),
                });
            }
        }
    }
    for (a, b) in p.0.pairs() {
        for (a2, b2) in q.0.pairs() {
            if a == a2 {
                continue;
            }
            let witness = if b == b2 {
                Some(Counterwitness {
                    kind: ViolationKind::NotInjective,
                    first: (a.clone(), b.clone()),
                    second: (a2.clone(), b2.clone()),
                    index: distance(a, a2).exponent().expect("distinct"),
                })
            } else {
                compare_pairs(Property::Lipschitz, (a, b), (a2, b2))
            };
            if let Some(witness) = witness {
                return Some(Incompatibility::Violation { witness });
            }
        }
    }
    None
}

pub fn compatible(p: &Condition, q: &Condition) -> bool {
    incompatibility(p, q).is_none()
}

/// `p ∪ q` when it is a condition.
pub fn union(p: &Condition, q: &Condition) -> Option<Condition> {
    if !compatible(p, q) {
        return None;
    }
    let mut map = p.0.clone();
    for (a, b) in q.0.pairs() {
        if !map.in_domain(a) {
            map.insert(a.clone(), b.clone()).expect("fresh point");
        }
    }
    Some(Condition(map))
}

/// A finite set of boxes `[s] × [t]` with `|s| = |t|`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SeparatingSet {
    pairs: Vec<BoxPair>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BoxPair {
    pub s: Word,
    pub t: Word,
}

impl SeparatingSet {
    /// Unvalidated; see [`is_separating`].
    pub fn new(pairs: impl IntoIterator<Item = (Word, Word)>) -> Self {
        SeparatingSet {
            pairs: pairs.into_iter().map(|(s, t)| BoxPair { s, t }).collect(),
        }
    }

    pub fn pairs(&self) -> &[BoxPair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum SeparationError {
    LengthMismatch { pair: usize },
    ComparableFirst { left: usize, right: usize },
    ComparableSecond { left: usize, right: usize },
}

pub fn is_separating(x: &SeparatingSet) -> std::result::Result<(), SeparationError> {
    for (i, pair) in x.pairs.iter().enumerate() {
        if pair.s.len() != pair.t.len() {
            return Err(SeparationError::LengthMismatch { pair: i });
        }
    }
    for (i, p) in x.pairs.iter().enumerate() {
        for (j, q) in x.pairs.iter().enumerate().skip(i + 1) {
            if !p.s.incomparable(&q.s) {
                return Err(SeparationError::ComparableFirst { left: i, right: j });
            }
            if !p.t.incomparable(&q.t) {
                return Err(SeparationError::ComparableSecond { left: i, right: j });
            }
        }
    }
    Ok(())
}

/// Assigns each pair of `p` the index of the box holding it, if every pair
/// falls in exactly one box and no box is used twice.
fn box_assignment(p: &PartialMap, x: &SeparatingSet) -> Option<Vec<usize>> {
    if p.len() != x.len() {
        return None;
    }
    let mut used = vec![false; x.len()];
    let mut out = Vec::with_capacity(p.len());
    for (a, b) in p.pairs() {
        let mut hits = x
            .pairs
            .iter()
            .enumerate()
            .filter(|(_, bx)| in_basic_open(&bx.s, a) && in_basic_open(&bx.t, b))
            .map(|(i, _)| i);
        let i = hits.next()?;
        if hits.next().is_some() || used[i] {
            return None;
        }
        used[i] = true;
        out.push(i);
    }
    Some(out)
}

/// `p ∈ P′(x)`: `|p| = |x|` and the pairs of `p` sit one per box.
pub fn in_px(p: &Condition, x: &SeparatingSet) -> bool {
    box_assignment(&p.0, x).is_some()
}

/// Box profiles of `p` up to `depth_bound`: separating sets
/// `{(a ↾ k_a, p(a) ↾ k_a)}` for every choice of `k_a ≤ depth_bound`. These
/// are exactly the separating sets of bounded length that contain `p`.
pub fn box_profiles(p: &Condition, depth_bound: usize) -> Vec<SeparatingSet> {
    let pairs = p.0.pairs();
    let mut out = Vec::new();
    let mut lengths = vec![0usize; pairs.len()];
    loop {
        let x = SeparatingSet::new(
            pairs
                .iter()
                .zip(&lengths)
                .map(|((a, b), &k)| (a.prefix(k), b.prefix(k))),
        );
        if is_separating(&x).is_ok() {
            out.push(x);
        }
        // odometer over lengths
        let mut i = 0;
        loop {
            if i == lengths.len() {
                return out;
            }
            if lengths[i] < depth_bound {
                lengths[i] += 1;
                break;
            }
            lengths[i] = 0;
            i += 1;
        }
    }
}

/// Whether every separating set of length at most `depth_bound` around `p`
/// also holds some member of `d`.
pub fn closure_member(p: &Condition, d: &[Condition], depth_bound: usize) -> bool {
    box_profiles(p, depth_bound)
        .iter()
        .all(|x| d.iter().any(|q| in_px(q, x)))
}

/// The first separating set around `p` that no member of `d` enters.
pub fn closure_witness(p: &Condition, d: &[Condition], depth_bound: usize) -> Option<SeparatingSet> {
    box_profiles(p, depth_bound)
        .into_iter()
        .find(|x| !d.iter().any(|q| in_px(q, x)))
}

fn fresh_letters(alphabet: Alphabet, used: &BTreeSet<Letter>) -> Vec<Letter> {
    match alphabet {
        Alphabet::Finite(k) => (0..k).filter(|l| !used.contains(l)).collect(),
        Alphabet::Countable => vec![(0..).find(|l| !used.contains(l)).expect("ω is infinite")],
    }
}

/// Extends `p` to a condition with `a` in the domain and `b` in the range.
///
/// First `b` gets a preimage `c` whose first letter no domain point uses.
/// Then `a`, agreeing with some domain point `a′` up to a maximal `l`, gets
/// an image extending `p(a′) ↾ l ⌢ j` with `j` unused at index `l` by the
/// range. Fresh letters are the smallest the oracles can realize.
pub fn extend_condition(
    p: &Condition,
    a: &Point,
    b: &Point,
    a_oracle: &mut dyn DenseOracle,
    b_oracle: &mut dyn DenseOracle,
) -> Result<Condition> {
    let mut map = p.0.clone();

    if !map.in_range(b) {
        let used: BTreeSet<Letter> = map.domain().map(|x| x.at(0)).collect();
        let mut last_err = None;
        let mut chosen = None;
        for k in fresh_letters(a_oracle.alphabet(), &used) {
            match a_oracle.refine(&Word::from([k]), &|x| map.in_domain(x)) {
                Ok(c) => {
                    chosen = Some(c);
                    break;
                }
                Err(e) => last_err = Some(e),
            }
        }
        let c = match (chosen, last_err) {
            (Some(c), _) => c,
            (None, Some(e)) => return Err(e.into()),
            (None, None) => return Err(Error::NoFreshLetter { index: 0 }),
        };
        map.insert(c, b.clone())?;
    }

    if !map.in_domain(a) {
        let (l, witness_image) = map
            .pairs()
            .iter()
            .map(|(x, y)| (distance(x, a), y))
            .max_by_key(|(d, _)| *d)
            .map(|(d, y)| match d {
                LogDistance::Exponent(l) => (l, y.prefix(l)),
                LogDistance::Infinite => unreachable!("a is not in the domain"),
            })
            .unwrap_or((0, Word::empty()));
        let used: BTreeSet<Letter> = map.range().map(|y| y.at(l)).collect();
        let mut last_err = None;
        let mut chosen = None;
        for j in fresh_letters(b_oracle.alphabet(), &used) {
            match b_oracle.refine(&witness_image.child(j), &|y| map.in_range(y)) {
                Ok(d) => {
                    chosen = Some(d);
                    break;
                }
                Err(e) => last_err = Some(e),
            }
        }
        let d = match (chosen, last_err) {
            (Some(d), _) => d,
            (None, Some(e)) => return Err(e.into()),
            (None, None) => return Err(Error::NoFreshLetter { index: l }),
        };
        map.insert(a.clone(), d)?;
    }

    match is_condition(&map) {
        Verdict::Ok => Ok(Condition(map)),
        Verdict::Violation(w) => Err(Error::BrokenInvariant(w)),
    }
}

/// Position of a point in a labelled partition `A = ⋃ A_α`: block `level`,
/// `index` within its block's enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Label {
    pub level: usize,
    pub index: usize,
}

/// `p ↾ A_α` maps into `B_α` for every block: each pair has matching levels.
/// Unlabelled points fail.
pub fn respects_partition(
    p: &Condition,
    label_a: impl Fn(&Point) -> Option<Label>,
    label_b: impl Fn(&Point) -> Option<Label>,
) -> bool {
    p.0.pairs().iter().all(|(a, b)| match (label_a(a), label_b(b)) {
        (Some(la), Some(lb)) => la.level == lb.level,
        _ => false,
    })
}

/// The last constructed element of `p`: with `β` the greatest level meeting
/// `p ∩ A_β × B_β`, the unique such pair `(a^β_k, b^β_l)`, provided `l < k`.
pub fn last_constructed_element(
    p: &Condition,
    label_a: impl Fn(&Point) -> Option<Label>,
    label_b: impl Fn(&Point) -> Option<Label>,
) -> Option<(Point, Point)> {
    let labelled: Vec<(&Point, &Point, Label, Label)> = p
        .0
        .pairs()
        .iter()
        .filter_map(|(a, b)| {
            let (la, lb) = (label_a(a)?, label_b(b)?);
            (la.level == lb.level).then_some((a, b, la, lb))
        })
        .collect();
    let beta = labelled.iter().map(|(_, _, la, _)| la.level).max()?;
    let top: Vec<_> = labelled.iter().filter(|(_, _, la, _)| la.level == beta).collect();
    match top.as_slice() {
        [(a, b, la, lb)] if lb.index < la.index => Some(((*a).clone(), (*b).clone())),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairWitness {
    pub left: usize,
    pub right: usize,
    pub incompatibility: Incompatibility,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AntichainReport {
    /// Indices into the input, ascending.
    pub members: Vec<usize>,
    /// The search was exhaustive, so no larger antichain exists.
    pub exact: bool,
    pub meets_min_size: bool,
    pub witnesses: Vec<PairWitness>,
}

/// Families up to this size are searched exactly.
pub const EXACT_ANTICHAIN_LIMIT: usize = 20;

/// Largest pairwise incompatible subfamily: exact branch and bound up to
/// [`EXACT_ANTICHAIN_LIMIT`] conditions, greedy by incompatibility degree beyond.
pub fn find_antichain(conds: &[Condition], min_size: usize) -> AntichainReport {
    let n = conds.len();
    let mut incompatible = vec![vec![false; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let bad = !compatible(&conds[i], &conds[j]);
            incompatible[i][j] = bad;
            incompatible[j][i] = bad;
        }
    }
    let exact = n <= EXACT_ANTICHAIN_LIMIT;
    let members = if exact {
        let adj: Vec<u32> = (0..n)
            .map(|i| (0..n).filter(|&j| incompatible[i][j]).fold(0u32, |m, j| m | (1 << j)))
            .collect();
        let mut best = 0u32;
        max_clique(&adj, 0, if n == 0 { 0 } else { (1u32 << n) - 1 }, &mut best);
        (0..n).filter(|&i| best & (1 << i) != 0).collect()
    } else {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(incompatible[i].iter().filter(|&&b| b).count()));
        let mut chosen: Vec<usize> = Vec::new();
        for i in order {
            if chosen.iter().all(|&j| incompatible[i][j]) {
                chosen.push(i);
            }
        }
        chosen.sort_unstable();
        chosen
    };
    let mut witnesses = Vec::new();
    for (x, &i) in members.iter().enumerate() {
        for &j in &members[x + 1..] {
            let incompatibility = incompatibility(&conds[i], &conds[j]).expect("antichain members clash");
            witnesses.push(PairWitness {
                left: i,
                right: j,
                incompatibility,
            });
        }
    }
    AntichainReport {
        meets_min_size: members.len() >= min_size,
        members,
        exact,
        witnesses,
    }
}

/// Largest clique extending `current` with vertices from `candidates`.
fn max_clique(adj: &[u32], current: u32, candidates: u32, best: &mut u32) {
    if candidates == 0 {
        if current.count_ones() > best.count_ones() {
            *best = current;
        }
        return;
    }
    if current.count_ones() + candidates.count_ones() <= best.count_ones() {
        return;
    }
    let v = candidates.trailing_zeros() as usize;
    let bit = 1u32 << v;
    max_clique(adj, current | bit, candidates & adj[v], best);
    max_clique(adj, current, candidates & !bit, best);
}
