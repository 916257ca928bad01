//! Lipschitz maps (constant 1) and their tree homomorphism representation.
//!
//! A Lipschitz map never shortens agreement: if `x ↾ k = y ↾ k` then
//! `f(x) ↾ k = f(y) ↾ k`. On the word level the same map is a level and order
//! preserving [`TreeHom`]. Finite partial maps between exact points are
//! checked directly against the log-scale distance, so no truncation is
//! involved.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::prefix::{distance, in_basic_open, Alphabet, Letter, LogDistance, Point, Word};

/// A finite partial function between points, in insertion order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PartialMap {
    pairs: Vec<(Point, Point)>,
    by_domain: BTreeMap<Point, usize>,
    by_range: BTreeMap<Point, usize>,
}

impl PartialMap {
    pub fn new() -> Self {
        PartialMap::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Point, Point)>) -> Result<Self> {
        let mut map = PartialMap::new();
        for (a, b) in pairs {
            map.insert(a, b)?;
        }
        Ok(map)
    }

    /// Adds `a ↦ b`. Fails if `a` already has an image.
    pub fn insert(&mut self, a: Point, b: Point) -> Result<()> {
        if self.by_domain.contains_key(&a) {
            return Err(Error::DuplicateDomainPoint(a));
        }
        let idx = self.pairs.len();
        self.by_domain.insert(a.clone(), idx);
        self.by_range.entry(b.clone()).or_insert(idx);
        self.pairs.push((a, b));
        Ok(())
    }

    pub fn get(&self, a: &Point) -> Option<&Point> {
        self.by_domain.get(a).map(|&i| &self.pairs[i].1)
    }

    /// Some preimage of `b`, if any.
    pub fn preimage(&self, b: &Point) -> Option<&Point> {
        self.by_range.get(b).map(|&i| &self.pairs[i].0)
    }

    pub fn in_domain(&self, a: &Point) -> bool {
        self.by_domain.contains_key(a)
    }

    pub fn in_range(&self, b: &Point) -> bool {
        self.by_range.contains_key(b)
    }

    pub fn pairs(&self) -> &[(Point, Point)] {
        &self.pairs
    }

    pub fn domain(&self) -> impl Iterator<Item = &Point> {
        self.pairs.iter().map(|(a, _)| a)
    }

    pub fn range(&self) -> impl Iterator<Item = &Point> {
        self.pairs.iter().map(|(_, b)| b)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn is_injective(&self) -> bool {
        self.by_range.len() == self.pairs.len()
    }

    /// The inverse relation, provided it is a function.
    pub fn inverse(&self) -> Result<PartialMap> {
        PartialMap::from_pairs(self.pairs.iter().map(|(a, b)| (b.clone(), a.clone())))
    }

    /// Whether every pair of `self` is a pair of `other`.
    pub fn is_restriction_of(&self, other: &PartialMap) -> bool {
        self.pairs.iter().all(|(a, b)| other.get(a) == Some(b))
    }
}

impl Serialize for PartialMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.pairs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PartialMap {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<(Point, Point)>::deserialize(deserializer)?;
        PartialMap::from_pairs(pairs).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// Images agree for less long than the arguments.
    Contraction,
    /// Images agree for longer than the arguments (isometry only).
    Expansion,
    /// Two arguments share an image.
    NotInjective,
}

/// Two pairs of a map that break the checked property. `index` is the least
/// `k` at which one side agrees up to `k + 1` and the other does not.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterwitness {
    pub kind: ViolationKind,
    pub first: (Point, Point),
    pub second: (Point, Point),
    pub index: usize,
}

impl fmt::Display for Counterwitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:?} at index {}: {} ↦ {} vs {} ↦ {}",
            self.kind, self.index, self.first.0, self.first.1, self.second.0, self.second.1
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "witness", rename_all = "lowercase")]
pub enum Verdict {
    Ok,
    Violation(Box<Counterwitness>),
}

impl Verdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, Verdict::Ok)
    }

    pub fn witness(&self) -> Option<&Counterwitness> {
        match self {
            Verdict::Ok => None,
            Verdict::Violation(w) => Some(w),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Property {
    Lipschitz,
    Isometry,
}

/// Compares one pair of pairs. Domain points are assumed distinct.
pub(crate) fn compare_pairs(
    property: Property,
    (a, b): (&Point, &Point),
    (a2, b2): (&Point, &Point),
) -> Option<Counterwitness> {
    let dom = distance(a, a2);
    let rng = distance(b, b2);
    let kind = match property {
        Property::Lipschitz if rng < dom => ViolationKind::Contraction,
        Property::Isometry if rng == LogDistance::Infinite && dom != rng => {
            ViolationKind::NotInjective
        }
        Property::Isometry if rng < dom => ViolationKind::Contraction,
        Property::Isometry if rng > dom => ViolationKind::Expansion,
        _ => return None,
    };
    let index = dom.min(rng).exponent().expect("distinct domain points");
    Some(Counterwitness {
        kind,
        first: (a.clone(), b.clone()),
        second: (a2.clone(), b2.clone()),
        index,
    })
}

fn check_all(m: &PartialMap, property: Property) -> Verdict {
    let pairs = m.pairs();
    for (i, (a, b)) in pairs.iter().enumerate() {
        for (a2, b2) in &pairs[i + 1..] {
            if let Some(w) = compare_pairs(property, (a, b), (a2, b2)) {
                return Verdict::Violation(Box::new(w));
            }
        }
    }
    Verdict::Ok
}

/// Checks `a`, `b` against every pair of `m` only.
pub(crate) fn check_new_pair(m: &PartialMap, a: &Point, b: &Point, property: Property) -> Verdict {
    m.pairs()
        .iter()
        .find_map(|(a2, b2)| compare_pairs(property, (a2, b2), (a, b)))
        .map_or(Verdict::Ok, |w| Verdict::Violation(Box::new(w)))
}

pub fn check_lipschitz(m: &PartialMap) -> Verdict {
    check_all(m, Property::Lipschitz)
}

pub fn check_isometry(m: &PartialMap) -> Verdict {
    check_all(m, Property::Isometry)
}

/// A per-index letter substitution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LetterMap {
    /// Listed letters are replaced, all others kept.
    Explicit(BTreeMap<Letter, Letter>),
    /// `l ↦ l + shift`.
    Shift(Letter),
}

impl LetterMap {
    pub fn identity() -> Self {
        LetterMap::Explicit(BTreeMap::new())
    }

    pub fn apply(&self, letter: Letter) -> Letter {
        match self {
            LetterMap::Explicit(m) => m.get(&letter).copied().unwrap_or(letter),
            LetterMap::Shift(s) => letter + s,
        }
    }

    fn is_injective_on(&self, alphabet: Alphabet) -> bool {
        match (self, alphabet) {
            (LetterMap::Shift(_), _) => true,
            (LetterMap::Explicit(m), Alphabet::Finite(k)) => {
                let images: BTreeSet<Letter> = (0..k).map(|l| self.apply(l)).collect();
                images.len() == k as usize && m.keys().all(|&l| l < k)
            }
            (LetterMap::Explicit(m), Alphabet::Countable) => {
                // Identity off the keys: injective iff the keys permute among themselves.
                let keys: BTreeSet<Letter> = m.keys().copied().collect();
                let vals: BTreeSet<Letter> = m.values().copied().collect();
                keys == vals
            }
        }
    }
}

/// Table-backed homomorphism: images of a downward closed set of words, all
/// of length at most `depth`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomTable {
    depth: usize,
    entries: BTreeMap<Word, Word>,
}

impl HomTable {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn entries(&self) -> &BTreeMap<Word, Word> {
        &self.entries
    }

    pub fn get(&self, s: &Word) -> Option<&Word> {
        self.entries.get(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HomForm {
    Table(HomTable),
    Identity,
    /// `π(b)(k) = b(k) mod 2`.
    Parity,
    /// `a ↦ s⌢a`; on words the image is cut back to the input length.
    Prepend(Word),
    Relabel {
        per_index: Vec<LetterMap>,
        rest: LetterMap,
    },
    Compose(Box<TreeHom>, Box<TreeHom>),
}

/// A level and order preserving map on `X^{<ω}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "HomRepr", into = "HomRepr")]
pub struct TreeHom {
    input: Alphabet,
    output: Alphabet,
    form: HomForm,
}

impl TreeHom {
    pub fn identity(alphabet: Alphabet) -> Self {
        TreeHom {
            input: alphabet,
            output: alphabet,
            form: HomForm::Identity,
        }
    }

    pub fn parity(input: Alphabet) -> Self {
        TreeHom {
            input,
            output: Alphabet::BINARY,
            form: HomForm::Parity,
        }
    }

    pub fn prepend(alphabet: Alphabet, s: Word) -> Result<Self> {
        alphabet.check_word(&s)?;
        Ok(TreeHom {
            input: alphabet,
            output: alphabet,
            form: HomForm::Prepend(s),
        })
    }

    pub fn relabel(
        input: Alphabet,
        output: Alphabet,
        per_index: Vec<LetterMap>,
        rest: LetterMap,
    ) -> Result<Self> {
        for map in per_index.iter().chain(std::iter::once(&rest)) {
            match input {
                Alphabet::Finite(k) => {
                    for l in 0..k {
                        output.check_letter(map.apply(l))?;
                    }
                }
                Alphabet::Countable if output != Alphabet::Countable => {
                    return Err(Error::AlphabetMismatch {
                        expected: Alphabet::Countable,
                        found: output,
                    })
                }
                Alphabet::Countable => {}
            }
        }
        Ok(TreeHom {
            input,
            output,
            form: HomForm::Relabel { per_index, rest },
        })
    }

    /// Builds a table homomorphism, checking level and order preservation.
    pub fn table(
        input: Alphabet,
        output: Alphabet,
        depth: usize,
        entries: BTreeMap<Word, Word>,
    ) -> Result<Self> {
        if entries.get(&Word::empty()) != Some(&Word::empty()) {
            return Err(Error::InvalidTable("missing root entry [] ↦ []".into()));
        }
        for (s, t) in &entries {
            input.check_word(s)?;
            output.check_word(t)?;
            if s.len() > depth {
                return Err(Error::InvalidTable(format!("{s} is deeper than {depth}")));
            }
            if s.len() != t.len() {
                return Err(Error::InvalidTable(format!("{s} ↦ {t} is not level preserving")));
            }
            if let Some(parent) = s.parent() {
                match entries.get(&parent) {
                    None => {
                        return Err(Error::InvalidTable(format!(
                            "{s} present but its parent {parent} is not"
                        )))
                    }
                    Some(pt) if !pt.is_prefix_of(t) => {
                        return Err(Error::InvalidTable(format!(
                            "{parent} ↦ {pt} but {s} ↦ {t}: not order preserving"
                        )))
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(TreeHom {
            input,
            output,
            form: HomForm::Table(HomTable { depth, entries }),
        })
    }

    pub fn input(&self) -> Alphabet {
        self.input
    }

    pub fn output(&self) -> Alphabet {
        self.output
    }

    pub fn form(&self) -> &HomForm {
        &self.form
    }

    /// Longest word length the homomorphism can evaluate, `None` if unbounded.
    pub fn depth_bound(&self) -> Option<usize> {
        match &self.form {
            HomForm::Table(t) => Some(t.depth),
            HomForm::Compose(outer, inner) => match (outer.depth_bound(), inner.depth_bound()) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            },
            _ => None,
        }
    }

    /// Whether every word of length at most `n` can be evaluated.
    pub fn is_total_to(&self, n: usize) -> bool {
        match &self.form {
            HomForm::Table(t) => {
                if t.depth < n {
                    return false;
                }
                match self.input {
                    Alphabet::Finite(k) => {
                        let expected: u128 = (0..=n as u32).map(|j| (k as u128).pow(j)).sum();
                        let present = t.entries.keys().filter(|s| s.len() <= n).count();
                        present as u128 == expected
                    }
                    Alphabet::Countable => false,
                }
            }
            HomForm::Compose(outer, inner) => {
                // The outer map only sees images of the inner one.
                inner.is_total_to(n) && (outer.depth_bound().is_none() || outer.is_total_to(n))
            }
            _ => true,
        }
    }

    /// The image word; same length as `s`.
    pub fn apply(&self, s: &Word) -> Result<Word> {
        self.input.check_word(s)?;
        self.apply_unchecked(s)
    }

    fn apply_unchecked(&self, s: &Word) -> Result<Word> {
        match &self.form {
            HomForm::Table(t) => t.get(s).cloned().ok_or_else(|| Error::OutOfTable(s.clone())),
            HomForm::Identity => Ok(s.clone()),
            HomForm::Parity => Ok(s.iter().map(|l| l % 2).collect::<Vec<_>>().into()),
            HomForm::Prepend(p) => Ok(p.concat(s).truncate(s.len())),
            HomForm::Relabel { per_index, rest } => Ok(s
                .iter()
                .enumerate()
                .map(|(i, &l)| per_index.get(i).unwrap_or(rest).apply(l))
                .collect::<Vec<_>>()
                .into()),
            HomForm::Compose(outer, inner) => outer.apply_unchecked(&inner.apply_unchecked(s)?),
        }
    }

    /// The induced Lipschitz map on points. Tables only know finitely many
    /// levels and report [`Error::NotPointwise`].
    pub fn apply_point(&self, x: &Point) -> Result<Point> {
        self.input.check_point(x)?;
        self.apply_point_unchecked(x)
    }

    fn apply_point_unchecked(&self, x: &Point) -> Result<Point> {
        match &self.form {
            HomForm::Table(_) => Err(Error::NotPointwise),
            HomForm::Identity => Ok(x.clone()),
            HomForm::Parity => Ok(x.map_letters(0, |_, l| l % 2)),
            HomForm::Prepend(p) => Ok(x.prepend(p)),
            HomForm::Relabel { per_index, rest } => Ok(x.map_letters(per_index.len(), |i, l| {
                per_index.get(i).unwrap_or(rest).apply(l)
            })),
            HomForm::Compose(outer, inner) => {
                outer.apply_point_unchecked(&inner.apply_point_unchecked(x)?)
            }
        }
    }

    /// Whether this combinator preserves distances exactly. Tables answer
    /// `None`; use [`level_analysis`] for them.
    pub fn is_isometric_combinator(&self) -> Option<bool> {
        match &self.form {
            HomForm::Table(_) => None,
            HomForm::Identity | HomForm::Prepend(_) => Some(true),
            HomForm::Parity => Some(self.input.size().is_some_and(|k| k <= 2)),
            HomForm::Relabel { per_index, rest } => Some(
                per_index
                    .iter()
                    .chain(std::iter::once(rest))
                    .all(|m| m.is_injective_on(self.input)),
            ),
            HomForm::Compose(outer, inner) => {
                match (outer.is_isometric_combinator(), inner.is_isometric_combinator()) {
                    (Some(a), Some(b)) if a && b => Some(true),
                    _ => None,
                }
            }
        }
    }
}

pub fn apply_hom(h: &TreeHom, s: &Word) -> Result<Word> {
    h.apply(s)
}

pub fn compose_homs(outer: TreeHom, inner: TreeHom) -> Result<TreeHom> {
    if inner.output != outer.input {
        return Err(Error::AlphabetMismatch {
            expected: outer.input,
            found: inner.output,
        });
    }
    Ok(TreeHom {
        input: inner.input,
        output: outer.output,
        form: HomForm::Compose(Box::new(outer), Box::new(inner)),
    })
}

/// The homomorphism `f̃` of a Lipschitz partial map over `ω`, tabulated on the
/// prefixes of domain points up to `depth`.
pub fn induced_hom(m: &PartialMap, depth: usize) -> Result<TreeHom> {
    induced_hom_over(m, depth, Alphabet::Countable, Alphabet::Countable)
}

pub fn induced_hom_over(
    m: &PartialMap,
    depth: usize,
    input: Alphabet,
    output: Alphabet,
) -> Result<TreeHom> {
    if let Verdict::Violation(w) = check_lipschitz(m) {
        return Err(Error::NotLipschitz(w));
    }
    let mut entries = BTreeMap::new();
    entries.insert(Word::empty(), Word::empty());
    for (a, b) in m.pairs() {
        for j in 1..=depth {
            let image = b.prefix(j);
            if let Some(prev) = entries.insert(a.prefix(j), image.clone()) {
                assert_eq!(prev, image, "Lipschitz maps induce well defined tables");
            }
        }
    }
    TreeHom::table(input, output, depth, entries)
}

/// Values of the unique Lipschitz extension to the closure of the domain, at
/// the given words.
pub fn lift_to_closure(m: &PartialMap, targets: &[Word]) -> Result<Vec<(Word, Word)>> {
    if let Verdict::Violation(w) = check_lipschitz(m) {
        return Err(Error::NotLipschitz(w));
    }
    targets
        .iter()
        .map(|s| {
            m.pairs()
                .iter()
                .find(|(a, _)| in_basic_open(s, a))
                .map(|(_, b)| (s.clone(), b.prefix(s.len())))
                .ok_or_else(|| Error::NotInClosure(s.clone()))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelReport {
    pub level: usize,
    pub injective: bool,
    pub surjective: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelAnalysis {
    pub levels: Vec<LevelReport>,
    /// All levels injective: `h` preserves agreement on words up to the depth.
    pub isometry_to_depth: bool,
}

/// Injectivity and surjectivity of each level map `X^j → X^j`, `j ≤ n`.
pub fn level_analysis(h: &TreeHom, n: usize) -> Result<LevelAnalysis> {
    let in_size = h.input.size().ok_or(Error::NotFinite(h.input))?;
    let out_size = h.output.size().ok_or(Error::NotFinite(h.output))?;
    let mut levels = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let domain = h.input.words_of_length(j)?;
        let images: BTreeSet<Word> = domain.iter().map(|s| h.apply(s)).collect::<Result<_>>()?;
        let codomain_size = (out_size as u128).pow(j as u32);
        levels.push(LevelReport {
            level: j,
            injective: images.len() == domain.len(),
            surjective: images.len() as u128 == codomain_size,
        });
    }
    debug_assert!(in_size > 0);
    let isometry_to_depth = levels.iter().all(|l| l.injective);
    Ok(LevelAnalysis {
        levels,
        isometry_to_depth,
    })
}

/// Every table homomorphism of `k^{≤depth}` into itself.
///
/// A homomorphism is fixed by the last letter of each nonempty node's image,
/// so there are `k^N` of them with `N` the number of nonempty nodes.
pub fn all_table_homs(k: u32, depth: usize) -> Result<impl Iterator<Item = TreeHom>> {
    let alphabet = Alphabet::Finite(k);
    let nodes: Vec<Word> = alphabet
        .words_up_to(depth)?
        .into_iter()
        .filter(|w| !w.is_empty())
        .collect();
    let count = (k as u128)
        .checked_pow(nodes.len() as u32)
        .filter(|&c| c <= u64::MAX as u128)
        .ok_or_else(|| Error::Precondition("too many homomorphisms to enumerate".into()))?;
    Ok((0..count as u64).map(move |mut code| {
        let mut entries = BTreeMap::new();
        entries.insert(Word::empty(), Word::empty());
        for node in &nodes {
            let letter = (code % k as u64) as Letter;
            code /= k as u64;
            let parent_image = &entries[&node.parent().expect("nonempty")];
            let image = parent_image.child(letter);
            entries.insert(node.clone(), image);
        }
        TreeHom::table(alphabet, alphabet, depth, entries).expect("enumerated tables are homomorphisms")
    }))
}

// JSON representation.

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum HomRepr {
    Table {
        input: Alphabet,
        output: Alphabet,
        depth: usize,
        entries: BTreeMap<String, Word>,
    },
    Identity {
        alphabet: Alphabet,
    },
    Parity {
        input: Alphabet,
    },
    Prepend {
        alphabet: Alphabet,
        prefix: Word,
    },
    Relabel {
        input: Alphabet,
        output: Alphabet,
        per_index: Vec<LetterMap>,
        rest: LetterMap,
    },
    Compose {
        outer: Box<HomRepr>,
        inner: Box<HomRepr>,
    },
}

fn word_key(w: &Word) -> String {
    w.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",")
}

fn parse_word_key(key: &str) -> Result<Word> {
    if key.is_empty() {
        return Ok(Word::empty());
    }
    key.split(',')
        .map(|part| {
            part.trim()
                .parse::<Letter>()
                .map_err(|_| Error::InvalidTable(format!("bad word key {key:?}")))
        })
        .collect::<Result<Vec<_>>>()
        .map(Word::from)
}

impl From<TreeHom> for HomRepr {
    fn from(h: TreeHom) -> Self {
        match h.form {
            HomForm::Table(t) => HomRepr::Table {
                input: h.input,
                output: h.output,
                depth: t.depth,
                entries: t.entries.iter().map(|(k, v)| (word_key(k), v.clone())).collect(),
            },
            HomForm::Identity => HomRepr::Identity { alphabet: h.input },
            HomForm::Parity => HomRepr::Parity { input: h.input },
            HomForm::Prepend(prefix) => HomRepr::Prepend {
                alphabet: h.input,
                prefix,
            },
            HomForm::Relabel { per_index, rest } => HomRepr::Relabel {
                input: h.input,
                output: h.output,
                per_index,
                rest,
            },
            HomForm::Compose(outer, inner) => HomRepr::Compose {
                outer: Box::new((*outer).into()),
                inner: Box::new((*inner).into()),
            },
        }
    }
}

impl TryFrom<HomRepr> for TreeHom {
    type Error = Error;

    fn try_from(repr: HomRepr) -> Result<Self> {
        match repr {
            HomRepr::Table {
                input,
                output,
                depth,
                entries,
            } => {
                let entries = entries
                    .iter()
                    .map(|(k, v)| Ok((parse_word_key(k)?, v.clone())))
                    .collect::<Result<BTreeMap<_, _>>>()?;
                TreeHom::table(input, output, depth, entries)
            }
            HomRepr::Identity { alphabet } => Ok(TreeHom::identity(alphabet)),
            HomRepr::Parity { input } => Ok(TreeHom::parity(input)),
            HomRepr::Prepend { alphabet, prefix } => TreeHom::prepend(alphabet, prefix),
            HomRepr::Relabel {
                input,
                output,
                per_index,
                rest,
            } => TreeHom::relabel(input, output, per_index, rest),
            HomRepr::Compose { outer, inner } => {
                compose_homs(TreeHom::try_from(*outer)?, TreeHom::try_from(*inner)?)
            }
        }
    }
}
