//! Words, eventually constant points of `X^ω`, the prefix ultrametric and
//! downward closed word trees.
//!
//! A [`Point`] is stored as a stem followed by a tail letter repeated forever.
//! The stem never ends with the tail letter, so two points are equal as
//! sequences exactly when their representations are equal.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Letter = u32;

/// The letter set `X`. Letter `0` plays the role of the distinguished `0_X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Alphabet {
    Finite(u32),
    Countable,
}

impl Alphabet {
    pub const BINARY: Alphabet = Alphabet::Finite(2);

    pub fn contains(&self, letter: Letter) -> bool {
        match self {
            Alphabet::Finite(k) => letter < *k,
            Alphabet::Countable => true,
        }
    }

    pub fn size(&self) -> Option<u32> {
        match self {
            Alphabet::Finite(k) => Some(*k),
            Alphabet::Countable => None,
        }
    }

    pub fn check_letter(&self, letter: Letter) -> Result<()> {
        if self.contains(letter) {
            Ok(())
        } else {
            Err(Error::InvalidLetter {
                letter,
                alphabet: *self,
            })
        }
    }

    pub fn check_word(&self, word: &Word) -> Result<()> {
        word.iter().try_for_each(|&l| self.check_letter(l))
    }

    pub fn check_point(&self, point: &Point) -> Result<()> {
        self.check_word(&point.stem)?;
        self.check_letter(point.tail)
    }

    /// All words of length exactly `n`, in lexicographic order.
    pub fn words_of_length(&self, n: usize) -> Result<Vec<Word>> {
        let k = self.size().ok_or(Error::NotFinite(*self))?;
        let mut level = vec![Word::empty()];
        for _ in 0..n {
            level = level
                .iter()
                .flat_map(|w| (0..k).map(move |l| w.child(l)))
                .collect();
        }
        Ok(level)
    }

    /// All words of length at most `n`, shortest first.
    pub fn words_up_to(&self, n: usize) -> Result<Vec<Word>> {
        let mut out = Vec::new();
        for j in 0..=n {
            out.extend(self.words_of_length(j)?);
        }
        Ok(out)
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alphabet::Finite(k) => write!(f, "{k}"),
            Alphabet::Countable => write!(f, "ω"),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlphabetRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    finite: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    countable: Option<bool>,
}

impl Serialize for Alphabet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match self {
            Alphabet::Finite(k) => AlphabetRepr {
                finite: Some(*k),
                countable: None,
            },
            Alphabet::Countable => AlphabetRepr {
                finite: None,
                countable: Some(true),
            },
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Alphabet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match AlphabetRepr::deserialize(deserializer)? {
            AlphabetRepr {
                finite: Some(k),
                countable: None,
            } if k > 0 => Ok(Alphabet::Finite(k)),
            AlphabetRepr {
                finite: None,
                countable: Some(true),
            } => Ok(Alphabet::Countable),
            _ => Err(D::Error::custom(
                "alphabet must be {\"finite\": k} with k > 0 or {\"countable\": true}",
            )),
        }
    }
}

/// A finite sequence of letters.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Letter> {
        self.0.iter()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    /// `self ◁ other`, non-strict.
    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    /// Neither word is a prefix of the other.
    pub fn incomparable(&self, other: &Word) -> bool {
        !self.is_prefix_of(other) && !other.is_prefix_of(self)
    }

    pub fn truncate(&self, n: usize) -> Word {
        Word(self.0[..n.min(self.len())].to_vec())
    }

    pub fn parent(&self) -> Option<Word> {
        (!self.is_empty()).then(|| self.truncate(self.len() - 1))
    }

    pub fn child(&self, letter: Letter) -> Word {
        let mut letters = self.0.clone();
        letters.push(letter);
        Word(letters)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    /// Every prefix including the empty word and `self`, shortest first.
    pub fn prefixes(&self) -> impl Iterator<Item = Word> + '_ {
        (0..=self.len()).map(move |n| self.truncate(n))
    }

    /// Shortlex order: shorter words first, ties broken lexicographically.
    pub fn shortlex_cmp(&self, other: &Word) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl From<Vec<Letter>> for Word {
    fn from(letters: Vec<Letter>) -> Self {
        Word(letters)
    }
}

impl<const N: usize> From<[Letter; N]> for Word {
    fn from(letters: [Letter; N]) -> Self {
        Word(letters.to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "]")
    }
}

/// Longest common prefix.
pub fn word_meet(u: &Word, v: &Word) -> Word {
    let n = u.iter().zip(v.iter()).take_while(|(a, b)| a == b).count();
    u.truncate(n)
}

/// An eventually constant element of `X^ω`: `stem` followed by `tail` forever.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "PointRepr")]
pub struct Point {
    stem: Word,
    tail: Letter,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PointRepr {
    stem: Word,
    tail: Letter,
}

impl From<PointRepr> for Point {
    fn from(repr: PointRepr) -> Self {
        Point::new(repr.stem, repr.tail)
    }
}

impl Point {
    /// Builds the canonical representation, stripping trailing copies of `tail`
    /// from the stem.
    pub fn new(stem: impl Into<Word>, tail: Letter) -> Self {
        let mut letters = stem.into().0;
        while letters.last() == Some(&tail) {
            letters.pop();
        }
        Point {
            stem: Word(letters),
            tail,
        }
    }

    pub fn constant(letter: Letter) -> Self {
        Point::new(Word::empty(), letter)
    }

    pub fn stem(&self) -> &Word {
        &self.stem
    }

    pub fn tail(&self) -> Letter {
        self.tail
    }

    /// The letter at index `i` of the expansion.
    pub fn at(&self, i: usize) -> Letter {
        self.stem.0.get(i).copied().unwrap_or(self.tail)
    }

    /// `x ↾ n`.
    pub fn prefix(&self, n: usize) -> Word {
        Word((0..n).map(|i| self.at(i)).collect())
    }

    /// `s⌢x`.
    pub fn prepend(&self, s: &Word) -> Point {
        Point::new(s.concat(&self.stem), self.tail)
    }

    /// Applies a letter map index by index; `f(i, letter)` must send the tail
    /// letter to one value for all `i ≥ stable_from`.
    pub(crate) fn map_letters(
        &self,
        stable_from: usize,
        f: impl Fn(usize, Letter) -> Letter,
    ) -> Point {
        let len = self.stem.len().max(stable_from);
        let stem: Vec<Letter> = (0..len).map(|i| f(i, self.at(i))).collect();
        Point::new(stem, f(len, self.tail))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})^ω", self.stem, self.tail)
    }
}

/// `d(x, y)` on a log scale. `Exponent(k)` stands for `2^{-k}`: the points first
/// differ at index `k`.
///
/// The derived order is by agreement length, so a larger value means the
/// points are closer and `Infinite` (equal points) is the maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogDistance {
    Exponent(usize),
    Infinite,
}

impl LogDistance {
    pub fn exponent(&self) -> Option<usize> {
        match self {
            LogDistance::Exponent(k) => Some(*k),
            LogDistance::Infinite => None,
        }
    }
}

impl fmt::Display for LogDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogDistance::Exponent(k) => write!(f, "2^-{k}"),
            LogDistance::Infinite => write!(f, "0"),
        }
    }
}

pub fn distance(x: &Point, y: &Point) -> LogDistance {
    // Past index max(|stem|) both expansions are constant, so one extra
    // comparison settles equality.
    let horizon = x.stem.len().max(y.stem.len());
    (0..=horizon)
        .find(|&i| x.at(i) != y.at(i))
        .map_or(LogDistance::Infinite, LogDistance::Exponent)
}

/// Whether `x ∈ [s]`.
pub fn in_basic_open(s: &Word, x: &Point) -> bool {
    s.iter().enumerate().all(|(i, &l)| x.at(i) == l)
}

/// A downward closed set of words.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordTree {
    nodes: BTreeSet<Word>,
}

impl WordTree {
    pub fn new() -> Self {
        WordTree::default()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.nodes.contains(w)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Word> {
        self.nodes.iter()
    }

    /// Adds `w` and all of its prefixes.
    pub fn insert(&mut self, w: &Word) {
        for n in (0..=w.len()).rev() {
            if !self.nodes.insert(w.truncate(n)) {
                break;
            }
        }
    }

    /// Length of the longest member, `None` for the empty tree.
    pub fn height(&self) -> Option<usize> {
        self.nodes.iter().map(Word::len).max()
    }

    pub fn level(&self, n: usize) -> impl Iterator<Item = &Word> {
        self.nodes.iter().filter(move |w| w.len() == n)
    }

    pub fn is_downward_closed(&self) -> bool {
        self.nodes
            .iter()
            .all(|w| w.parent().is_none_or(|p| self.nodes.contains(&p)))
    }

    /// Members with an extension of length `n` inside the tree.
    pub fn prune_to_depth(&self, n: usize) -> WordTree {
        tree_from_words(self.level(n))
    }

    pub fn children<'a>(&'a self, w: &'a Word) -> impl Iterator<Item = &'a Word> + 'a {
        self.nodes
            .range(w.clone()..)
            .take_while(move |v| w.is_prefix_of(v))
            .filter(move |v| v.len() == w.len() + 1)
    }
}

/// Downward closure of `words`.
pub fn tree_from_words<'a>(words: impl IntoIterator<Item = &'a Word>) -> WordTree {
    let mut tree = WordTree::new();
    for w in words {
        tree.insert(w);
    }
    tree
}

/// Level-`n` words of the tree pruned to depth `n`.
pub fn branches_to_depth(tree: &WordTree, n: usize) -> BTreeSet<Word> {
    tree.prune_to_depth(n).level(n).cloned().collect()
}

impl FromIterator<Word> for WordTree {
    fn from_iter<I: IntoIterator<Item = Word>>(iter: I) -> Self {
        let mut tree = WordTree::new();
        for w in iter {
            tree.insert(&w);
        }
        tree
    }
}

impl Serialize for WordTree {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut words: Vec<&Word> = self.nodes.iter().collect();
        words.sort_by(|a, b| a.shortlex_cmp(b));
        words.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for WordTree {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        Ok(Vec::<Word>::deserialize(deserializer)?.into_iter().collect())
    }
}
