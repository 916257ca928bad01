//! Slaloms, capture, and width-bounded trees.
//!
//! A slalom assigns a finite set of letters to each index. It captures a
//! sequence totally when every letter lands in its set, and eventually when
//! that holds from some index on. All checks run to a finite depth.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lipschitz::TreeHom;
use crate::prefix::{Letter, Point, Word, WordTree};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Slalom {
    levels: Vec<BTreeSet<Letter>>,
}

impl Slalom {
    pub fn new(levels: Vec<BTreeSet<Letter>>) -> Self {
        Slalom { levels }
    }

    pub fn empty(depth: usize) -> Self {
        Slalom {
            levels: vec![BTreeSet::new(); depth],
        }
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, n: usize) -> &BTreeSet<Letter> {
        &self.levels[n]
    }

    pub fn levels(&self) -> &[BTreeSet<Letter>] {
        &self.levels
    }

    pub fn widths(&self) -> Vec<usize> {
        self.levels.iter().map(BTreeSet::len).collect()
    }
}

/// A bound `n ↦ h(n)` on level sizes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WidthProfile {
    /// `2^{n+1}`.
    #[serde(rename = "pow2plus1")]
    PowTwoPlusOne,
    /// `n·2^{n+1}`.
    #[serde(rename = "npow2")]
    NTimesPowTwo,
    /// `max(1, ⌈log₂(n+2)⌉)`, a slowly growing corset.
    #[serde(rename = "ceillog2")]
    CeilLog2,
    /// Explicit values; the last one repeats past the end.
    Table { values: Vec<u64> },
}

impl WidthProfile {
    pub fn at(&self, n: usize) -> u128 {
        match self {
            WidthProfile::PowTwoPlusOne => pow2(n + 1),
            WidthProfile::NTimesPowTwo => (n as u128).saturating_mul(pow2(n + 1)),
            WidthProfile::CeilLog2 => {
                // smallest e with 2^e ≥ n + 2
                let m = (n + 2) as u128;
                let e = 128 - (m - 1).leading_zeros() as u128;
                e.max(1)
            }
            WidthProfile::Table { values } => values
                .get(n)
                .or(values.last())
                .map_or(0, |&v| v as u128),
        }
    }

    /// Positive and nondecreasing on `0..=horizon`, the checkable part of the
    /// corset conditions.
    pub fn is_corset_to(&self, horizon: usize) -> bool {
        (0..=horizon).all(|n| self.at(n) >= 1 && (n == 0 || self.at(n - 1) <= self.at(n)))
    }
}

fn pow2(e: usize) -> u128 {
    if e >= 128 {
        u128::MAX
    } else {
        1u128 << e
    }
}

pub fn slalom_width_ok(phi: &Slalom, h: &WidthProfile) -> bool {
    phi.levels
        .iter()
        .enumerate()
        .all(|(n, set)| set.len() as u128 <= h.at(n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaptureMode {
    Total,
    Eventual,
}

/// Capture of the finite sequence `letters` on indices below `depth`.
pub fn captures_letters(phi: &Slalom, letters: &[Letter], depth: usize, mode: CaptureMode) -> bool {
    let depth = depth.min(phi.depth()).min(letters.len());
    let hit = |n: usize| phi.levels[n].contains(&letters[n]);
    match mode {
        CaptureMode::Total => (0..depth).all(hit),
        // The last index must hit; the suffix of hits then starts somewhere below depth.
        CaptureMode::Eventual => depth > 0 && hit(depth - 1),
    }
}

/// Capture of `x ↾ depth` where `depth` is the slalom's depth.
pub fn captures(phi: &Slalom, x: &Point, mode: CaptureMode) -> bool {
    let prefix = x.prefix(phi.depth());
    captures_letters(phi, prefix.letters(), phi.depth(), mode)
}

/// Points of `[s]` whose letters past `|s|` stay below `bound`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SampleRepr")]
pub struct BoundedDenseSample {
    s: Word,
    points: Vec<Point>,
    #[serde(default = "default_bound")]
    bound: Letter,
}

fn default_bound() -> Letter {
    2
}

#[derive(Deserialize)]
struct SampleRepr {
    s: Word,
    points: Vec<Point>,
    #[serde(default = "default_bound")]
    bound: Letter,
}

impl TryFrom<SampleRepr> for BoundedDenseSample {
    type Error = Error;

    fn try_from(r: SampleRepr) -> Result<Self> {
        BoundedDenseSample::with_bound(r.s, r.points, r.bound)
    }
}

impl BoundedDenseSample {
    pub fn new(s: Word, points: Vec<Point>) -> Result<Self> {
        Self::with_bound(s, points, default_bound())
    }

    pub fn with_bound(s: Word, points: Vec<Point>, bound: Letter) -> Result<Self> {
        for p in &points {
            if !crate::prefix::in_basic_open(&s, p) {
                return Err(Error::Precondition(format!("{p} does not extend {s}")));
            }
            let tail = p.tail();
            let mut beyond = p.stem().iter().skip(s.len()).copied().chain(std::iter::once(tail));
            if let Some(l) = beyond.find(|&l| l >= bound) {
                return Err(Error::Precondition(format!(
                    "{p} has letter {l} ≥ {bound} past index {}",
                    s.len()
                )));
            }
        }
        Ok(BoundedDenseSample { s, points, bound })
    }

    pub fn s(&self) -> &Word {
        &self.s
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn bound(&self) -> Letter {
        self.bound
    }
}

/// `φ_s(n) = { h(x ↾ depth)(n) : x ∈ sample }` for `n < depth`.
pub fn slalom_from_hom(h: &TreeHom, sample: &BoundedDenseSample, depth: usize) -> Result<Slalom> {
    let mut phi = Slalom::empty(depth);
    for x in &sample.points {
        let image = h.apply(&x.prefix(depth))?;
        for (n, &l) in image.iter().enumerate() {
            phi.levels[n].insert(l);
        }
    }
    Ok(phi)
}

/// Most letters the construction can put on level `n` for a sample over `s`
/// with the given bound: `bound^{n+1−|s|}` past `|s|`, one below it.
pub fn sample_width_bound(s_len: usize, bound: Letter, n: usize) -> u128 {
    if n < s_len {
        1
    } else {
        (bound as u128).saturating_pow((n + 1 - s_len) as u32)
    }
}

/// `φ(n) = ⋃_{i<n} φ_{s_i}(n)` with the `s_i` in shortlex order. The result
/// has the smallest depth among the inputs.
pub fn merge_slaloms(slaloms: &[(Word, Slalom)]) -> Slalom {
    let mut ordered: Vec<&(Word, Slalom)> = slaloms.iter().collect();
    ordered.sort_by(|a, b| a.0.shortlex_cmp(&b.0));
    let depth = ordered.iter().map(|(_, s)| s.depth()).min().unwrap_or(0);
    let mut merged = Slalom::empty(depth);
    for (n, level) in merged.levels.iter_mut().enumerate() {
        for (_, phi) in ordered.iter().take(n) {
            level.extend(phi.levels[n].iter().copied());
        }
    }
    merged
}

/// `|T ∩ X^n|` for `n` up to the height.
pub fn tree_width(tree: &WordTree) -> Vec<usize> {
    let Some(height) = tree.height() else {
        return Vec::new();
    };
    let mut counts = vec![0; height + 1];
    for w in tree.nodes() {
        counts[w.len()] += 1;
    }
    counts
}

/// Per-level verdicts of `|T ∩ X^n| ≤ c(n)`.
pub fn width_check(tree: &WordTree, c: &WidthProfile) -> Vec<bool> {
    tree_width(tree)
        .iter()
        .enumerate()
        .map(|(n, &count)| count as u128 <= c.at(n))
        .collect()
}

pub fn has_width(tree: &WordTree, c: &WidthProfile) -> bool {
    width_check(tree, c).into_iter().all(|ok| ok)
}

/// `{h(s) : s ∈ T}`.
pub fn hom_image_tree(h: &TreeHom, tree: &WordTree) -> Result<WordTree> {
    tree.nodes().map(|s| h.apply(s)).collect()
}

/// Whether some tree holds `x ↾ n` for every `n ≤ depth`.
pub fn covered_by(x: &Point, trees: &[WordTree], depth: usize) -> bool {
    let prefix = x.prefix(depth);
    // downward closure makes the longest prefix decisive
    trees.iter().any(|t| t.contains(&prefix))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lipschitz::LetterMap;
    use crate::prefix::{tree_from_words, Alphabet};

    fn w<const N: usize>(letters: [Letter; N]) -> Word {
        Word::from(letters)
    }

    fn slalom(levels: &[&[Letter]]) -> Slalom {
        Slalom::new(levels.iter().map(|l| l.iter().copied().collect()).collect())
    }

    #[test]
    fn profiles() {
        let h = WidthProfile::PowTwoPlusOne;
        assert_eq!((0..4).map(|n| h.at(n)).collect::<Vec<_>>(), vec![2, 4, 8, 16]);
        let h = WidthProfile::NTimesPowTwo;
        assert_eq!((0..4).map(|n| h.at(n)).collect::<Vec<_>>(), vec![0, 4, 16, 48]);
        let c = WidthProfile::CeilLog2;
        // ⌈log₂ 2⌉ = 1, ⌈log₂ 3⌉ = 2, ⌈log₂ 4⌉ = 2, ⌈log₂ 5⌉ = 3, …, ⌈log₂ 10⌉ = 4
        assert_eq!(
            (0..9).map(|n| c.at(n)).collect::<Vec<_>>(),
            vec![1, 2, 2, 3, 3, 3, 3, 4, 4]
        );
        assert!(c.is_corset_to(100));
        assert!(!WidthProfile::Table { values: vec![2, 1] }.is_corset_to(3));
    }

    #[test]
    fn width_examples() {
        let ones = slalom(&[&[0], &[0], &[0]]);
        assert!(slalom_width_ok(&ones, &WidthProfile::PowTwoPlusOne));
        let fat = slalom(&[&[0, 1, 2]]);
        assert!(!slalom_width_ok(&fat, &WidthProfile::PowTwoPlusOne));
    }

    #[test]
    fn capture_examples() {
        let zeros = slalom(&[&[0], &[0, 1], &[0]]);
        let x = Point::constant(0);
        assert!(captures(&zeros, &x, CaptureMode::Total));
        assert!(captures(&zeros, &x, CaptureMode::Eventual));

        let late = slalom(&[&[1], &[0], &[0]]);
        assert!(!captures(&late, &x, CaptureMode::Total));
        assert!(captures(&late, &x, CaptureMode::Eventual));

        let hole = slalom(&[&[0], &[0], &[]]);
        assert!(!captures(&hole, &x, CaptureMode::Total));
        assert!(!captures(&hole, &x, CaptureMode::Eventual));
    }

    #[test]
    fn identity_slalom_on_full_binary_sample() {
        let pts: Vec<Point> = Alphabet::BINARY
            .words_of_length(3)
            .unwrap()
            .into_iter()
            .map(|w| Point::new(w, 0))
            .collect();
        let sample = BoundedDenseSample::new(Word::empty(), pts).unwrap();
        let phi = slalom_from_hom(&TreeHom::identity(Alphabet::Countable), &sample, 3).unwrap();
        assert_eq!(phi.widths(), vec![2, 2, 2]);
        assert!(slalom_width_ok(&phi, &WidthProfile::PowTwoPlusOne));
    }

    #[test]
    fn singleton_sample_gives_singletons() {
        let sample = BoundedDenseSample::new(w([5]), vec![Point::new(w([5, 1, 0, 1]), 0)]).unwrap();
        let h = TreeHom::relabel(Alphabet::Countable, Alphabet::Countable, vec![], LetterMap::Shift(4)).unwrap();
        let phi = slalom_from_hom(&h, &sample, 6).unwrap();
        assert!(phi.widths().iter().all(|&n| n == 1));
    }

    #[test]
    fn sample_bound_is_checked() {
        assert!(BoundedDenseSample::new(w([7]), vec![Point::new(w([7, 2]), 0)]).is_err());
        assert!(BoundedDenseSample::new(w([7]), vec![Point::new(w([6]), 0)]).is_err());
        assert!(BoundedDenseSample::new(w([7]), vec![Point::new(w([7]), 3)]).is_err());
        assert!(BoundedDenseSample::with_bound(w([7]), vec![Point::new(w([7, 2]), 0)], 3).is_ok());
    }

    #[test]
    fn merge_examples() {
        let phi = slalom(&[&[1], &[2], &[3]]);
        let merged = merge_slaloms(&[(Word::empty(), phi.clone())]);
        assert!(merged.level(0).is_empty());
        assert_eq!(merged.level(1), phi.level(1));
        assert_eq!(merged.level(2), phi.level(2));

        let merged = merge_slaloms(&[(w([0]), phi.clone()), (w([1]), phi.clone())]);
        assert_eq!(merged.level(2), phi.level(2));

        // shortlex order decides which slaloms contribute to level 1
        let a = slalom(&[&[0], &[10], &[20]]);
        let b = slalom(&[&[0], &[11], &[21]]);
        let merged = merge_slaloms(&[(w([0, 0]), b), (w([3]), a)]);
        assert_eq!(merged.level(1), &[10].into_iter().collect());
        assert_eq!(merged.level(2), &[20, 21].into_iter().collect());
    }

    #[test]
    fn tree_width_examples() {
        let full: WordTree = Alphabet::BINARY.words_up_to(3).unwrap().into_iter().collect();
        assert_eq!(tree_width(&full), vec![1, 2, 4, 8]);
        let path = tree_from_words([&w([1, 0, 1, 1])]);
        assert_eq!(tree_width(&path), vec![1; 5]);
        assert!(has_width(&path, &WidthProfile::CeilLog2));
        let t = tree_from_words([&w([0, 0]), &w([1, 1])]);
        assert_eq!(tree_width(&t), vec![1, 2, 2]);
        assert_eq!(width_check(&t, &WidthProfile::Table { values: vec![1, 1, 2] }), vec![true, false, true]);
    }

    #[test]
    fn image_tree_examples() {
        let t = tree_from_words([&w([0, 0]), &w([1, 1]), &w([1, 0, 1])]);
        let id = TreeHom::identity(Alphabet::BINARY);
        assert_eq!(hom_image_tree(&id, &t).unwrap(), t);
        let collapse = TreeHom::relabel(
            Alphabet::BINARY,
            Alphabet::BINARY,
            vec![],
            LetterMap::Explicit([(1, 0)].into_iter().collect()),
        )
        .unwrap();
        let image = hom_image_tree(&collapse, &t).unwrap();
        assert_eq!(tree_width(&image), vec![1, 1, 1, 1]);
    }

    #[test]
    fn covered_examples() {
        let t = tree_from_words([&w([0, 1, 1])]);
        let x = Point::new(w([0, 1, 1]), 0);
        assert!(covered_by(&x, std::slice::from_ref(&t), 3));
        assert!(!covered_by(&x, std::slice::from_ref(&t), 4));
        assert!(!covered_by(&x, &[], 0));
        let y = Point::new(w([0, 1, 0]), 0);
        assert!(!covered_by(&y, &[t], 3));
    }

    #[test]
    fn slalom_json() {
        let phi = slalom(&[&[0, 1], &[]]);
        assert_eq!(serde_json::to_string(&phi).unwrap(), "[[0,1],[]]");
        assert_eq!(
            serde_json::to_string(&WidthProfile::NTimesPowTwo).unwrap(),
            r#"{"kind":"npow2"}"#
        );
        let t: WidthProfile = serde_json::from_str(r#"{"kind":"table","values":[1,2]}"#).unwrap();
        assert_eq!(t.at(5), 2);
    }
}
