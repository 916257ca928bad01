//! Odd and even families: two dense sets no two-point piece of which maps
//! isometrically into the other.
//!
//! A point of an odd cell `O_s` is nonzero past `|s|` only at odd indices, so
//! two such points first differ at an odd index. Even cells give even first
//! differences, and an isometry would have to preserve that index.

use std::collections::BTreeMap;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gen::{stream_rng, Stream};
use crate::lipschitz::{PartialMap, Verdict};
use crate::prefix::{distance, in_basic_open, Alphabet, Letter, LogDistance, Point, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    pub fn of(k: usize) -> Parity {
        if k % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    pub fn opposite(self) -> Parity {
        match self {
            Parity::Odd => Parity::Even,
            Parity::Even => Parity::Odd,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub s: Word,
    pub points: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityFamily {
    pub kind: Parity,
    pub cells: Vec<Cell>,
}

/// Generation knobs. Letters past the cell word are drawn below `palette`
/// and only at indices below `depth_budget`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilySpec {
    pub alphabet: Alphabet,
    pub depth_budget: usize,
    pub palette: u32,
}

impl FamilySpec {
    /// Palette is the whole alphabet when finite, ten letters over `ω`.
    pub fn new(alphabet: Alphabet, depth_budget: usize) -> Self {
        FamilySpec {
            alphabet,
            depth_budget,
            palette: alphabet.size().unwrap_or(10),
        }
    }

    /// Free indices of a cell: those in `|s|..depth_budget` of the right parity.
    fn free_indices(&self, kind: Parity, s_len: usize) -> Vec<usize> {
        (s_len..self.depth_budget)
            .filter(|&k| Parity::of(k) == kind)
            .collect()
    }

    /// Number of distinct points a cell can hold: `palette^{free indices}`.
    pub fn capacity(&self, kind: Parity, s_len: usize) -> u128 {
        let free = self.free_indices(kind, s_len).len() as u32;
        (self.palette as u128).checked_pow(free).unwrap_or(u128::MAX)
    }
}

/// Decodes pattern number `code` (base `palette`) into the free indices.
fn pattern_point(s: &Word, free: &[usize], palette: u32, mut code: u128) -> Point {
    let len = free.last().map_or(s.len(), |&k| k + 1);
    let mut letters = s.letters().to_vec();
    letters.resize(len, 0);
    for &k in free {
        letters[k] = (code % palette as u128) as Letter;
        code /= palette as u128;
    }
    Point::new(letters, 0)
}

/// A family with `per_cell` distinct points in each `[s]`, eventually 0,
/// deterministic in `seed`.
pub fn gen_family(
    kind: Parity,
    cell_words: &[Word],
    per_cell: usize,
    spec: FamilySpec,
    seed: u64,
) -> Result<ParityFamily> {
    if per_cell == 0 {
        return Err(Error::Precondition("per_cell must be at least 1".into()));
    }
    if spec.palette == 0 || !spec.alphabet.contains(spec.palette - 1) {
        return Err(Error::Precondition(format!(
            "palette {} does not fit alphabet {}",
            spec.palette, spec.alphabet
        )));
    }
    let mut rng = stream_rng(seed, Stream::Families);
    let mut cells = Vec::with_capacity(cell_words.len());
    for s in cell_words {
        spec.alphabet.check_word(s)?;
        let capacity = spec.capacity(kind, s.len());
        if (per_cell as u128) > capacity {
            return Err(Error::CellTooSmall {
                cell: s.clone(),
                requested: per_cell,
                available: capacity,
            });
        }
        let free = spec.free_indices(kind, s.len());
        let points = if capacity <= usize::MAX as u128 {
            index::sample(&mut rng, capacity as usize, per_cell)
                .into_iter()
                .map(|code| pattern_point(s, &free, spec.palette, code as u128))
                .collect()
        } else {
            // Too many patterns to index with usize: draw and reject repeats.
            let mut seen = std::collections::BTreeSet::new();
            let mut out = Vec::with_capacity(per_cell);
            while out.len() < per_cell {
                let code = rng.gen::<u128>() % capacity;
                if seen.insert(code) {
                    out.push(pattern_point(s, &free, spec.palette, code));
                }
            }
            out
        };
        cells.push(Cell {
            s: s.clone(),
            points,
        });
    }
    Ok(ParityFamily { kind, cells })
}

/// Every point of every cell extends its word and is zero at indices of the
/// wrong parity past it. Returns the first offending point.
pub fn check_parity_invariant(family: &ParityFamily) -> Option<(Word, Point)> {
    for cell in &family.cells {
        for p in &cell.points {
            let horizon = p.stem().len().max(cell.s.len()) + 1;
            let ok = in_basic_open(&cell.s, p)
                && (cell.s.len()..horizon).all(|k| p.at(k) == 0 || Parity::of(k) == family.kind);
            if !ok {
                return Some((cell.s.clone(), p.clone()));
            }
        }
    }
    None
}

pub fn first_diff_parity(x: &Point, y: &Point) -> Result<Parity> {
    match distance(x, y) {
        LogDistance::Infinite => Err(Error::EqualPoints),
        LogDistance::Exponent(k) => Ok(Parity::of(k)),
    }
}

/// Two-point maps `{x ↦ u, y ↦ v}` with `x, y` in one source cell and `u, v`
/// in one target cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub pairs_checked: u128,
    pub isometric_pairs: u128,
    pub witness: Option<PartialMap>,
}

impl Certificate {
    pub fn holds(&self) -> bool {
        self.isometric_pairs == 0
    }
}

/// Within-cell pairs of a family grouped by first difference.
fn distance_histogram(family: &ParityFamily) -> BTreeMap<usize, Vec<(Point, Point)>> {
    let mut hist: BTreeMap<usize, Vec<(Point, Point)>> = BTreeMap::new();
    for cell in &family.cells {
        for (i, x) in cell.points.iter().enumerate() {
            for y in &cell.points[i + 1..] {
                if let LogDistance::Exponent(k) = distance(x, y) {
                    let bucket = hist.entry(k).or_default();
                    // only one representative is needed for a witness
                    if bucket.is_empty() {
                        bucket.push((x.clone(), y.clone()));
                    }
                }
            }
        }
    }
    hist
}

fn pair_counts(family: &ParityFamily) -> BTreeMap<usize, u128> {
    let mut counts = BTreeMap::new();
    for cell in &family.cells {
        for (i, x) in cell.points.iter().enumerate() {
            for y in &cell.points[i + 1..] {
                if let LogDistance::Exponent(k) = distance(x, y) {
                    *counts.entry(k).or_insert(0u128) += 1;
                }
            }
        }
    }
    counts
}

/// Counts two-point maps from within-cell pairs of `src` to ordered
/// within-cell pairs of `dst` that pass the isometry check.
///
/// A two-point map is isometric exactly when both pairs have the same first
/// difference, so the count is a product of per-distance pair counts.
pub fn certify_no_isometry(src: &ParityFamily, dst: &ParityFamily) -> Result<Certificate> {
    if src.kind == dst.kind {
        return Err(Error::Precondition("families must have opposite kinds".into()));
    }
    if let Some(cell) = src.cells.iter().find(|c| c.points.len() < 2) {
        return Err(Error::Precondition(format!(
            "source cell {} has fewer than two points",
            cell.s
        )));
    }
    let src_counts = pair_counts(src);
    let dst_counts = pair_counts(dst);
    let src_total: u128 = src_counts.values().sum();
    let dst_total: u128 = dst_counts.values().sum();
    let isometric: u128 = src_counts
        .iter()
        .map(|(k, n)| n * dst_counts.get(k).copied().unwrap_or(0) * 2)
        .sum();
    let witness = if isometric > 0 {
        let src_hist = distance_histogram(src);
        let dst_hist = distance_histogram(dst);
        src_hist.iter().find_map(|(k, pairs)| {
            let (u, v) = dst_hist.get(k)?.first()?;
            let (x, y) = pairs.first()?;
            let map = PartialMap::from_pairs([(x.clone(), u.clone()), (y.clone(), v.clone())]).ok()?;
            debug_assert_eq!(crate::lipschitz::check_isometry(&map), Verdict::Ok);
            Some(map)
        })
    } else {
        None
    };
    Ok(Certificate {
        pairs_checked: src_total * dst_total * 2,
        isometric_pairs: isometric,
        witness,
    })
}

/// All words of length at most `n` over the first `letters` letters.
pub fn cell_words_up_to(letters: u32, n: usize) -> Vec<Word> {
    Alphabet::Finite(letters).words_up_to(n).expect("finite alphabet")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lipschitz::check_isometry;

    fn w<const N: usize>(letters: [Letter; N]) -> Word {
        Word::from(letters)
    }

    fn spec() -> FamilySpec {
        FamilySpec::new(Alphabet::BINARY, 20)
    }

    #[test]
    fn odd_root_cell() {
        let fam = gen_family(Parity::Odd, &[Word::empty()], 2, spec(), 1).unwrap();
        let pts = &fam.cells[0].points;
        assert_eq!(pts.len(), 2);
        for p in pts {
            assert_eq!(p.tail(), 0);
            for k in 0..30 {
                assert!(p.at(k) == 0 || k % 2 == 1, "{p} nonzero at {k}");
            }
        }
        assert!(check_parity_invariant(&fam).is_none());
    }

    #[test]
    fn even_cell_extends_word() {
        let fam = gen_family(Parity::Even, &[w([1])], 1, spec(), 2).unwrap();
        let p = &fam.cells[0].points[0];
        assert!(in_basic_open(&w([1]), p));
        for k in 1..30 {
            assert!(p.at(k) == 0 || k % 2 == 0);
        }
    }

    #[test]
    fn capacity_counts_odd_patterns() {
        // odd indices below 20: 1, 3, …, 19
        let odd: Vec<usize> = (0..20).filter(|k| k % 2 == 1).collect();
        assert_eq!(odd.len(), 10);
        assert_eq!(spec().capacity(Parity::Odd, 0), 1 << odd.len());
        let fam = gen_family(Parity::Odd, &[Word::empty()], 300, spec(), 3).unwrap();
        assert_eq!(fam.cells[0].points.len(), 300);
        let err = gen_family(Parity::Odd, &[Word::empty()], 1025, spec(), 3).unwrap_err();
        assert!(matches!(err, Error::CellTooSmall { available: 1024, .. }));
        let unary = FamilySpec::new(Alphabet::Finite(1), 20);
        assert!(gen_family(Parity::Odd, &[Word::empty()], 2, unary, 3).is_err());
        assert!(gen_family(Parity::Odd, &[Word::empty()], 0, spec(), 3).is_err());
    }

    #[test]
    fn generation_is_deterministic() {
        let cells = cell_words_up_to(2, 2);
        let a = gen_family(Parity::Even, &cells, 5, spec(), 9).unwrap();
        let b = gen_family(Parity::Even, &cells, 5, spec(), 9).unwrap();
        let c = gen_family(Parity::Even, &cells, 5, spec(), 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn first_diff_examples() {
        assert_eq!(
            first_diff_parity(&Point::new(w([0, 5]), 0), &Point::new(w([0, 6]), 0)).unwrap(),
            Parity::Odd
        );
        assert_eq!(
            first_diff_parity(&Point::constant(0), &Point::constant(0)),
            Err(Error::EqualPoints)
        );
        let cells = cell_words_up_to(2, 2);
        for kind in [Parity::Odd, Parity::Even] {
            let fam = gen_family(kind, &cells, 8, spec(), 4).unwrap();
            for cell in &fam.cells {
                for x in &cell.points {
                    for y in &cell.points {
                        if x != y {
                            assert_eq!(first_diff_parity(x, y).unwrap(), kind);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn certificate_matches_brute_force() {
        let cells = cell_words_up_to(2, 1);
        let odd = gen_family(Parity::Odd, &cells, 6, spec(), 5).unwrap();
        let even = gen_family(Parity::Even, &cells, 6, spec(), 6).unwrap();
        let cert = certify_no_isometry(&odd, &even).unwrap();

        let mut checked = 0u128;
        let mut isometric = 0u128;
        for sc in &odd.cells {
            for (i, x) in sc.points.iter().enumerate() {
                for y in &sc.points[i + 1..] {
                    for dc in &even.cells {
                        for u in &dc.points {
                            for v in &dc.points {
                                if u == v {
                                    continue;
                                }
                                checked += 1;
                                let m = PartialMap::from_pairs([(x.clone(), u.clone()), (y.clone(), v.clone())])
                                    .unwrap();
                                if check_isometry(&m).is_ok() {
                                    isometric += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
        assert_eq!(cert.pairs_checked, checked);
        assert_eq!(cert.isometric_pairs, isometric);
        assert_eq!(isometric, 0);
        assert!(cert.witness.is_none());
    }

    #[test]
    fn same_kind_families_do_match() {
        // sanity check of the counting: two odd families share first differences
        let cells = cell_words_up_to(2, 1);
        let a = gen_family(Parity::Odd, &cells, 6, spec(), 5).unwrap();
        let mut b = gen_family(Parity::Odd, &cells, 6, spec(), 6).unwrap();
        b.kind = Parity::Even;
        let cert = certify_no_isometry(&a, &b).unwrap();
        assert!(cert.isometric_pairs > 0);
        let m = cert.witness.unwrap();
        assert!(check_isometry(&m).is_ok());
    }

    #[test]
    fn certify_preconditions() {
        let odd = gen_family(Parity::Odd, &[Word::empty()], 1, spec(), 5).unwrap();
        let even = gen_family(Parity::Even, &[Word::empty()], 3, spec(), 5).unwrap();
        assert!(certify_no_isometry(&odd, &even).is_err());
        assert!(certify_no_isometry(&even, &even).is_err());
    }

    #[test]
    fn family_json() {
        let fam = gen_family(Parity::Odd, &[w([1])], 1, spec(), 5).unwrap();
        let v = serde_json::to_value(&fam).unwrap();
        assert_eq!(v["kind"], "odd");
        assert_eq!(v["cells"][0]["s"], serde_json::json!([1]));
        let back: ParityFamily = serde_json::from_value(v).unwrap();
        assert_eq!(back, fam);
    }
}
