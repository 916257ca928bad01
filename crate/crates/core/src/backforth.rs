//! Back-and-forth construction of a partial isometry between two countable
//! dense sets, one scheduled point per direction per step.
//!
//! Each extension picks the partner with the "maximally good" rule: let `k` be
//! the longest agreement of the new point with the current domain. The partner
//! copies the common image prefix of all domain points agreeing to depth `k`
//! and then takes a letter at index `k` that none of their images use.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, OracleError, Result};
use crate::lipschitz::{check_new_pair, PartialMap, Property, Verdict};
use crate::prefix::{distance, in_basic_open, Alphabet, Letter, LogDistance, Point, Word};

/// A countable dense set given by an enumeration and a density witness.
pub trait DenseOracle {
    fn alphabet(&self) -> Alphabet;

    /// The `i`-th point; must never repeat.
    fn enumerate(&mut self, i: usize) -> Result<Point, OracleError>;

    /// Some point of `[s]` in the set for which `exclude` is false.
    fn refine(&mut self, s: &Word, exclude: &dyn Fn(&Point) -> bool) -> Result<Point, OracleError>;
}

/// Words of block `b`: length `b` over a finite alphabet, or `len + Σ letters = b`
/// over `ω`. Every word lies in exactly one finite block.
fn block_words(alphabet: Alphabet, b: usize) -> Vec<Word> {
    match alphabet {
        Alphabet::Finite(_) => alphabet.words_of_length(b).expect("finite"),
        Alphabet::Countable => {
            fn go(rest: usize, prefix: &mut Vec<Letter>, out: &mut Vec<Word>) {
                if rest == 0 {
                    out.push(Word::new(prefix.clone()));
                    return;
                }
                for cost in 1..=rest {
                    prefix.push((cost - 1) as Letter);
                    go(rest - cost, prefix, out);
                    prefix.pop();
                }
            }
            let mut out = Vec::new();
            go(b, &mut Vec::new(), &mut out);
            out
        }
    }
}

/// All points of `X^ω` that are eventually equal to `tail`; dense in `X^ω`.
///
/// The enumeration lists canonical stems block by block (see the block order
/// above), shuffling each block with the seed when one is given.
#[derive(Debug, Clone)]
pub struct EventuallyConstant {
    alphabet: Alphabet,
    tail: Letter,
    seed: Option<u64>,
    blocks: Vec<Vec<Point>>,
}

impl EventuallyConstant {
    pub fn new(alphabet: Alphabet, tail: Letter, seed: Option<u64>) -> Result<Self> {
        alphabet.check_letter(tail)?;
        if alphabet == Alphabet::Finite(1) {
            return Err(Error::Precondition("a one-letter space has a single point".into()));
        }
        Ok(EventuallyConstant {
            alphabet,
            tail,
            seed,
            blocks: Vec::new(),
        })
    }

    fn block(&mut self, b: usize) -> &[Point] {
        while self.blocks.len() <= b {
            let idx = self.blocks.len();
            let mut points: Vec<Point> = block_words(self.alphabet, idx)
                .into_iter()
                .filter(|w| w.last() != Some(self.tail))
                .map(|w| Point::new(w, self.tail))
                .collect();
            if let Some(seed) = self.seed {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(((self.tail as u64) << 32) | idx as u64);
                points.shuffle(&mut rng);
            }
            self.blocks.push(points);
        }
        &self.blocks[b]
    }
}

impl DenseOracle for EventuallyConstant {
    fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    fn enumerate(&mut self, mut i: usize) -> Result<Point, OracleError> {
        let mut b = 0;
        loop {
            let block = self.block(b);
            if i < block.len() {
                return Ok(block[i].clone());
            }
            i -= block.len();
            b += 1;
        }
    }

    fn refine(&mut self, s: &Word, exclude: &dyn Fn(&Point) -> bool) -> Result<Point, OracleError> {
        // Excluded sets are finite, so the search stops.
        for b in 0.. {
            for u in block_words(self.alphabet, b) {
                let candidate = Point::new(s.concat(&u), self.tail);
                if !exclude(&candidate) {
                    return Ok(candidate);
                }
            }
        }
        unreachable!()
    }
}

/// A finite list of points standing in for a dense set. `refine` fails with
/// [`OracleError::Exhausted`] once the sample has nothing left in a cell.
#[derive(Debug, Clone)]
pub struct FiniteSample {
    alphabet: Alphabet,
    points: Vec<Point>,
}

impl FiniteSample {
    pub fn new(alphabet: Alphabet, points: Vec<Point>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for (index, p) in points.iter().enumerate() {
            alphabet.check_point(p)?;
            if !seen.insert(p) {
                return Err(OracleError::NotInjective {
                    index,
                    point: p.clone(),
                }
                .into());
            }
        }
        Ok(FiniteSample { alphabet, points })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }
}

impl DenseOracle for FiniteSample {
    fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    fn enumerate(&mut self, i: usize) -> Result<Point, OracleError> {
        self.points
            .get(i)
            .cloned()
            .ok_or(OracleError::EnumerationEnded(i))
    }

    fn refine(&mut self, s: &Word, exclude: &dyn Fn(&Point) -> bool) -> Result<Point, OracleError> {
        self.points
            .iter()
            .find(|p| in_basic_open(s, p) && !exclude(p))
            .cloned()
            .ok_or_else(|| OracleError::Exhausted(s.clone()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Init,
    Forth,
    Back,
}

/// One extension: the scheduled point, the partner found for it and the
/// agreement depth `k` that drove the choice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub direction: Direction,
    pub scheduled: Point,
    pub partner: Point,
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BnfState {
    current: PartialMap,
    step: usize,
    transcript: Vec<TranscriptEntry>,
}

impl BnfState {
    pub fn current(&self) -> &PartialMap {
        &self.current
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn transcript(&self) -> &[TranscriptEntry] {
        &self.transcript
    }

    pub fn into_map(self) -> PartialMap {
        self.current
    }
}

/// Partner for `new` given pairs `(x, y)` of the partial isometry, drawn from
/// `oracle` and avoiding `exclude`. Returns the partner and the depth `k`.
fn choose_partner<'a>(
    pairs: impl Iterator<Item = (&'a Point, &'a Point)> + Clone,
    new: &Point,
    oracle: &mut dyn DenseOracle,
    exclude: &dyn Fn(&Point) -> bool,
) -> Result<(Point, Option<usize>)> {
    let best = pairs.clone().map(|(x, _)| distance(x, new)).max();
    let k = match best {
        None => return Ok((oracle.refine(&Word::empty(), exclude)?, None)),
        Some(LogDistance::Infinite) => return Err(Error::AlreadyInDomain(new.clone())),
        Some(LogDistance::Exponent(k)) => k,
    };
    let good: Vec<&Point> = pairs
        .filter(|(x, _)| distance(x, new) == LogDistance::Exponent(k))
        .map(|(_, y)| y)
        .collect();
    let stem = good[0].prefix(k);
    let used: BTreeSet<Letter> = good.iter().map(|y| y.at(k)).collect();
    let fresh: Vec<Letter> = match oracle.alphabet() {
        Alphabet::Finite(q) => (0..q).filter(|l| !used.contains(l)).collect(),
        Alphabet::Countable => vec![(0..).find(|l| !used.contains(l)).expect("ω is infinite")],
    };
    if fresh.is_empty() {
        return Err(Error::NoFreshLetter { index: k });
    }
    let mut last_err = None;
    for letter in fresh {
        match oracle.refine(&stem.child(letter), exclude) {
            Ok(p) => return Ok((p, Some(k))),
            Err(e @ OracleError::Exhausted(_)) => last_err = Some(e),
            Err(e) => return Err(e.into()),
        }
    }
    Err(last_err.expect("at least one letter tried").into())
}

/// `f_0 = {(a_0, b_0)}`.
pub fn bnf_init(a: &mut dyn DenseOracle, b: &mut dyn DenseOracle) -> Result<BnfState> {
    let a0 = a.enumerate(0)?;
    let b0 = b.enumerate(0)?;
    let mut current = PartialMap::new();
    current.insert(a0.clone(), b0.clone())?;
    Ok(BnfState {
        current,
        step: 0,
        transcript: vec![TranscriptEntry {
            direction: Direction::Init,
            scheduled: a0,
            partner: b0,
            k: None,
        }],
    })
}

/// Adds `a` to the domain, with its partner drawn from `b_oracle`.
pub fn bnf_forth(state: &mut BnfState, a: Point, b_oracle: &mut dyn DenseOracle) -> Result<()> {
    if state.current.in_domain(&a) {
        return Err(Error::AlreadyInDomain(a));
    }
    let current = &state.current;
    let (b, k) = choose_partner(
        current.pairs().iter().map(|(x, y)| (x, y)),
        &a,
        b_oracle,
        &|p| current.in_range(p),
    )?;
    if let Verdict::Violation(w) = check_new_pair(current, &a, &b, Property::Isometry) {
        return Err(Error::BrokenInvariant(w));
    }
    state.current.insert(a.clone(), b.clone())?;
    state.transcript.push(TranscriptEntry {
        direction: Direction::Forth,
        scheduled: a,
        partner: b,
        k,
    });
    Ok(())
}

/// Adds `b` to the range, with its preimage drawn from `a_oracle`.
pub fn bnf_back(state: &mut BnfState, b: Point, a_oracle: &mut dyn DenseOracle) -> Result<()> {
    if state.current.in_range(&b) {
        return Err(Error::AlreadyInRange(b));
    }
    let current = &state.current;
    let (a, k) = choose_partner(
        current.pairs().iter().map(|(x, y)| (y, x)),
        &b,
        a_oracle,
        &|p| current.in_domain(p),
    )
    .map_err(|e| match e {
        Error::AlreadyInDomain(p) => Error::AlreadyInRange(p),
        e => e,
    })?;
    if let Verdict::Violation(w) = check_new_pair(current, &a, &b, Property::Isometry) {
        return Err(Error::BrokenInvariant(w));
    }
    state.current.insert(a.clone(), b.clone())?;
    state.transcript.push(TranscriptEntry {
        direction: Direction::Back,
        scheduled: b,
        partner: a,
        k,
    });
    Ok(())
}

/// Runs steps `1..=n` after [`bnf_init`], stopping at the first error. The
/// returned state is the last consistent one.
pub fn bnf_run_until_failure(
    a: &mut dyn DenseOracle,
    b: &mut dyn DenseOracle,
    n: usize,
) -> (Option<BnfState>, Option<Error>) {
    let mut state = match bnf_init(a, b) {
        Ok(s) => s,
        Err(e) => return (None, Some(e)),
    };
    let mut seen_a: BTreeSet<Point> = state.current.domain().cloned().collect();
    let mut seen_b: BTreeSet<Point> = state.current.range().cloned().collect();
    for i in 1..=n {
        let step = (|| -> Result<()> {
            let ai = a.enumerate(i)?;
            if !seen_a.insert(ai.clone()) {
                return Err(OracleError::NotInjective { index: i, point: ai }.into());
            }
            if !state.current.in_domain(&ai) {
                bnf_forth(&mut state, ai, b)?;
            }
            let bi = b.enumerate(i)?;
            if !seen_b.insert(bi.clone()) {
                return Err(OracleError::NotInjective { index: i, point: bi }.into());
            }
            if !state.current.in_range(&bi) {
                bnf_back(&mut state, bi, a)?;
            }
            Ok(())
        })();
        if let Err(e) = step {
            return (Some(state), Some(e));
        }
        state.step = i;
    }
    (Some(state), None)
}

pub fn bnf_run_state(a: &mut dyn DenseOracle, b: &mut dyn DenseOracle, n: usize) -> Result<BnfState> {
    match bnf_run_until_failure(a, b, n) {
        (Some(state), None) => Ok(state),
        (_, Some(e)) => Err(e),
        (None, None) => unreachable!(),
    }
}

/// A partial isometry whose domain covers `a_0..a_n` and range covers `b_0..b_n`.
pub fn bnf_run(a: &mut dyn DenseOracle, b: &mut dyn DenseOracle, n: usize) -> Result<PartialMap> {
    bnf_run_state(a, b, n).map(BnfState::into_map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lipschitz::check_isometry;

    fn w<const N: usize>(letters: [Letter; N]) -> Word {
        Word::from(letters)
    }

    fn ev(tail: Letter) -> EventuallyConstant {
        EventuallyConstant::new(Alphabet::BINARY, tail, Some(11)).unwrap()
    }

    #[test]
    fn countable_blocks_partition_words() {
        let mut all = BTreeSet::new();
        for b in 0..7 {
            let block = block_words(Alphabet::Countable, b);
            assert_eq!(block.len(), if b == 0 { 1 } else { 1 << (b - 1) });
            for word in block {
                assert_eq!(word.len() + word.iter().map(|&l| l as usize).sum::<usize>(), b);
                assert!(all.insert(word));
            }
        }
    }

    #[test]
    fn enumeration_is_injective_and_in_set() {
        let mut o = EventuallyConstant::new(Alphabet::Countable, 0, Some(3)).unwrap();
        let pts: Vec<Point> = (0..300).map(|i| o.enumerate(i).unwrap()).collect();
        let set: BTreeSet<&Point> = pts.iter().collect();
        assert_eq!(set.len(), pts.len());
        assert!(pts.iter().all(|p| p.tail() == 0));
    }

    #[test]
    fn refine_lands_in_cell_and_avoids() {
        let mut o = ev(1);
        let s = w([0, 1, 0]);
        let first = o.refine(&s, &|_| false).unwrap();
        assert!(in_basic_open(&s, &first));
        let second = o.refine(&s, &|p| p == &first).unwrap();
        assert_ne!(first, second);
        assert!(in_basic_open(&s, &second));
        assert_eq!(second.tail(), 1);
    }

    #[test]
    fn init_pairs_first_points() {
        let (mut a, mut b) = (ev(0), ev(1));
        let state = bnf_init(&mut a, &mut b).unwrap();
        assert_eq!(
            state.current().pairs(),
            &[(a.enumerate(0).unwrap(), b.enumerate(0).unwrap())]
        );
        let (mut a1, mut a2) = (ev(0), ev(0));
        let state = bnf_init(&mut a1, &mut a2).unwrap();
        let (x, y) = &state.current().pairs()[0];
        assert_eq!(x, y);
    }

    #[test]
    fn forth_matches_distance() {
        let a0 = Point::new(w([0, 0, 0]), 0);
        let b0 = Point::new(w([1, 1, 0, 1]), 1);
        let mut state = BnfState {
            current: PartialMap::from_pairs([(a0.clone(), b0.clone())]).unwrap(),
            ..Default::default()
        };
        let a = Point::new(w([0, 0, 1]), 0);
        assert_eq!(distance(&a, &a0), LogDistance::Exponent(2));
        let mut b_oracle = ev(1);
        bnf_forth(&mut state, a.clone(), &mut b_oracle).unwrap();
        let b = state.current().get(&a).unwrap();
        assert_eq!(distance(b, &b0), LogDistance::Exponent(2));
        assert_eq!(state.transcript().last().unwrap().k, Some(2));

        let err = bnf_forth(&mut state, a, &mut b_oracle).unwrap_err();
        assert!(matches!(err, Error::AlreadyInDomain(_)));
    }

    #[test]
    fn back_matches_distance() {
        let a0 = Point::new(w([0, 0, 0]), 0);
        let b0 = Point::new(w([1, 1, 0, 1]), 1);
        let mut state = BnfState {
            current: PartialMap::from_pairs([(a0.clone(), b0.clone())]).unwrap(),
            ..Default::default()
        };
        let b = Point::new(w([1, 1, 1]), 1);
        assert_eq!(distance(&b, &b0), LogDistance::Exponent(2));
        let mut a_oracle = ev(0);
        bnf_back(&mut state, b.clone(), &mut a_oracle).unwrap();
        let a = state.current().preimage(&b).unwrap();
        assert_eq!(distance(a, &a0), LogDistance::Exponent(2));
        let err = bnf_back(&mut state, b, &mut a_oracle).unwrap_err();
        assert!(matches!(err, Error::AlreadyInRange(_)));
    }

    #[test]
    fn ternary_fresh_letter() {
        // two maximally good points use image letters 0 and 1 at k = 1
        let t = Alphabet::Finite(3);
        let mut state = BnfState {
            current: PartialMap::from_pairs([
                (Point::new(w([0, 0]), 0), Point::new(w([2, 0]), 0)),
                (Point::new(w([0, 1]), 0), Point::new(w([2, 1]), 0)),
            ])
            .unwrap(),
            ..Default::default()
        };
        let mut oracle = EventuallyConstant::new(t, 0, None).unwrap();
        let a = Point::new(w([0, 2]), 0);
        bnf_forth(&mut state, a.clone(), &mut oracle).unwrap();
        let b = state.current().get(&a).unwrap();
        assert_eq!(b.prefix(2), w([2, 2]));
        assert!(check_isometry(state.current()).is_ok());
    }

    #[test]
    fn binary_pigeonhole_reports_no_fresh_letter() {
        let mut state = BnfState {
            current: PartialMap::from_pairs([
                (Point::new(w([0]), 0), Point::new(w([0]), 0)),
                (Point::new(w([1]), 0), Point::new(w([1]), 0)),
            ])
            .unwrap(),
            ..Default::default()
        };
        let mut oracle = EventuallyConstant::new(Alphabet::Finite(2), 0, None).unwrap();
        // k = 1 and a single maximally good image leaves a letter free
        bnf_forth(&mut state, Point::new(w([1, 1]), 0), &mut oracle).unwrap();
        let mut state = BnfState {
            current: PartialMap::from_pairs([
                (Point::new(w([0, 0]), 0), Point::new(w([0]), 0)),
                (Point::new(w([0, 1]), 0), Point::new(w([1]), 0)),
            ])
            .unwrap(),
            ..Default::default()
        };
        // not an isometry: both images split at index 0 although the domain agrees there
        let err = bnf_forth(&mut state, Point::new(w([1]), 0), &mut oracle).unwrap_err();
        assert_eq!(err, Error::NoFreshLetter { index: 0 });
    }

    #[test]
    fn run_zero_steps() {
        let (mut a, mut b) = (ev(0), ev(1));
        let m = bnf_run(&mut a, &mut b, 0).unwrap();
        assert_eq!(m.len(), 1);
    }

    #[test]
    fn run_same_set() {
        let mut a = EventuallyConstant::new(Alphabet::BINARY, 0, Some(5)).unwrap();
        let mut b = EventuallyConstant::new(Alphabet::BINARY, 0, Some(5)).unwrap();
        let m = bnf_run(&mut a, &mut b, 100).unwrap();
        assert!(check_isometry(&m).is_ok());
        assert!((101..=202).contains(&m.len()));
        for i in 0..=100 {
            assert!(m.in_domain(&a.enumerate(i).unwrap()));
            assert!(m.in_range(&b.enumerate(i).unwrap()));
        }
    }

    #[test]
    fn run_over_omega() {
        let mut a = EventuallyConstant::new(Alphabet::Countable, 0, Some(1)).unwrap();
        let mut b = EventuallyConstant::new(Alphabet::Countable, 3, Some(2)).unwrap();
        let m = bnf_run(&mut a, &mut b, 60).unwrap();
        assert!(check_isometry(&m).is_ok());
    }

    struct Repeating;

    impl DenseOracle for Repeating {
        fn alphabet(&self) -> Alphabet {
            Alphabet::BINARY
        }
        fn enumerate(&mut self, _: usize) -> Result<Point, OracleError> {
            Ok(Point::constant(0))
        }
        fn refine(&mut self, s: &Word, _: &dyn Fn(&Point) -> bool) -> Result<Point, OracleError> {
            Ok(Point::new(s.clone(), 0))
        }
    }

    #[test]
    fn duplicate_enumeration_is_an_error() {
        let mut b = ev(1);
        let err = bnf_run(&mut Repeating, &mut b, 3).unwrap_err();
        assert!(matches!(err, Error::Oracle(OracleError::NotInjective { index: 1, .. })));
        let dup = FiniteSample::new(Alphabet::BINARY, vec![Point::constant(0), Point::constant(0)]);
        assert!(dup.is_err());
    }

    #[test]
    fn finite_sample_runs_out() {
        let pts = vec![Point::constant(0), Point::new(w([1]), 0)];
        let mut a = FiniteSample::new(Alphabet::BINARY, pts.clone()).unwrap();
        let mut b = FiniteSample::new(Alphabet::BINARY, pts).unwrap();
        let (state, err) = bnf_run_until_failure(&mut a, &mut b, 5);
        assert!(state.is_some());
        assert!(matches!(err, Some(Error::Oracle(_))));
    }

    #[test]
    fn transcript_serializes() {
        let (mut a, mut b) = (ev(0), ev(1));
        let state = bnf_run_state(&mut a, &mut b, 3).unwrap();
        let json = serde_json::to_value(state.transcript()).unwrap();
        assert_eq!(json[0]["direction"], "init");
        assert!(json.as_array().unwrap().len() >= 4);
    }
}
