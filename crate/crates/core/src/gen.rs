//! Seeded generators for points, maps, homomorphisms, trees and samples.
//!
//! Every randomized consumer draws from its own ChaCha stream of a single
//! 64-bit seed, so adding draws in one module never shifts another.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lipschitz::{self, PartialMap, Property, TreeHom, Verdict};
use crate::prefix::{Alphabet, Letter, Point, Word, WordTree};
use crate::slalom::WidthProfile;

/// Fixed labels for independent random streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Metric = 1,
    Homs = 2,
    Families = 3,
    Slaloms = 4,
    Trees = 5,
    Conditions = 6,
    Oracles = 7,
    Antichains = 8,
}

pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

pub fn random_word<R: Rng + ?Sized>(rng: &mut R, letters: u32, len: usize) -> Word {
    (0..len)
        .map(|_| rng.gen_range(0..letters))
        .collect::<Vec<Letter>>()
        .into()
}

/// A point with a stem of length at most `max_stem` and letters below `letters`.
pub fn random_point<R: Rng + ?Sized>(rng: &mut R, letters: u32, max_stem: usize) -> Point {
    let len = rng.gen_range(0..=max_stem);
    let stem = random_word(rng, letters, len);
    Point::new(stem, rng.gen_range(0..letters))
}

/// A homomorphism defined exactly on `tree`, sending each node to its
/// parent's image extended by a random letter below `out_letters`.
pub fn random_hom_on_tree<R: Rng + ?Sized>(
    rng: &mut R,
    tree: &WordTree,
    input: Alphabet,
    output: Alphabet,
    out_letters: u32,
) -> TreeHom {
    let mut nodes: Vec<&Word> = tree.nodes().collect();
    nodes.sort_by(|a, b| a.shortlex_cmp(b));
    let mut entries = BTreeMap::new();
    entries.insert(Word::empty(), Word::empty());
    for node in nodes {
        if let Some(parent) = node.parent() {
            let image = entries[&parent].child(rng.gen_range(0..out_letters));
            entries.insert(node.clone(), image);
        }
    }
    let depth = tree.height().unwrap_or(0);
    TreeHom::table(input, output, depth, entries).expect("random tables are homomorphisms")
}

/// A uniformly random total homomorphism of `k^{≤depth}` into `k^{≤depth}`.
pub fn random_total_hom<R: Rng + ?Sized>(rng: &mut R, k: u32, depth: usize) -> TreeHom {
    let alphabet = Alphabet::Finite(k);
    let full: WordTree = alphabet
        .words_up_to(depth)
        .expect("finite alphabet")
        .into_iter()
        .collect();
    random_hom_on_tree(rng, &full, alphabet, alphabet, k)
}

/// A binary tree of height `depth` whose level `n` has between 1 and `c(n)`
/// nodes.
pub fn random_width_tree<R: Rng + ?Sized>(rng: &mut R, corset: &WidthProfile, depth: usize) -> WordTree {
    let mut tree = WordTree::new();
    let mut level = vec![Word::empty()];
    tree.insert(&Word::empty());
    for n in 1..=depth {
        let mut candidates: Vec<Word> = level.iter().flat_map(|w| [w.child(0), w.child(1)]).collect();
        candidates.shuffle(rng);
        let cap = corset.at(n).min(candidates.len() as u128) as usize;
        let keep = rng.gen_range(1..=cap.max(1));
        candidates.truncate(keep);
        for w in &candidates {
            tree.insert(w);
        }
        level = candidates;
    }
    tree
}

/// Like [`random_point`] but with a fixed tail letter when `tail` is given.
pub fn random_point_with_tail<R: Rng + ?Sized>(
    rng: &mut R,
    letters: u32,
    max_stem: usize,
    tail: Option<Letter>,
) -> Point {
    match tail {
        None => random_point(rng, letters, max_stem),
        Some(t) => {
            let len = rng.gen_range(0..=max_stem);
            Point::new(random_word(rng, letters, len), t)
        }
    }
}

/// Grows a random finite partial Lipschitz injection over letters below
/// `letters` by rejection, stopping at `size` pairs or after `attempts` draws.
pub fn random_condition<R: Rng + ?Sized>(
    rng: &mut R,
    size: usize,
    letters: u32,
    max_stem: usize,
    tail: Option<Letter>,
    attempts: usize,
) -> PartialMap {
    let mut map = PartialMap::new();
    for _ in 0..attempts {
        if map.len() >= size {
            break;
        }
        let a = random_point_with_tail(rng, letters, max_stem, tail);
        let b = random_point_with_tail(rng, letters, max_stem, tail);
        if map.in_domain(&a) || map.in_range(&b) {
            continue;
        }
        if lipschitz::check_new_pair(&map, &a, &b, Property::Lipschitz) == Verdict::Ok {
            map.insert(a, b).expect("fresh domain point");
        }
    }
    map
}
